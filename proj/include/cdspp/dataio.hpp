#ifndef CDSPP_DATAIO_HPP
#define CDSPP_DATAIO_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cdspp/matrix.hpp"
#include "cdspp/pipeline.hpp"

namespace cdspp {

/// Feature files hold one sample per text row as comma-separated decimals;
/// in memory samples are columns, so loading transposes. Values are written
/// with 17 significant digits, which round-trips doubles bit-exactly, and
/// parsed independent of the process locale. Error positions are 1-based.
FeatureMatrix load_features(const std::string& path);
void save_features(const FeatureMatrix& features, const std::string& path);

/// One non-negative integer per line; an empty file is an empty list.
std::vector<int> load_labels(const std::string& path);
void save_labels(std::span<const int> labels, const std::string& path);

/// Everything needed to locate a two-domain dataset. Feature and label paths
/// are resolved relative to the manifest file's directory when loading.
struct DatasetManifest {
    std::string name;
    std::string source_features;
    std::string source_labels;
    std::size_t source_dim = 0;
    std::string target_features;
    std::string target_labels;
    std::size_t target_dim = 0;
    std::size_t classes = 0;
    std::optional<std::size_t> pca_components;
};

DatasetManifest load_manifest(const std::string& path);
void save_manifest(const DatasetManifest& manifest, const std::string& path);

struct Dataset {
    DatasetManifest manifest;
    FeatureMatrix source_features;
    std::vector<int> source_labels;
    FeatureMatrix target_features;
    std::vector<int> target_labels;
};

/// Loads the manifest and every file it names, then cross-checks the declared
/// dimensions, label counts, and class range against the actual contents.
Dataset load_dataset(const std::string& manifest_path);

/// Versioned key-value text with one section per list field. The volatile
/// [timing] section is written last so that the leading bytes of two runs
/// with identical inputs compare equal.
void save_report(const RunReport& report, const std::string& path);
RunReport load_report(const std::string& path);

/// The deterministic leading region of a serialized report: everything up to
/// the [timing] section.
std::string report_stable_prefix(const std::string& report_text);

/// Reads a whole file; IoError when it cannot be opened.
std::string read_text_file(const std::string& path);

}  // namespace cdspp

#endif  // CDSPP_DATAIO_HPP

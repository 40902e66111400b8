#include "cdspp/dataio.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string_view>
#include <system_error>

#include <json.hpp>

#include "cdspp/errors.hpp"

namespace cdspp {

namespace {

std::string_view trimmed(std::string_view text) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) {
        text.remove_prefix(1);
    }
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
        text.remove_suffix(1);
    }
    return text;
}

std::string format_double(double value) {
    char buffer[48];
    const auto [end, ec] =
        std::to_chars(buffer, buffer + sizeof(buffer), value, std::chars_format::general, 17);
    return {buffer, end};
}

double parse_double(std::string_view field, std::size_t line, std::size_t column) {
    const std::string_view body = trimmed(field);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
    if (ec != std::errc{} || ptr != body.data() + body.size() || body.empty()) {
        throw ParseError(line, column, "expected a number, got '" + std::string(body) + "'");
    }
    if (!std::isfinite(value)) throw NonFinite(line, column);
    return value;
}

long long parse_integer(std::string_view field, std::size_t line, std::size_t column) {
    const std::string_view body = trimmed(field);
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
    if (ec != std::errc{} || ptr != body.data() + body.size() || body.empty()) {
        throw ParseError(line, column, "expected an integer, got '" + std::string(body) + "'");
    }
    return value;
}

std::ofstream open_for_write(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    return out;
}

void finish_write(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw IoError("write failed for '" + path + "'");
}

// Lines of a text file with their 1-based numbers, blank lines dropped.
std::vector<std::pair<std::size_t, std::string>> numbered_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::vector<std::pair<std::size_t, std::string>> lines;
    std::string line;
    for (std::size_t number = 1; std::getline(in, line); ++number) {
        if (trimmed(line).empty()) continue;
        lines.emplace_back(number, line);
    }
    return lines;
}

std::vector<std::string_view> split_fields(const std::string& line) {
    std::vector<std::string_view> fields;
    const std::string_view view(line);
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = view.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(view.substr(start));
            return fields;
        }
        fields.push_back(view.substr(start, comma - start));
        start = comma + 1;
    }
}

}  // namespace

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

FeatureMatrix load_features(const std::string& path) {
    const auto lines = numbered_lines(path);
    if (lines.empty()) return {};

    const std::size_t dim = split_fields(lines.front().second).size();
    FeatureMatrix features(dim, lines.size());
    for (std::size_t sample = 0; sample < lines.size(); ++sample) {
        const auto& [number, line] = lines[sample];
        const std::vector<std::string_view> fields = split_fields(line);
        if (fields.size() != dim) throw RaggedRows(number);
        for (std::size_t f = 0; f < dim; ++f) {
            features(f, sample) = parse_double(fields[f], number, f + 1);
        }
    }
    return features;
}

void save_features(const FeatureMatrix& features, const std::string& path) {
    std::ofstream out = open_for_write(path);
    for (std::size_t sample = 0; sample < features.cols(); ++sample) {
        for (std::size_t f = 0; f < features.rows(); ++f) {
            if (f > 0) out << ',';
            out << format_double(features(f, sample));
        }
        out << '\n';
    }
    finish_write(out, path);
}

std::vector<int> load_labels(const std::string& path) {
    const auto lines = numbered_lines(path);
    std::vector<int> labels;
    labels.reserve(lines.size());
    for (const auto& [number, line] : lines) {
        const long long value = parse_integer(line, number, 1);
        if (value < 0) throw NegativeLabel(number);
        labels.push_back(static_cast<int>(value));
    }
    return labels;
}

void save_labels(std::span<const int> labels, const std::string& path) {
    std::ofstream out = open_for_write(path);
    for (int label : labels) out << label << '\n';
    finish_write(out, path);
}

DatasetManifest load_manifest(const std::string& path) {
    DatasetManifest manifest;
    try {
        const nlohmann::json doc = nlohmann::json::parse(read_text_file(path));
        manifest.name = doc.at("name").get<std::string>();
        manifest.classes = doc.at("classes").get<std::size_t>();
        const nlohmann::json& source = doc.at("source");
        manifest.source_features = source.at("features").get<std::string>();
        manifest.source_labels = source.at("labels").get<std::string>();
        manifest.source_dim = source.at("dim").get<std::size_t>();
        const nlohmann::json& target = doc.at("target");
        manifest.target_features = target.at("features").get<std::string>();
        manifest.target_labels = target.at("labels").get<std::string>();
        manifest.target_dim = target.at("dim").get<std::size_t>();
        if (doc.contains("pca_components") && !doc.at("pca_components").is_null()) {
            manifest.pca_components = doc.at("pca_components").get<std::size_t>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw IoError("manifest '" + path + "': " + e.what());
    }
    if (manifest.classes == 0) {
        throw InvalidArgument("manifest '" + path + "' declares no classes");
    }
    if (manifest.pca_components && *manifest.pca_components == 0) {
        throw InvalidArgument("manifest '" + path + "' asks for zero principal components");
    }
    return manifest;
}

void save_manifest(const DatasetManifest& manifest, const std::string& path) {
    nlohmann::json doc;
    doc["name"] = manifest.name;
    doc["classes"] = manifest.classes;
    doc["source"] = {{"features", manifest.source_features},
                     {"labels", manifest.source_labels},
                     {"dim", manifest.source_dim}};
    doc["target"] = {{"features", manifest.target_features},
                     {"labels", manifest.target_labels},
                     {"dim", manifest.target_dim}};
    if (manifest.pca_components) doc["pca_components"] = *manifest.pca_components;
    std::ofstream out = open_for_write(path);
    out << doc.dump(2) << '\n';
    finish_write(out, path);
}

namespace {

void check_domain(const std::string& which, const FeatureMatrix& features,
                  const std::vector<int>& labels, std::size_t declared_dim,
                  std::size_t classes) {
    if (features.rows() != declared_dim) {
        throw DimensionMismatch(which + " features: manifest declares dimension " +
                                std::to_string(declared_dim) + " but the file has " +
                                std::to_string(features.rows()));
    }
    if (features.cols() != labels.size()) {
        throw DimensionMismatch(which + ": " + std::to_string(features.cols()) +
                                " samples but " + std::to_string(labels.size()) + " labels");
    }
    for (int label : labels) {
        if (static_cast<std::size_t>(label) >= classes) {
            throw InvalidArgument(which + " labels contain class " + std::to_string(label) +
                                  " but the manifest declares " + std::to_string(classes) +
                                  " classes");
        }
    }
}

}  // namespace

Dataset load_dataset(const std::string& manifest_path) {
    Dataset dataset;
    dataset.manifest = load_manifest(manifest_path);
    const std::filesystem::path base = std::filesystem::path(manifest_path).parent_path();
    const auto resolve = [&base](const std::string& relative) {
        return (base / relative).string();
    };

    dataset.source_features = load_features(resolve(dataset.manifest.source_features));
    dataset.source_labels = load_labels(resolve(dataset.manifest.source_labels));
    dataset.target_features = load_features(resolve(dataset.manifest.target_features));
    dataset.target_labels = load_labels(resolve(dataset.manifest.target_labels));

    check_domain("source", dataset.source_features, dataset.source_labels,
                 dataset.manifest.source_dim, dataset.manifest.classes);
    check_domain("target", dataset.target_features, dataset.target_labels,
                 dataset.manifest.target_dim, dataset.manifest.classes);
    return dataset;
}

namespace {

constexpr std::string_view kReportMagic = "cdspp report ";
constexpr std::string_view kReportVersion = "1";

}  // namespace

void save_report(const RunReport& report, const std::string& path) {
    std::ofstream out = open_for_write(path);
    out << kReportMagic << kReportVersion << '\n';
    out << "[run]\n";
    out << "mode = " << report.mode << '\n';
    out << "seed = " << report.seed << '\n';
    out << "classes = " << report.classes << '\n';
    out << "d = " << report.config.d << '\n';
    out << "alpha = " << format_double(report.config.alpha) << '\n';
    out << "iterations = " << report.config.iterations << '\n';
    out << "rank_warning = " << (report.rank_warning ? 1 : 0) << '\n';
    out << "has_truth = " << (report.has_truth ? 1 : 0) << '\n';
    out << "final_accuracy = " << format_double(report.final_accuracy) << '\n';
    out << "[eigenvalues]\n";
    for (double value : report.eigenvalues) out << format_double(value) << '\n';
    out << "[selected_counts]\n";
    for (std::size_t count : report.selected_counts) out << count << '\n';
    out << "[iteration_accuracy]\n";
    for (double value : report.iteration_accuracy) out << format_double(value) << '\n';
    out << "[predictions]\n";
    for (int label : report.predictions) out << label << '\n';
    out << "[timing]\n";
    out << "fit_seconds = " << format_double(report.times.fit_seconds) << '\n';
    out << "classify_seconds = " << format_double(report.times.classify_seconds) << '\n';
    finish_write(out, path);
}

RunReport load_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw IoError("report '" + path + "' is empty");
    std::string_view header = trimmed(line);
    if (!header.starts_with(kReportMagic)) {
        throw IoError("'" + path + "' is not a report file");
    }
    header.remove_prefix(kReportMagic.size());
    if (header != kReportVersion) throw VersionMismatch(std::string(header));

    RunReport report;
    std::string section;
    const auto scalar = [&](std::string_view key, std::string_view value, std::size_t number) {
        if (key == "mode") {
            report.mode = std::string(value);
        } else if (key == "seed") {
            report.seed = static_cast<std::uint64_t>(parse_integer(value, number, 1));
        } else if (key == "classes") {
            report.classes = static_cast<std::size_t>(parse_integer(value, number, 1));
        } else if (key == "d") {
            report.config.d = static_cast<std::size_t>(parse_integer(value, number, 1));
        } else if (key == "alpha") {
            report.config.alpha = parse_double(value, number, 1);
        } else if (key == "iterations") {
            report.config.iterations = static_cast<std::size_t>(parse_integer(value, number, 1));
        } else if (key == "rank_warning") {
            report.rank_warning = parse_integer(value, number, 1) != 0;
        } else if (key == "has_truth") {
            report.has_truth = parse_integer(value, number, 1) != 0;
        } else if (key == "final_accuracy") {
            report.final_accuracy = parse_double(value, number, 1);
        } else if (key == "fit_seconds") {
            report.times.fit_seconds = parse_double(value, number, 1);
        } else if (key == "classify_seconds") {
            report.times.classify_seconds = parse_double(value, number, 1);
        } else {
            throw ParseError(number, 1, "unknown report key '" + std::string(key) + "'");
        }
    };

    for (std::size_t number = 2; std::getline(in, line); ++number) {
        const std::string_view body = trimmed(line);
        if (body.empty()) continue;
        if (body.front() == '[') {
            if (body.back() != ']') throw ParseError(number, 1, "unterminated section header");
            section = std::string(body.substr(1, body.size() - 2));
            if (section != "run" && section != "eigenvalues" && section != "selected_counts" &&
                section != "iteration_accuracy" && section != "predictions" &&
                section != "timing") {
                throw ParseError(number, 1, "unknown report section '" + section + "'");
            }
            continue;
        }
        if (section == "run" || section == "timing") {
            const std::size_t equals = body.find('=');
            if (equals == std::string_view::npos) {
                throw ParseError(number, 1, "expected 'key = value'");
            }
            scalar(trimmed(body.substr(0, equals)), trimmed(body.substr(equals + 1)), number);
        } else if (section == "eigenvalues") {
            report.eigenvalues.push_back(parse_double(body, number, 1));
        } else if (section == "selected_counts") {
            report.selected_counts.push_back(
                static_cast<std::size_t>(parse_integer(body, number, 1)));
        } else if (section == "iteration_accuracy") {
            report.iteration_accuracy.push_back(parse_double(body, number, 1));
        } else if (section == "predictions") {
            report.predictions.push_back(static_cast<int>(parse_integer(body, number, 1)));
        } else {
            throw ParseError(number, 1, "content before the first section");
        }
    }
    return report;
}

std::string report_stable_prefix(const std::string& report_text) {
    const std::string marker = "\n[timing]";
    const std::size_t at = report_text.find(marker);
    if (at == std::string::npos) return report_text;
    return report_text.substr(0, at + 1);
}

}  // namespace cdspp

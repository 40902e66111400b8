#ifndef CDSPP_PIPELINE_HPP
#define CDSPP_PIPELINE_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cdspp/classify.hpp"
#include "cdspp/matrix.hpp"
#include "cdspp/model.hpp"
#include "cdspp/rng.hpp"

namespace cdspp {

struct LabeledSet {
    FeatureMatrix features;
    std::vector<int> labels;
};

/// Experiment split protocol: per-class counts drawn without replacement.
/// per_class_target_unlabelled empty means "every remaining sample".
struct SplitSpec {
    std::uint64_t seed = 0;
    std::size_t per_class_source = 0;
    std::size_t per_class_target_labelled = 0;
    std::optional<std::size_t> per_class_target_unlabelled;
};

/// Index sets into the pools the split was drawn from, each sorted ascending.
/// target_labelled and target_unlabelled are disjoint by construction.
struct SplitIndices {
    std::vector<std::size_t> source;
    std::vector<std::size_t> target_labelled;
    std::vector<std::size_t> target_unlabelled;
};

struct PseudoLabelSelection {
    std::size_t pool_index = 0;
    int label = -1;
    double confidence = 0.0;
};

/// One round of pseudo-label selection: the top target_count most confident
/// predictions over the whole unlabelled pool, confidences non-increasing.
struct PseudoLabelBatch {
    std::size_t iteration = 0;     // k, 1-based
    std::size_t target_count = 0;  // floor(k * n_u / T)
    std::vector<PseudoLabelSelection> selected;
};

struct StageTimes {
    double fit_seconds = 0.0;
    double classify_seconds = 0.0;
};

/// Everything a run writes down. iteration_accuracy is empty for supervised
/// runs and holds one entry per refit (k = 1..T) for semi-supervised runs;
/// accuracies are NaN-free only when ground truth was provided (has_truth).
struct RunReport {
    std::string mode;  // "supervised" or "semi-supervised"
    std::uint64_t seed = 0;
    CdsppConfig config;  // with d resolved to the class count when it was 0
    std::size_t classes = 0;
    bool rank_warning = false;
    std::vector<double> eigenvalues;  // spectrum of the final model
    std::vector<std::size_t> selected_counts;
    std::vector<double> iteration_accuracy;
    double final_accuracy = 0.0;
    bool has_truth = false;
    std::vector<int> predictions;  // one label per unlabelled column
    StageTimes times;              // volatile; excluded from determinism checks
};

struct PipelineResult {
    ProjectionPair pair;
    RunReport report;
    std::vector<PseudoLabelBatch> batches;  // semi-supervised only
};

struct RunOptions {
    std::vector<int> evaluation_labels;  // sealed truth for the unlabelled pool;
                                         // read only after predictions are made
    bool class_balanced_selection = false;
    bool strict_classes = false;
    std::uint64_t seed = 0;  // echoed into the report
};

/// floor(k * n_u / T), capped at n_u. The cap is redundant for k <= T but
/// pins the schedule for out-of-range queries too.
std::size_t selection_count(std::size_t k, std::size_t n_u, std::size_t iterations);

/// Fits on the labelled data, projects the unlabelled pool with Pt, and
/// classifies against class means of the labelled data.
PipelineResult run_supervised(const LabeledSet& source, const LabeledSet& target,
                              const FeatureMatrix& unlabelled, const CdsppConfig& config,
                              const RunOptions& options = {});

/// Iterative selective pseudo-labelling: initial fit on labelled data; each
/// round k relabels the whole pool, keeps the floor(k*n_u/T) most confident
/// pseudo-labels, and refits with them as labelled target samples. The final
/// predictions come from the last refit. An empty pool degenerates to
/// run_supervised.
PipelineResult run_semi_supervised(const LabeledSet& source, const LabeledSet& target,
                                   const FeatureMatrix& unlabelled,
                                   const CdsppConfig& config,
                                   const RunOptions& options = {});

/// Draws per-class index sets from one pool: source indices first, then the
/// disjoint labelled/unlabelled target split, consuming `rng` in that fixed
/// order (classes ascending).
SplitIndices generate_split(const FeatureMatrix& features, std::span<const int> labels,
                            const SplitSpec& spec, Rng& rng);

/// Seeds an RNG from spec.seed and delegates to the overload above.
SplitIndices generate_split(const FeatureMatrix& features, std::span<const int> labels,
                            const SplitSpec& spec);

struct BenchmarkTask {
    std::string name;
    FeatureMatrix source_features;
    std::vector<int> source_labels;
    FeatureMatrix target_features;
    std::vector<int> target_labels;
};

struct TaskSummary {
    std::string name;
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation (n-1); 0 for one trial
    std::vector<double> trial_accuracy;
};

struct BenchmarkTable {
    std::vector<TaskSummary> tasks;
    double average_mean = 0.0;
    double average_stddev = 0.0;  // mean of the per-task deviations
};

struct BenchmarkOptions {
    bool semi_supervised = true;
    bool class_balanced_selection = false;
    bool strict_classes = false;
    std::size_t jobs = 1;  // worker threads over (task, trial) cells
    std::optional<std::size_t> pca_components;  // per-domain reduction, if set
};

/// Runs `trials` seeded splits per task (trial i uses spec.seed + i), scoring
/// accuracy on each unlabelled pool. Cell order in the output is fixed by
/// (task, trial) regardless of scheduling.
BenchmarkTable run_benchmark(std::span<const BenchmarkTask> tasks, std::size_t trials,
                             const SplitSpec& spec, const CdsppConfig& config,
                             const BenchmarkOptions& options = {});

/// Principal-component reduction of one domain's pool. The component count
/// is clamped to what the data supports; when nothing would be removed the
/// input comes back unchanged.
FeatureMatrix reduce_features(const FeatureMatrix& features, std::size_t components);

}  // namespace cdspp

#endif  // CDSPP_PIPELINE_HPP

#include "cdspp/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>
#include <utility>

#include "cdspp/errors.hpp"
#include "cdspp/linalg.hpp"

namespace cdspp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::size_t class_count_of(std::span<const int> src_labels, std::span<const int> tgt_labels) {
    int top = -1;
    for (int label : src_labels) top = std::max(top, label);
    for (int label : tgt_labels) top = std::max(top, label);
    return top < 0 ? 0 : static_cast<std::size_t>(top) + 1;
}

CdsppConfig resolve_config(const CdsppConfig& config, std::size_t classes) {
    CdsppConfig out = config;
    if (out.d == 0) out.d = classes;
    return out;
}

void check_truth(const RunOptions& options, const FeatureMatrix& unlabelled) {
    if (!options.evaluation_labels.empty() &&
        options.evaluation_labels.size() != unlabelled.cols()) {
        throw DimensionMismatch("evaluation labels: " +
                                std::to_string(options.evaluation_labels.size()) +
                                " for " + std::to_string(unlabelled.cols()) + " samples");
    }
}

std::vector<int> labels_of(const std::vector<Prediction>& predictions) {
    std::vector<int> out(predictions.size());
    for (std::size_t i = 0; i < predictions.size(); ++i) out[i] = predictions[i].label;
    return out;
}

double accuracy_of(std::span<const int> predicted, std::span<const int> truth) {
    if (predicted.empty()) return 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (predicted[i] == truth[i]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

ClassMeans means_for(const ProjectionPair& pair, const LabeledSet& source,
                     const FeatureMatrix& target_features, std::span<const int> target_labels,
                     std::size_t classes, bool strict) {
    const FeatureMatrix zs = project(pair.ps, source.features);
    const FeatureMatrix zt = project(pair.pt, target_features);
    return compute_class_means(zs, source.labels, zt, target_labels, classes, strict);
}

// Top `count` pool indices in confidence order. The balanced policy first
// grants each predicted class floor(k * n_c / T) of its own most confident
// samples (the sum of those quotas never exceeds `count`), then fills the
// remainder globally; the result stays in rank order either way.
std::vector<std::size_t> pick_indices(const std::vector<Prediction>& predictions,
                                      std::size_t k, std::size_t iterations,
                                      std::size_t count, bool class_balanced,
                                      std::size_t classes) {
    const std::vector<std::size_t> order = confidence_rank(predictions);
    if (!class_balanced) {
        return {order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count)};
    }

    std::vector<std::size_t> per_class(classes, 0);
    for (const Prediction& p : predictions) ++per_class[static_cast<std::size_t>(p.label)];
    std::vector<std::size_t> quota(classes);
    for (std::size_t c = 0; c < classes; ++c) {
        quota[c] = selection_count(k, per_class[c], iterations);
    }

    std::vector<char> taken(predictions.size(), 0);
    std::size_t have = 0;
    std::vector<std::size_t> used(classes, 0);
    for (std::size_t idx : order) {
        const auto c = static_cast<std::size_t>(predictions[idx].label);
        if (used[c] < quota[c]) {
            ++used[c];
            taken[idx] = 1;
            ++have;
        }
    }
    for (std::size_t idx : order) {
        if (have >= count) break;
        if (!taken[idx]) {
            taken[idx] = 1;
            ++have;
        }
    }

    std::vector<std::size_t> chosen;
    chosen.reserve(count);
    for (std::size_t idx : order) {
        if (taken[idx]) chosen.push_back(idx);
    }
    return chosen;
}

}  // namespace

std::size_t selection_count(std::size_t k, std::size_t n_u, std::size_t iterations) {
    if (iterations == 0) throw InvalidArgument("selection schedule needs at least one round");
    return std::min(k * n_u / iterations, n_u);
}

PipelineResult run_supervised(const LabeledSet& source, const LabeledSet& target,
                              const FeatureMatrix& unlabelled, const CdsppConfig& config,
                              const RunOptions& options) {
    check_truth(options, unlabelled);
    const std::size_t classes = class_count_of(source.labels, target.labels);
    const CdsppConfig resolved = resolve_config(config, classes);

    PipelineResult result;
    RunReport& report = result.report;
    report.mode = "supervised";
    report.seed = options.seed;
    report.config = resolved;
    report.classes = classes;

    const auto fit_start = Clock::now();
    result.pair = fit(source.features, target.features, source.labels, target.labels, resolved);
    report.times.fit_seconds = seconds_since(fit_start);
    report.eigenvalues = result.pair.eigenvalues;
    report.rank_warning = result.pair.rank_warning;

    if (unlabelled.cols() > 0) {
        const auto classify_start = Clock::now();
        const ClassMeans means = means_for(result.pair, source, target.features, target.labels,
                                           classes, options.strict_classes);
        const FeatureMatrix zu = project(result.pair.pt, unlabelled);
        report.predictions = labels_of(predict_batch(means, zu));
        report.times.classify_seconds = seconds_since(classify_start);
    }

    report.has_truth = !options.evaluation_labels.empty();
    if (report.has_truth) {
        report.final_accuracy = accuracy_of(report.predictions, options.evaluation_labels);
    }
    return result;
}

PipelineResult run_semi_supervised(const LabeledSet& source, const LabeledSet& target,
                                   const FeatureMatrix& unlabelled, const CdsppConfig& config,
                                   const RunOptions& options) {
    check_truth(options, unlabelled);
    if (config.iterations == 0) throw InvalidArgument("iterations must be at least 1");

    if (unlabelled.cols() == 0) {
        PipelineResult result = run_supervised(source, target, unlabelled, config, options);
        result.report.mode = "semi-supervised";
        return result;
    }

    const std::size_t classes = class_count_of(source.labels, target.labels);
    const CdsppConfig resolved = resolve_config(config, classes);
    const std::size_t n_u = unlabelled.cols();
    const std::size_t rounds = resolved.iterations;

    PipelineResult result;
    RunReport& report = result.report;
    report.mode = "semi-supervised";
    report.seed = options.seed;
    report.config = resolved;
    report.classes = classes;
    report.has_truth = !options.evaluation_labels.empty();

    auto fit_start = Clock::now();
    result.pair = fit(source.features, target.features, source.labels, target.labels, resolved);
    report.times.fit_seconds += seconds_since(fit_start);
    report.rank_warning = result.pair.rank_warning;

    auto classify_start = Clock::now();
    ClassMeans means = means_for(result.pair, source, target.features, target.labels, classes,
                                 options.strict_classes);
    std::vector<Prediction> predictions =
        predict_batch(means, project(result.pair.pt, unlabelled));
    report.times.classify_seconds += seconds_since(classify_start);

    for (std::size_t k = 1; k <= rounds; ++k) {
        const std::size_t count = selection_count(k, n_u, rounds);
        const std::vector<std::size_t> chosen = pick_indices(
            predictions, k, rounds, count, options.class_balanced_selection, classes);

        PseudoLabelBatch batch;
        batch.iteration = k;
        batch.target_count = count;
        batch.selected.reserve(chosen.size());
        std::vector<int> pseudo_labels = target.labels;
        pseudo_labels.reserve(target.labels.size() + chosen.size());
        for (std::size_t idx : chosen) {
            batch.selected.push_back({idx, predictions[idx].label, predictions[idx].confidence});
            pseudo_labels.push_back(predictions[idx].label);
        }
        result.batches.push_back(std::move(batch));
        report.selected_counts.push_back(count);

        const FeatureMatrix augmented = hcat(target.features, select_columns(unlabelled, chosen));

        fit_start = Clock::now();
        result.pair = fit(source.features, augmented, source.labels, pseudo_labels, resolved);
        report.times.fit_seconds += seconds_since(fit_start);
        report.rank_warning = report.rank_warning || result.pair.rank_warning;

        classify_start = Clock::now();
        means = means_for(result.pair, source, augmented, pseudo_labels, classes,
                          options.strict_classes);
        predictions = predict_batch(means, project(result.pair.pt, unlabelled));
        report.times.classify_seconds += seconds_since(classify_start);

        if (report.has_truth) {
            report.iteration_accuracy.push_back(
                accuracy_of(labels_of(predictions), options.evaluation_labels));
        }
    }

    report.eigenvalues = result.pair.eigenvalues;
    report.predictions = labels_of(predictions);
    if (report.has_truth) {
        report.final_accuracy = report.iteration_accuracy.back();
    }
    return result;
}

SplitIndices generate_split(const FeatureMatrix& features, std::span<const int> labels,
                            const SplitSpec& spec, Rng& rng) {
    if (labels.size() != features.cols()) {
        throw DimensionMismatch("split pool: " + std::to_string(labels.size()) +
                                " labels for " + std::to_string(features.cols()) + " columns");
    }
    int top = -1;
    for (int label : labels) {
        if (label < 0) throw InvalidArgument("split pool labels must be non-negative");
        top = std::max(top, label);
    }
    const std::size_t classes = top < 0 ? 0 : static_cast<std::size_t>(top) + 1;
    std::vector<std::vector<std::size_t>> buckets(classes);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        buckets[static_cast<std::size_t>(labels[i])].push_back(i);
    }

    SplitIndices out;
    if (spec.per_class_source > 0) {
        for (std::size_t c = 0; c < classes; ++c) {
            if (buckets[c].size() < spec.per_class_source) {
                throw InsufficientSamples(static_cast<int>(c), spec.per_class_source,
                                          buckets[c].size());
            }
            std::vector<std::size_t> pool = buckets[c];
            rng.shuffle(pool);
            out.source.insert(out.source.end(), pool.begin(),
                              pool.begin() + static_cast<std::ptrdiff_t>(spec.per_class_source));
        }
    }

    const std::size_t labelled = spec.per_class_target_labelled;
    const bool take_rest = !spec.per_class_target_unlabelled.has_value();
    const std::size_t unlabelled = spec.per_class_target_unlabelled.value_or(0);
    if (labelled > 0 || take_rest || unlabelled > 0) {
        for (std::size_t c = 0; c < classes; ++c) {
            const std::size_t required = labelled + unlabelled;
            if (buckets[c].size() < required) {
                throw InsufficientSamples(static_cast<int>(c), required, buckets[c].size());
            }
            std::vector<std::size_t> pool = buckets[c];
            rng.shuffle(pool);
            out.target_labelled.insert(out.target_labelled.end(), pool.begin(),
                                       pool.begin() + static_cast<std::ptrdiff_t>(labelled));
            const std::size_t rest = take_rest ? pool.size() - labelled : unlabelled;
            out.target_unlabelled.insert(
                out.target_unlabelled.end(), pool.begin() + static_cast<std::ptrdiff_t>(labelled),
                pool.begin() + static_cast<std::ptrdiff_t>(labelled + rest));
        }
    }

    std::sort(out.source.begin(), out.source.end());
    std::sort(out.target_labelled.begin(), out.target_labelled.end());
    std::sort(out.target_unlabelled.begin(), out.target_unlabelled.end());
    return out;
}

SplitIndices generate_split(const FeatureMatrix& features, std::span<const int> labels,
                            const SplitSpec& spec) {
    Rng rng(spec.seed);
    return generate_split(features, labels, spec, rng);
}

namespace {

std::vector<int> labels_at(std::span<const int> labels, std::span<const std::size_t> indices) {
    std::vector<int> out;
    out.reserve(indices.size());
    for (std::size_t idx : indices) out.push_back(labels[idx]);
    return out;
}

std::vector<std::size_t> all_indices(std::size_t n) {
    std::vector<std::size_t> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = i;
    return out;
}

}  // namespace

FeatureMatrix reduce_features(const FeatureMatrix& features, std::size_t components) {
    const std::size_t usable =
        std::min({components, features.rows(), features.cols() > 0 ? features.cols() - 1 : 0});
    if (usable == 0 || usable >= features.rows()) return features;
    const PcaModel pca = pca_fit(features, usable);
    return pca_transform(pca, features);
}

BenchmarkTable run_benchmark(std::span<const BenchmarkTask> tasks, std::size_t trials,
                             const SplitSpec& spec, const CdsppConfig& config,
                             const BenchmarkOptions& options) {
    if (trials == 0) throw InvalidArgument("trials must be at least 1");

    struct Prepared {
        FeatureMatrix source;
        FeatureMatrix target;
    };
    std::vector<Prepared> prepared;
    prepared.reserve(tasks.size());
    for (const BenchmarkTask& task : tasks) {
        if (options.pca_components) {
            prepared.push_back({reduce_features(task.source_features, *options.pca_components),
                                reduce_features(task.target_features, *options.pca_components)});
        } else {
            prepared.push_back({task.source_features, task.target_features});
        }
    }

    const std::size_t cells = tasks.size() * trials;
    std::vector<double> accuracy(cells, 0.0);

    auto run_cell = [&](std::size_t cell) {
        const std::size_t t = cell / trials;
        const std::size_t i = cell % trials;
        const BenchmarkTask& task = tasks[t];

        Rng rng(spec.seed + i);
        std::vector<std::size_t> source_idx;
        if (spec.per_class_source > 0) {
            SplitSpec source_spec;
            source_spec.per_class_source = spec.per_class_source;
            source_spec.per_class_target_unlabelled = 0;
            source_idx =
                generate_split(prepared[t].source, task.source_labels, source_spec, rng).source;
        } else {
            source_idx = all_indices(prepared[t].source.cols());
        }
        SplitSpec target_spec;
        target_spec.per_class_target_labelled = spec.per_class_target_labelled;
        target_spec.per_class_target_unlabelled = spec.per_class_target_unlabelled;
        const SplitIndices target_idx =
            generate_split(prepared[t].target, task.target_labels, target_spec, rng);

        const LabeledSet source{select_columns(prepared[t].source, source_idx),
                                labels_at(task.source_labels, source_idx)};
        const LabeledSet target{select_columns(prepared[t].target, target_idx.target_labelled),
                                labels_at(task.target_labels, target_idx.target_labelled)};
        const FeatureMatrix unlabelled =
            select_columns(prepared[t].target, target_idx.target_unlabelled);

        RunOptions run_options;
        run_options.evaluation_labels = labels_at(task.target_labels, target_idx.target_unlabelled);
        run_options.class_balanced_selection = options.class_balanced_selection;
        run_options.strict_classes = options.strict_classes;
        run_options.seed = spec.seed + i;

        const PipelineResult result =
            options.semi_supervised
                ? run_semi_supervised(source, target, unlabelled, config, run_options)
                : run_supervised(source, target, unlabelled, config, run_options);
        accuracy[cell] = result.report.final_accuracy;
    };

    const std::size_t jobs = std::min(std::max<std::size_t>(options.jobs, 1), std::max<std::size_t>(cells, 1));
    if (jobs <= 1 || cells <= 1) {
        for (std::size_t cell = 0; cell < cells; ++cell) run_cell(cell);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        auto worker = [&] {
            while (true) {
                const std::size_t cell = next.fetch_add(1);
                if (cell >= cells) break;
                try {
                    run_cell(cell);
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    break;
                }
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (std::thread& thread : pool) thread.join();
        if (failure) std::rethrow_exception(failure);
    }

    BenchmarkTable table;
    table.tasks.reserve(tasks.size());
    for (std::size_t t = 0; t < tasks.size(); ++t) {
        TaskSummary summary;
        summary.name = tasks[t].name;
        summary.trial_accuracy.assign(accuracy.begin() + static_cast<std::ptrdiff_t>(t * trials),
                                      accuracy.begin() + static_cast<std::ptrdiff_t>((t + 1) * trials));
        double sum = 0.0;
        for (double a : summary.trial_accuracy) sum += a;
        summary.mean = sum / static_cast<double>(trials);
        if (trials > 1) {
            double squares = 0.0;
            for (double a : summary.trial_accuracy) {
                squares += (a - summary.mean) * (a - summary.mean);
            }
            summary.stddev = std::sqrt(squares / static_cast<double>(trials - 1));
        }
        table.average_mean += summary.mean;
        table.average_stddev += summary.stddev;
        table.tasks.push_back(std::move(summary));
    }
    if (!tasks.empty()) {
        table.average_mean /= static_cast<double>(tasks.size());
        table.average_stddev /= static_cast<double>(tasks.size());
    }
    return table;
}

}  // namespace cdspp

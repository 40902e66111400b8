#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cdspp/dataio.hpp"
#include "cdspp/errors.hpp"
#include "cdspp/pipeline.hpp"
#include "cdspp/synthetic.hpp"

namespace {

using namespace cdspp;

// Last stage announced by a handler; on failure the diagnostic names it.
std::string g_stage = "parsing flags";

void stage(const std::string& name) { g_stage = name; }

int exit_code_for(ErrorCategory category) {
    switch (category) {
        case ErrorCategory::usage: return 2;
        case ErrorCategory::io: return 3;
        case ErrorCategory::numeric: return 4;
        case ErrorCategory::data: return 5;
    }
    return 1;
}

std::string percent(double fraction) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.2f", fraction * 100.0);
    return buffer;
}

const CLI::Validator kAtLeastOne(
    [](std::string& input) -> std::string {
        char* end = nullptr;
        const unsigned long long value = std::strtoull(input.c_str(), &end, 10);
        if (end == input.c_str() || *end != '\0' || value == 0) {
            return "'" + input + "' is not a positive integer";
        }
        return {};
    },
    "UINT>=1", "at-least-one");

struct SplitFlags {
    std::size_t source_per_class = 0;  // 0 keeps the whole source pool
    std::size_t labelled_per_class = 3;
    std::optional<std::size_t> unlabelled_per_class;  // unset: all remaining
};

void add_split_flags(CLI::App* cmd, SplitFlags& flags) {
    cmd->add_option("--source-per-class", flags.source_per_class,
                    "Source samples drawn per class (0 keeps the whole pool)")
        ->capture_default_str();
    cmd->add_option("--labelled-per-class", flags.labelled_per_class,
                    "Labelled target samples drawn per class")
        ->capture_default_str();
    cmd->add_option("--unlabelled-per-class", flags.unlabelled_per_class,
                    "Unlabelled target samples drawn per class (default: all remaining)");
}

struct ModelFlags {
    std::size_t d = 0;  // 0 resolves to the class count
    double alpha = 10.0;
    std::size_t iterations = 5;
    std::optional<std::size_t> pca;
    bool class_balanced = false;
    bool strict_classes = false;
};

void add_model_flags(CLI::App* cmd, ModelFlags& flags) {
    cmd->add_option("--d", flags.d, "Subspace dimension (default: the class count)")
        ->check(kAtLeastOne);
    cmd->add_option("--alpha", flags.alpha, "Regularization weight")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("-T,--iterations", flags.iterations, "Pseudo-labelling rounds")
        ->check(kAtLeastOne)
        ->capture_default_str();
    cmd->add_option("--pca", flags.pca,
                    "Reduce each domain to this many principal components "
                    "(50 when given without a value)")
        ->expected(0, 1)
        ->default_str("50")
        ->check(kAtLeastOne);
    cmd->add_flag("--class-balanced-selection", flags.class_balanced,
                  "Spread pseudo-label selection across predicted classes");
    cmd->add_flag("--strict-classes", flags.strict_classes,
                  "Fail when a class has no labelled sample instead of skipping it");
}

CdsppConfig model_config(const ModelFlags& flags) {
    CdsppConfig config;
    config.d = flags.d;
    config.alpha = flags.alpha;
    config.iterations = flags.iterations;
    return config;
}

// Flag wins over the manifest's suggestion.
std::optional<std::size_t> resolve_pca(const ModelFlags& flags, const DatasetManifest& manifest) {
    if (flags.pca) return flags.pca;
    return manifest.pca_components;
}

struct PreparedRun {
    LabeledSet source;
    LabeledSet target;
    FeatureMatrix unlabelled;
    std::vector<int> truth;
};

PreparedRun prepare_run(const Dataset& dataset, const SplitFlags& flags,
                        std::optional<std::size_t> pca, std::uint64_t seed) {
    FeatureMatrix source_pool = dataset.source_features;
    FeatureMatrix target_pool = dataset.target_features;
    if (pca) {
        stage("reducing dimensionality");
        source_pool = reduce_features(source_pool, *pca);
        target_pool = reduce_features(target_pool, *pca);
    }

    stage("splitting the pools");
    Rng rng(seed);
    std::vector<std::size_t> source_idx;
    if (flags.source_per_class > 0) {
        SplitSpec spec;
        spec.per_class_source = flags.source_per_class;
        spec.per_class_target_unlabelled = 0;
        source_idx = generate_split(source_pool, dataset.source_labels, spec, rng).source;
    } else {
        source_idx.resize(source_pool.cols());
        for (std::size_t i = 0; i < source_idx.size(); ++i) source_idx[i] = i;
    }
    SplitSpec spec;
    spec.per_class_target_labelled = flags.labelled_per_class;
    spec.per_class_target_unlabelled = flags.unlabelled_per_class;
    const SplitIndices target_idx = generate_split(target_pool, dataset.target_labels, spec, rng);

    PreparedRun run;
    run.source.features = select_columns(source_pool, source_idx);
    for (std::size_t i : source_idx) run.source.labels.push_back(dataset.source_labels[i]);
    run.target.features = select_columns(target_pool, target_idx.target_labelled);
    for (std::size_t i : target_idx.target_labelled) {
        run.target.labels.push_back(dataset.target_labels[i]);
    }
    run.unlabelled = select_columns(target_pool, target_idx.target_unlabelled);
    for (std::size_t i : target_idx.target_unlabelled) {
        run.truth.push_back(dataset.target_labels[i]);
    }
    return run;
}

PipelineResult execute(const PreparedRun& run, const std::string& mode,
                       const ModelFlags& flags, std::uint64_t seed) {
    stage("fitting and classifying");
    RunOptions options;
    options.evaluation_labels = run.truth;
    options.class_balanced_selection = flags.class_balanced;
    options.strict_classes = flags.strict_classes;
    options.seed = seed;
    const CdsppConfig config = model_config(flags);
    if (mode == "semi") {
        return run_semi_supervised(run.source, run.target, run.unlabelled, config, options);
    }
    return run_supervised(run.source, run.target, run.unlabelled, config, options);
}

struct RunCli {
    std::string manifest;
    std::string mode = "semi";
    std::uint64_t seed = 0;
    std::string out = "cdspp-report.txt";
    SplitFlags split;
    ModelFlags model;
};

int cmd_run(const RunCli& cli) {
    stage("loading the dataset");
    const Dataset dataset = load_dataset(cli.manifest);
    const std::optional<std::size_t> pca = resolve_pca(cli.model, dataset.manifest);
    const PreparedRun run = prepare_run(dataset, cli.split, pca, cli.seed);
    const PipelineResult result = execute(run, cli.mode, cli.model, cli.seed);
    const RunReport& report = result.report;

    std::cout << "dataset: " << dataset.manifest.name << "\n";
    if (pca) std::cout << "pca components: " << *pca << "\n";
    std::cout << "mode: " << report.mode << "  classes: " << report.classes
              << "  d: " << report.config.d << "  alpha: " << report.config.alpha
              << "  seed: " << report.seed << "\n";
    if (!report.iteration_accuracy.empty()) {
        std::cout << "iteration accuracy:";
        for (double a : report.iteration_accuracy) std::cout << ' ' << percent(a);
        std::cout << "\n";
    }
    if (!report.selected_counts.empty()) {
        std::cout << "selected per round:";
        for (std::size_t c : report.selected_counts) std::cout << ' ' << c;
        std::cout << "\n";
    }
    std::cout << "final accuracy: " << percent(report.final_accuracy) << "\n";
    if (report.rank_warning) {
        std::cout << "note: the usable spectrum was smaller than requested\n";
    }

    stage("writing the report");
    save_report(report, cli.out);
    std::cout << "report: " << cli.out << "\n";
    return 0;
}

struct BenchmarkCli {
    std::vector<std::string> manifests;
    std::string mode = "semi";
    std::uint64_t seed = 0;
    std::size_t trials = 10;
    std::size_t jobs = 0;  // 0: take CDSPP_JOBS, then 1
    std::string out = "benchmark.csv";
    SplitFlags split;
    ModelFlags model;
};

std::size_t resolve_jobs(std::size_t flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("CDSPP_JOBS")) {
        char* end = nullptr;
        const unsigned long parsed = std::strtoul(env, &end, 10);
        if (end == env || *end != '\0' || parsed == 0) {
            throw InvalidArgument("CDSPP_JOBS must be a positive integer, got '" +
                                  std::string(env) + "'");
        }
        return parsed;
    }
    return 1;
}

int cmd_benchmark(const BenchmarkCli& cli) {
    stage("reading the jobs configuration");
    const std::size_t jobs = resolve_jobs(cli.jobs);

    stage("loading the datasets");
    std::vector<BenchmarkTask> tasks;
    tasks.reserve(cli.manifests.size());
    for (const std::string& path : cli.manifests) {
        Dataset dataset = load_dataset(path);
        if (dataset.manifest.classes < 2) {
            throw InvalidArgument("benchmark needs at least two classes, manifest '" + path +
                                  "' declares " + std::to_string(dataset.manifest.classes));
        }
        BenchmarkTask task;
        task.name = dataset.manifest.name;
        const std::optional<std::size_t> pca = resolve_pca(cli.model, dataset.manifest);
        if (pca) {
            stage("reducing dimensionality");
            task.source_features = reduce_features(dataset.source_features, *pca);
            task.target_features = reduce_features(dataset.target_features, *pca);
        } else {
            task.source_features = std::move(dataset.source_features);
            task.target_features = std::move(dataset.target_features);
        }
        task.source_labels = std::move(dataset.source_labels);
        task.target_labels = std::move(dataset.target_labels);
        tasks.push_back(std::move(task));
        stage("loading the datasets");
    }

    stage("running the trials");
    SplitSpec spec;
    spec.seed = cli.seed;
    spec.per_class_source = cli.split.source_per_class;
    spec.per_class_target_labelled = cli.split.labelled_per_class;
    spec.per_class_target_unlabelled = cli.split.unlabelled_per_class;
    BenchmarkOptions options;
    options.semi_supervised = cli.mode == "semi";
    options.class_balanced_selection = cli.model.class_balanced;
    options.strict_classes = cli.model.strict_classes;
    options.jobs = jobs;
    const BenchmarkTable table =
        run_benchmark(tasks, cli.trials, spec, model_config(cli.model), options);

    std::size_t width = 4;
    for (const TaskSummary& task : table.tasks) width = std::max(width, task.name.size());
    std::printf("%-*s  %s\n", static_cast<int>(width), "task", "accuracy");
    for (const TaskSummary& task : table.tasks) {
        std::printf("%-*s  %s (%s)\n", static_cast<int>(width), task.name.c_str(),
                    percent(task.mean).c_str(), percent(task.stddev).c_str());
    }
    std::printf("%-*s  %s (%s)\n", static_cast<int>(width), "Avg",
                percent(table.average_mean).c_str(), percent(table.average_stddev).c_str());

    stage("writing the table");
    std::ofstream out(cli.out);
    if (!out) throw IoError("cannot write '" + cli.out + "'");
    out << "task,mean,stddev,trials\n";
    for (const TaskSummary& task : table.tasks) {
        out << task.name << ',' << task.mean << ',' << task.stddev << ',' << cli.trials << '\n';
    }
    out << "Avg," << table.average_mean << ',' << table.average_stddev << ',' << cli.trials
        << '\n';
    out.flush();
    if (!out) throw IoError("write failed for '" + cli.out + "'");
    std::cout << "table: " << cli.out << "\n";
    return 0;
}

struct SplitCli {
    std::string manifest;
    std::uint64_t seed = 0;
    std::string out = "split.json";
    SplitFlags split;
};

int cmd_split(const SplitCli& cli) {
    stage("loading the dataset");
    const Dataset dataset = load_dataset(cli.manifest);

    stage("splitting the pools");
    Rng rng(cli.seed);
    nlohmann::json doc;
    doc["seed"] = cli.seed;
    if (cli.split.source_per_class > 0) {
        SplitSpec spec;
        spec.per_class_source = cli.split.source_per_class;
        spec.per_class_target_unlabelled = 0;
        doc["source"] =
            generate_split(dataset.source_features, dataset.source_labels, spec, rng).source;
    } else {
        std::vector<std::size_t> everything(dataset.source_features.cols());
        for (std::size_t i = 0; i < everything.size(); ++i) everything[i] = i;
        doc["source"] = everything;
    }
    SplitSpec spec;
    spec.per_class_target_labelled = cli.split.labelled_per_class;
    spec.per_class_target_unlabelled = cli.split.unlabelled_per_class;
    const SplitIndices idx =
        generate_split(dataset.target_features, dataset.target_labels, spec, rng);
    doc["target_labelled"] = idx.target_labelled;
    doc["target_unlabelled"] = idx.target_unlabelled;

    stage("writing the split");
    std::ofstream out(cli.out);
    if (!out) throw IoError("cannot write '" + cli.out + "'");
    out << doc.dump(2) << '\n';
    out.flush();
    if (!out) throw IoError("write failed for '" + cli.out + "'");
    std::cout << "split: " << cli.out << "\n";
    return 0;
}

struct ExportCli {
    std::string manifest;
    std::string mode = "semi";
    std::uint64_t seed = 0;
    std::string out = "embedding.csv";
    SplitFlags split;
    ModelFlags model;
};

int cmd_export_embedding(const ExportCli& cli) {
    stage("loading the dataset");
    const Dataset dataset = load_dataset(cli.manifest);
    const PreparedRun run =
        prepare_run(dataset, cli.split, resolve_pca(cli.model, dataset.manifest), cli.seed);
    const PipelineResult result = execute(run, cli.mode, cli.model, cli.seed);

    stage("projecting the samples");
    const FeatureMatrix zs = project(result.pair.ps, run.source.features);
    const FeatureMatrix zt = project(result.pair.pt, run.target.features);
    FeatureMatrix zu;
    if (run.unlabelled.cols() > 0) zu = project(result.pair.pt, run.unlabelled);

    stage("writing the embedding");
    std::ofstream out(cli.out);
    if (!out) throw IoError("cannot write '" + cli.out + "'");
    const std::size_t d = zs.rows();
    for (std::size_t j = 0; j < d; ++j) out << 'x' << j << ',';
    out << "domain,label,pseudo_label\n";

    const auto write_row = [&](const FeatureMatrix& z, std::size_t column,
                               const std::string& domain, int label,
                               const std::string& pseudo) {
        char buffer[48];
        for (std::size_t j = 0; j < d; ++j) {
            std::snprintf(buffer, sizeof(buffer), "%.17g", z(j, column));
            out << buffer << ',';
        }
        out << domain << ',' << label << ',' << pseudo << '\n';
    };
    for (std::size_t i = 0; i < zs.cols(); ++i) {
        write_row(zs, i, "source", run.source.labels[i], "");
    }
    for (std::size_t i = 0; i < zt.cols(); ++i) {
        write_row(zt, i, "target", run.target.labels[i], "");
    }
    const bool pseudo_known = cli.mode == "semi";
    for (std::size_t i = 0; i < zu.cols(); ++i) {
        write_row(zu, i, "unlabelled", run.truth[i],
                  pseudo_known ? std::to_string(result.report.predictions[i]) : "");
    }
    out.flush();
    if (!out) throw IoError("write failed for '" + cli.out + "'");
    std::cout << "embedding: " << cli.out << " (" << zs.cols() + zt.cols() + zu.cols()
              << " rows)\n";
    return 0;
}

struct SynthCli {
    std::string dir = ".";
    std::string name = "synthetic";
    SyntheticSpec spec;
};

int cmd_synth(const SynthCli& cli) {
    stage("generating the fixture");
    const DomainPair pair = generate_synthetic_pair(cli.spec);

    stage("writing the fixture");
    const auto path = [&](const std::string& file) { return cli.dir + "/" + file; };
    save_features(pair.source_features, path(cli.name + "-source.csv"));
    save_labels(pair.source_labels, path(cli.name + "-source-labels.txt"));
    save_features(pair.target_features, path(cli.name + "-target.csv"));
    save_labels(pair.target_labels, path(cli.name + "-target-labels.txt"));

    DatasetManifest manifest;
    manifest.name = cli.name;
    manifest.classes = cli.spec.classes;
    manifest.source_features = cli.name + "-source.csv";
    manifest.source_labels = cli.name + "-source-labels.txt";
    manifest.source_dim = cli.spec.source_dim;
    manifest.target_features = cli.name + "-target.csv";
    manifest.target_labels = cli.name + "-target-labels.txt";
    manifest.target_dim = cli.spec.target_dim;
    save_manifest(manifest, path(cli.name + ".json"));
    std::cout << "manifest: " << path(cli.name + ".json") << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cross-domain structure-preserving projection toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "cdspp 1.0.0");

    RunCli run_cli;
    CLI::App* run_cmd = app.add_subcommand(
        "run", "Fit the projections on one dataset and classify its unlabelled pool");
    run_cmd->add_option("--manifest", run_cli.manifest, "Dataset manifest")->required();
    run_cmd->add_option("--mode", run_cli.mode, "sup: labelled data only; semi: pseudo-labelling")
        ->check(CLI::IsMember({"sup", "semi"}))
        ->capture_default_str();
    run_cmd->add_option("--seed", run_cli.seed, "Split seed")->capture_default_str();
    run_cmd->add_option("--out", run_cli.out, "Report file")->capture_default_str();
    add_split_flags(run_cmd, run_cli.split);
    add_model_flags(run_cmd, run_cli.model);

    BenchmarkCli bench_cli;
    CLI::App* bench_cmd = app.add_subcommand(
        "benchmark", "Run seeded trials over one or more datasets and tabulate accuracy");
    bench_cmd->add_option("--manifest", bench_cli.manifests, "Dataset manifest (repeatable)")
        ->required();
    bench_cmd->add_option("--mode", bench_cli.mode, "sup or semi")
        ->check(CLI::IsMember({"sup", "semi"}))
        ->capture_default_str();
    bench_cmd->add_option("--seed", bench_cli.seed, "Base seed; trial i uses seed + i")
        ->capture_default_str();
    bench_cmd->add_option("--trials", bench_cli.trials, "Trials per task")
        ->check(kAtLeastOne)
        ->capture_default_str();
    bench_cmd->add_option("--jobs", bench_cli.jobs,
                          "Worker threads (default: CDSPP_JOBS, then 1)")
        ->check(kAtLeastOne);
    bench_cmd->add_option("--out", bench_cli.out, "Summary CSV")->capture_default_str();
    add_split_flags(bench_cmd, bench_cli.split);
    add_model_flags(bench_cmd, bench_cli.model);

    SplitCli split_cli;
    CLI::App* split_cmd =
        app.add_subcommand("split", "Draw a seeded per-class split and write the index sets");
    split_cmd->add_option("--manifest", split_cli.manifest, "Dataset manifest")->required();
    split_cmd->add_option("--seed", split_cli.seed, "Split seed")->capture_default_str();
    split_cmd->add_option("--out", split_cli.out, "Index JSON file")->capture_default_str();
    add_split_flags(split_cmd, split_cli.split);

    ExportCli export_cli;
    CLI::App* export_cmd = app.add_subcommand(
        "export-embedding", "Write projected coordinates with domain and label tags");
    export_cmd->add_option("--manifest", export_cli.manifest, "Dataset manifest")->required();
    export_cmd->add_option("--mode", export_cli.mode, "sup or semi")
        ->check(CLI::IsMember({"sup", "semi"}))
        ->capture_default_str();
    export_cmd->add_option("--seed", export_cli.seed, "Split seed")->capture_default_str();
    export_cmd->add_option("--out", export_cli.out, "Embedding CSV")->capture_default_str();
    add_split_flags(export_cmd, export_cli.split);
    add_model_flags(export_cmd, export_cli.model);

    SynthCli synth_cli;
    CLI::App* synth_cmd = app.add_subcommand(
        "synth", "Generate a seeded two-domain fixture and its manifest");
    synth_cmd->add_option("--dir", synth_cli.dir, "Output directory")->capture_default_str();
    synth_cmd->add_option("--name", synth_cli.name, "Dataset name and file prefix")
        ->capture_default_str();
    synth_cmd->add_option("--classes", synth_cli.spec.classes, "Class count")
        ->check(kAtLeastOne)
        ->capture_default_str();
    synth_cmd->add_option("--source-dim", synth_cli.spec.source_dim, "Source feature dimension")
        ->check(kAtLeastOne)
        ->capture_default_str();
    synth_cmd->add_option("--target-dim", synth_cli.spec.target_dim, "Target feature dimension")
        ->check(kAtLeastOne)
        ->capture_default_str();
    synth_cmd->add_option("--source-per-class", synth_cli.spec.source_per_class,
                          "Source samples per class")
        ->check(kAtLeastOne)
        ->capture_default_str();
    synth_cmd->add_option("--target-per-class", synth_cli.spec.target_per_class,
                          "Target samples per class")
        ->check(kAtLeastOne)
        ->capture_default_str();
    synth_cmd->add_option("--jitter", synth_cli.spec.latent_jitter, "Latent jitter")
        ->capture_default_str();
    synth_cmd->add_option("--noise", synth_cli.spec.feature_noise, "Feature noise")
        ->capture_default_str();
    synth_cmd->add_option("--seed", synth_cli.spec.seed, "Generator seed")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    const std::string active = app.get_subcommands().front()->get_name();
    try {
        if (run_cmd->parsed()) return cmd_run(run_cli);
        if (bench_cmd->parsed()) return cmd_benchmark(bench_cli);
        if (split_cmd->parsed()) return cmd_split(split_cli);
        if (export_cmd->parsed()) return cmd_export_embedding(export_cli);
        if (synth_cmd->parsed()) return cmd_synth(synth_cli);
    } catch (const Error& e) {
        std::cerr << "cdspp " << active << ": " << g_stage << ": " << e.what() << "\n";
        return exit_code_for(e.category());
    } catch (const std::exception& e) {
        std::cerr << "cdspp " << active << ": " << g_stage << ": " << e.what() << "\n";
        return 1;
    }
    return 0;
}

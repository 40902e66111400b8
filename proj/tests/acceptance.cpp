// Acceptance gate: every release-blocking property in one binary, one verdict
// line per criterion. Criterion 9 needs externally supplied benchmark data and
// is reported as a skip when that data is absent.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <thread>
#include <vector>

#include "cdspp/dataio.hpp"
#include "cdspp/errors.hpp"
#include "cdspp/graphs.hpp"
#include "cdspp/linalg.hpp"
#include "cdspp/matrix.hpp"
#include "cdspp/model.hpp"
#include "cdspp/pipeline.hpp"
#include "cdspp/rng.hpp"
#include "cdspp/synthetic.hpp"

namespace {

using namespace cdspp;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
    bool pass = false;
    bool skip = false;
    std::string detail;
};

Matrix random_features(std::size_t dim, std::size_t count, Rng& rng) {
    Matrix m(dim, count);
    for (double& v : m.flat()) v = rng.next_gaussian();
    return m;
}

// Random labels with every class present (the first C samples cover 0..C-1).
std::vector<int> covering_labels(std::size_t count, std::size_t classes, Rng& rng) {
    std::vector<int> labels(count);
    for (std::size_t i = 0; i < count; ++i) {
        labels[i] = i < classes ? static_cast<int>(i)
                                : static_cast<int>(rng.next_below(classes));
    }
    return labels;
}

Matrix vstack(const Matrix& top, const Matrix& bottom) {
    Matrix out(top.rows() + bottom.rows(), top.cols());
    for (std::size_t i = 0; i < top.rows(); ++i) {
        for (std::size_t j = 0; j < top.cols(); ++j) out(i, j) = top(i, j);
    }
    for (std::size_t i = 0; i < bottom.rows(); ++i) {
        for (std::size_t j = 0; j < bottom.cols(); ++j) out(top.rows() + i, j) = bottom(i, j);
    }
    return out;
}

std::string fmt(double value, int digits = 3) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.*g", digits, value);
    return buffer;
}

// 1. The pairwise-sum objective and its trace form agree on random instances.
Outcome objective_identity() {
    const auto start = Clock::now();
    Rng rng(101);
    double worst = 0.0;
    const std::size_t instances = 120;
    for (std::size_t i = 0; i < instances; ++i) {
        const std::size_t n_s = 1 + rng.next_below(12);
        const std::size_t n_t = 1 + rng.next_below(8);
        const std::size_t d_s = 1 + rng.next_below(6);
        const std::size_t d_t = 1 + rng.next_below(5);
        const std::size_t classes = 1 + rng.next_below(4);
        const Matrix xs = random_features(d_s, n_s, rng);
        const Matrix xt = random_features(d_t, n_t, rng);
        std::vector<int> ls(n_s), lt(n_t);
        for (int& l : ls) l = static_cast<int>(rng.next_below(classes));
        for (int& l : lt) l = static_cast<int>(rng.next_below(classes));
        const GraphSet graphs = build_graphs(ls, lt);
        const std::size_t k = 1 + rng.next_below(3);
        const Matrix ps = random_features(d_s, k, rng);
        const Matrix pt = random_features(d_t, k, rng);
        const double sum = objective_sum_form(xs, xt, graphs, ps, pt);
        const double tr = objective_trace_form(xs, xt, graphs, ps, pt);
        const double gap = std::abs(sum - tr) / std::max({1.0, std::abs(sum), std::abs(tr)});
        worst = std::max(worst, gap);
    }
    const double elapsed = seconds_since(start);
    Outcome out;
    out.pass = worst <= 1e-8 && elapsed < 5.0;
    out.detail = std::to_string(instances) + " instances, worst relative gap " + fmt(worst) +
                 ", " + fmt(elapsed) + " s";
    return out;
}

// 2. Every fit satisfies the pencil residual bound and metric orthonormality.
Outcome eigenproblem_correctness() {
    Rng rng(202);
    double worst_residual_share = 0.0;
    double worst_gram = 0.0;
    const double alpha = 10.0;
    for (std::size_t i = 0; i < 25; ++i) {
        const std::size_t classes = 2 + rng.next_below(3);
        const std::size_t d_s = 2 + rng.next_below(8);
        const std::size_t d_t = 2 + rng.next_below(6);
        const std::size_t n_s = classes + 3 + rng.next_below(40);
        const std::size_t n_t = classes + 2 + rng.next_below(30);
        const Matrix xs = random_features(d_s, n_s, rng);
        const Matrix xt = random_features(d_t, n_t, rng);
        const std::vector<int> ls = covering_labels(n_s, classes, rng);
        const std::vector<int> lt = covering_labels(n_t, classes, rng);

        CdsppConfig config;
        config.d = classes;
        config.alpha = alpha;
        const ProjectionPair pair = fit(xs, xt, ls, lt, config);

        const Matrix xsn = l2_normalize_columns(xs);
        const Matrix xtn = l2_normalize_columns(xt);
        auto [a, b] = assemble_system(xsn, xtn, ls, lt);
        for (std::size_t j = 0; j < b.rows(); ++j) b(j, j) += alpha;

        const Matrix p = vstack(pair.ps, pair.pt);
        Matrix lambda(pair.eigenvalues.size(), pair.eigenvalues.size());
        for (std::size_t j = 0; j < pair.eigenvalues.size(); ++j) {
            lambda(j, j) = pair.eigenvalues[j];
        }
        const Matrix residual = multiply(a, p) - multiply(multiply(b, p), lambda);
        const double bound =
            1e-6 * (frobenius_norm(a) + frobenius_norm(b) * frobenius_norm(lambda));
        worst_residual_share = std::max(worst_residual_share, frobenius_norm(residual) / bound);

        const Matrix gram = multiply_at_b(p, multiply(b, p));
        double gram_gap = 0.0;
        for (std::size_t r = 0; r < gram.rows(); ++r) {
            for (std::size_t c = 0; c < gram.cols(); ++c) {
                gram_gap = std::max(gram_gap, std::abs(gram(r, c) - (r == c ? 1.0 : 0.0)));
            }
        }
        worst_gram = std::max(worst_gram, gram_gap);
    }

    // timing: one fit on a 100-sample problem
    const std::size_t classes = 3;
    const Matrix xs = random_features(20, 60, rng);
    const Matrix xt = random_features(12, 40, rng);
    const std::vector<int> ls = covering_labels(60, classes, rng);
    const std::vector<int> lt = covering_labels(40, classes, rng);
    CdsppConfig config;
    config.d = classes;
    const auto start = Clock::now();
    (void)fit(xs, xt, ls, lt, config);
    const double fit_seconds = seconds_since(start);

    Outcome out;
    out.pass = worst_residual_share <= 1.0 && worst_gram <= 1e-8 && fit_seconds < 1.0;
    out.detail = "25 fits, residual at " + fmt(worst_residual_share) +
                 " of the bound, orthonormality gap " + fmt(worst_gram) + ", 100-sample fit " +
                 fmt(fit_seconds) + " s";
    return out;
}

// 3. The unregularized trace ratio is stationary at the top eigenvector.
Outcome stationarity() {
    Rng rng(303);
    std::size_t tested = 0;
    double worst_norm = 0.0;
    for (std::size_t attempt = 0; attempt < 400 && tested < 20; ++attempt) {
        const std::size_t classes = 3;
        const std::size_t d_s = 2 + rng.next_below(4);
        const std::size_t d_t = 2 + rng.next_below(3);
        const std::size_t n_s = d_s + classes + 2 + rng.next_below(10);
        const std::size_t n_t = d_t + classes + 2 + rng.next_below(8);
        Matrix xs = random_features(d_s, n_s, rng);
        Matrix xt = random_features(d_t, n_t, rng);
        const std::vector<int> ls = covering_labels(n_s, classes, rng);
        const std::vector<int> lt = covering_labels(n_t, classes, rng);
        xs = l2_normalize_columns(xs);
        xt = l2_normalize_columns(xt);
        const GraphSet graphs = build_graphs(ls, lt);
        const auto [a, b] = assemble_system(xs, xt, graphs);
        try {
            (void)cholesky(b);  // keep only instances whose metric is truly SPD
        } catch (const NotPositiveDefinite&) {
            continue;
        }
        ++tested;

        const EigenResult top = generalized_sym_eig(a, b, 1);
        Matrix ps(d_s, 1), pt(d_t, 1);
        for (std::size_t r = 0; r < d_s; ++r) ps(r, 0) = top.vectors(r, 0);
        for (std::size_t r = 0; r < d_t; ++r) pt(r, 0) = top.vectors(d_s + r, 0);

        const double step = 1e-6;
        double norm_sq = 0.0;
        const auto probe = [&](Matrix& block, std::size_t r) {
            const double saved = block(r, 0);
            block(r, 0) = saved + step;
            const double up = objective_ratio(xs, xt, graphs, ps, pt);
            block(r, 0) = saved - step;
            const double down = objective_ratio(xs, xt, graphs, ps, pt);
            block(r, 0) = saved;
            const double g = (up - down) / (2.0 * step);
            norm_sq += g * g;
        };
        for (std::size_t r = 0; r < d_s; ++r) probe(ps, r);
        for (std::size_t r = 0; r < d_t; ++r) probe(pt, r);
        worst_norm = std::max(worst_norm, std::sqrt(norm_sq));
    }
    Outcome out;
    out.pass = tested >= 20 && worst_norm <= 1e-4;
    out.detail = std::to_string(tested) + " SPD instances, worst gradient norm " +
                 fmt(worst_norm);
    return out;
}

// 4. The solver's regularized ratio beats random metric-orthonormal pairs.
Outcome optimality() {
    Rng rng(404);
    const double alpha = 10.0;
    std::size_t beaten = 0;
    std::size_t draws = 0;
    double smallest_lead = 1e300;
    for (std::size_t i = 0; i < 20; ++i) {
        const std::size_t classes = 3;
        const std::size_t d_s = 3 + rng.next_below(4);
        const std::size_t d_t = 2 + rng.next_below(4);
        const std::size_t n_s = classes + 4 + rng.next_below(12);
        const std::size_t n_t = classes + 3 + rng.next_below(10);
        Matrix xs = random_features(d_s, n_s, rng);
        Matrix xt = random_features(d_t, n_t, rng);
        const std::vector<int> ls = covering_labels(n_s, classes, rng);
        const std::vector<int> lt = covering_labels(n_t, classes, rng);

        CdsppConfig config;
        config.d = 2;
        config.alpha = alpha;
        const ProjectionPair learned = fit(xs, xt, ls, lt, config);

        xs = l2_normalize_columns(xs);
        xt = l2_normalize_columns(xt);
        const GraphSet graphs = build_graphs(ls, lt);
        auto [a, b] = assemble_system(xs, xt, graphs);
        for (std::size_t j = 0; j < b.rows(); ++j) b(j, j) += alpha;
        const double solver_ratio =
            objective_ratio(xs, xt, graphs, learned.ps, learned.pt, alpha);

        const std::size_t total_dim = d_s + d_t;
        const std::size_t k = learned.eigenvalues.size();
        for (std::size_t trial = 0; trial < 200; ++trial) {
            // random pair, Gram-Schmidt in the (B + alpha*I) inner product
            Matrix p(total_dim, k);
            for (double& v : p.flat()) v = rng.next_gaussian();
            for (std::size_t col = 0; col < k; ++col) {
                std::vector<double> v(total_dim);
                for (std::size_t r = 0; r < total_dim; ++r) v[r] = p(r, col);
                for (std::size_t prev = 0; prev < col; ++prev) {
                    double inner = 0.0;
                    for (std::size_t r = 0; r < total_dim; ++r) {
                        double bv = 0.0;
                        for (std::size_t c = 0; c < total_dim; ++c) bv += b(r, c) * p(c, prev);
                        inner += v[r] * bv;
                    }
                    for (std::size_t r = 0; r < total_dim; ++r) v[r] -= inner * p(r, prev);
                }
                double quad = 0.0;
                for (std::size_t r = 0; r < total_dim; ++r) {
                    double bv = 0.0;
                    for (std::size_t c = 0; c < total_dim; ++c) bv += b(r, c) * v[c];
                    quad += v[r] * bv;
                }
                const double scale = 1.0 / std::sqrt(quad);
                for (std::size_t r = 0; r < total_dim; ++r) p(r, col) = v[r] * scale;
            }
            Matrix ps(d_s, k), pt(d_t, k);
            for (std::size_t c = 0; c < k; ++c) {
                for (std::size_t r = 0; r < d_s; ++r) ps(r, c) = p(r, c);
                for (std::size_t r = 0; r < d_t; ++r) pt(r, c) = p(d_s + r, c);
            }
            const double random_ratio = objective_ratio(xs, xt, graphs, ps, pt, alpha);
            ++draws;
            if (solver_ratio >= random_ratio - 1e-12) ++beaten;
            smallest_lead = std::min(smallest_lead, solver_ratio - random_ratio);
        }
    }
    Outcome out;
    out.pass = beaten == draws;
    out.detail = std::to_string(beaten) + "/" + std::to_string(draws) +
                 " random pairs beaten, smallest lead " + fmt(smallest_lead);
    return out;
}

// 5. Pseudo-label counts follow floor(k*n_u/T) and exhaust the pool at k = T.
Outcome schedule_law() {
    for (std::size_t n_u = 1; n_u <= 50; ++n_u) {
        for (std::size_t rounds = 1; rounds <= 7; ++rounds) {
            for (std::size_t k = 1; k <= rounds; ++k) {
                const std::size_t count = selection_count(k, n_u, rounds);
                const auto expected = static_cast<std::size_t>(std::floor(
                    static_cast<double>(k) * static_cast<double>(n_u) /
                    static_cast<double>(rounds)));
                if (count != expected) {
                    return {false, false,
                            "count(" + std::to_string(k) + "," + std::to_string(n_u) + "," +
                                std::to_string(rounds) + ") = " + std::to_string(count) +
                                ", expected " + std::to_string(expected)};
                }
            }
            if (selection_count(rounds, n_u, rounds) != n_u) {
                return {false, false, "pool not exhausted at k = T for n_u = " +
                                          std::to_string(n_u) + ", T = " +
                                          std::to_string(rounds)};
            }
        }
    }
    return {true, false, "350 grid points"};
}

// 6. End-to-end recovery on the seeded heterogeneous fixture.
Outcome synthetic_recovery() {
    const auto start = Clock::now();
    std::size_t good_seeds = 0;
    double worst_supervised = 1.0;
    double worst_margin = 1.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        SyntheticSpec spec;
        spec.seed = seed;
        const DomainPair pair = generate_synthetic_pair(spec);

        SplitSpec split;
        split.seed = seed + 1000;
        split.per_class_target_labelled = 3;
        split.per_class_target_unlabelled = 50;
        const SplitIndices idx = generate_split(pair.target_features, pair.target_labels, split);

        LabeledSet source{pair.source_features, pair.source_labels};
        LabeledSet target{select_columns(pair.target_features, idx.target_labelled), {}};
        for (std::size_t i : idx.target_labelled) target.labels.push_back(pair.target_labels[i]);
        const FeatureMatrix pool = select_columns(pair.target_features, idx.target_unlabelled);
        RunOptions options;
        for (std::size_t i : idx.target_unlabelled) {
            options.evaluation_labels.push_back(pair.target_labels[i]);
        }

        CdsppConfig config;
        config.d = 3;
        config.alpha = 10.0;
        config.iterations = 5;
        const double sup =
            run_supervised(source, target, pool, config, options).report.final_accuracy;
        const double semi =
            run_semi_supervised(source, target, pool, config, options).report.final_accuracy;
        if (sup >= 0.90 && semi >= sup - 0.02) ++good_seeds;
        worst_supervised = std::min(worst_supervised, sup);
        worst_margin = std::min(worst_margin, semi - sup);
    }
    const double elapsed = seconds_since(start);
    Outcome out;
    out.pass = good_seeds >= 8 && elapsed < 30.0;
    out.detail = std::to_string(good_seeds) + "/10 seeds, worst supervised " +
                 fmt(worst_supervised) + ", worst semi-sup margin " + fmt(worst_margin) + ", " +
                 fmt(elapsed) + " s";
    return out;
}

int run_command(const std::string& command) {
    const int status = std::system(command.c_str());
    return status;
}

// 7. Two identical CLI runs write byte-identical reports outside [timing].
Outcome cli_determinism(const std::string& cli, const std::filesystem::path& dir) {
    if (cli.empty()) return {false, false, "CLI binary path not supplied"};
    std::filesystem::create_directories(dir);
    const std::string base = dir.string();
    if (run_command("'" + cli + "' synth --dir '" + base + "' --name gate --seed 5 > /dev/null") !=
        0) {
        return {false, false, "synth invocation failed"};
    }
    const std::string manifest = base + "/gate.json";
    for (const char* name : {"r1.txt", "r2.txt"}) {
        const std::string cmd = "'" + cli + "' run --manifest '" + manifest +
                                "' --seed 42 --out '" + base + "/" + name + "' > /dev/null";
        if (run_command(cmd) != 0) return {false, false, "run invocation failed"};
    }
    const std::string first = read_text_file(base + "/r1.txt");
    const std::string second = read_text_file(base + "/r2.txt");
    const std::string stable_first = report_stable_prefix(first);
    const std::string stable_second = report_stable_prefix(second);
    Outcome out;
    out.pass = !stable_first.empty() && stable_first == stable_second &&
               first.find("[timing]") != std::string::npos;
    out.detail = "stable region " + std::to_string(stable_first.size()) + " bytes, " +
                 (stable_first == stable_second ? "identical" : "DIFFERENT");
    return out;
}

// 8. Fit cost scales like the matrix work: <= 2.5x for doubled samples,
//    <= 9x for doubled dimensions.
Outcome complexity_scaling() {
    Rng rng(808);
    const std::size_t classes = 5;
    const auto timed_fit = [&](std::size_t n_per_domain, std::size_t dim) {
        const Matrix xs = random_features(dim, n_per_domain, rng);
        const Matrix xt = random_features(dim, n_per_domain, rng);
        const std::vector<int> ls = covering_labels(n_per_domain, classes, rng);
        const std::vector<int> lt = covering_labels(n_per_domain, classes, rng);
        CdsppConfig config;
        config.d = classes;
        std::vector<double> samples;
        for (int repeat = 0; repeat < 5; ++repeat) {
            const auto start = Clock::now();
            (void)fit(xs, xt, ls, lt, config);
            samples.push_back(seconds_since(start));
        }
        std::sort(samples.begin(), samples.end());
        return samples[samples.size() / 2];
    };

    const double base = timed_fit(4000, 40);
    const double doubled_n = timed_fit(8000, 40);
    const double doubled_d = timed_fit(4000, 80);
    const double n_ratio = doubled_n / base;
    const double d_ratio = doubled_d / base;
    Outcome out;
    out.pass = n_ratio <= 2.5 && d_ratio <= 9.0;
    out.detail = "base " + fmt(base) + " s, 2x samples " + fmt(n_ratio) + "x, 2x dims " +
                 fmt(d_ratio) + "x";
    return out;
}

// 9. Optional data-backed benchmark: manifests supplied via CDSPP_OC_DIR.
Outcome external_benchmark(const std::string& cli, const std::filesystem::path& dir) {
    const char* env = std::getenv("CDSPP_OC_DIR");
    if (env == nullptr || *env == '\0') {
        return {false, true, "CDSPP_OC_DIR not set"};
    }
    std::vector<std::string> manifests;
    const std::filesystem::path root(env);
    if (std::filesystem::is_directory(root)) {
        for (const auto& entry : std::filesystem::directory_iterator(root)) {
            if (entry.path().extension() == ".json") manifests.push_back(entry.path().string());
        }
    }
    std::sort(manifests.begin(), manifests.end());
    if (manifests.empty()) {
        return {false, true, "no task manifests under " + root.string()};
    }
    if (cli.empty()) return {false, false, "CLI binary path not supplied"};

    std::filesystem::create_directories(dir);
    const std::string table = (dir / "external.csv").string();
    std::string command = "'" + cli + "' benchmark";
    for (const std::string& manifest : manifests) {
        command += " --manifest '" + manifest + "'";
    }
    const unsigned hardware = std::thread::hardware_concurrency();
    const std::size_t jobs = std::clamp<std::size_t>(hardware == 0 ? 1 : hardware, 1, 8);
    command += " --mode semi --trials 10 --seed 0 --source-per-class 20"
               " --labelled-per-class 3 --jobs " +
               std::to_string(jobs) + " --out '" + table + "'";
    if (run_command(command + " > /dev/null") != 0) {
        return {false, false, "benchmark invocation failed"};
    }

    const std::string csv = read_text_file(table);
    const std::size_t avg_at = csv.rfind("Avg,");
    if (avg_at == std::string::npos) return {false, false, "no Avg row in " + table};
    const double mean = std::strtod(csv.c_str() + avg_at + 4, nullptr);
    Outcome out;
    out.pass = std::abs(mean - 0.926) <= 0.03;
    out.detail = std::to_string(manifests.size()) + " tasks, mean accuracy " + fmt(mean, 4) +
                 " vs 0.926 +/- 0.03";
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    const std::string cli = argc > 1 ? argv[1] : "";
    const auto scratch = std::filesystem::temp_directory_path() / "cdspp_acceptance";
    std::filesystem::remove_all(scratch);

    struct Criterion {
        const char* name;
        Outcome outcome;
    };
    const Criterion criteria[] = {
        {"objective sum form equals trace form", objective_identity()},
        {"eigenproblem residual and orthonormality", eigenproblem_correctness()},
        {"trace ratio stationary at the top eigenvector", stationarity()},
        {"solver beats random projection pairs", optimality()},
        {"pseudo-label schedule law", schedule_law()},
        {"synthetic end-to-end recovery", synthetic_recovery()},
        {"CLI run determinism", cli_determinism(cli, scratch / "determinism")},
        {"fit cost scaling", complexity_scaling()},
        {"external benchmark accuracy", external_benchmark(cli, scratch / "external")},
    };

    int failures = 0;
    int index = 0;
    for (const Criterion& criterion : criteria) {
        ++index;
        const char* verdict = criterion.outcome.skip   ? "[SKIP]"
                              : criterion.outcome.pass ? "[PASS]"
                                                       : "[FAIL]";
        if (!criterion.outcome.pass && !criterion.outcome.skip) ++failures;
        std::printf("%s %d. %s: %s\n", verdict, index, criterion.name,
                    criterion.outcome.detail.c_str());
    }
    std::filesystem::remove_all(scratch);
    return failures == 0 ? 0 : 1;
}

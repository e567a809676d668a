#pragma once

#include <smoothrisk/metrics.hpp>
#include <smoothrisk/training.hpp>

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace smoothrisk {

struct BenchmarkConfig {
    /// Objectives trained on identical folds, for paired comparison.
    std::vector<ObjectiveKind> objectives{ObjectiveKind::N01};
    int folds = 5;
    int repeats = 4;
    /// Fixed lambda for every objective; default_lambda() per fold when unset.
    std::optional<double> lambda;
    std::uint64_t seed = 0;
    CovarianceKind covariance = CovarianceKind::Auto;
    LbfgsConfig lbfgs;
    /// Fit feature scaling on each training fold and apply it to the test fold.
    bool normalize = true;
    TieRule ties = TieRule::Strict;
    std::string dataset_name;

    void validate() const;
};

/// One (objective, repeat, fold) training run.
struct RunRecord {
    ObjectiveKind objective = ObjectiveKind::N01;
    int repeat = 0;
    int fold = 0;
    Index n_train = 0;
    Index n_test = 0;
    double lambda = 0.0;
    double accuracy = 0.0;
    double auc = 0.0;
    int iterations = 0;
    bool converged = false;
    double final_grad_norm = 0.0;
    double moment_time = 0.0;
    double solution_time = 0.0;
};

struct ObjectiveSummary {
    ObjectiveKind objective = ObjectiveKind::N01;
    int runs = 0;
    double mean_acc = 0.0;
    double std_acc = 0.0;
    double mean_auc = 0.0;
    double std_auc = 0.0;
    double mean_iters = 0.0;
    /// Mean seconds per run.
    double moment_time = 0.0;
    double solution_time = 0.0;
};

struct EvalReport {
    std::string dataset;
    std::vector<RunRecord> runs;
    std::vector<ObjectiveSummary> summaries;
};

/// Sample standard deviation (n - 1 divisor); 0 for fewer than two values.
double sample_std(std::span<const double> values);

/// Means and sample standard deviations over the runs of one objective.
ObjectiveSummary summarize(ObjectiveKind objective, std::span<const RunRecord> runs);

/// repeats x folds cross-validation. Each repeat draws a fresh permutation;
/// if any fold leaves a class with fewer than two training examples or an
/// empty test class, the repeat is redrawn with a derived seed (up to 10
/// attempts, then DataError).
EvalReport run_benchmark(const BenchmarkConfig& config, const Dataset& data);

/// Deterministic per-run columns (no timings), one row per run.
void write_runs_csv(std::ostream& out, std::span<const RunRecord> runs);
/// Timing columns keyed by (objective, repeat, fold).
void write_timings_csv(std::ostream& out, std::span<const RunRecord> runs);
/// Reads write_runs_csv output back (timings left at zero).
std::vector<RunRecord> read_runs_csv(std::istream& in);

/// {"dataset", "objectives": [{objective, dataset, runs, mean_acc, std_acc,
/// mean_auc, std_auc, mean_iters, moment_time, solution_time}, ...]}
nlohmann::json summary_to_json(const EvalReport& report);

struct CostProbeRow {
    Index n = 0;
    double seconds_per_eval = 0.0;
};

/// Wall time per objective+gradient evaluation at fixed dimension d for each
/// sample size. Each entry is the smallest mean over `trials` batches of
/// `evals` evaluations; moments are estimated outside the timed region.
std::vector<CostProbeRow> eval_cost_probe(ObjectiveKind objective, Index d, std::span<const Index> sizes,
                                          std::uint64_t seed, int evals = 100, int trials = 5);

} // namespace smoothrisk

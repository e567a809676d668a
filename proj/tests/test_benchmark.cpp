#include "oracles.hpp"

#include <doctest.h>

#include <smoothrisk/benchmark.hpp>
#include <smoothrisk/errors.hpp>

#include <sstream>

using namespace smoothrisk;

namespace {

Dataset bench_data() { return gen_synthetic({4, 300, 0.3, 0.0, 17}).data; }

} // namespace

TEST_CASE("sample std")
{
    const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
    CHECK(sample_std(v) == doctest::Approx(std::sqrt(5.0 / 3.0)).epsilon(1e-15));
    CHECK(sample_std(std::vector<double>{2.0}) == 0.0);
}

TEST_CASE("benchmark runs folds times repeats per objective")
{
    BenchmarkConfig cfg;
    cfg.objectives = {ObjectiveKind::N01, ObjectiveKind::Logistic};
    cfg.seed = 3;
    const EvalReport report = run_benchmark(cfg, bench_data());
    CHECK(report.runs.size() == 40);
    REQUIRE(report.summaries.size() == 2);
    for (const auto& s : report.summaries) {
        CHECK(s.runs == 20);
        CHECK(s.mean_acc > 0.5);
        CHECK(s.mean_auc <= 1.0);
    }
    for (const auto& r : report.runs) {
        CHECK(r.n_train + r.n_test == 300);
        if (r.objective == ObjectiveKind::N01) {
            CHECK(r.lambda == 0.001);
            CHECK(r.moment_time > 0.0);
        } else {
            CHECK(r.lambda == 1.0 / static_cast<double>(r.n_train));
            CHECK(r.moment_time == 0.0);
        }
    }
}

TEST_CASE("summaries are reproduced from persisted runs")
{
    BenchmarkConfig cfg;
    cfg.objectives = {ObjectiveKind::NRank, ObjectiveKind::Hinge};
    cfg.folds = 3;
    cfg.repeats = 2;
    cfg.seed = 5;
    const EvalReport report = run_benchmark(cfg, bench_data());
    std::stringstream csv;
    write_runs_csv(csv, report.runs);
    const std::vector<RunRecord> back = read_runs_csv(csv);
    REQUIRE(back.size() == report.runs.size());
    for (const auto& s : report.summaries) {
        std::vector<RunRecord> mine;
        for (const auto& r : back) {
            if (r.objective == s.objective) {
                mine.push_back(r);
            }
        }
        const ObjectiveSummary again = summarize(s.objective, mine);
        CHECK(again.runs == s.runs);
        CHECK(again.mean_acc == s.mean_acc);
        CHECK(again.std_acc == s.std_acc);
        CHECK(again.mean_auc == s.mean_auc);
        CHECK(again.std_auc == s.std_auc);
        CHECK(again.mean_iters == s.mean_iters);
    }
}

TEST_CASE("benchmark is deterministic apart from timings")
{
    BenchmarkConfig cfg;
    cfg.objectives = {ObjectiveKind::N01, ObjectiveKind::Hinge};
    cfg.folds = 2;
    cfg.repeats = 2;
    cfg.seed = 9;
    std::ostringstream a;
    std::ostringstream b;
    write_runs_csv(a, run_benchmark(cfg, bench_data()).runs);
    write_runs_csv(b, run_benchmark(cfg, bench_data()).runs);
    CHECK(a.str() == b.str());
}

TEST_CASE("hinge lambda policy")
{
    Dataset ds = oracle::random_dense(100, 400, 2, 0);
    CHECK(default_lambda(ObjectiveKind::Hinge, ds) == doctest::Approx(0.005).epsilon(1e-15));
}

TEST_CASE("folds are redrawn when a class goes missing")
{
    // Three positives among 40: some permutations leave a fold without one.
    const Dataset ds = oracle::random_dense(3, 37, 2, 4);
    BenchmarkConfig cfg;
    cfg.folds = 3;
    cfg.repeats = 4;
    cfg.objectives = {ObjectiveKind::Logistic};
    const EvalReport report = run_benchmark(cfg, ds);
    CHECK(report.runs.size() == 12);
    for (const auto& r : report.runs) {
        CHECK(r.n_test > 0);
    }
}

TEST_CASE("benchmark fails when no fold assignment works")
{
    BenchmarkConfig cfg;
    cfg.folds = 2;
    cfg.repeats = 1;
    CHECK_THROWS_AS(run_benchmark(cfg, oracle::random_dense(1, 20, 2, 0)), DataError);
}

TEST_CASE("invalid benchmark configs")
{
    BenchmarkConfig cfg;
    cfg.folds = 1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.folds = 5;
    cfg.repeats = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("summary json schema")
{
    BenchmarkConfig cfg;
    cfg.folds = 2;
    cfg.repeats = 1;
    cfg.dataset_name = "toy";
    const nlohmann::json j = summary_to_json(run_benchmark(cfg, bench_data()));
    const auto& s = j.at("objectives").at(0);
    for (const char* key : {"objective", "dataset", "mean_acc", "std_acc", "mean_auc", "std_auc", "mean_iters",
                            "moment_time", "solution_time"}) {
        CHECK(s.contains(key));
    }
    CHECK(s.at("dataset") == "toy");
}

TEST_CASE("cost probe reports one row per size")
{
    const std::vector<Index> sizes{100, 400};
    const auto rows = eval_cost_probe(ObjectiveKind::Hinge, 5, sizes, 1, 5, 1);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].n == 100);
    CHECK(rows[1].seconds_per_eval > 0.0);
}

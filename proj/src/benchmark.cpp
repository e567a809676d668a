#include <smoothrisk/benchmark.hpp>
#include <smoothrisk/errors.hpp>
#include <smoothrisk/format.hpp>
#include <smoothrisk/random.hpp>

#include <chrono>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace smoothrisk {

namespace {

constexpr int kMaxFoldDraws = 10;

bool folds_usable(const std::vector<Split>& folds)
{
    for (const auto& f : folds) {
        if (f.train.count_positive() < 2 || f.train.count_negative() < 2 || f.test.count_positive() < 1
            || f.test.count_negative() < 1) {
            return false;
        }
    }
    return true;
}

std::vector<Split> draw_folds(const Dataset& data, int k, std::uint64_t seed, int repeat)
{
    for (int attempt = 0; attempt < kMaxFoldDraws; ++attempt) {
        std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(repeat) * kMaxFoldDraws + attempt);
        std::vector<Split> folds = kfold(data, k, s);
        if (folds_usable(folds)) {
            return folds;
        }
    }
    throw DataError("could not draw " + std::to_string(k) + " folds with both classes in every part after "
                    + std::to_string(kMaxFoldDraws) + " attempts (repeat " + std::to_string(repeat) + ")");
}

std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

double mean(std::span<const double> v)
{
    double s = 0.0;
    for (double x : v) {
        s += x;
    }
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

} // namespace

void BenchmarkConfig::validate() const
{
    if (objectives.empty()) {
        throw ConfigError("benchmark needs at least one objective");
    }
    if (folds < 2) {
        throw ConfigError("benchmark needs at least 2 folds");
    }
    if (repeats < 1) {
        throw ConfigError("benchmark needs at least 1 repeat");
    }
    if (lambda && *lambda < 0.0) {
        throw ConfigError("lambda must be nonnegative");
    }
    lbfgs.validate();
}

double sample_std(std::span<const double> values)
{
    if (values.size() < 2) {
        return 0.0;
    }
    const double m = mean(values);
    double ss = 0.0;
    for (double x : values) {
        ss += (x - m) * (x - m);
    }
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

ObjectiveSummary summarize(ObjectiveKind objective, std::span<const RunRecord> runs)
{
    std::vector<double> acc;
    std::vector<double> auc_values;
    std::vector<double> iters;
    std::vector<double> moment;
    std::vector<double> solution;
    for (const auto& r : runs) {
        if (r.objective != objective) {
            continue;
        }
        acc.push_back(r.accuracy);
        auc_values.push_back(r.auc);
        iters.push_back(static_cast<double>(r.iterations));
        moment.push_back(r.moment_time);
        solution.push_back(r.solution_time);
    }
    ObjectiveSummary s;
    s.objective = objective;
    s.runs = static_cast<int>(acc.size());
    s.mean_acc = mean(acc);
    s.std_acc = sample_std(acc);
    s.mean_auc = mean(auc_values);
    s.std_auc = sample_std(auc_values);
    s.mean_iters = mean(iters);
    s.moment_time = mean(moment);
    s.solution_time = mean(solution);
    return s;
}

EvalReport run_benchmark(const BenchmarkConfig& config, const Dataset& data)
{
    config.validate();
    require_both_classes(data, 2, "benchmark data");
    EvalReport report;
    report.dataset = config.dataset_name;
    const auto k = static_cast<std::uint64_t>(config.folds);

    for (int r = 0; r < config.repeats; ++r) {
        std::vector<Split> folds = draw_folds(data, config.folds, config.seed, r);
        for (int f = 0; f < config.folds; ++f) {
            Dataset train = std::move(folds[static_cast<std::size_t>(f)].train);
            Dataset test = std::move(folds[static_cast<std::size_t>(f)].test);
            if (config.normalize) {
                NormalizedData nd = normalize_features(train);
                train = std::move(nd.data);
                test = apply_scale(test, nd.scale);
            }
            for (ObjectiveKind objective : config.objectives) {
                TrainOptions opts;
                opts.objective = objective;
                opts.lambda = config.lambda;
                opts.covariance = config.covariance;
                opts.lbfgs = config.lbfgs;
                opts.seed = derive_seed(config.seed ^ 0x5eedULL, static_cast<std::uint64_t>(r) * k
                                                                      + static_cast<std::uint64_t>(f));
                TrainedModel model = train_linear(train, opts);

                RunRecord rec;
                rec.objective = objective;
                rec.repeat = r;
                rec.fold = f;
                rec.n_train = train.size();
                rec.n_test = test.size();
                rec.lambda = model.lambda;
                rec.accuracy = accuracy(model.weights(), test);
                rec.auc = auc(model.weights(), test, config.ties);
                rec.iterations = model.result.iterations;
                rec.converged = model.result.converged;
                rec.final_grad_norm = model.result.final_grad_norm;
                rec.moment_time = model.moment_time;
                rec.solution_time = model.result.solution_time;
                report.runs.push_back(rec);
            }
        }
    }
    for (ObjectiveKind objective : config.objectives) {
        report.summaries.push_back(summarize(objective, report.runs));
    }
    return report;
}

void write_runs_csv(std::ostream& out, std::span<const RunRecord> runs)
{
    out << "objective,repeat,fold,n_train,n_test,lambda,accuracy,auc,iterations,converged,final_grad_norm\n";
    for (const auto& r : runs) {
        out << to_string(r.objective) << ',' << r.repeat << ',' << r.fold << ',' << r.n_train << ',' << r.n_test
            << ',' << format_double(r.lambda) << ',' << format_double(r.accuracy) << ',' << format_double(r.auc)
            << ',' << r.iterations << ',' << (r.converged ? 1 : 0) << ',' << format_double(r.final_grad_norm)
            << '\n';
    }
}

void write_timings_csv(std::ostream& out, std::span<const RunRecord> runs)
{
    out << "objective,repeat,fold,moment_time,solution_time\n";
    for (const auto& r : runs) {
        out << to_string(r.objective) << ',' << r.repeat << ',' << r.fold << ',' << format_double(r.moment_time)
            << ',' << format_double(r.solution_time) << '\n';
    }
}

std::vector<RunRecord> read_runs_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError("runs CSV is empty");
    }
    const std::vector<std::string> header = split_csv_line(line);
    if (header.size() != 11 || header.front() != "objective") {
        throw DataError("unexpected runs CSV header '" + line + "'");
    }
    std::vector<RunRecord> runs;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const std::vector<std::string> c = split_csv_line(line);
        if (c.size() != 11) {
            throw DataError("runs CSV line " + std::to_string(line_no) + " has " + std::to_string(c.size())
                            + " fields");
        }
        try {
            RunRecord r;
            r.objective = parse_objective_kind(c[0]);
            r.repeat = std::stoi(c[1]);
            r.fold = std::stoi(c[2]);
            r.n_train = std::stoll(c[3]);
            r.n_test = std::stoll(c[4]);
            r.lambda = std::stod(c[5]);
            r.accuracy = std::stod(c[6]);
            r.auc = std::stod(c[7]);
            r.iterations = std::stoi(c[8]);
            r.converged = c[9] == "1";
            r.final_grad_norm = std::stod(c[10]);
            runs.push_back(r);
        } catch (const std::logic_error&) {
            throw DataError("runs CSV line " + std::to_string(line_no) + " is malformed");
        }
    }
    return runs;
}

nlohmann::json summary_to_json(const EvalReport& report)
{
    nlohmann::json objectives = nlohmann::json::array();
    for (const auto& s : report.summaries) {
        objectives.push_back({{"objective", to_string(s.objective)},
                              {"dataset", report.dataset},
                              {"runs", s.runs},
                              {"mean_acc", s.mean_acc},
                              {"std_acc", s.std_acc},
                              {"mean_auc", s.mean_auc},
                              {"std_auc", s.std_auc},
                              {"mean_iters", s.mean_iters},
                              {"moment_time", s.moment_time},
                              {"solution_time", s.solution_time}});
    }
    return {{"dataset", report.dataset}, {"objectives", objectives}};
}

std::vector<CostProbeRow> eval_cost_probe(ObjectiveKind objective, Index d, std::span<const Index> sizes,
                                          std::uint64_t seed, int evals, int trials)
{
    for (std::size_t i = 1; i < sizes.size(); ++i) {
        if (sizes[i] < sizes[i - 1]) {
            throw ConfigError("cost probe sizes must be ascending");
        }
    }
    if (evals < 1 || trials < 1) {
        throw ConfigError("cost probe needs at least one evaluation and one trial");
    }
    const ExactMoments gen = random_moments(d, 0.5, seed);
    Rng rng(derive_seed(seed, 1));
    const Vector w = rng.unit_vector(d);

    std::vector<std::unique_ptr<SmoothObjective>> objectives;
    volatile double sink = 0.0;
    for (Index n : sizes) {
        Dataset data = sample_from_moments(gen, n, derive_seed(seed, static_cast<std::uint64_t>(n)));
        std::optional<ClassMoments> moments;
        if (uses_moments(objective)) {
            moments = estimate_class_moments(data);
        }
        objectives.push_back(make_objective(objective, data, moments, default_lambda(objective, data)));
        sink = sink + objectives.back()->evaluate(w).value;
    }

    // Sizes are interleaved within each trial so a slow stretch of the
    // machine hits every size alike instead of one.
    std::vector<double> best(sizes.size(), std::numeric_limits<double>::infinity());
    for (int t = 0; t < trials; ++t) {
        for (std::size_t i = 0; i < sizes.size(); ++i) {
            const auto t0 = std::chrono::steady_clock::now();
            for (int e = 0; e < evals; ++e) {
                sink = sink + objectives[i]->evaluate(w).value;
            }
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            best[i] = std::min(best[i], secs / static_cast<double>(evals));
        }
    }
    std::vector<CostProbeRow> rows;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        rows.push_back(CostProbeRow{sizes[i], best[i]});
    }
    return rows;
}

} // namespace smoothrisk

#include "cli.hpp"
#include "support.hpp"

#include <smoothrisk/benchmark.hpp>
#include <smoothrisk/errors.hpp>
#include <smoothrisk/figures.hpp>
#include <smoothrisk/format.hpp>
#include <smoothrisk/model.hpp>
#include <smoothrisk/training.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace smoothrisk::cli {

namespace {

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

struct Globals {
    std::uint64_t seed = 0;
    std::string config;
    std::string out = ".";
    std::string format = "json";
};

struct GenArgs {
    Index d = 2;
    Index n = 100;
    double prior_pos = 0.5;
    double outliers = 0.0;
    std::string name = "data";
};

struct TrainArgs {
    std::string objective = "n01";
    std::string data;
    std::string test;
    double lambda = kUnset;
    std::string covariance = "auto";
    bool no_normalize = false;
    std::string moments_in;
    bool save_moments = false;
    bool trajectory = false;
    std::vector<int> snapshots;
    std::string ties = "strict";
    LbfgsConfig lbfgs;
};

struct EvalArgs {
    std::string model;
    std::string data;
    std::string ties = "strict";
};

struct BenchArgs {
    std::string data;
    std::vector<std::string> objectives{"n01"};
    int k = 5;
    int repeats = 4;
    double lambda = kUnset;
    std::string covariance = "auto";
    bool no_normalize = false;
    std::string ties = "strict";
    std::string name;
    LbfgsConfig lbfgs;
};

struct PathArgs {
    std::string start;
    std::string end;
    std::string data;
    std::vector<std::string> functions{"n01", "emp01"};
    int points = 100;
};

struct HistArgs {
    std::string model;
    std::string data;
    int bins = 50;
    Index max_pairs = 100000;
};

void add_lbfgs_options(ConfigBinder& binder, CLI::App* app, LbfgsConfig& cfg)
{
    binder.option(app, "--memory", cfg.memory, "L-BFGS history size", {"memory"});
    binder.option(app, "--c1", cfg.c1, "sufficient-decrease constant", {"c1"});
    binder.option(app, "--c2", cfg.c2, "curvature constant", {"c2"});
    binder.option(app, "--max-iters", cfg.max_iters, "iteration cap", {"max_iters", "max-iters"});
    binder.option(app, "--grad-tol", cfg.grad_tol, "gradient-norm tolerance", {"grad_tol", "grad-tol"});
    binder.option(app, "--max-linesearch", cfg.max_linesearch, "evaluations per line search",
                  {"max_linesearch", "max-linesearch"});
}

nlohmann::json load_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config '" + path + "'");
    }
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config '" + path + "': " + e.what());
    }
}

nlohmann::json lbfgs_json(const LbfgsConfig& c)
{
    return {{"memory", c.memory},     {"c1", c.c1},
            {"c2", c.c2},             {"max_iters", c.max_iters},
            {"grad_tol", c.grad_tol}, {"max_linesearch", c.max_linesearch}};
}

nlohmann::json train_meta(const TrainedModel& m, std::uint64_t seed, bool normalized, const std::string& moments)
{
    const TrainResult& r = m.result;
    return {{"iterations", r.iterations},
            {"converged", r.converged},
            {"stop_reason", to_string(r.reason)},
            {"final_grad_norm", r.final_grad_norm},
            {"objective_value", r.objective_value},
            {"moment_time", m.moment_time},
            {"solution_time", r.solution_time},
            {"w_start", vector_to_json(m.w_start)},
            {"random_start", m.random_start},
            {"seed", seed},
            {"normalized", normalized},
            {"moments", moments}};
}

std::string model_text(const LinearModel& m) { return model_to_json(m).dump(2) + "\n"; }

int cmd_gen(const Globals& g, const GenArgs& a, Manifest& manifest, std::ostream& out)
{
    SyntheticSpec spec{a.d, a.n, a.prior_pos, a.outliers, g.seed};
    SyntheticData syn = gen_synthetic(spec);
    std::ostringstream data;
    write_libsvm(data, syn.data);
    const std::string data_path = join_path(g.out, a.name + ".libsvm");
    const std::string moments_path = join_path(g.out, a.name + ".moments.json");
    write_file_atomic(data_path, data.str());
    write_file_atomic(moments_path, exact_moments_to_json(syn.moments).dump(2) + "\n");
    manifest.add_seed("seed", g.seed);
    manifest.add_output(data_path);
    manifest.add_output(moments_path);
    nlohmann::json summary{{"n", syn.data.size()},
                           {"d", syn.data.dim()},
                           {"n_pos", syn.data.count_positive()},
                           {"n_neg", syn.data.count_negative()},
                           {"data", data_path},
                           {"moments", moments_path}};
    manifest.extra() = summary;
    out << summary.dump() << '\n';
    return kOk;
}

int cmd_train(const Globals& g, const TrainArgs& a, Manifest& manifest, std::ostream& out)
{
    const ObjectiveKind kind = parse_objective_kind(a.objective);
    const TieRule ties = parse_tie_rule(a.ties);
    TrainOptions opts;
    opts.objective = kind;
    opts.covariance = parse_covariance_kind(a.covariance);
    opts.lbfgs = a.lbfgs;
    opts.seed = g.seed;
    if (!std::isnan(a.lambda)) {
        opts.lambda = a.lambda;
    }
    opts.lbfgs.validate();

    std::optional<ClassMoments> given;
    nlohmann::json moments_doc;
    if (!a.moments_in.empty()) {
        moments_doc = load_json_file(a.moments_in);
        manifest.add_input(a.moments_in);
    }
    const bool explicit_moments = !a.moments_in.empty() && moments_doc.value("sigma_rep", "explicit") == "explicit";

    Dataset raw = load_libsvm(a.data);
    manifest.add_input(a.data);
    Dataset train = raw;
    LinearModel model;
    model.scale = Vector::Ones(raw.dim());
    // Supplied explicit moments describe the raw feature space.
    const bool normalize = !a.no_normalize && !explicit_moments;
    if (normalize) {
        NormalizedData nd = normalize_features(raw);
        train = std::move(nd.data);
        model.scale = std::move(nd.scale);
    }
    if (!a.moments_in.empty()) {
        given = moments_from_json(moments_doc, &train);
        if (given->dim() != train.dim()) {
            if (given->dim() < train.dim()) {
                throw DataError("moments are " + std::to_string(given->dim()) + "-dimensional, data is "
                                + std::to_string(train.dim()) + "-dimensional");
            }
            raw = load_libsvm(a.data, given->dim());
            train = raw;
            model.scale = Vector::Ones(raw.dim());
        }
        opts.moments = given;
    }

    IterationObserver observer;
    std::vector<std::pair<int, Vector>> snaps;
    if (!a.snapshots.empty()) {
        observer = [&](const IterationRecord& rec, const Vector& w) {
            if (std::find(a.snapshots.begin(), a.snapshots.end(), rec.iteration) != a.snapshots.end()) {
                snaps.emplace_back(rec.iteration, w);
            }
        };
    }
    TrainedModel trained = train_linear(train, opts, observer);
    const std::string moments_source = uses_moments(kind) ? (a.moments_in.empty() ? "estimated" : a.moments_in) : "";

    model.w = trained.weights();
    model.objective = kind;
    model.lambda = trained.lambda;
    model.train_meta = train_meta(trained, g.seed, normalize, moments_source);
    const std::string model_path = join_path(g.out, "model.json");
    write_file_atomic(model_path, model_text(model));
    manifest.add_output(model_path);

    for (const auto& [iter, w] : snaps) {
        LinearModel snap = model;
        snap.w = w;
        snap.train_meta["snapshot_iteration"] = iter;
        const std::string path = join_path(g.out, "model_iter" + std::to_string(iter) + ".json");
        write_file_atomic(path, model_text(snap));
        manifest.add_output(path);
    }
    if (a.trajectory) {
        std::ostringstream csv;
        csv << "iter,value,grad_norm\n";
        for (const auto& r : trained.result.trajectory) {
            csv << r.iteration << ',' << format_double(r.value) << ',' << format_double(r.grad_norm) << '\n';
        }
        const std::string path = join_path(g.out, "trajectory.csv");
        write_file_atomic(path, csv.str());
        manifest.add_output(path);
    }
    if (a.save_moments && uses_moments(kind)) {
        const ClassMoments cm = given ? *given : estimate_class_moments(train, opts.covariance);
        const std::string path = join_path(g.out, "moments.json");
        write_file_atomic(path, moments_to_json(cm, a.data).dump(2) + "\n");
        manifest.add_output(path);
    }

    nlohmann::json summary{{"objective", to_string(kind)},
                           {"lambda", trained.lambda},
                           {"iterations", trained.result.iterations},
                           {"converged", trained.result.converged},
                           {"stop_reason", to_string(trained.result.reason)},
                           {"final_grad_norm", trained.result.final_grad_norm},
                           {"objective_value", trained.result.objective_value},
                           {"moment_time", trained.moment_time},
                           {"solution_time", trained.result.solution_time},
                           {"model", model_path}};
    const Dataset prepared_train = train;
    summary["train_accuracy"] = accuracy(model.w, prepared_train);
    if (!a.test.empty()) {
        Dataset test = model.prepare(load_libsvm(a.test, model.dim()));
        manifest.add_input(a.test);
        summary["test_accuracy"] = accuracy(model.w, test);
        summary["test_auc"] = auc(model.w, test, ties);
    }
    manifest.add_seed("seed", g.seed);
    manifest.extra() = summary;
    if (g.format == "csv") {
        out << "objective,lambda,iterations,converged,final_grad_norm,objective_value\n"
            << to_string(kind) << ',' << format_double(trained.lambda) << ',' << trained.result.iterations << ','
            << (trained.result.converged ? 1 : 0) << ',' << format_double(trained.result.final_grad_norm) << ','
            << format_double(trained.result.objective_value) << '\n';
    } else {
        out << summary.dump() << '\n';
    }
    return kOk;
}

int cmd_eval(const Globals& g, const EvalArgs& a, Manifest& manifest, std::ostream& out, std::ostream& err)
{
    const TieRule ties = parse_tie_rule(a.ties);
    LinearModel model = load_model(a.model);
    manifest.add_input(a.model);
    Dataset data = model.prepare(load_libsvm(a.data, model.dim()));
    manifest.add_input(a.data);

    nlohmann::json report{{"n", data.size()}, {"d", data.dim()}, {"accuracy", accuracy(model.w, data)}};
    int code = kOk;
    try {
        report["auc"] = auc(model.w, data, ties);
    } catch (const DataError& e) {
        report["auc"] = nullptr;
        report["auc_error"] = e.what();
        err << "error: " << e.what() << '\n';
        code = kDataError;
    }
    manifest.extra() = report;
    if (g.format == "csv") {
        out << "accuracy,auc\n" << format_double(report["accuracy"].get<double>()) << ',';
        if (!report["auc"].is_null()) {
            out << format_double(report["auc"].get<double>());
        }
        out << '\n';
    } else {
        out << report.dump() << '\n';
    }
    return code;
}

int cmd_bench(const Globals& g, const BenchArgs& a, const nlohmann::json& config, Manifest& manifest,
              std::ostream& out)
{
    BenchmarkConfig cfg;
    cfg.objectives.clear();
    for (const auto& name : a.objectives) {
        cfg.objectives.push_back(parse_objective_kind(name));
    }
    cfg.folds = a.k;
    cfg.repeats = a.repeats;
    if (!std::isnan(a.lambda)) {
        cfg.lambda = a.lambda;
    }
    cfg.seed = g.seed;
    cfg.covariance = parse_covariance_kind(a.covariance);
    cfg.lbfgs = a.lbfgs;
    cfg.normalize = !a.no_normalize;
    cfg.ties = parse_tie_rule(a.ties);

    Dataset data;
    const nlohmann::json* synthetic = nullptr;
    if (config.is_object()) {
        if (config.contains("bench") && config["bench"].contains("synthetic")) {
            synthetic = &config["bench"]["synthetic"];
        } else if (config.contains("synthetic")) {
            synthetic = &config["synthetic"];
        }
    }
    if (!a.data.empty()) {
        data = load_libsvm(a.data);
        manifest.add_input(a.data);
        cfg.dataset_name = a.name.empty() ? a.data : a.name;
    } else if (synthetic != nullptr) {
        SyntheticSpec spec;
        spec.d = synthetic->value("d", spec.d);
        spec.n = synthetic->value("n", spec.n);
        spec.prior_pos = synthetic->value("prior_pos", spec.prior_pos);
        spec.outlier_frac = synthetic->value("outlier_frac", spec.outlier_frac);
        spec.seed = synthetic->value("seed", spec.seed);
        data = gen_synthetic(spec).data;
        manifest.add_seed("synthetic_seed", spec.seed);
        cfg.dataset_name = a.name.empty() ? "synthetic" : a.name;
    } else {
        throw ConfigError("bench needs --data or a 'synthetic' section in --config");
    }

    EvalReport report = run_benchmark(cfg, data);
    std::ostringstream runs;
    write_runs_csv(runs, report.runs);
    std::ostringstream timings;
    write_timings_csv(timings, report.runs);
    const nlohmann::json summary = summary_to_json(report);
    const std::string runs_path = join_path(g.out, "runs.csv");
    const std::string timings_path = join_path(g.out, "timings.csv");
    const std::string summary_path = join_path(g.out, "summary.json");
    write_file_atomic(runs_path, runs.str());
    write_file_atomic(timings_path, timings.str());
    write_file_atomic(summary_path, summary.dump(2) + "\n");
    manifest.add_seed("seed", g.seed);
    manifest.add_output(runs_path);
    manifest.add_output(timings_path);
    manifest.add_output(summary_path);
    manifest.extra() = summary;
    if (g.format == "csv") {
        out << runs.str();
    } else {
        out << summary.dump() << '\n';
    }
    return kOk;
}

int cmd_path_plot(const Globals& g, const PathArgs& a, Manifest& manifest, std::ostream& out)
{
    LinearModel end = load_model(a.end);
    manifest.add_input(a.end);
    Vector w_start;
    if (!a.start.empty()) {
        LinearModel start = load_model(a.start);
        manifest.add_input(a.start);
        if (start.dim() != end.dim()) {
            throw DataError("start and end models differ in dimension");
        }
        w_start = start.w;
    } else if (end.train_meta.contains("w_start")) {
        w_start = vector_from_json(end.train_meta["w_start"]);
    } else {
        throw DataError("no --start model given and the end model records no start point");
    }
    Dataset data = end.prepare(load_libsvm(a.data, end.dim()));
    manifest.add_input(a.data);

    std::vector<PathFunction> fns;
    for (const auto& name : a.functions) {
        fns.push_back(parse_path_function(name));
    }
    std::vector<PathPlotRow> rows = path_plot(w_start, end.w, data, fns, a.points);
    std::ostringstream csv;
    write_path_plot_csv(csv, fns, rows);
    const std::string path = join_path(g.out, "path_plot.csv");
    write_file_atomic(path, csv.str());
    manifest.add_output(path);
    out << nlohmann::json{{"rows", rows.size()}, {"csv", path}}.dump() << '\n';
    return kOk;
}

int cmd_score_hist(const Globals& g, const HistArgs& a, Manifest& manifest, std::ostream& out)
{
    LinearModel model = load_model(a.model);
    manifest.add_input(a.model);
    Dataset data = model.prepare(load_libsvm(a.data, model.dim()));
    manifest.add_input(a.data);
    std::vector<ScoreHistogram> hists = score_histograms(model.w, data, a.bins, g.seed, a.max_pairs);
    std::ostringstream csv;
    write_score_hist_csv(csv, hists);
    const std::string path = join_path(g.out, "score_hist.csv");
    write_file_atomic(path, csv.str());
    manifest.add_seed("seed", g.seed);
    manifest.add_output(path);
    nlohmann::json fits = nlohmann::json::array();
    for (const auto& h : hists) {
        fits.push_back({{"population", h.population}, {"size", h.size}, {"mean", h.mean}, {"std", h.std}});
    }
    manifest.extra() = fits;
    out << nlohmann::json{{"csv", path}, {"populations", fits}}.dump() << '\n';
    return kOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Linear classifiers from moment-based smooth risk approximations", "smoothrisk"};
    app.require_subcommand(1);
    app.fallthrough();

    ConfigBinder binder;
    Globals g;
    binder.option(&app, "--seed", g.seed, "random seed", {"seed"});
    app.add_option("--config", g.config, "JSON file supplying option values");
    binder.option(&app, "--out", g.out, "output directory", {"out"});
    binder.option(&app, "--format", g.format, "stdout report format", {"format"})
        ->check(CLI::IsMember({"csv", "json"}));

    GenArgs gen;
    CLI::App* gen_cmd = app.add_subcommand("gen", "generate a synthetic Gaussian dataset");
    binder.option(gen_cmd, "--d", gen.d, "feature dimension", {"d"});
    binder.option(gen_cmd, "--n", gen.n, "number of examples", {"n"});
    binder.option(gen_cmd, "--prior-pos", gen.prior_pos, "fraction of positive examples", {"prior_pos", "prior-pos"});
    binder.option(gen_cmd, "--outliers", gen.outliers, "fraction of flipped labels in [0, 0.5)",
                  {"outlier_frac", "outliers"});
    binder.option(gen_cmd, "--name", gen.name, "output file stem", {"name"});

    TrainArgs train;
    CLI::App* train_cmd = app.add_subcommand("train", "train a linear classifier");
    binder.option(train_cmd, "--objective", train.objective, "n01|nrank|logistic|hinge", {"objective"});
    binder.option(train_cmd, "--data", train.data, "training data (LIBSVM format)", {"data"});
    binder.option(train_cmd, "--test", train.test, "optional held-out data to score", {"test"});
    binder.option(train_cmd, "--lambda", train.lambda, "regularization weight (default per objective)", {"lambda"});
    binder.option(train_cmd, "--covariance", train.covariance, "auto|explicit|implicit", {"covariance"});
    binder.flag(train_cmd, "--no-normalize", train.no_normalize, "skip feature scaling", {"no_normalize"});
    binder.option(train_cmd, "--moments", train.moments_in, "precomputed moments JSON", {"moments"});
    binder.flag(train_cmd, "--save-moments", train.save_moments, "write moments.json", {"save_moments"});
    binder.flag(train_cmd, "--trajectory", train.trajectory, "write trajectory.csv", {"trajectory"});
    binder.option(train_cmd, "--snapshot-iter", train.snapshots, "also save the model at these iterations",
                  {"snapshot_iter"});
    binder.option(train_cmd, "--auc-ties", train.ties, "strict|half", {"auc_ties"});
    add_lbfgs_options(binder, train_cmd, train.lbfgs);

    EvalArgs eval;
    CLI::App* eval_cmd = app.add_subcommand("eval", "score a model on data");
    binder.option(eval_cmd, "--model", eval.model, "model JSON", {"model"});
    binder.option(eval_cmd, "--data", eval.data, "data (LIBSVM format)", {"data"});
    binder.option(eval_cmd, "--auc-ties", eval.ties, "strict|half", {"auc_ties"});

    BenchArgs bench;
    CLI::App* bench_cmd = app.add_subcommand("bench", "repeated k-fold cross-validation");
    binder.option(bench_cmd, "--data", bench.data, "data (LIBSVM format)", {"data"});
    binder.option(bench_cmd, "--objectives", bench.objectives, "comma-separated objectives", {"objectives"})
        ->delimiter(',');
    binder.option(bench_cmd, "--k", bench.k, "folds", {"k", "folds"});
    binder.option(bench_cmd, "--repeats", bench.repeats, "repeats", {"repeats"});
    binder.option(bench_cmd, "--lambda", bench.lambda, "fixed lambda for every objective", {"lambda"});
    binder.option(bench_cmd, "--covariance", bench.covariance, "auto|explicit|implicit", {"covariance"});
    binder.flag(bench_cmd, "--no-normalize", bench.no_normalize, "skip per-fold feature scaling", {"no_normalize"});
    binder.option(bench_cmd, "--auc-ties", bench.ties, "strict|half", {"auc_ties"});
    binder.option(bench_cmd, "--name", bench.name, "dataset label in reports", {"name", "dataset"});
    add_lbfgs_options(binder, bench_cmd, bench.lbfgs);

    PathArgs path;
    CLI::App* path_cmd = app.add_subcommand("path-plot", "trace objectives along a weight segment");
    binder.option(path_cmd, "--start", path.start, "start model (default: end model's start point)", {"start"});
    binder.option(path_cmd, "--end", path.end, "end model", {"end"});
    binder.option(path_cmd, "--data", path.data, "data (LIBSVM format)", {"data"});
    binder.option(path_cmd, "--objectives", path.functions, "n01,emp01,logistic,nrank,emprank,hinge",
                  {"objectives"})
        ->delimiter(',');
    binder.option(path_cmd, "--points", path.points, "number of points", {"points"});

    HistArgs hist;
    CLI::App* hist_cmd = app.add_subcommand("score-hist", "histograms of class and pair score distributions");
    binder.option(hist_cmd, "--model", hist.model, "model JSON", {"model"});
    binder.option(hist_cmd, "--data", hist.data, "data (LIBSVM format)", {"data"});
    binder.option(hist_cmd, "--bins", hist.bins, "bins per population", {"bins"});
    binder.option(hist_cmd, "--max-pairs", hist.max_pairs, "cap on sampled pairs", {"max_pairs"});

    std::vector<std::string> argv(args.begin() + (args.empty() ? 0 : 1), args.end());
    try {
        std::vector<std::string> reversed(argv.rbegin(), argv.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    CLI::App* cmd = app.get_subcommands().front();
    try {
        nlohmann::json config;
        if (!g.config.empty()) {
            config = load_json_file(g.config);
        }
        binder.apply(config, &app, cmd);

        auto require = [&](const std::string& value, const char* flag) {
            if (value.empty()) {
                throw ConfigError(cmd->get_name() + " needs " + flag);
            }
        };
        Manifest manifest(cmd->get_name(), argv);
        nlohmann::json resolved = binder.resolved(&app, cmd);
        if (cmd == train_cmd || cmd == bench_cmd) {
            resolved["lbfgs"] = lbfgs_json(cmd == train_cmd ? train.lbfgs : bench.lbfgs);
        }
        manifest.set_config(resolved);
        if (!g.config.empty()) {
            manifest.add_input(g.config);
        }

        int code = kOk;
        std::string manifest_name = cmd->get_name() + ".manifest.json";
        if (cmd == gen_cmd) {
            manifest_name = gen.name + ".manifest.json";
            code = cmd_gen(g, gen, manifest, out);
        } else if (cmd == train_cmd) {
            require(train.data, "--data");
            code = cmd_train(g, train, manifest, out);
        } else if (cmd == eval_cmd) {
            require(eval.model, "--model");
            require(eval.data, "--data");
            code = cmd_eval(g, eval, manifest, out, err);
        } else if (cmd == bench_cmd) {
            code = cmd_bench(g, bench, config, manifest, out);
        } else if (cmd == path_cmd) {
            require(path.end, "--end");
            require(path.data, "--data");
            code = cmd_path_plot(g, path, manifest, out);
        } else if (cmd == hist_cmd) {
            require(hist.model, "--model");
            require(hist.data, "--data");
            code = cmd_score_hist(g, hist, manifest, out);
        }
        manifest.write(join_path(g.out, manifest_name));
        return code;
    } catch (const ConfigError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return kDataError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kDataError;
    }
}

} // namespace smoothrisk::cli

#pragma once

#include <smoothrisk/dataset.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace smoothrisk {

/// Functions that can be traced along a weight path.
enum class PathFunction {
    N01,      ///< smooth 0-1 approximation (unpenalized)
    Emp01,    ///< empirical 0-1 error
    Logistic, ///< mean logistic loss (unregularized)
    NRank,    ///< smooth ranking-loss approximation (unpenalized)
    EmpRank,  ///< empirical ranking loss
    Hinge,    ///< mean pairwise hinge loss (unregularized)
};

/// "n01" | "emp01" | "logistic" | "nrank" | "emprank" | "hinge".
PathFunction parse_path_function(const std::string& name);
std::string to_string(PathFunction fn);

struct PathPlotRow {
    double t = 0.0;
    Vector w;
    /// One entry per requested function; empty where the function is
    /// undefined (the smooth approximations at w = 0).
    std::vector<std::optional<double>> values;
};

/// Evaluates each function at `points` equally spaced points
/// w(t) = (1 - t) w_start + t w_end, t = 0, 1/(points-1), ..., 1.
/// Smooth approximations use moments estimated from `data`.
std::vector<PathPlotRow> path_plot(const Vector& w_start, const Vector& w_end, const Dataset& data,
                                   std::span<const PathFunction> functions, int points = 100);

/// Header "t,<fn>,..." then one row per point; missing values are empty cells.
void write_path_plot_csv(std::ostream& out, std::span<const PathFunction> functions,
                         std::span<const PathPlotRow> rows);

struct ScoreHistogram {
    std::string population; ///< "pos", "neg" or "pair_diff"
    Index size = 0;
    double mean = 0.0;
    double std = 0.0; ///< sample standard deviation
    double lower = 0.0;
    double upper = 0.0;
    std::vector<long long> counts;
};

/// Histograms of w^T x+, w^T x- and w^T (x+_i - x-_j), each over `bins`
/// equal-width bins spanning its own range. All pairs are used when
/// n+ n- <= max_pairs, otherwise max_pairs pairs drawn with a seeded RNG.
std::vector<ScoreHistogram> score_histograms(const Vector& w, const Dataset& data, int bins, std::uint64_t seed,
                                             Index max_pairs = 100000);

/// Columns: population,bin,bin_lower,bin_upper,count,size,mean,std
void write_score_hist_csv(std::ostream& out, std::span<const ScoreHistogram> hists);

} // namespace smoothrisk

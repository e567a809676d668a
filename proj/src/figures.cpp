#include <smoothrisk/errors.hpp>
#include <smoothrisk/figures.hpp>
#include <smoothrisk/format.hpp>
#include <smoothrisk/metrics.hpp>
#include <smoothrisk/objectives.hpp>
#include <smoothrisk/random.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace smoothrisk {

PathFunction parse_path_function(const std::string& name)
{
    if (name == "n01") {
        return PathFunction::N01;
    }
    if (name == "emp01") {
        return PathFunction::Emp01;
    }
    if (name == "logistic") {
        return PathFunction::Logistic;
    }
    if (name == "nrank") {
        return PathFunction::NRank;
    }
    if (name == "emprank") {
        return PathFunction::EmpRank;
    }
    if (name == "hinge") {
        return PathFunction::Hinge;
    }
    throw ConfigError("unknown path function '" + name + "' (n01|emp01|logistic|nrank|emprank|hinge)");
}

std::string to_string(PathFunction fn)
{
    switch (fn) {
    case PathFunction::N01: return "n01";
    case PathFunction::Emp01: return "emp01";
    case PathFunction::Logistic: return "logistic";
    case PathFunction::NRank: return "nrank";
    case PathFunction::EmpRank: return "emprank";
    case PathFunction::Hinge: return "hinge";
    }
    return "n01";
}

std::vector<PathPlotRow> path_plot(const Vector& w_start, const Vector& w_end, const Dataset& data,
                                   std::span<const PathFunction> functions, int points)
{
    if (w_start.size() != w_end.size() || w_start.size() != data.dim()) {
        throw DataError("path endpoints and data must share one dimension (got " + std::to_string(w_start.size())
                        + ", " + std::to_string(w_end.size()) + ", " + std::to_string(data.dim()) + ")");
    }
    if (points < 2) {
        throw ConfigError("path plot needs at least two points");
    }
    const bool smooth = std::any_of(functions.begin(), functions.end(), [](PathFunction f) {
        return f == PathFunction::N01 || f == PathFunction::NRank;
    });
    std::optional<ClassMoments> moments;
    std::optional<DiffMoments> diff;
    if (smooth) {
        moments = estimate_class_moments(data);
        diff = diff_moments(*moments);
    }

    std::vector<PathPlotRow> rows;
    rows.reserve(static_cast<std::size_t>(points));
    for (int k = 0; k < points; ++k) {
        PathPlotRow row;
        row.t = static_cast<double>(k) / static_cast<double>(points - 1);
        row.w = (1.0 - row.t) * w_start + row.t * w_end;
        const bool at_origin = row.w.norm() < 1e-8;
        for (PathFunction fn : functions) {
            std::optional<double> v;
            switch (fn) {
            case PathFunction::N01:
                if (!at_origin) {
                    v = f_n01(row.w, *moments).value;
                }
                break;
            case PathFunction::NRank:
                if (!at_origin) {
                    v = f_nrank(row.w, *diff).value;
                }
                break;
            case PathFunction::Emp01: v = empirical_error(row.w, data); break;
            case PathFunction::Logistic: v = f_logistic(row.w, data, 0.0).value; break;
            case PathFunction::EmpRank: v = empirical_ranking_loss(row.w, data); break;
            case PathFunction::Hinge: v = f_hinge_pairwise(row.w, data, 0.0).value; break;
            }
            row.values.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_path_plot_csv(std::ostream& out, std::span<const PathFunction> functions,
                         std::span<const PathPlotRow> rows)
{
    out << 't';
    for (PathFunction fn : functions) {
        out << ',' << to_string(fn);
    }
    out << '\n';
    for (const auto& row : rows) {
        out << format_double(row.t);
        for (const auto& v : row.values) {
            out << ',';
            if (v) {
                out << format_double(*v);
            }
        }
        out << '\n';
    }
}

namespace {

ScoreHistogram histogram(std::string population, const std::vector<double>& values, int bins)
{
    ScoreHistogram h;
    h.population = std::move(population);
    h.size = static_cast<Index>(values.size());
    h.counts.assign(static_cast<std::size_t>(bins), 0);
    if (values.empty()) {
        return h;
    }
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    h.mean = sum / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) {
        ss += (v - h.mean) * (v - h.mean);
    }
    h.std = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;

    auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    h.lower = *lo;
    h.upper = *hi;
    if (h.upper <= h.lower) {
        h.lower -= 0.5;
        h.upper += 0.5;
    }
    const double width = (h.upper - h.lower) / static_cast<double>(bins);
    for (double v : values) {
        auto b = static_cast<long long>(std::floor((v - h.lower) / width));
        b = std::clamp<long long>(b, 0, bins - 1);
        ++h.counts[static_cast<std::size_t>(b)];
    }
    return h;
}

} // namespace

std::vector<ScoreHistogram> score_histograms(const Vector& w, const Dataset& data, int bins, std::uint64_t seed,
                                             Index max_pairs)
{
    if (bins < 1) {
        throw ConfigError("histogram needs at least one bin");
    }
    require_both_classes(data, 1, "score histogram");
    const Vector s = data.scores(w);
    std::vector<double> pos;
    std::vector<double> neg;
    for (Index i = 0; i < data.size(); ++i) {
        (data.label(i) > 0 ? pos : neg).push_back(s[i]);
    }
    std::vector<double> pairs;
    const auto n_pos = static_cast<Index>(pos.size());
    const auto n_neg = static_cast<Index>(neg.size());
    if (n_pos * n_neg <= max_pairs) {
        pairs.reserve(static_cast<std::size_t>(n_pos * n_neg));
        for (double p : pos) {
            for (double q : neg) {
                pairs.push_back(p - q);
            }
        }
    } else {
        Rng rng(seed);
        pairs.reserve(static_cast<std::size_t>(max_pairs));
        for (Index k = 0; k < max_pairs; ++k) {
            const double p = pos[rng.index(static_cast<std::uint64_t>(n_pos))];
            const double q = neg[rng.index(static_cast<std::uint64_t>(n_neg))];
            pairs.push_back(p - q);
        }
    }
    return {histogram("pos", pos, bins), histogram("neg", neg, bins), histogram("pair_diff", pairs, bins)};
}

void write_score_hist_csv(std::ostream& out, std::span<const ScoreHistogram> hists)
{
    out << "population,bin,bin_lower,bin_upper,count,size,mean,std\n";
    for (const auto& h : hists) {
        const auto bins = static_cast<double>(h.counts.size());
        for (std::size_t b = 0; b < h.counts.size(); ++b) {
            const double lo = h.lower + (h.upper - h.lower) * static_cast<double>(b) / bins;
            const double hi = h.lower + (h.upper - h.lower) * static_cast<double>(b + 1) / bins;
            out << h.population << ',' << b << ',' << format_double(lo) << ',' << format_double(hi) << ','
                << h.counts[b] << ',' << h.size << ',' << format_double(h.mean) << ',' << format_double(h.std)
                << '\n';
        }
    }
}

} // namespace smoothrisk

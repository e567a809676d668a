#include <smoothrisk/errors.hpp>
#include <smoothrisk/metrics.hpp>

#include <algorithm>
#include <vector>

namespace smoothrisk {

TieRule parse_tie_rule(const std::string& name)
{
    if (name == "strict") {
        return TieRule::Strict;
    }
    if (name == "half") {
        return TieRule::Half;
    }
    throw ConfigError("unknown tie rule '" + name + "' (strict|half)");
}

std::string to_string(TieRule rule) { return rule == TieRule::Strict ? "strict" : "half"; }

double empirical_error(const Vector& w, const Dataset& ds)
{
    if (ds.empty()) {
        throw DataError("empirical error of an empty dataset");
    }
    const Vector s = ds.scores(w);
    Index wrong = 0;
    for (Index i = 0; i < ds.size(); ++i) {
        if (static_cast<double>(ds.label(i)) * s[i] < 0.0) {
            ++wrong;
        }
    }
    return static_cast<double>(wrong) / static_cast<double>(ds.size());
}

PairCounts count_pair_inversions(std::span<const double> pos, std::span<const double> neg)
{
    std::vector<double> sorted(neg.begin(), neg.end());
    std::sort(sorted.begin(), sorted.end());
    PairCounts counts;
    for (double s : pos) {
        auto lo = std::lower_bound(sorted.begin(), sorted.end(), s);
        auto hi = std::upper_bound(lo, sorted.end(), s);
        counts.inversions += static_cast<long long>(sorted.end() - hi);
        counts.ties += static_cast<long long>(hi - lo);
    }
    return counts;
}

double ranking_loss_from_scores(std::span<const double> pos, std::span<const double> neg, TieRule ties)
{
    if (pos.empty() || neg.empty()) {
        throw DataError("ranking loss needs at least one positive and one negative example");
    }
    PairCounts c = count_pair_inversions(pos, neg);
    double bad = static_cast<double>(c.inversions);
    if (ties == TieRule::Half) {
        bad += 0.5 * static_cast<double>(c.ties);
    }
    return bad / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

double empirical_ranking_loss(const Vector& w, const Dataset& ds, TieRule ties)
{
    const Vector s = ds.scores(w);
    std::vector<double> pos;
    std::vector<double> neg;
    for (Index i = 0; i < ds.size(); ++i) {
        (ds.label(i) > 0 ? pos : neg).push_back(s[i]);
    }
    return ranking_loss_from_scores(pos, neg, ties);
}

} // namespace smoothrisk

#pragma once

#include <smoothrisk/dataset.hpp>

#include <span>
#include <string>

namespace smoothrisk {

/// How a positive/negative pair with equal scores is counted in the ranking
/// loss. Strict: ties are not losses. Half: ties count 1/2, the conventional
/// AUC.
enum class TieRule { Strict, Half };

TieRule parse_tie_rule(const std::string& name);
std::string to_string(TieRule rule);

/// Fraction of examples with y * w^T x < 0. A zero score counts as correct.
double empirical_error(const Vector& w, const Dataset& ds);

inline double accuracy(const Vector& w, const Dataset& ds) { return 1.0 - empirical_error(w, ds); }

/// Number of pairs with pos < neg (strict), and of pairs with pos == neg.
struct PairCounts {
    long long inversions = 0;
    long long ties = 0;
};

/// Counts pairs by sorting the negative scores: O((n+ + n-) log n-).
PairCounts count_pair_inversions(std::span<const double> pos, std::span<const double> neg);

double ranking_loss_from_scores(std::span<const double> pos, std::span<const double> neg,
                                TieRule ties = TieRule::Strict);

/// Fraction of positive/negative pairs ranked in the wrong order.
/// Throws DataError if either class is empty.
double empirical_ranking_loss(const Vector& w, const Dataset& ds, TieRule ties = TieRule::Strict);

inline double auc(const Vector& w, const Dataset& ds, TieRule ties = TieRule::Strict)
{
    return 1.0 - empirical_ranking_loss(w, ds, ties);
}

} // namespace smoothrisk

#include <smoothrisk/errors.hpp>
#include <smoothrisk/objectives.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace smoothrisk {

namespace {

constexpr double kOriginTolerance = 1e-8;
constexpr double kLogisticBranch = 30.0;

void require_nonzero(const Vector& w)
{
    if (w.norm() < kOriginTolerance) {
        throw NumericalError("undefined at origin: smooth risk objectives need |w| >= 1e-8");
    }
}

void check_dim(Index expected, const Vector& w)
{
    if (w.size() != expected) {
        throw DataError("weight vector has " + std::to_string(w.size()) + " entries, objective expects "
                        + std::to_string(expected));
    }
}

/// Phi(g(w)) and its gradient for g(w) = w^T mu / sqrt(w^T Sigma w).
struct CdfTerm {
    double g = 0.0;
    double cdf = 0.0;
    Vector gradient;
};

CdfTerm cdf_term(const Vector& w, const Vector& mu, const CovarianceRep& sigma)
{
    const Vector sigma_w = sigma.apply(w);
    const double q = std::max(0.0, w.dot(sigma_w));
    const double s = std::max(std::sqrt(q), 1e-12 * (1.0 + w.norm()));
    CdfTerm t;
    t.g = w.dot(mu) / s;
    t.cdf = std_normal_cdf(t.g);
    t.gradient = (std_normal_pdf(t.g) / s) * (mu - (t.g / s) * sigma_w);
    return t;
}

void add_penalty(ObjectiveEval& eval, const Vector& w, double lambda)
{
    if (lambda == 0.0) {
        return;
    }
    ObjectiveEval p = penalty(w, lambda);
    eval.value += p.value;
    eval.gradient += p.gradient;
}

double logistic_loss(double margin)
{
    if (margin > kLogisticBranch) {
        return std::exp(-margin);
    }
    if (margin < -kLogisticBranch) {
        return -margin + std::exp(margin);
    }
    return std::log1p(std::exp(-margin));
}

/// 1 / (1 + exp(margin)) without overflow.
double logistic_weight(double margin)
{
    if (margin >= 0.0) {
        double e = std::exp(-margin);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(margin));
}

/// The pair (i, j) contributes iff its hinge is strictly positive. The
/// expression is monotone in each score, which the binary searches rely on.
bool hinge_active(double s_pos, double s_neg) { return 1.0 - (s_pos - s_neg) > 0.0; }

ObjectiveEval hinge_sorted(const SparseRows& pos, const SparseRows& neg, const Vector& w, double lambda)
{
    const Index n_pos = pos.rows();
    const Index n_neg = neg.rows();
    const Vector s_pos = pos * w;
    const Vector s_neg = neg * w;

    std::vector<double> neg_sorted(s_neg.begin(), s_neg.end());
    std::sort(neg_sorted.begin(), neg_sorted.end());
    std::vector<double> pos_sorted(s_pos.begin(), s_pos.end());
    std::sort(pos_sorted.begin(), pos_sorted.end());

    // suffix[k] = sum of neg_sorted[k..]
    std::vector<double> suffix(neg_sorted.size() + 1, 0.0);
    for (std::size_t k = neg_sorted.size(); k > 0; --k) {
        suffix[k - 1] = suffix[k] + neg_sorted[k - 1];
    }

    double total = 0.0;
    Vector coef_pos(n_pos);
    for (Index i = 0; i < n_pos; ++i) {
        const double sp = s_pos[i];
        auto first = std::partition_point(neg_sorted.begin(), neg_sorted.end(),
                                          [sp](double sn) { return !hinge_active(sp, sn); });
        auto k = static_cast<std::size_t>(first - neg_sorted.begin());
        const double active = static_cast<double>(neg_sorted.size() - k);
        total += active * (1.0 - sp) + suffix[k];
        coef_pos[i] = -active;
    }
    Vector coef_neg(n_neg);
    for (Index j = 0; j < n_neg; ++j) {
        const double sn = s_neg[j];
        auto end = std::partition_point(pos_sorted.begin(), pos_sorted.end(),
                                        [sn](double sp) { return hinge_active(sp, sn); });
        coef_neg[j] = static_cast<double>(end - pos_sorted.begin());
    }

    const double pairs = static_cast<double>(n_pos) * static_cast<double>(n_neg);
    ObjectiveEval out;
    out.value = total / pairs + lambda * w.squaredNorm();
    out.gradient = (pos.transpose() * coef_pos + neg.transpose() * coef_neg) / pairs + 2.0 * lambda * w;
    return out;
}

} // namespace

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double std_normal_pdf(double x) { return std::exp(-0.5 * x * x) * (std::numbers::inv_sqrtpi / std::numbers::sqrt2); }

ObjectiveEval penalty(const Vector& w, double lambda)
{
    const double slack = 1.0 - w.squaredNorm();
    return ObjectiveEval{lambda * slack * slack, (-4.0 * lambda * slack) * w};
}

ObjectiveEval f_n01(const Vector& w, const ClassMoments& cm, PenaltyConfig pen)
{
    check_dim(cm.dim(), w);
    require_nonzero(w);
    const CdfTerm pos = cdf_term(w, cm.mu_pos, cm.sigma_pos);
    const CdfTerm neg = cdf_term(w, cm.mu_neg, cm.sigma_neg);
    ObjectiveEval out;
    // 1 - Phi(g) is evaluated as Phi(-g) to keep the upper tail accurate.
    out.value = cm.prior_pos * std_normal_cdf(-pos.g) + cm.prior_neg * neg.cdf;
    out.gradient = cm.prior_neg * neg.gradient - cm.prior_pos * pos.gradient;
    add_penalty(out, w, pen.lambda);
    return out;
}

ObjectiveEval f_nrank(const Vector& w, const DiffMoments& dm, PenaltyConfig pen)
{
    check_dim(dm.dim(), w);
    require_nonzero(w);
    CdfTerm t = cdf_term(w, dm.mu_hat, dm.sigma_hat);
    ObjectiveEval out{t.cdf, std::move(t.gradient)};
    add_penalty(out, w, pen.lambda);
    return out;
}

ObjectiveEval f_logistic(const Vector& w, const Dataset& ds, double lambda_l2)
{
    check_dim(ds.dim(), w);
    if (ds.empty()) {
        throw DataError("logistic loss needs at least one example");
    }
    const Vector s = ds.scores(w);
    const Index n = ds.size();
    Vector coef(n);
    double total = 0.0;
    for (Index i = 0; i < n; ++i) {
        const double y = static_cast<double>(ds.label(i));
        const double margin = y * s[i];
        total += logistic_loss(margin);
        coef[i] = -y * logistic_weight(margin);
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    ObjectiveEval out;
    out.value = total * inv_n + lambda_l2 * w.squaredNorm();
    out.gradient = (ds.features().transpose() * coef) * inv_n + 2.0 * lambda_l2 * w;
    return out;
}

ObjectiveEval f_hinge_pairwise(const Vector& w, const Dataset& ds, double lambda_l2)
{
    check_dim(ds.dim(), w);
    require_both_classes(ds, 1, "pairwise hinge loss");
    return hinge_sorted(ds.class_rows(1), ds.class_rows(-1), w, lambda_l2);
}

PairwiseHingeObjective::PairwiseHingeObjective(const Dataset& data, double lambda_l2)
    : lambda_{lambda_l2}
{
    require_both_classes(data, 1, "pairwise hinge loss");
    pos_ = data.class_rows(1);
    neg_ = data.class_rows(-1);
}

ObjectiveEval PairwiseHingeObjective::evaluate(const Vector& w) const
{
    check_dim(pos_.cols(), w);
    return hinge_sorted(pos_, neg_, w, lambda_);
}

ObjectiveKind parse_objective_kind(std::string_view name)
{
    if (name == "n01") {
        return ObjectiveKind::N01;
    }
    if (name == "nrank") {
        return ObjectiveKind::NRank;
    }
    if (name == "logistic") {
        return ObjectiveKind::Logistic;
    }
    if (name == "hinge") {
        return ObjectiveKind::Hinge;
    }
    throw ConfigError("unknown objective '" + std::string(name) + "' (n01|nrank|logistic|hinge)");
}

std::string to_string(ObjectiveKind kind)
{
    switch (kind) {
    case ObjectiveKind::N01: return "n01";
    case ObjectiveKind::NRank: return "nrank";
    case ObjectiveKind::Logistic: return "logistic";
    case ObjectiveKind::Hinge: return "hinge";
    }
    return "n01";
}

bool uses_moments(ObjectiveKind kind) { return kind == ObjectiveKind::N01 || kind == ObjectiveKind::NRank; }

} // namespace smoothrisk

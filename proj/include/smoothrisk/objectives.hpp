#pragma once

#include <smoothrisk/dataset.hpp>
#include <smoothrisk/moments.hpp>

#include <functional>
#include <string>
#include <string_view>

namespace smoothrisk {

struct ObjectiveEval {
    double value = 0.0;
    Vector gradient;
};

/// Differentiable (or subdifferentiable) function of a weight vector.
/// Implementations are immutable; evaluate() may be called concurrently.
class SmoothObjective {
  public:
    virtual ~SmoothObjective() = default;
    virtual Index dimension() const = 0;
    virtual ObjectiveEval evaluate(const Vector& w) const = 0;
};

/// Weight of the unit-norm penalty lambda * (1 - |w|^2)^2.
struct PenaltyConfig {
    double lambda = 0.0;
};

/// Standard normal CDF via erfc, accurate in both tails.
double std_normal_cdf(double x);
double std_normal_pdf(double x);

/// lambda * (1 - |w|^2)^2 and its gradient -4 lambda (1 - |w|^2) w.
ObjectiveEval penalty(const Vector& w, double lambda);

/// Normal approximation of the expected 0-1 error of sign(w^T x):
///   P(+) (1 - Phi(w^T mu+ / s+)) + P(-) Phi(w^T mu- / s-),  s = sqrt(w^T Sigma w),
/// plus the unit-norm penalty. Throws NumericalError for |w| < 1e-8.
ObjectiveEval f_n01(const Vector& w, const ClassMoments& cm, PenaltyConfig pen = {});

/// Normal approximation of the expected ranking loss
/// P(w^T X+ < w^T X-) = Phi(w^T mu_hat / sqrt(w^T Sigma_hat w)), plus penalty.
ObjectiveEval f_nrank(const Vector& w, const DiffMoments& dm, PenaltyConfig pen = {});

/// Mean logistic loss plus lambda |w|^2.
ObjectiveEval f_logistic(const Vector& w, const Dataset& ds, double lambda_l2);

/// Mean pairwise hinge max(0, 1 - (s+_i - s-_j)) over all positive/negative
/// pairs plus lambda |w|^2, with a subgradient. O(n log n + nnz).
ObjectiveEval f_hinge_pairwise(const Vector& w, const Dataset& ds, double lambda_l2);

enum class ObjectiveKind { N01, NRank, Logistic, Hinge };

/// "n01" | "nrank" | "logistic" | "hinge".
ObjectiveKind parse_objective_kind(std::string_view name);
std::string to_string(ObjectiveKind kind);
bool uses_moments(ObjectiveKind kind);

class N01Objective final : public SmoothObjective {
  public:
    N01Objective(ClassMoments moments, PenaltyConfig pen) : moments_{std::move(moments)}, pen_{pen} {}
    Index dimension() const override { return moments_.dim(); }
    ObjectiveEval evaluate(const Vector& w) const override { return f_n01(w, moments_, pen_); }

  private:
    ClassMoments moments_;
    PenaltyConfig pen_;
};

class NRankObjective final : public SmoothObjective {
  public:
    NRankObjective(DiffMoments moments, PenaltyConfig pen) : moments_{std::move(moments)}, pen_{pen} {}
    Index dimension() const override { return moments_.dim(); }
    ObjectiveEval evaluate(const Vector& w) const override { return f_nrank(w, moments_, pen_); }

  private:
    DiffMoments moments_;
    PenaltyConfig pen_;
};

class LogisticObjective final : public SmoothObjective {
  public:
    LogisticObjective(Dataset data, double lambda_l2) : data_{std::move(data)}, lambda_{lambda_l2} {}
    Index dimension() const override { return data_.dim(); }
    ObjectiveEval evaluate(const Vector& w) const override { return f_logistic(w, data_, lambda_); }

  private:
    Dataset data_;
    double lambda_;
};

/// Splits the data by class once so each evaluation only scores and sorts.
class PairwiseHingeObjective final : public SmoothObjective {
  public:
    PairwiseHingeObjective(const Dataset& data, double lambda_l2);
    Index dimension() const override { return pos_.cols(); }
    ObjectiveEval evaluate(const Vector& w) const override;

  private:
    SparseRows pos_;
    SparseRows neg_;
    double lambda_;
};

/// Adapts a callable, mainly for tests and ad-hoc problems.
class FunctionObjective final : public SmoothObjective {
  public:
    using Fn = std::function<ObjectiveEval(const Vector&)>;
    FunctionObjective(Index dim, Fn fn) : dim_{dim}, fn_{std::move(fn)} {}
    Index dimension() const override { return dim_; }
    ObjectiveEval evaluate(const Vector& w) const override { return fn_(w); }

  private:
    Index dim_;
    Fn fn_;
};

} // namespace smoothrisk

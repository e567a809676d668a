#pragma once

#include <smoothrisk/errors.hpp>
#include <smoothrisk/objectives.hpp>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace smoothrisk {

struct LbfgsConfig {
    /// Number of stored curvature pairs.
    int memory = 20;
    /// Sufficient-decrease constant.
    double c1 = 1e-4;
    /// Curvature constant of the strong Wolfe condition.
    double c2 = 0.9;
    int max_iters = 500;
    /// Stop once |grad| <= grad_tol.
    double grad_tol = 1e-4;
    /// Objective evaluations allowed per line search.
    int max_linesearch = 50;

    void validate() const;
};

enum class StopReason { Converged, IterationLimit, LineSearchFailed };

std::string to_string(StopReason reason);

struct IterationRecord {
    int iteration = 0;
    double value = 0.0;
    double grad_norm = 0.0;
};

/// What the line search saw for one accepted step; enough to re-check both
/// strong Wolfe conditions after the fact.
struct StepRecord {
    double value_before = 0.0;
    double slope_before = 0.0; ///< grad(w)^T p
    double step = 0.0;
    double value_after = 0.0;
    double slope_after = 0.0; ///< grad(w + step p)^T p
};

struct TrainResult {
    Vector w_final;
    int iterations = 0;
    double final_grad_norm = 0.0;
    double objective_value = 0.0;
    bool converged = false;
    StopReason reason = StopReason::IterationLimit;
    double solution_time = 0.0;
    /// Iterate 0 (the start point) through the final iterate.
    std::vector<IterationRecord> trajectory;
    std::vector<StepRecord> steps;
};

/// Thrown when the objective returns NaN or Inf; carries the last iterate at
/// which everything was finite.
class NonFiniteObjective : public NumericalError {
  public:
    NonFiniteObjective(const std::string& what, Vector last_finite)
        : NumericalError(what), last_finite_{std::move(last_finite)}
    {
    }
    const Vector& last_finite_iterate() const { return last_finite_; }

  private:
    Vector last_finite_;
};

/// Observer invoked after every iterate (including the start point) with the
/// current record and weights.
using IterationObserver = std::function<void(const IterationRecord&, const Vector&)>;

/// Limited-memory BFGS with a strong Wolfe bracketing/zoom line search.
///
/// Curvature pairs are kept only when s^T y > 1e-10 |s| |y|, which keeps the
/// implicit inverse Hessian positive definite on nonconvex objectives. A line
/// search that cannot satisfy the Wolfe conditions ends the run with
/// converged = false and the last accepted iterate.
TrainResult lbfgs_minimize(const SmoothObjective& objective, const Vector& w0, const LbfgsConfig& config = {},
                           const IterationObserver& observer = {});

struct StartPoint {
    Vector w0;
    /// True when the means were (nearly) parallel and a random direction was used.
    bool random_fallback = false;
};

/// Unit vector along the component of mu_pos orthogonal to mu_neg. Falls back
/// to a seeded random unit vector when that component vanishes or mu_neg = 0.
StartPoint initial_point(const Vector& mu_pos, const Vector& mu_neg, std::uint64_t fallback_seed = 0);

} // namespace smoothrisk

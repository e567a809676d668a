#pragma once

#include <smoothrisk/moments.hpp>
#include <smoothrisk/objectives.hpp>
#include <smoothrisk/optimizer.hpp>

#include <cstdint>
#include <memory>
#include <optional>

namespace smoothrisk {

/// Default regularization: 0.001 for n01/nrank, 1/n for logistic and
/// 1/sqrt(n+ n-) for the pairwise hinge.
double default_lambda(ObjectiveKind kind, const Dataset& train);

struct TrainOptions {
    ObjectiveKind objective = ObjectiveKind::N01;
    /// Overrides default_lambda when set.
    std::optional<double> lambda;
    CovarianceKind covariance = CovarianceKind::Auto;
    LbfgsConfig lbfgs;
    /// Seeds the random start of logistic/hinge and the start-point fallback.
    std::uint64_t seed = 0;
    /// Precomputed (or exact) moments; skips estimation for n01/nrank.
    std::optional<ClassMoments> moments;
};

struct TrainedModel {
    ObjectiveKind objective = ObjectiveKind::N01;
    double lambda = 0.0;
    Vector w_start;
    bool random_start = false;
    TrainResult result;
    /// Seconds spent estimating moments (0 when none were estimated).
    double moment_time = 0.0;

    const Vector& weights() const { return result.w_final; }
};

std::unique_ptr<SmoothObjective> make_objective(ObjectiveKind kind, const Dataset& train,
                                                const std::optional<ClassMoments>& moments, double lambda);

/// Moments (n01/nrank only), start point, then L-BFGS.
/// n01/nrank start orthogonal to mu-; logistic/hinge start from a seeded
/// random unit vector.
TrainedModel train_linear(const Dataset& train, const TrainOptions& options, const IterationObserver& observer = {});

} // namespace smoothrisk

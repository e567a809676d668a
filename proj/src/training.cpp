#include <smoothrisk/random.hpp>
#include <smoothrisk/training.hpp>

#include <chrono>
#include <cmath>

namespace smoothrisk {

double default_lambda(ObjectiveKind kind, const Dataset& train)
{
    switch (kind) {
    case ObjectiveKind::N01:
    case ObjectiveKind::NRank: return 0.001;
    case ObjectiveKind::Logistic: return 1.0 / static_cast<double>(train.size());
    case ObjectiveKind::Hinge:
        return 1.0
               / std::sqrt(static_cast<double>(train.count_positive()) * static_cast<double>(train.count_negative()));
    }
    return 0.0;
}

std::unique_ptr<SmoothObjective> make_objective(ObjectiveKind kind, const Dataset& train,
                                                const std::optional<ClassMoments>& moments, double lambda)
{
    switch (kind) {
    case ObjectiveKind::N01:
        if (!moments) {
            throw Error("n01 objective needs class moments");
        }
        return std::make_unique<N01Objective>(*moments, PenaltyConfig{lambda});
    case ObjectiveKind::NRank:
        if (!moments) {
            throw Error("nrank objective needs class moments");
        }
        return std::make_unique<NRankObjective>(diff_moments(*moments), PenaltyConfig{lambda});
    case ObjectiveKind::Logistic: return std::make_unique<LogisticObjective>(train, lambda);
    case ObjectiveKind::Hinge: return std::make_unique<PairwiseHingeObjective>(train, lambda);
    }
    throw Error("unhandled objective kind");
}

TrainedModel train_linear(const Dataset& train, const TrainOptions& options, const IterationObserver& observer)
{
    TrainedModel model;
    model.objective = options.objective;
    require_both_classes(train, 1, "training data");
    model.lambda = options.lambda.value_or(default_lambda(options.objective, train));
    if (model.lambda < 0.0) {
        throw ConfigError("lambda must be nonnegative");
    }

    std::optional<ClassMoments> moments = options.moments;
    if (uses_moments(options.objective)) {
        if (!moments) {
            const auto t0 = std::chrono::steady_clock::now();
            moments = estimate_class_moments(train, options.covariance);
            model.moment_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
        if (moments->dim() != train.dim()) {
            throw DataError("moments are " + std::to_string(moments->dim()) + "-dimensional, data is "
                            + std::to_string(train.dim()) + "-dimensional");
        }
        StartPoint start = initial_point(moments->mu_pos, moments->mu_neg, options.seed);
        model.w_start = std::move(start.w0);
        model.random_start = start.random_fallback;
    } else {
        Rng rng(options.seed);
        model.w_start = rng.unit_vector(train.dim());
        model.random_start = true;
    }

    auto objective = make_objective(options.objective, train, moments, model.lambda);
    model.result = lbfgs_minimize(*objective, model.w_start, options.lbfgs, observer);
    return model;
}

} // namespace smoothrisk

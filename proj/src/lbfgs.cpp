#include <smoothrisk/optimizer.hpp>
#include <smoothrisk/random.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <optional>

namespace smoothrisk {

namespace {

struct CurvaturePair {
    Vector s;
    Vector y;
    double rho = 0.0; ///< 1 / (s^T y)
};

/// Two-loop recursion: returns H * g for the implicit inverse Hessian H.
Vector apply_inverse_hessian(const std::deque<CurvaturePair>& history, const Vector& g)
{
    Vector q = g;
    std::vector<double> alpha(history.size());
    for (std::size_t i = history.size(); i > 0; --i) {
        const auto& p = history[i - 1];
        alpha[i - 1] = p.rho * p.s.dot(q);
        q -= alpha[i - 1] * p.y;
    }
    if (!history.empty()) {
        const auto& last = history.back();
        q *= last.s.dot(last.y) / last.y.squaredNorm();
    }
    for (std::size_t i = 0; i < history.size(); ++i) {
        const auto& p = history[i];
        const double beta = p.rho * p.y.dot(q);
        q += (alpha[i] - beta) * p.s;
    }
    return q;
}

struct Trial {
    double step = 0.0;
    double value = 0.0;
    double slope = 0.0;
    Vector w;
    Vector gradient;
};

/// Minimizer of the cubic through (a, fa, da) and (b, fb, db), kept at least
/// 10% of the interval away from either end; bisection if the fit degenerates.
/// When the values differ only by round-off the fit uses the slopes alone.
double cubic_step(const Trial& a, const Trial& b, double noise)
{
    const double lo = std::min(a.step, b.step);
    const double hi = std::max(a.step, b.step);
    const double margin = 0.1 * (hi - lo);
    if (std::abs(a.value - b.value) <= noise && a.slope != b.slope) {
        const double c = a.step - a.slope * (b.step - a.step) / (b.slope - a.slope);
        return std::clamp(std::isfinite(c) ? c : 0.5 * (lo + hi), lo + margin, hi - margin);
    }
    const double d1 = a.slope + b.slope - 3.0 * (a.value - b.value) / (a.step - b.step);
    const double disc = d1 * d1 - a.slope * b.slope;
    double t = 0.5 * (lo + hi);
    if (disc >= 0.0) {
        const double d2 = std::copysign(std::sqrt(disc), b.step - a.step);
        const double denom = b.slope - a.slope + 2.0 * d2;
        if (denom != 0.0) {
            const double c = b.step - (b.step - a.step) * (b.slope + d2 - d1) / denom;
            if (std::isfinite(c)) {
                t = c;
            }
        }
    }
    return std::clamp(t, lo + margin, hi - margin);
}

class LineSearch {
  public:
    LineSearch(const SmoothObjective& obj, const LbfgsConfig& cfg, const Vector& w, const Vector& p, double f0,
               double d0)
        : obj_{obj}, cfg_{cfg}, w_{w}, p_{p}, f0_{f0}, d0_{d0}, noise_{1e-10 * (1.0 + std::abs(f0))}
    {
    }

    std::optional<Trial> run(double initial_step)
    {
        Trial prev{0.0, f0_, d0_, {}, {}};
        double step = initial_step;
        bool first = true;
        while (evals_ < cfg_.max_linesearch) {
            Trial cur = evaluate(step);
            if (!sufficient_decrease(cur) || (!first && worse_than(cur, prev))) {
                return zoom(std::move(prev), std::move(cur));
            }
            if (curvature_ok(cur)) {
                return cur;
            }
            if (cur.slope >= 0.0) {
                return zoom(std::move(cur), std::move(prev));
            }
            prev = std::move(cur);
            step *= 2.0;
            first = false;
        }
        return std::nullopt;
    }

  private:
    bool sufficient_decrease(const Trial& t) const { return t.value <= f0_ + cfg_.c1 * t.step * d0_; }

    // Values within round-off of each other cannot order two trials; the
    // slope still tells which side of the minimizer a trial is on.
    bool worse_than(const Trial& t, const Trial& ref) const
    {
        if (std::abs(t.value - ref.value) <= noise_) {
            return t.slope * (t.step - ref.step) > 0.0;
        }
        return t.value >= ref.value;
    }
    bool curvature_ok(const Trial& t) const { return std::abs(t.slope) <= -cfg_.c2 * d0_; }

    Trial evaluate(double step)
    {
        ++evals_;
        Trial t;
        t.step = step;
        t.w = w_ + step * p_;
        ObjectiveEval e = obj_.evaluate(t.w);
        if (!std::isfinite(e.value) || !e.gradient.allFinite()) {
            throw NonFiniteObjective("objective returned a non-finite value during line search (step "
                                         + std::to_string(step) + ")",
                                     w_);
        }
        t.value = e.value;
        t.gradient = std::move(e.gradient);
        t.slope = t.gradient.dot(p_);
        return t;
    }

    std::optional<Trial> zoom(Trial lo, Trial hi)
    {
        while (evals_ < cfg_.max_linesearch) {
            if (std::abs(hi.step - lo.step) <= 1e-16 * std::max(1.0, std::abs(lo.step))) {
                return std::nullopt;
            }
            Trial cur = evaluate(cubic_step(lo, hi, noise_));
            if (!sufficient_decrease(cur) || worse_than(cur, lo)) {
                hi = std::move(cur);
                continue;
            }
            if (curvature_ok(cur)) {
                return cur;
            }
            if (cur.slope * (hi.step - lo.step) >= 0.0) {
                hi = std::move(lo);
            }
            lo = std::move(cur);
        }
        return std::nullopt;
    }

    const SmoothObjective& obj_;
    const LbfgsConfig& cfg_;
    const Vector& w_;
    const Vector& p_;
    double f0_;
    double d0_;
    double noise_;
    int evals_ = 0;
};

} // namespace

void LbfgsConfig::validate() const
{
    if (memory < 1) {
        throw ConfigError("L-BFGS memory must be at least 1");
    }
    if (!(c1 > 0.0 && c1 < c2 && c2 < 1.0)) {
        throw ConfigError("line search constants must satisfy 0 < c1 < c2 < 1");
    }
    if (!(grad_tol > 0.0)) {
        throw ConfigError("gradient tolerance must be positive");
    }
    if (max_iters < 0) {
        throw ConfigError("iteration cap must be nonnegative");
    }
    if (max_linesearch < 1) {
        throw ConfigError("line search needs at least one evaluation");
    }
}

std::string to_string(StopReason reason)
{
    switch (reason) {
    case StopReason::Converged: return "converged";
    case StopReason::IterationLimit: return "iteration_limit";
    case StopReason::LineSearchFailed: return "line_search_failed";
    }
    return "unknown";
}

TrainResult lbfgs_minimize(const SmoothObjective& objective, const Vector& w0, const LbfgsConfig& config,
                           const IterationObserver& observer)
{
    config.validate();
    if (w0.size() != objective.dimension()) {
        throw DataError("start point has dimension " + std::to_string(w0.size()) + ", objective expects "
                        + std::to_string(objective.dimension()));
    }
    const auto started = std::chrono::steady_clock::now();

    TrainResult result;
    Vector w = w0;
    ObjectiveEval e = objective.evaluate(w);
    if (!std::isfinite(e.value) || !e.gradient.allFinite()) {
        throw NonFiniteObjective("objective is not finite at the start point", w0);
    }
    double f = e.value;
    Vector g = std::move(e.gradient);

    auto record = [&](int iteration) {
        IterationRecord r{iteration, f, g.norm()};
        result.trajectory.push_back(r);
        if (observer) {
            observer(r, w);
        }
    };
    record(0);

    std::deque<CurvaturePair> history;
    result.reason = StopReason::IterationLimit;
    int iter = 0;
    while (true) {
        if (g.norm() <= config.grad_tol) {
            result.reason = StopReason::Converged;
            break;
        }
        if (iter >= config.max_iters) {
            break;
        }
        Vector p = -apply_inverse_hessian(history, g);
        double d0 = g.dot(p);
        if (!(d0 < 0.0)) {
            // Lost descent to round-off; restart from steepest descent.
            history.clear();
            p = -g;
            d0 = -g.squaredNorm();
        }
        LineSearch search(objective, config, w, p, f, d0);
        std::optional<Trial> step = search.run(1.0);
        if (!step) {
            result.reason = StopReason::LineSearchFailed;
            break;
        }
        result.steps.push_back(StepRecord{f, d0, step->step, step->value, step->slope});

        Vector s = step->w - w;
        Vector y = step->gradient - g;
        const double sy = s.dot(y);
        if (sy > 1e-10 * s.norm() * y.norm()) {
            history.push_back(CurvaturePair{std::move(s), std::move(y), 1.0 / sy});
            if (static_cast<int>(history.size()) > config.memory) {
                history.pop_front();
            }
        }
        w = std::move(step->w);
        f = step->value;
        g = std::move(step->gradient);
        ++iter;
        record(iter);
    }

    result.w_final = std::move(w);
    result.iterations = iter;
    result.final_grad_norm = g.norm();
    result.objective_value = f;
    result.converged = result.final_grad_norm <= config.grad_tol;
    result.solution_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return result;
}

StartPoint initial_point(const Vector& mu_pos, const Vector& mu_neg, std::uint64_t fallback_seed)
{
    if (mu_pos.size() != mu_neg.size()) {
        throw DataError("class means differ in dimension");
    }
    const double neg_sq = mu_neg.squaredNorm();
    if (neg_sq > 0.0) {
        Vector w_bar = mu_pos - (mu_neg.dot(mu_pos) / neg_sq) * mu_neg;
        // Second Gram-Schmidt pass removes the round-off left by the first.
        w_bar -= (mu_neg.dot(w_bar) / neg_sq) * mu_neg;
        const double norm = w_bar.norm();
        if (norm >= 1e-10 * mu_pos.norm() && norm > 0.0) {
            return StartPoint{w_bar / norm, false};
        }
    }
    Rng rng(fallback_seed);
    return StartPoint{rng.unit_vector(mu_pos.size()), true};
}

} // namespace smoothrisk

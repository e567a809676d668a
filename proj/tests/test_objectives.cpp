#include "oracles.hpp"

#include <doctest.h>

#include <smoothrisk/errors.hpp>
#include <smoothrisk/objectives.hpp>

using namespace smoothrisk;
using Eigen::Vector2d;

namespace {

ClassMoments symmetric_moments()
{
    ClassMoments cm;
    cm.mu_pos = Vector2d(1.0, 0.0);
    cm.mu_neg = Vector2d(-1.0, 0.0);
    cm.sigma_pos = CovarianceRep::from_matrix(Matrix::Identity(2, 2));
    cm.sigma_neg = CovarianceRep::from_matrix(Matrix::Identity(2, 2));
    return cm;
}

ClassMoments random_class_moments(Index d, std::uint64_t seed)
{
    return from_exact(random_moments(d, 0.3 + 0.4 * Rng(seed).uniform(), seed));
}

double fd_check(const std::function<ObjectiveEval(const Vector&)>& f, const Vector& w)
{
    const Vector fd = oracle::fd_gradient([&](const Vector& v) { return f(v).value; }, w);
    return oracle::rel_error(f(w).gradient, fd);
}

} // namespace

TEST_CASE("normal cdf reference values")
{
    CHECK(std_normal_cdf(0.0) == 0.5);
    CHECK(std_normal_cdf(1.0) == doctest::Approx(0.841344746068543).epsilon(1e-14));
    const double tail = std_normal_cdf(-10.0);
    CHECK(tail > 0.0);
    CHECK(tail == doctest::Approx(7.61985302416047e-24).epsilon(1e-10));
}

TEST_CASE("normal cdf symmetry")
{
    for (double x = -8.0; x <= 8.0; x += 0.03125) {
        CHECK(std::abs(std_normal_cdf(x) + std_normal_cdf(-x) - 1.0) <= 1e-15);
    }
}

TEST_CASE("n01: symmetric analytic cases")
{
    const ClassMoments cm = symmetric_moments();
    const ObjectiveEval e = f_n01(Vector2d(1.0, 0.0), cm);
    CHECK(e.value == doctest::Approx(1.0 - oracle::phi(1.0)).epsilon(1e-14));
    CHECK(e.value == doctest::Approx(0.158655).epsilon(1e-5));
    CHECK(std::abs(e.gradient(1)) < 1e-15);
    CHECK(f_n01(Vector2d(0.0, 1.0), cm).value == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("n01 and nrank reject the origin")
{
    const ClassMoments cm = symmetric_moments();
    CHECK_THROWS_AS(f_n01(Vector::Zero(2), cm), NumericalError);
    CHECK_THROWS_AS(f_nrank(Vector::Zero(2), diff_moments(cm)), NumericalError);
    CHECK_THROWS_WITH_AS(f_n01(Vector::Constant(2, 1e-9), cm), doctest::Contains("undefined at origin"),
                         NumericalError);
}

TEST_CASE("n01: value assembles from per-class terms")
{
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const ClassMoments cm = random_class_moments(6, seed);
        const Vector w = Rng(seed + 100).unit_vector(6);
        const Matrix sp = cm.sigma_pos.matrix();
        const Matrix sn = cm.sigma_neg.matrix();
        const double gp = w.dot(cm.mu_pos) / std::sqrt(w.dot(sp * w));
        const double gn = w.dot(cm.mu_neg) / std::sqrt(w.dot(sn * w));
        const double expect = cm.prior_pos * (1.0 - oracle::phi(gp)) + cm.prior_neg * oracle::phi(gn);
        CHECK(f_n01(w, cm).value == doctest::Approx(expect).epsilon(1e-14));
    }
}

TEST_CASE("n01: gradient matches finite differences")
{
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const ClassMoments cm = random_class_moments(10, seed);
        const Vector w = Rng(seed + 7).unit_vector(10);
        for (double lambda : {0.0, 0.001, 0.5}) {
            CHECK(fd_check([&](const Vector& v) { return f_n01(v, cm, {lambda}); }, w) <= 1e-5);
        }
    }
}

TEST_CASE("n01: gradient matches with implicit covariances")
{
    const Dataset ds = oracle::random_sparse(120, 15, 0.3, 4);
    const ClassMoments cm = estimate_class_moments(ds, CovarianceKind::Implicit);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Vector w = Rng(seed).unit_vector(15);
        CHECK(fd_check([&](const Vector& v) { return f_n01(v, cm, {0.001}); }, w) <= 1e-5);
        CHECK(fd_check([&](const Vector& v) { return f_nrank(v, diff_moments(cm), {0.001}); }, w) <= 1e-5);
    }
}

TEST_CASE("n01: matches Monte-Carlo misclassification")
{
    const Index samples = 1000000;
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const ExactMoments m = random_moments(4, 0.4, seed + 50);
        const Vector w = Rng(seed + 60).unit_vector(4);
        const double value = f_n01(w, from_exact(m)).value;
        const double mc = oracle::mc_error(w, m.mu_pos, m.mu_neg, m.sigma_pos, m.sigma_neg, m.prior_pos, samples,
                                           seed + 70);
        CHECK(std::abs(value - mc) <= 4.0 * std::sqrt(value * (1.0 - value) / samples) + 1e-3);
    }
}

TEST_CASE("nrank: equal means give one half")
{
    ClassMoments cm = random_class_moments(5, 3);
    cm.mu_neg = cm.mu_pos;
    const DiffMoments dm = diff_moments(cm);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        CHECK(f_nrank(Rng(seed).normal_vector(5), dm).value == 0.5);
    }
}

TEST_CASE("nrank: one-dimensional reference and Monte-Carlo pair oracle")
{
    ClassMoments cm;
    cm.mu_pos = Vector::Constant(1, 1.0);
    cm.mu_neg = Vector::Constant(1, -1.0);
    cm.sigma_pos = CovarianceRep::from_matrix(Matrix::Identity(1, 1));
    cm.sigma_neg = CovarianceRep::from_matrix(Matrix::Identity(1, 1));
    const double value = f_nrank(Vector::Ones(1), diff_moments(cm)).value;
    CHECK(value == doctest::Approx(oracle::phi(-std::sqrt(2.0))).epsilon(1e-14));
    CHECK(value == doctest::Approx(0.0786496).epsilon(1e-6));
    const double mc = oracle::mc_inversion(Vector::Ones(1), cm.mu_pos, cm.mu_neg, Matrix::Identity(1, 1),
                                           Matrix::Identity(1, 1), 400000, 1);
    CHECK(std::abs(mc - value) <= 4.0 * std::sqrt(value * (1.0 - value) / 400000));
}

TEST_CASE("nrank: gradient matches finite differences")
{
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const DiffMoments dm = diff_moments(random_class_moments(10, seed));
        const Vector w = Rng(seed + 3).unit_vector(10);
        for (double lambda : {0.0, 0.001}) {
            CHECK(fd_check([&](const Vector& v) { return f_nrank(v, dm, {lambda}); }, w) <= 1e-5);
        }
    }
}

TEST_CASE("nrank: increasing w^T mu_hat increases the value")
{
    ClassMoments cm = random_class_moments(4, 8);
    const Vector w = Rng(1).unit_vector(4);
    double previous = -1.0;
    for (double shift = -3.0; shift <= 3.0; shift += 0.25) {
        ClassMoments c = cm;
        c.mu_neg = cm.mu_pos + shift * w;
        const double v = f_nrank(w, diff_moments(c)).value;
        CHECK(v > previous);
        previous = v;
    }
}

TEST_CASE("smooth objectives are scale invariant and bounded")
{
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const ClassMoments cm = random_class_moments(6, seed);
        const DiffMoments dm = diff_moments(cm);
        const Vector w = Rng(seed + 1).normal_vector(6);
        const double a = f_n01(w, cm).value;
        const double b = f_nrank(w, dm).value;
        CHECK(a >= 0.0);
        CHECK(a <= 1.0);
        CHECK(b >= 0.0);
        CHECK(b <= 1.0);
        for (double alpha : {0.5, 2.0, 10.0}) {
            CHECK(std::abs(f_n01(alpha * w, cm).value - a) <= 1e-10);
            CHECK(std::abs(f_nrank(alpha * w, dm).value - b) <= 1e-10);
        }
    }
}

TEST_CASE("n01 stays finite in a covariance null space")
{
    ClassMoments cm = symmetric_moments();
    Matrix singular = Matrix::Zero(2, 2);
    singular(0, 0) = 1.0;
    cm.sigma_pos = CovarianceRep::from_matrix(singular);
    cm.sigma_neg = CovarianceRep::from_matrix(singular);
    const ObjectiveEval e = f_n01(Vector2d(0.0, 1.0), cm);
    CHECK(std::isfinite(e.value));
    CHECK(e.gradient.allFinite());
}

TEST_CASE("penalty examples and gradient")
{
    const ObjectiveEval unit = penalty(Vector2d(0.6, 0.8), 0.3);
    CHECK(std::abs(unit.value) < 1e-30);
    CHECK(unit.gradient.norm() < 1e-15);
    const ObjectiveEval origin = penalty(Vector::Zero(3), 0.001);
    CHECK(origin.value == 0.001);
    CHECK(origin.gradient.isZero());
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Vector w = Rng(seed).normal_vector(7);
        CHECK(fd_check([](const Vector& v) { return penalty(v, 0.7); }, w) <= 1e-7);
    }
}

TEST_CASE("logistic: zero weights give log 2")
{
    const Dataset ds = oracle::random_dense(3, 4, 5, 0);
    const ObjectiveEval e = f_logistic(Vector::Zero(5), ds, 0.2);
    CHECK(e.value == doctest::Approx(std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("logistic: large margins stay accurate")
{
    const Dataset one = Dataset::from_dense(Matrix::Ones(1, 1), {1});
    const ObjectiveEval e = f_logistic(Vector::Constant(1, 30.0), one, 0.0);
    CHECK(e.value == doctest::Approx(std::log1p(std::exp(-30.0))).epsilon(1e-12));
    CHECK(e.value == doctest::Approx(9.357622968840175e-14).epsilon(1e-10));
    const ObjectiveEval far = f_logistic(Vector::Constant(1, -800.0), one, 0.0);
    CHECK(far.value == doctest::Approx(800.0).epsilon(1e-15));
    CHECK(far.gradient(0) == doctest::Approx(-1.0));
    const ObjectiveEval safe = f_logistic(Vector::Constant(1, 800.0), one, 0.0);
    CHECK(std::isfinite(safe.value));
    CHECK(safe.value >= 0.0);
}

TEST_CASE("logistic: gradient matches finite differences")
{
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Dataset ds = oracle::random_dense(25, 25, 8, seed);
        const Vector w = Rng(seed + 11).unit_vector(8);
        CHECK(fd_check([&](const Vector& v) { return f_logistic(v, ds, 0.02); }, w) <= 1e-6);
    }
}

TEST_CASE("hinge: single pair examples")
{
    Matrix x(2, 1);
    x << 2, 0;
    const Dataset ds = Dataset::from_dense(x, {1, -1});
    CHECK(f_hinge_pairwise(Vector::Ones(1), ds, 0.0).value == 0.0);
    CHECK(f_hinge_pairwise(Vector::Zero(1), ds, 0.0).value == 1.0);
    CHECK_THROWS_AS(f_hinge_pairwise(Vector::Ones(1), Dataset::from_dense(x, {1, 1}), 0.0), DataError);
}

TEST_CASE("hinge: pair exactly at the kink is inactive")
{
    Matrix x(2, 1);
    x << 1, 0;
    const ObjectiveEval e = f_hinge_pairwise(Vector::Ones(1), Dataset::from_dense(x, {1, -1}), 0.0);
    CHECK(e.value == 0.0);
    CHECK(e.gradient.isZero());
}

TEST_CASE("hinge: sorted evaluation equals the double sum")
{
    Rng rng(21);
    for (int trial = 0; trial < 30; ++trial) {
        const Index np = 1 + static_cast<Index>(rng.index(100));
        const Index nn = 1 + static_cast<Index>(rng.index(100));
        const Dataset ds = oracle::random_dense(np, nn, 5, trial, 0.5);
        const Vector w = rng.normal_vector(5);
        const double lambda = rng.uniform();
        const ObjectiveEval fast = f_hinge_pairwise(w, ds, lambda);
        const ObjectiveEval slow = oracle::brute_hinge(w, ds, lambda);
        CHECK(std::abs(fast.value - slow.value) <= 1e-9);
        CHECK((fast.gradient - slow.gradient).cwiseAbs().maxCoeff() <= 1e-9);
        const PairwiseHingeObjective obj(ds, lambda);
        CHECK(std::abs(obj.evaluate(w).value - slow.value) <= 1e-9);
    }
}

TEST_CASE("hinge: tied and integer scores")
{
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        Matrix x(30, 2);
        std::vector<int> y;
        for (Index i = 0; i < 30; ++i) {
            x(i, 0) = static_cast<double>(rng.index(4));
            x(i, 1) = static_cast<double>(rng.index(3));
            y.push_back(i < 12 ? 1 : -1);
        }
        const Dataset ds = Dataset::from_dense(x, y);
        const Vector w = Vector2d(1.0, static_cast<double>(rng.index(3)) - 1.0);
        const ObjectiveEval fast = f_hinge_pairwise(w, ds, 0.0);
        const ObjectiveEval slow = oracle::brute_hinge(w, ds, 0.0);
        CHECK(std::abs(fast.value - slow.value) <= 1e-12);
        CHECK((fast.gradient - slow.gradient).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("objective kind names")
{
    for (auto kind : {ObjectiveKind::N01, ObjectiveKind::NRank, ObjectiveKind::Logistic, ObjectiveKind::Hinge}) {
        CHECK(parse_objective_kind(to_string(kind)) == kind);
    }
    CHECK(uses_moments(ObjectiveKind::NRank));
    CHECK(!uses_moments(ObjectiveKind::Hinge));
    CHECK_THROWS_AS(parse_objective_kind("lda"), ConfigError);
}

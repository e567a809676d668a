#include "oracles.hpp"

#include <doctest.h>

#include <smoothrisk/dataset.hpp>
#include <smoothrisk/errors.hpp>

#include <numeric>
#include <set>
#include <sstream>

using namespace smoothrisk;

TEST_CASE("libsvm: basic parse")
{
    const Dataset ds = parse_libsvm("+1 1:0.5 3:-1\n-1 2:1\n");
    CHECK(ds.size() == 2);
    CHECK(ds.dim() == 3);
    CHECK(ds.labels() == std::vector<int>{1, -1});
    const Matrix x = ds.dense();
    CHECK(x(0, 0) == 0.5);
    CHECK(x(0, 2) == -1.0);
    CHECK(x(1, 1) == 1.0);
    CHECK(x(1, 0) == 0.0);
}

TEST_CASE("libsvm: empty input gives an empty dataset")
{
    const Dataset ds = parse_libsvm("");
    CHECK(ds.size() == 0);
    CHECK(ds.dim() == 0);
}

TEST_CASE("libsvm: 0/1 labels, unsorted indices, comments and blank lines")
{
    const Dataset ds = parse_libsvm("1 3:2 1:1\n\n0 2:4 # trailing\n# whole line\n");
    REQUIRE(ds.size() == 2);
    CHECK(ds.labels() == std::vector<int>{1, -1});
    const Matrix x = ds.dense();
    CHECK(x(0, 0) == 1.0);
    CHECK(x(0, 2) == 2.0);
    CHECK(x(1, 1) == 4.0);
}

TEST_CASE("libsvm: dimension override")
{
    CHECK(parse_libsvm("+1 2:1\n", Index{5}).dim() == 5);
    CHECK_THROWS_AS(parse_libsvm("+1 6:1\n", Index{5}), DataError);
}

TEST_CASE("libsvm: errors carry the line number")
{
    auto message = [](std::string_view text) {
        try {
            parse_libsvm(text);
        } catch (const DataError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message("+1 1:1\n+1 0:2\n").find("line 2") != std::string::npos);
    CHECK(message("+1 1:1\n2 1:1\n").find("line 2") != std::string::npos);
    CHECK(message("+1 1:x\n").find("line 1") != std::string::npos);
    CHECK(message("+1 1-3\n").find("line 1") != std::string::npos);
    CHECK(message("+1 2:1 2:3\n").find("line 1") != std::string::npos);
    CHECK(message("abc 1:1\n").find("line 1") != std::string::npos);
}

TEST_CASE("libsvm: write then parse is exact")
{
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Dataset ds = oracle::random_sparse(50, 20, 0.3, seed);
        std::ostringstream out;
        write_libsvm(out, ds);
        const Dataset back = parse_libsvm(out.str(), ds.dim());
        CHECK(back.labels() == ds.labels());
        CHECK(back.dense() == ds.dense());
    }
}

TEST_CASE("libsvm: arbitrary doubles round-trip bit for bit")
{
    Rng rng(17);
    Matrix x(30, 4);
    std::vector<int> y;
    for (Index i = 0; i < x.rows(); ++i) {
        for (Index j = 0; j < x.cols(); ++j) {
            x(i, j) = rng.normal() * std::pow(10.0, rng.uniform(-30.0, 30.0));
        }
        y.push_back(i % 3 == 0 ? 1 : -1);
    }
    const Dataset ds = Dataset::from_dense(x, y);
    std::ostringstream out;
    write_libsvm(out, ds);
    CHECK(parse_libsvm(out.str()).dense() == x);
}

TEST_CASE("dataset rejects labels other than +1/-1")
{
    Matrix x = Matrix::Zero(2, 1);
    CHECK_THROWS_AS(Dataset::from_dense(x, {1, 0}), DataError);
    CHECK_THROWS_AS(Dataset::from_dense(x, {1}), DataError);
}

TEST_CASE("normalize: column scale examples")
{
    Matrix x(3, 2);
    x << 2, 0, -4, 0, 1, 0;
    const NormalizedData nd = normalize_features(Dataset::from_dense(x, {1, -1, 1}));
    const Matrix z = nd.data.dense();
    CHECK(z(0, 0) == 0.5);
    CHECK(z(1, 0) == -1.0);
    CHECK(z(2, 0) == 0.25);
    CHECK(nd.scale(0) == 4.0);
    CHECK(nd.scale(1) == 1.0);
    CHECK(z.col(1).isZero());
}

TEST_CASE("normalize: entries bounded by one and scale reapplies")
{
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Dataset ds = oracle::random_sparse(40, 15, 0.5, seed);
        const NormalizedData nd = normalize_features(ds);
        const Matrix z = nd.data.dense();
        CHECK(z.cwiseAbs().maxCoeff() <= 1.0);
        CHECK(apply_scale(ds, nd.scale).dense() == z);
    }
}

TEST_CASE("split: sizes, disjointness and determinism")
{
    const Dataset ds = oracle::random_dense(5, 5, 2, 1);
    const Split s = split(ds, 0.8, 3);
    CHECK(s.train.size() == 8);
    CHECK(s.test.size() == 2);
    std::set<Index> all(s.train_rows.begin(), s.train_rows.end());
    all.insert(s.test_rows.begin(), s.test_rows.end());
    CHECK(all.size() == 10);
    const Split again = split(ds, 0.8, 3);
    CHECK(again.train_rows == s.train_rows);
    CHECK(again.test_rows == s.test_rows);
}

TEST_CASE("split: random union property")
{
    Rng rng(99);
    for (int trial = 0; trial < 30; ++trial) {
        const Index n = 4 + static_cast<Index>(rng.index(60));
        const Dataset ds = oracle::random_dense(n / 2, n - n / 2, 2, trial);
        const double frac = rng.uniform(0.3, 0.9);
        Split s;
        try {
            s = split(ds, frac, trial);
        } catch (const DataError&) {
            continue;
        }
        CHECK(static_cast<double>(s.train.size()) == std::round(frac * static_cast<double>(n)));
        std::vector<Index> rows = s.train_rows;
        rows.insert(rows.end(), s.test_rows.begin(), s.test_rows.end());
        std::sort(rows.begin(), rows.end());
        std::vector<Index> expect(static_cast<std::size_t>(n));
        std::iota(expect.begin(), expect.end(), Index{0});
        CHECK(rows == expect);
    }
}

TEST_CASE("split: degenerate training class is rejected")
{
    Matrix x = Matrix::Zero(4, 1);
    CHECK_THROWS_WITH_AS(split(Dataset::from_dense(x, {1, 1, 1, 1}), 0.5, 0), doctest::Contains("degenerate split"), DataError);
    CHECK_THROWS_AS(split(Dataset::from_dense(x, {1, 1, 1, -1}), 1.0, 0), ConfigError);
}

TEST_CASE("kfold: partition examples")
{
    const Dataset ds = oracle::random_dense(5, 5, 2, 1);
    const auto folds = kfold(ds, 5, 0);
    REQUIRE(folds.size() == 5);
    std::vector<Index> seen;
    for (const auto& f : folds) {
        CHECK(f.test.size() == 2);
        CHECK(f.train.size() == 8);
        seen.insert(seen.end(), f.test_rows.begin(), f.test_rows.end());
    }
    std::sort(seen.begin(), seen.end());
    for (Index i = 0; i < 10; ++i) {
        CHECK(seen[static_cast<std::size_t>(i)] == i);
    }
    const auto two = kfold(oracle::random_dense(2, 2, 1, 0), 2, 0);
    CHECK(two[0].test.size() == 2);
    CHECK(two[1].test.size() == 2);
}

TEST_CASE("kfold: random partition property")
{
    Rng rng(5);
    for (int trial = 0; trial < 40; ++trial) {
        const Index n = 2 + static_cast<Index>(rng.index(50));
        const int k = 2 + static_cast<int>(rng.index(static_cast<std::uint64_t>(n - 1)));
        const Dataset ds = oracle::random_dense(n / 2, n - n / 2, 1, trial);
        const auto folds = kfold(ds, k, trial);
        REQUIRE(folds.size() == static_cast<std::size_t>(k));
        std::vector<Index> seen;
        for (const auto& f : folds) {
            CHECK(f.train.size() + f.test.size() == n);
            seen.insert(seen.end(), f.test_rows.begin(), f.test_rows.end());
        }
        CHECK(static_cast<Index>(seen.size()) == n);
        std::sort(seen.begin(), seen.end());
        CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
    }
}

TEST_CASE("kfold: too many folds")
{
    CHECK_THROWS(kfold(oracle::random_dense(2, 2, 1, 0), 5, 0));
    CHECK_THROWS(kfold(oracle::random_dense(2, 2, 1, 0), 1, 0));
}

TEST_CASE("flip_labels flips exactly round(frac n)")
{
    const Dataset ds = oracle::random_dense(50, 50, 2, 0);
    const Dataset f = flip_labels(ds, 0.1, 4);
    int diff = 0;
    for (Index i = 0; i < ds.size(); ++i) {
        diff += ds.label(i) != f.label(i) ? 1 : 0;
    }
    CHECK(diff == 10);
}

TEST_CASE("synthetic: class counts")
{
    const SyntheticData syn = gen_synthetic({500, 5000, 0.05, 0.0, 1});
    CHECK(syn.data.count_positive() == 250);
    CHECK(syn.data.count_negative() == 4750);
    CHECK(syn.data.dim() == 500);
}

TEST_CASE("synthetic: outliers flip round(frac n) labels")
{
    const SyntheticData clean = gen_synthetic({3, 1000, 0.3, 0.0, 8});
    const SyntheticData dirty = gen_synthetic({3, 1000, 0.3, 0.10, 8});
    CHECK(clean.data.dense() == dirty.data.dense());
    int diff = 0;
    for (Index i = 0; i < clean.data.size(); ++i) {
        diff += clean.data.label(i) != dirty.data.label(i) ? 1 : 0;
    }
    CHECK(diff == 100);
    CHECK(clean.moments.mu_pos == dirty.moments.mu_pos);
}

TEST_CASE("synthetic: bit-deterministic")
{
    const SyntheticData a = gen_synthetic({4, 200, 0.4, 0.05, 21});
    const SyntheticData b = gen_synthetic({4, 200, 0.4, 0.05, 21});
    CHECK(a.data.dense() == b.data.dense());
    CHECK(a.data.labels() == b.data.labels());
    CHECK(a.moments.sigma_pos == b.moments.sigma_pos);
}

TEST_CASE("synthetic: covariances symmetric positive definite with bounded spectrum")
{
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Matrix s = random_spd_matrix(12, seed);
        CHECK((s - s.transpose()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(s.llt().info() == Eigen::Success);
        Eigen::SelfAdjointEigenSolver<Matrix> es(s);
        CHECK(es.eigenvalues().minCoeff() >= 0.1 - 1e-10);
        CHECK(es.eigenvalues().maxCoeff() <= 2.0 + 1e-10);
    }
}

TEST_CASE("synthetic: class means converge to generating means")
{
    const Index n = 100000;
    const SyntheticData syn = gen_synthetic({2, n, 0.5, 0.0, 13});
    const Matrix x = syn.data.dense();
    for (int label : {1, -1}) {
        Vector sum = Vector::Zero(2);
        Index m = 0;
        for (Index i = 0; i < n; ++i) {
            if (syn.data.label(i) == label) {
                sum += x.row(i).transpose();
                ++m;
            }
        }
        const Vector mean = sum / static_cast<double>(m);
        const Vector& mu = label > 0 ? syn.moments.mu_pos : syn.moments.mu_neg;
        const Matrix& sig = label > 0 ? syn.moments.sigma_pos : syn.moments.sigma_neg;
        for (Index j = 0; j < 2; ++j) {
            CHECK(std::abs(mean(j) - mu(j)) <= 4.0 * std::sqrt(sig(j, j) / static_cast<double>(m)));
        }
    }
}

TEST_CASE("synthetic: invalid specs")
{
    CHECK_THROWS_AS(gen_synthetic({2, 10, 0.0, 0.0, 0}), ConfigError);
    CHECK_THROWS_AS(gen_synthetic({2, 10, 0.5, 0.5, 0}), ConfigError);
    CHECK_THROWS_AS(gen_synthetic({0, 10, 0.5, 0.0, 0}), ConfigError);
}

TEST_CASE("scores reject a wrong dimension")
{
    const Dataset ds = oracle::random_dense(2, 2, 3, 0);
    CHECK_THROWS_AS(ds.scores(Vector::Ones(2)), DataError);
}

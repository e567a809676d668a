#include <doctest.h>

#include <smoothrisk/random.hpp>

#include <algorithm>
#include <cmath>
#include <set>

using smoothrisk::Rng;

TEST_CASE("rng is reproducible for a seed")
{
    Rng a(42);
    Rng b(42);
    for (int i = 0; i < 100; ++i) {
        CHECK(a.normal() == b.normal());
        CHECK(a.index(17) == b.index(17));
    }
}

TEST_CASE("uniform draws stay in [0, 1)")
{
    Rng rng(1);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("normal draws have unit moments")
{
    Rng rng(3);
    const int n = 200000;
    double s = 0.0;
    double s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        s += z;
        s2 += z * z;
    }
    const double mean = s / n;
    // Five standard errors for the mean and for the second moment.
    CHECK(std::abs(mean) < 5.0 / std::sqrt(n));
    CHECK(std::abs(s2 / n - 1.0) < 5.0 * std::sqrt(2.0 / n));
}

TEST_CASE("index is uniform over its range")
{
    Rng rng(9);
    std::vector<int> counts(7, 0);
    const int n = 70000;
    for (int i = 0; i < n; ++i) {
        const auto k = rng.index(7);
        REQUIRE(k < 7);
        ++counts[k];
    }
    for (int c : counts) {
        CHECK(std::abs(c - n / 7) < 5.0 * std::sqrt(n / 7.0));
    }
}

TEST_CASE("unit vectors have norm one")
{
    Rng rng(5);
    for (int i = 0; i < 20; ++i) {
        CHECK(rng.unit_vector(13).norm() == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("permutation contains every index once")
{
    Rng rng(11);
    for (Eigen::Index n : {0, 1, 2, 10, 257}) {
        auto p = rng.permutation(n);
        std::sort(p.begin(), p.end());
        for (Eigen::Index i = 0; i < n; ++i) {
            CHECK(p[static_cast<std::size_t>(i)] == i);
        }
    }
}

TEST_CASE("derived seeds differ across streams")
{
    std::set<std::uint64_t> seen;
    for (std::uint64_t s = 0; s < 100; ++s) {
        seen.insert(smoothrisk::derive_seed(7, s));
    }
    CHECK(seen.size() == 100);
    CHECK(smoothrisk::derive_seed(7, 3) == smoothrisk::derive_seed(7, 3));
}

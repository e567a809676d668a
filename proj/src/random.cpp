#include <smoothrisk/random.hpp>

#include <cmath>
#include <limits>
#include <numeric>

namespace smoothrisk {

double Rng::normal()
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u = 0.0;
    double v = 0.0;
    double s = 0.0;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * factor;
    has_spare_ = true;
    return u * factor;
}

std::uint64_t Rng::index(std::uint64_t bound)
{
    // Rejection sampling removes modulo bias.
    std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - (std::numeric_limits<std::uint64_t>::max() % bound);
    std::uint64_t x = 0;
    do {
        x = engine_();
    } while (x >= limit);
    return x % bound;
}

Eigen::VectorXd Rng::normal_vector(Eigen::Index d)
{
    Eigen::VectorXd v(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        v[i] = normal();
    }
    return v;
}

Eigen::VectorXd Rng::unit_vector(Eigen::Index d)
{
    Eigen::VectorXd v;
    double norm = 0.0;
    do {
        v = normal_vector(d);
        norm = v.norm();
    } while (norm == 0.0);
    return v / norm;
}

std::vector<Eigen::Index> Rng::permutation(Eigen::Index n)
{
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Eigen::Index{0});
    shuffle(perm);
    return perm;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream)
{
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace smoothrisk

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <vector>

namespace smoothrisk {

/// Seeded pseudo-random source.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The conversions to uniform, normal and index draws are done here
/// rather than through the <random> distributions, whose algorithms are
/// implementation-defined, so a seed yields the same numbers on every
/// toolchain.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_{seed} {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal draw (Marsaglia polar method).
    double normal();

    /// Uniform integer in [0, bound), bound > 0.
    std::uint64_t index(std::uint64_t bound);

    Eigen::VectorXd normal_vector(Eigen::Index d);

    /// Uniformly distributed point on the unit sphere in R^d.
    Eigen::VectorXd unit_vector(Eigen::Index d);

    /// Fisher-Yates shuffle.
    template <class T> void shuffle(std::vector<T>& values)
    {
        for (std::size_t i = values.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(index(i));
            std::swap(values[i - 1], values[j]);
        }
    }

    /// Random permutation of 0..n-1.
    std::vector<Eigen::Index> permutation(Eigen::Index n);

  private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// Derives an independent stream seed from a base seed and a stream id
/// (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

} // namespace smoothrisk

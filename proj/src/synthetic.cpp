#include <smoothrisk/dataset.hpp>
#include <smoothrisk/errors.hpp>
#include <smoothrisk/random.hpp>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <cmath>

namespace smoothrisk {

void SyntheticSpec::validate() const
{
    if (d < 1) {
        throw ConfigError("synthetic dimension must be positive");
    }
    if (n < 2) {
        throw ConfigError("synthetic sample count must be at least 2");
    }
    if (!(prior_pos > 0.0 && prior_pos < 1.0)) {
        throw ConfigError("prior_pos must lie in (0, 1)");
    }
    if (!(outlier_frac >= 0.0 && outlier_frac < 0.5)) {
        throw ConfigError("outlier fraction must lie in [0, 0.5)");
    }
}

Matrix random_spd_matrix(Index d, std::uint64_t seed)
{
    Rng rng(seed);
    Matrix g(d, d);
    for (Index j = 0; j < d; ++j) {
        for (Index i = 0; i < d; ++i) {
            g(i, j) = rng.normal();
        }
    }
    Matrix q = Eigen::HouseholderQR<Matrix>(g).householderQ();
    Vector eig(d);
    for (Index i = 0; i < d; ++i) {
        eig[i] = rng.uniform(0.1, 2.0);
    }
    Matrix sigma = q * eig.asDiagonal() * q.transpose();
    // Exact symmetry; the product above is only symmetric to round-off.
    Matrix sym = 0.5 * (sigma + sigma.transpose());
    return sym;
}

ExactMoments random_moments(Index d, double prior_pos, std::uint64_t seed)
{
    Rng rng(derive_seed(seed, 0));
    ExactMoments m;
    m.mu_pos = rng.normal_vector(d);
    m.mu_neg = rng.normal_vector(d);
    m.sigma_pos = random_spd_matrix(d, derive_seed(seed, 1));
    m.sigma_neg = random_spd_matrix(d, derive_seed(seed, 2));
    m.prior_pos = prior_pos;
    return m;
}

Dataset sample_from_moments(const ExactMoments& moments, Index n, std::uint64_t seed)
{
    const Index d = moments.dim();
    if (moments.mu_neg.size() != d || moments.sigma_pos.rows() != d || moments.sigma_neg.rows() != d) {
        throw DataError("inconsistent moment dimensions");
    }
    Eigen::LLT<Matrix> chol_pos(moments.sigma_pos);
    Eigen::LLT<Matrix> chol_neg(moments.sigma_neg);
    if (chol_pos.info() != Eigen::Success || chol_neg.info() != Eigen::Success) {
        throw DataError("generating covariance is not positive definite");
    }
    const Matrix l_pos = chol_pos.matrixL();
    const Matrix l_neg = chol_neg.matrixL();

    auto n_pos = static_cast<Index>(std::llround(static_cast<double>(n) * moments.prior_pos));
    std::vector<int> labels(static_cast<std::size_t>(n), -1);
    std::fill(labels.begin(), labels.begin() + n_pos, 1);

    Rng rng(seed);
    rng.shuffle(labels);
    Matrix x(n, d);
    for (Index i = 0; i < n; ++i) {
        Vector z = rng.normal_vector(d);
        if (labels[static_cast<std::size_t>(i)] > 0) {
            x.row(i) = (moments.mu_pos + l_pos * z).transpose();
        } else {
            x.row(i) = (moments.mu_neg + l_neg * z).transpose();
        }
    }
    return Dataset::from_dense(x, std::move(labels));
}

SyntheticData gen_synthetic(const SyntheticSpec& spec)
{
    spec.validate();
    SyntheticData out;
    out.moments = random_moments(spec.d, spec.prior_pos, derive_seed(spec.seed, 10));
    out.data = sample_from_moments(out.moments, spec.n, derive_seed(spec.seed, 11));
    if (spec.outlier_frac > 0.0) {
        out.data = flip_labels(out.data, spec.outlier_frac, derive_seed(spec.seed, 12));
    }
    return out;
}

} // namespace smoothrisk

#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace smoothrisk {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseRows = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Labeled binary-classification data.
///
/// Feature rows are held in compressed row-major sparse form whether they
/// came from a sparse file or a dense generator; dense inputs simply store
/// every entry. Labels are +1 or -1. Instances are immutable.
class Dataset {
  public:
    Dataset() = default;

    /// Validates that labels match the row count and are all +1/-1.
    Dataset(SparseRows features, std::vector<int> labels);

    static Dataset from_dense(const Matrix& features, std::vector<int> labels);

    Index size() const { return features_.rows(); }
    Index dim() const { return features_.cols(); }
    bool empty() const { return size() == 0; }

    const SparseRows& features() const { return features_; }
    const std::vector<int>& labels() const { return labels_; }
    int label(Index i) const { return labels_[static_cast<std::size_t>(i)]; }

    Index count_positive() const;
    Index count_negative() const { return size() - count_positive(); }

    /// Fraction of stored nonzeros among n*d entries (0 for an empty set).
    double density() const;

    /// Scores w^T x_i for every row.
    Vector scores(const Vector& w) const;

    /// Rows whose label equals `label`, in original order.
    SparseRows class_rows(int label) const;

    /// Rows selected by index, in the given order.
    Dataset subset(std::span<const Index> rows) const;

    /// Same features with replacement labels.
    Dataset with_labels(std::vector<int> labels) const;

    Matrix dense() const { return Matrix(features_); }

  private:
    SparseRows features_;
    std::vector<int> labels_;
};

/// Throws DataError unless both classes have at least `min_per_class` rows.
void require_both_classes(const Dataset& ds, Index min_per_class, std::string_view context);

// ---------------------------------------------------------------------------
// LIBSVM text format

/// Parses "<label> <idx>:<val> ..." lines. Indices are 1-based in the text.
/// Labels 0/1 are mapped to -1/+1; +1/-1 are kept. `dim` overrides the
/// dimension, which otherwise is the largest index seen.
Dataset parse_libsvm(std::istream& in, std::optional<Index> dim = std::nullopt);
Dataset parse_libsvm(std::string_view text, std::optional<Index> dim = std::nullopt);
Dataset load_libsvm(const std::string& path, std::optional<Index> dim = std::nullopt);

/// Writes labels as +1/-1 and values in shortest round-trip form, so parsing
/// the output recovers every double exactly.
void write_libsvm(std::ostream& out, const Dataset& ds);

// ---------------------------------------------------------------------------
// Transforms

struct NormalizedData {
    Dataset data;
    /// Per-feature divisor; apply_scale(x) = x / scale.
    Vector scale;
};

/// Divides every column by its largest absolute value so that all entries lie
/// in [-1, 1]. All-zero columns keep scale 1.
NormalizedData normalize_features(const Dataset& ds);

/// Applies a scale vector returned by normalize_features to other data.
Dataset apply_scale(const Dataset& ds, const Vector& scale);

struct Split {
    Dataset train;
    Dataset test;
    std::vector<Index> train_rows;
    std::vector<Index> test_rows;
};

/// Random train/test split with round(train_frac * n) training rows.
/// Throws DataError("degenerate split") if the training part misses a class.
Split split(const Dataset& ds, double train_frac, std::uint64_t seed);

/// k-fold partition of a seeded permutation. Fold sizes differ by at most one.
std::vector<Split> kfold(const Dataset& ds, int k, std::uint64_t seed);

/// Flips round(frac * n) labels chosen uniformly without replacement.
Dataset flip_labels(const Dataset& ds, double frac, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Synthetic Gaussian data

struct SyntheticSpec {
    Index d = 2;
    Index n = 100;
    double prior_pos = 0.5;
    double outlier_frac = 0.0;
    std::uint64_t seed = 0;

    /// Throws ConfigError on out-of-range fields.
    void validate() const;
};

/// Generating moments of a two-class Gaussian model.
struct ExactMoments {
    Vector mu_pos;
    Vector mu_neg;
    Matrix sigma_pos;
    Matrix sigma_neg;
    double prior_pos = 0.5;

    Index dim() const { return mu_pos.size(); }
};

struct SyntheticData {
    Dataset data;
    /// Moments before any label flipping.
    ExactMoments moments;
};

/// Random SPD matrix Q diag(lambda) Q^T with Q orthogonal from the QR
/// factorization of a Gaussian matrix and lambda ~ U[0.1, 2.0].
Matrix random_spd_matrix(Index d, std::uint64_t seed);

/// Means ~ N(0, I), covariances from random_spd_matrix.
ExactMoments random_moments(Index d, double prior_pos, std::uint64_t seed);

/// Draws round(n * prior_pos) positives from N(mu_pos, sigma_pos) and the rest
/// from N(mu_neg, sigma_neg), in shuffled row order.
Dataset sample_from_moments(const ExactMoments& moments, Index n, std::uint64_t seed);

/// Full generator: random moments, sampling, then label flipping of
/// round(outlier_frac * n) examples.
SyntheticData gen_synthetic(const SyntheticSpec& spec);

} // namespace smoothrisk

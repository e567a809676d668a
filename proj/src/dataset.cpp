#include <smoothrisk/dataset.hpp>
#include <smoothrisk/errors.hpp>
#include <smoothrisk/random.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace smoothrisk {

Dataset::Dataset(SparseRows features, std::vector<int> labels)
    : features_{std::move(features)}, labels_{std::move(labels)}
{
    if (static_cast<Index>(labels_.size()) != features_.rows()) {
        throw DataError("dataset has " + std::to_string(features_.rows()) + " rows but "
                        + std::to_string(labels_.size()) + " labels");
    }
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i] != 1 && labels_[i] != -1) {
            throw DataError("label of row " + std::to_string(i) + " is " + std::to_string(labels_[i])
                            + ", expected +1 or -1");
        }
    }
    features_.makeCompressed();
}

Dataset Dataset::from_dense(const Matrix& features, std::vector<int> labels)
{
    SparseRows rows(features.rows(), features.cols());
    rows.reserve(Eigen::VectorXi::Constant(features.rows(), static_cast<int>(features.cols())));
    for (Index i = 0; i < features.rows(); ++i) {
        for (Index j = 0; j < features.cols(); ++j) {
            rows.insert(i, j) = features(i, j);
        }
    }
    return Dataset(std::move(rows), std::move(labels));
}

Index Dataset::count_positive() const
{
    return static_cast<Index>(std::count(labels_.begin(), labels_.end(), 1));
}

double Dataset::density() const
{
    if (size() == 0 || dim() == 0) {
        return 0.0;
    }
    return static_cast<double>(features_.nonZeros()) / (static_cast<double>(size()) * static_cast<double>(dim()));
}

Vector Dataset::scores(const Vector& w) const
{
    if (w.size() != dim()) {
        throw DataError("weight dimension " + std::to_string(w.size()) + " does not match data dimension "
                        + std::to_string(dim()));
    }
    return features_ * w;
}

SparseRows Dataset::class_rows(int label) const
{
    std::vector<Index> rows;
    for (Index i = 0; i < size(); ++i) {
        if (labels_[static_cast<std::size_t>(i)] == label) {
            rows.push_back(i);
        }
    }
    return subset(rows).features_;
}

Dataset Dataset::subset(std::span<const Index> rows) const
{
    const auto* src_outer = features_.outerIndexPtr();
    Index total = 0;
    for (Index r : rows) {
        if (r < 0 || r >= size()) {
            throw DataError("row index " + std::to_string(r) + " out of range");
        }
        total += src_outer[r + 1] - src_outer[r];
    }
    // Copy the compressed arrays directly; element-wise insertion is far slower.
    SparseRows out(static_cast<Index>(rows.size()), dim());
    out.resizeNonZeros(total);
    auto* outer = out.outerIndexPtr();
    outer[0] = 0;
    std::vector<int> labels;
    labels.reserve(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const Index r = rows[k];
        const auto begin = src_outer[r];
        const auto end = src_outer[r + 1];
        std::copy(features_.innerIndexPtr() + begin, features_.innerIndexPtr() + end,
                  out.innerIndexPtr() + outer[k]);
        std::copy(features_.valuePtr() + begin, features_.valuePtr() + end, out.valuePtr() + outer[k]);
        outer[k + 1] = outer[k] + (end - begin);
        labels.push_back(labels_[static_cast<std::size_t>(r)]);
    }
    return Dataset(std::move(out), std::move(labels));
}

Dataset Dataset::with_labels(std::vector<int> labels) const
{
    return Dataset(features_, std::move(labels));
}

void require_both_classes(const Dataset& ds, Index min_per_class, std::string_view context)
{
    Index pos = ds.count_positive();
    Index neg = ds.count_negative();
    if (pos < min_per_class || neg < min_per_class) {
        throw DataError(std::string(context) + ": need at least " + std::to_string(min_per_class)
                        + " examples per class, got " + std::to_string(pos) + " positive and "
                        + std::to_string(neg) + " negative");
    }
}

NormalizedData normalize_features(const Dataset& ds)
{
    Vector scale = Vector::Ones(ds.dim());
    Vector max_abs = Vector::Zero(ds.dim());
    const SparseRows& x = ds.features();
    for (Index i = 0; i < x.outerSize(); ++i) {
        for (SparseRows::InnerIterator it(x, i); it; ++it) {
            max_abs[it.col()] = std::max(max_abs[it.col()], std::abs(it.value()));
        }
    }
    for (Index j = 0; j < ds.dim(); ++j) {
        if (max_abs[j] > 0.0) {
            scale[j] = std::max(1e-300, max_abs[j]);
        }
    }
    return {apply_scale(ds, scale), scale};
}

Dataset apply_scale(const Dataset& ds, const Vector& scale)
{
    if (scale.size() != ds.dim()) {
        throw DataError("scale vector has dimension " + std::to_string(scale.size()) + ", data has "
                        + std::to_string(ds.dim()));
    }
    SparseRows x = ds.features();
    for (Index i = 0; i < x.outerSize(); ++i) {
        for (SparseRows::InnerIterator it(x, i); it; ++it) {
            it.valueRef() /= scale[it.col()];
        }
    }
    return Dataset(std::move(x), ds.labels());
}

Split split(const Dataset& ds, double train_frac, std::uint64_t seed)
{
    if (!(train_frac > 0.0 && train_frac < 1.0)) {
        throw ConfigError("train fraction must lie in (0, 1)");
    }
    Rng rng(seed);
    std::vector<Index> perm = rng.permutation(ds.size());
    auto n_train = static_cast<std::size_t>(std::llround(train_frac * static_cast<double>(ds.size())));
    Split out;
    out.train_rows.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.test_rows.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
    out.train = ds.subset(out.train_rows);
    out.test = ds.subset(out.test_rows);
    if (out.train.count_positive() == 0 || out.train.count_negative() == 0) {
        throw DataError("degenerate split: training part has an empty class");
    }
    return out;
}

std::vector<Split> kfold(const Dataset& ds, int k, std::uint64_t seed)
{
    if (k < 2) {
        throw ConfigError("k-fold needs k >= 2");
    }
    if (static_cast<Index>(k) > ds.size()) {
        throw ConfigError("k-fold with k = " + std::to_string(k) + " exceeds dataset size "
                          + std::to_string(ds.size()));
    }
    Rng rng(seed);
    std::vector<Index> perm = rng.permutation(ds.size());
    auto n = static_cast<std::size_t>(ds.size());
    auto folds = static_cast<std::size_t>(k);
    std::vector<Split> out;
    out.reserve(folds);
    std::size_t begin = 0;
    for (std::size_t f = 0; f < folds; ++f) {
        std::size_t len = n / folds + (f < n % folds ? 1 : 0);
        Split s;
        s.test_rows.assign(perm.begin() + static_cast<std::ptrdiff_t>(begin),
                           perm.begin() + static_cast<std::ptrdiff_t>(begin + len));
        s.train_rows.reserve(n - len);
        s.train_rows.insert(s.train_rows.end(), perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(begin));
        s.train_rows.insert(s.train_rows.end(), perm.begin() + static_cast<std::ptrdiff_t>(begin + len), perm.end());
        s.train = ds.subset(s.train_rows);
        s.test = ds.subset(s.test_rows);
        out.push_back(std::move(s));
        begin += len;
    }
    return out;
}

Dataset flip_labels(const Dataset& ds, double frac, std::uint64_t seed)
{
    if (!(frac >= 0.0 && frac < 0.5)) {
        throw ConfigError("outlier fraction must lie in [0, 0.5)");
    }
    auto count = static_cast<std::size_t>(std::llround(frac * static_cast<double>(ds.size())));
    Rng rng(seed);
    std::vector<Index> perm = rng.permutation(ds.size());
    std::vector<int> labels = ds.labels();
    for (std::size_t i = 0; i < count; ++i) {
        auto row = static_cast<std::size_t>(perm[i]);
        labels[row] = -labels[row];
    }
    return ds.with_labels(std::move(labels));
}

} // namespace smoothrisk

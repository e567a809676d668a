#include <smoothrisk/errors.hpp>
#include <smoothrisk/moments.hpp>

#include <algorithm>

namespace smoothrisk {

namespace {

void check_dim(Index expected, Index got)
{
    if (expected != got) {
        throw DataError("dimension mismatch: covariance is " + std::to_string(expected) + "-dimensional, vector has "
                        + std::to_string(got) + " entries");
    }
}

Vector apply_block(const ImplicitBlock& b, const Vector& v)
{
    const double m = static_cast<double>(b.count);
    Vector xv = (*b.rows) * v;
    Vector out = b.rows->transpose() * xv;
    out /= (m - 1.0);
    out -= (m / (m - 1.0)) * b.mean.dot(v) * b.mean;
    return out;
}

Vector class_mean(const SparseRows& rows)
{
    Vector sum = Vector::Zero(rows.cols());
    for (Index i = 0; i < rows.outerSize(); ++i) {
        for (SparseRows::InnerIterator it(rows, i); it; ++it) {
            sum[it.col()] += it.value();
        }
    }
    return sum / static_cast<double>(rows.rows());
}

Matrix explicit_covariance(const SparseRows& rows, const Vector& mean)
{
    Matrix centered = Matrix(rows).rowwise() - mean.transpose();
    Matrix sigma = Matrix::Zero(rows.cols(), rows.cols());
    sigma.selfadjointView<Eigen::Lower>().rankUpdate(centered.transpose(), 1.0 / static_cast<double>(rows.rows() - 1));
    sigma.triangularView<Eigen::StrictlyUpper>() = sigma.transpose();
    return sigma;
}

/// Per-class means and unbiased covariances straight from the full data,
/// without copying each class out. Centered rows are staged in a small dense
/// block and folded in with symmetric rank-k updates.
class ExplicitAccumulator {
  public:
    explicit ExplicitAccumulator(const Dataset& ds) : ds_{ds}
    {
        const Index d = ds.dim();
        for (int c = 0; c < 2; ++c) {
            mean_[c] = Vector::Zero(d);
        }
        const SparseRows& x = ds.features();
        for (Index i = 0; i < x.outerSize(); ++i) {
            const int c = slot(ds.label(i));
            ++count_[c];
            for (SparseRows::InnerIterator it(x, i); it; ++it) {
                mean_[c][it.col()] += it.value();
            }
        }
        for (int c = 0; c < 2; ++c) {
            mean_[c] /= static_cast<double>(count_[c]);
        }
    }

    const Vector& mean(int label) const { return mean_[slot(label)]; }

    Matrix covariance(int label) const
    {
        constexpr Index kBlock = 128;
        const int c = slot(label);
        const Index d = ds_.dim();
        const SparseRows& x = ds_.features();
        Matrix block(kBlock, d);
        Matrix sigma = Matrix::Zero(d, d);
        const double scale = 1.0 / static_cast<double>(count_[c] - 1);
        Index filled = 0;
        auto flush = [&] {
            sigma.selfadjointView<Eigen::Lower>().rankUpdate(block.topRows(filled).transpose(), scale);
            filled = 0;
        };
        for (Index i = 0; i < x.outerSize(); ++i) {
            if (ds_.label(i) != label) {
                continue;
            }
            block.row(filled) = -mean_[c].transpose();
            for (SparseRows::InnerIterator it(x, i); it; ++it) {
                block(filled, it.col()) += it.value();
            }
            if (++filled == kBlock) {
                flush();
            }
        }
        if (filled > 0) {
            flush();
        }
        sigma.triangularView<Eigen::StrictlyUpper>() = sigma.transpose();
        return sigma;
    }

  private:
    static int slot(int label) { return label > 0 ? 0 : 1; }

    const Dataset& ds_;
    Vector mean_[2];
    Index count_[2] = {0, 0};
};

nlohmann::json matrix_to_json(const Matrix& m)
{
    nlohmann::json rows = nlohmann::json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        rows.push_back(std::vector<double>(m.row(i).begin(), m.row(i).end()));
    }
    return rows;
}

Vector vector_from_json(const nlohmann::json& j, const char* key)
{
    if (!j.contains(key) || !j.at(key).is_array()) {
        throw DataError(std::string("moments document lacks array '") + key + "'");
    }
    auto values = j.at(key).get<std::vector<double>>();
    return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

Matrix matrix_from_json(const nlohmann::json& j, const char* key, Index d)
{
    if (!j.contains(key) || !j.at(key).is_array() || static_cast<Index>(j.at(key).size()) != d) {
        throw DataError(std::string("moments document lacks a ") + std::to_string(d) + "x" + std::to_string(d)
                        + " matrix '" + key + "'");
    }
    Matrix m(d, d);
    for (Index i = 0; i < d; ++i) {
        auto row = j.at(key).at(static_cast<std::size_t>(i)).get<std::vector<double>>();
        if (static_cast<Index>(row.size()) != d) {
            throw DataError(std::string("matrix '") + key + "' has a ragged row");
        }
        for (Index k = 0; k < d; ++k) {
            m(i, k) = row[static_cast<std::size_t>(k)];
        }
    }
    return m;
}

} // namespace

CovarianceRep CovarianceRep::from_matrix(Matrix sigma)
{
    if (sigma.rows() != sigma.cols()) {
        throw DataError("covariance matrix must be square");
    }
    CovarianceRep c;
    c.dim_ = sigma.rows();
    c.rep_ = std::move(sigma);
    return c;
}

CovarianceRep CovarianceRep::from_blocks(std::vector<ImplicitBlock> blocks)
{
    if (blocks.empty()) {
        throw DataError("implicit covariance needs at least one block");
    }
    CovarianceRep c;
    c.dim_ = blocks.front().rows->cols();
    for (const auto& b : blocks) {
        if (b.rows->cols() != c.dim_ || b.mean.size() != c.dim_) {
            throw DataError("implicit covariance blocks disagree on dimension");
        }
        if (b.count < 2 || b.count != b.rows->rows()) {
            throw DataError("implicit covariance block needs at least two rows");
        }
    }
    c.rep_ = std::move(blocks);
    return c;
}

Vector CovarianceRep::apply(const Vector& v) const
{
    check_dim(dim_, v.size());
    if (const auto* m = std::get_if<Matrix>(&rep_)) {
        return (*m) * v;
    }
    Vector out = Vector::Zero(dim_);
    for (const auto& b : std::get<std::vector<ImplicitBlock>>(rep_)) {
        out += apply_block(b, v);
    }
    return out;
}

double CovarianceRep::quadratic_form(const Vector& w) const
{
    // Round-off can leave tiny negative values for w near a null direction.
    return std::max(0.0, w.dot(apply(w)));
}

const Matrix& CovarianceRep::matrix() const
{
    if (const auto* m = std::get_if<Matrix>(&rep_)) {
        return *m;
    }
    throw Error("covariance is implicit; no stored matrix");
}

const std::vector<ImplicitBlock>& CovarianceRep::blocks() const
{
    if (const auto* b = std::get_if<std::vector<ImplicitBlock>>(&rep_)) {
        return *b;
    }
    throw Error("covariance is explicit; no implicit blocks");
}

Matrix CovarianceRep::to_dense() const
{
    if (is_explicit()) {
        return matrix();
    }
    Matrix out = Matrix::Zero(dim_, dim_);
    for (const auto& b : blocks()) {
        out += explicit_covariance(*b.rows, b.mean);
    }
    return out;
}

CovarianceRep operator+(const CovarianceRep& a, const CovarianceRep& b)
{
    if (a.dim() != b.dim()) {
        throw DataError("cannot add covariances of different dimension");
    }
    if (a.is_explicit() && b.is_explicit()) {
        return CovarianceRep::from_matrix(a.matrix() + b.matrix());
    }
    if (!a.is_explicit() && !b.is_explicit()) {
        std::vector<ImplicitBlock> blocks = a.blocks();
        blocks.insert(blocks.end(), b.blocks().begin(), b.blocks().end());
        return CovarianceRep::from_blocks(std::move(blocks));
    }
    // Mixed kinds: densify the implicit side.
    return CovarianceRep::from_matrix(a.to_dense() + b.to_dense());
}

CovarianceKind parse_covariance_kind(const std::string& name)
{
    if (name == "auto") {
        return CovarianceKind::Auto;
    }
    if (name == "explicit") {
        return CovarianceKind::Explicit;
    }
    if (name == "implicit") {
        return CovarianceKind::Implicit;
    }
    throw ConfigError("unknown covariance representation '" + name + "' (auto|explicit|implicit)");
}

std::string to_string(CovarianceKind kind)
{
    switch (kind) {
    case CovarianceKind::Auto: return "auto";
    case CovarianceKind::Explicit: return "explicit";
    case CovarianceKind::Implicit: return "implicit";
    }
    return "auto";
}

CovarianceKind choose_representation(const Dataset& ds)
{
    return (ds.dim() > 1024 || ds.density() < 0.10) ? CovarianceKind::Implicit : CovarianceKind::Explicit;
}

ClassMoments estimate_class_moments(const Dataset& ds, CovarianceKind kind)
{
    require_both_classes(ds, 2, "insufficient class samples");
    if (kind == CovarianceKind::Auto) {
        kind = choose_representation(ds);
    }
    ClassMoments cm;
    const double n = static_cast<double>(ds.size());
    const Index n_pos = ds.count_positive();
    const Index n_neg = ds.count_negative();
    cm.prior_pos = static_cast<double>(n_pos) / n;
    cm.prior_neg = static_cast<double>(n_neg) / n;

    if (kind == CovarianceKind::Explicit) {
        ExplicitAccumulator acc(ds);
        cm.mu_pos = acc.mean(1);
        cm.mu_neg = acc.mean(-1);
        cm.sigma_pos = CovarianceRep::from_matrix(acc.covariance(1));
        cm.sigma_neg = CovarianceRep::from_matrix(acc.covariance(-1));
        return cm;
    }
    auto pos = std::make_shared<const SparseRows>(ds.class_rows(1));
    auto neg = std::make_shared<const SparseRows>(ds.class_rows(-1));
    cm.mu_pos = class_mean(*pos);
    cm.mu_neg = class_mean(*neg);
    cm.sigma_pos = CovarianceRep::from_blocks({ImplicitBlock{pos, cm.mu_pos, n_pos}});
    cm.sigma_neg = CovarianceRep::from_blocks({ImplicitBlock{neg, cm.mu_neg, n_neg}});
    return cm;
}

ClassMoments from_exact(const ExactMoments& exact)
{
    ClassMoments cm;
    cm.mu_pos = exact.mu_pos;
    cm.mu_neg = exact.mu_neg;
    cm.sigma_pos = CovarianceRep::from_matrix(exact.sigma_pos);
    cm.sigma_neg = CovarianceRep::from_matrix(exact.sigma_neg);
    cm.prior_pos = exact.prior_pos;
    cm.prior_neg = 1.0 - exact.prior_pos;
    return cm;
}

DiffMoments diff_moments(const ClassMoments& cm)
{
    return DiffMoments{cm.mu_neg - cm.mu_pos, cm.sigma_pos + cm.sigma_neg};
}

nlohmann::json moments_to_json(const ClassMoments& cm, const std::string& data_ref)
{
    nlohmann::json j;
    j["mu_pos"] = std::vector<double>(cm.mu_pos.begin(), cm.mu_pos.end());
    j["mu_neg"] = std::vector<double>(cm.mu_neg.begin(), cm.mu_neg.end());
    j["prior_pos"] = cm.prior_pos;
    if (cm.sigma_pos.is_explicit() && cm.sigma_neg.is_explicit()) {
        j["sigma_rep"] = "explicit";
        j["sigma_pos"] = matrix_to_json(cm.sigma_pos.matrix());
        j["sigma_neg"] = matrix_to_json(cm.sigma_neg.matrix());
    } else {
        j["sigma_rep"] = "implicit";
        j["data_ref"] = data_ref;
    }
    return j;
}

ClassMoments moments_from_json(const nlohmann::json& doc, const Dataset* source)
{
    const std::string rep = doc.value("sigma_rep", std::string("explicit"));
    if (rep == "implicit") {
        if (source == nullptr) {
            throw DataError("implicit moments need the referenced data ('"
                            + doc.value("data_ref", std::string()) + "') to be loaded");
        }
        ClassMoments cm = estimate_class_moments(*source, CovarianceKind::Implicit);
        return cm;
    }
    if (rep != "explicit") {
        throw DataError("unknown sigma_rep '" + rep + "'");
    }
    ClassMoments cm;
    cm.mu_pos = vector_from_json(doc, "mu_pos");
    cm.mu_neg = vector_from_json(doc, "mu_neg");
    if (cm.mu_neg.size() != cm.mu_pos.size()) {
        throw DataError("mu_pos and mu_neg differ in dimension");
    }
    const Index d = cm.mu_pos.size();
    cm.sigma_pos = CovarianceRep::from_matrix(matrix_from_json(doc, "sigma_pos", d));
    cm.sigma_neg = CovarianceRep::from_matrix(matrix_from_json(doc, "sigma_neg", d));
    cm.prior_pos = doc.at("prior_pos").get<double>();
    if (!(cm.prior_pos > 0.0 && cm.prior_pos < 1.0)) {
        throw DataError("prior_pos must lie in (0, 1)");
    }
    cm.prior_neg = 1.0 - cm.prior_pos;
    return cm;
}

nlohmann::json exact_moments_to_json(const ExactMoments& m)
{
    return moments_to_json(from_exact(m));
}

ExactMoments exact_moments_from_json(const nlohmann::json& doc)
{
    ClassMoments cm = moments_from_json(doc);
    return ExactMoments{cm.mu_pos, cm.mu_neg, cm.sigma_pos.matrix(), cm.sigma_neg.matrix(), cm.prior_pos};
}

} // namespace smoothrisk

#pragma once

#include <smoothrisk/dataset.hpp>

#include <json.hpp>

#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace smoothrisk {

/// Rows of one class together with their mean, applied as the unbiased
/// sample covariance X^T X / (m-1) - m/(m-1) xbar xbar^T without ever forming
/// the d x d matrix.
struct ImplicitBlock {
    std::shared_ptr<const SparseRows> rows;
    Vector mean;
    Index count = 0;
};

/// A symmetric PSD covariance, stored either as a dense matrix or as a sum of
/// implicit per-class blocks.
class CovarianceRep {
  public:
    CovarianceRep() = default;

    static CovarianceRep from_matrix(Matrix sigma);
    static CovarianceRep from_blocks(std::vector<ImplicitBlock> blocks);

    bool is_explicit() const { return std::holds_alternative<Matrix>(rep_); }
    Index dim() const { return dim_; }

    /// Sigma * v. Throws DataError on a dimension mismatch.
    Vector apply(const Vector& v) const;

    /// w^T Sigma w, clamped below at zero.
    double quadratic_form(const Vector& w) const;

    /// Throws Error if the representation is implicit.
    const Matrix& matrix() const;
    const std::vector<ImplicitBlock>& blocks() const;

    /// Materializes the matrix (O(d^2) memory).
    Matrix to_dense() const;

    /// Sum of two covariances of the same kind.
    friend CovarianceRep operator+(const CovarianceRep& a, const CovarianceRep& b);

  private:
    std::variant<Matrix, std::vector<ImplicitBlock>> rep_;
    Index dim_ = 0;
};

inline Vector cov_apply(const CovarianceRep& c, const Vector& v) { return c.apply(v); }
inline double quadratic_form(const CovarianceRep& c, const Vector& w) { return c.quadratic_form(w); }

enum class CovarianceKind { Auto, Explicit, Implicit };

CovarianceKind parse_covariance_kind(const std::string& name);
std::string to_string(CovarianceKind kind);

/// Implicit when d > 1024 or density < 10%, explicit otherwise.
CovarianceKind choose_representation(const Dataset& ds);

struct ClassMoments {
    Vector mu_pos;
    Vector mu_neg;
    CovarianceRep sigma_pos;
    CovarianceRep sigma_neg;
    double prior_pos = 0.5;
    double prior_neg = 0.5;

    Index dim() const { return mu_pos.size(); }
};

/// Ranking moments: mu_hat = mu_neg - mu_pos, sigma_hat = sigma_pos + sigma_neg
/// (cross-class covariances are taken to be zero).
struct DiffMoments {
    Vector mu_hat;
    CovarianceRep sigma_hat;

    Index dim() const { return mu_hat.size(); }
};

/// Per-class sample means, unbiased covariances and priors n+/n, n-/n.
/// Needs at least two examples per class.
ClassMoments estimate_class_moments(const Dataset& ds, CovarianceKind kind = CovarianceKind::Auto);

/// Wraps known generating moments (explicit covariances).
ClassMoments from_exact(const ExactMoments& exact);

DiffMoments diff_moments(const ClassMoments& cm);

/// {"mu_pos", "mu_neg", "prior_pos", "sigma_rep", ...}. Explicit moments carry
/// "sigma_pos"/"sigma_neg" as row arrays; implicit moments carry only
/// "data_ref", the path of the data they were estimated from.
nlohmann::json moments_to_json(const ClassMoments& cm, const std::string& data_ref = {});

/// Inverse of moments_to_json. Implicit documents are rebuilt from `source`,
/// which must be the referenced data (after any normalization).
ClassMoments moments_from_json(const nlohmann::json& doc, const Dataset* source = nullptr);

nlohmann::json exact_moments_to_json(const ExactMoments& m);
ExactMoments exact_moments_from_json(const nlohmann::json& doc);

} // namespace smoothrisk

#pragma once

#include <smoothrisk/dataset.hpp>
#include <smoothrisk/objectives.hpp>

#include <json.hpp>

#include <string>

namespace smoothrisk {

/// A trained linear classifier together with the feature scaling it expects.
/// Serialized as {d, w, scale, objective, lambda, train_meta}.
struct LinearModel {
    Vector w;
    /// Divisors applied to raw features before scoring (all ones if none).
    Vector scale;
    ObjectiveKind objective = ObjectiveKind::N01;
    double lambda = 0.0;
    nlohmann::json train_meta = nlohmann::json::object();

    Index dim() const { return w.size(); }

    /// Applies the stored scale; throws DataError on a dimension mismatch.
    Dataset prepare(const Dataset& raw) const;
};

nlohmann::json model_to_json(const LinearModel& model);
LinearModel model_from_json(const nlohmann::json& doc);
LinearModel load_model(const std::string& path);

nlohmann::json vector_to_json(const Vector& v);
Vector vector_from_json(const nlohmann::json& j);

} // namespace smoothrisk

#include <smoothrisk/errors.hpp>
#include <smoothrisk/model.hpp>

#include <fstream>

namespace smoothrisk {

Dataset LinearModel::prepare(const Dataset& raw) const
{
    if (raw.dim() != dim()) {
        throw DataError("model is " + std::to_string(dim()) + "-dimensional, data is " + std::to_string(raw.dim())
                        + "-dimensional");
    }
    return apply_scale(raw, scale);
}

nlohmann::json vector_to_json(const Vector& v) { return std::vector<double>(v.begin(), v.end()); }

Vector vector_from_json(const nlohmann::json& j)
{
    auto values = j.get<std::vector<double>>();
    return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

nlohmann::json model_to_json(const LinearModel& model)
{
    return {{"d", model.dim()},
            {"w", vector_to_json(model.w)},
            {"scale", vector_to_json(model.scale)},
            {"objective", to_string(model.objective)},
            {"lambda", model.lambda},
            {"train_meta", model.train_meta}};
}

LinearModel model_from_json(const nlohmann::json& doc)
{
    try {
        LinearModel m;
        const auto d = doc.at("d").get<Index>();
        m.w = vector_from_json(doc.at("w"));
        m.scale = doc.contains("scale") ? vector_from_json(doc.at("scale")) : Vector::Ones(d);
        m.objective = parse_objective_kind(doc.at("objective").get<std::string>());
        m.lambda = doc.value("lambda", 0.0);
        m.train_meta = doc.value("train_meta", nlohmann::json::object());
        if (m.w.size() != d || m.scale.size() != d) {
            throw DataError("model vectors do not match d = " + std::to_string(d));
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed model document: ") + e.what());
    } catch (const ConfigError& e) {
        throw DataError(std::string("malformed model document: ") + e.what());
    }
}

LinearModel load_model(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open model '" + path + "'");
    }
    try {
        return model_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": " + e.what());
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
}

} // namespace smoothrisk

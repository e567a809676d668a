#include "oracles.hpp"

#include <doctest.h>

#include <smoothrisk/errors.hpp>
#include <smoothrisk/format.hpp>
#include <smoothrisk/model.hpp>

#include <charconv>

using namespace smoothrisk;

TEST_CASE("model json round trip")
{
    LinearModel m;
    m.w = Rng(1).normal_vector(4);
    m.scale = Vector::Constant(4, 2.5);
    m.objective = ObjectiveKind::Hinge;
    m.lambda = 0.125;
    m.train_meta["iterations"] = 7;
    const LinearModel back = model_from_json(nlohmann::json::parse(model_to_json(m).dump()));
    CHECK(back.w == m.w);
    CHECK(back.scale == m.scale);
    CHECK(back.objective == m.objective);
    CHECK(back.lambda == m.lambda);
    CHECK(back.train_meta.at("iterations") == 7);
    CHECK(model_to_json(m).at("d") == 4);
}

TEST_CASE("malformed models are data errors")
{
    CHECK_THROWS_AS(model_from_json(nlohmann::json::parse(R"({"w": [1, 2]})")), DataError);
    CHECK_THROWS_AS(model_from_json(nlohmann::json::parse(R"({"d": 3, "w": [1, 2], "scale": [1, 1],
        "objective": "n01", "lambda": 0})")),
                    DataError);
    CHECK_THROWS_AS(load_model("/nonexistent/model.json"), DataError);
}

TEST_CASE("prepare applies the stored scale")
{
    LinearModel m;
    m.w = Vector::Ones(2);
    m.scale = Eigen::Vector2d(2.0, 4.0);
    Matrix x(1, 2);
    x << 2, 4;
    const Dataset p = m.prepare(Dataset::from_dense(x, {1}));
    CHECK(p.dense()(0, 0) == 1.0);
    CHECK(p.dense()(0, 1) == 1.0);
    CHECK_THROWS_AS(m.prepare(Dataset::from_dense(Matrix::Ones(1, 3), {1})), DataError);
}

TEST_CASE("format_double is shortest round-trip")
{
    Rng rng(3);
    for (int i = 0; i < 1000; ++i) {
        const double v = rng.normal() * std::pow(10.0, rng.uniform(-300.0, 300.0));
        const std::string s = format_double(v);
        double back = 0.0;
        std::from_chars(s.data(), s.data() + s.size(), back);
        CHECK(back == v);
    }
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(-2.0) == "-2");
}

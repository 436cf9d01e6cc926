#include <functional>
#include <string>

#include <gtest/gtest.h>

#include "hpz/fixtures.hpp"
#include "hpz/hpz.hpp"
#include "hpz/io.hpp"

using namespace hpz;
using io::Json;

namespace
{

std::pair<ErrorCode, std::string> error_of(const std::function<void()>& f)
{
    try
    {
        f();
    }
    catch (const Error& e)
    {
        return {e.code(), e.what()};
    }
    ADD_FAILURE() << "no hpz::Error thrown";
    return {ErrorCode::IoError, ""};
}

Json pwna_json()
{
    return io::model_to_json(fixtures::pwna());
}

} // namespace

TEST(ModelFile, BundledPwnaMatchesFixture)
{
    const PwnaModel m = io::parse_model_file(std::string(HPZ_SOURCE_DIR) + "/tools/pwna.json");
    EXPECT_TRUE(io::same_model(m, fixtures::pwna()));
}

TEST(ModelFile, RoundTrip)
{
    PwnaModel m = fixtures::pwna();
    m.generator_cap = 1000;
    m.input_set = from_zonotope(Vector::Zero(1), Matrix::Ones(1, 1));
    for (Mode& mode : m.modes)
    {
        mode.dynamics.A.conservativeResize(2, 3);
        mode.dynamics.A.col(2).setConstant(0.1);
        for (Matrix& Q : mode.dynamics.Q)
            Q = Matrix::Identity(3, 3) * 0.01;
    }
    m.initial_set = fixtures::example1_hpz2();
    const PwnaModel back = io::parse_model_text(io::write_model(m));
    EXPECT_TRUE(io::same_model(m, back));
    EXPECT_EQ(io::write_model(back), io::write_model(m));
}

TEST(ModelFile, ExponentsDefaultToIdentity)
{
    Json j = pwna_json();
    j["initial_set"].erase("exponents");
    EXPECT_TRUE(io::same_model(io::parse_model(j), fixtures::pwna()));
}

TEST(ModelFile, QuadraticShapeNamesTheField)
{
    Json j = pwna_json();
    j["modes"][1]["quadratic"][1] = Json::array({Json::array({1, 0, 0}), Json::array({0, 1, 0})});
    const auto [code, msg] = error_of([&] { io::parse_model(j); });
    EXPECT_EQ(code, ErrorCode::DimensionMismatch);
    EXPECT_NE(msg.find("modes[1].quadratic[1]"), std::string::npos) << msg;
    EXPECT_NE(msg.find("2x3"), std::string::npos) << msg;
}

TEST(ModelFile, SchemaErrors)
{
    Json j = pwna_json();
    j["modes"] = Json::array();
    EXPECT_EQ(error_of([&] { io::parse_model(j); }).first, ErrorCode::SchemaError);

    j = pwna_json();
    j["colour"] = "red";
    const auto [code, msg] = error_of([&] { io::parse_model(j); });
    EXPECT_EQ(code, ErrorCode::SchemaError);
    EXPECT_NE(msg.find("colour"), std::string::npos) << msg;

    j = pwna_json();
    j.erase("horizon");
    EXPECT_EQ(error_of([&] { io::parse_model(j); }).first, ErrorCode::SchemaError);

    j = pwna_json();
    j["modes"][0]["offset"] = Json::array({1, 2, 3});
    EXPECT_EQ(error_of([&] { io::parse_model(j); }).first, ErrorCode::DimensionMismatch);
}

TEST(ModelFile, ExponentErrors)
{
    Json j = pwna_json();
    j["initial_set"]["exponents"][0][0] = 1.5;
    EXPECT_EQ(error_of([&] { io::parse_model(j); }).first, ErrorCode::NonIntegerExponent);
    j["initial_set"]["exponents"][0][0] = -1;
    EXPECT_EQ(error_of([&] { io::parse_model(j); }).first, ErrorCode::NegativeExponent);
}

TEST(ModelFile, SyntaxErrorReportsLine)
{
    const auto [code, msg] = error_of([] { io::parse_model_text("{\n  \"state_dim\": 2,\n  oops\n}"); });
    EXPECT_EQ(code, ErrorCode::ParseError);
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
}

TEST(ModelFile, MissingFile)
{
    EXPECT_EQ(error_of([] { io::parse_model_file("/nonexistent/model.json"); }).first, ErrorCode::IoError);
}

TEST(Artifacts, CsvHeaderAndRows)
{
    SampleOptions o;
    o.grid_res = 3;
    o.random_fill = false;
    const PointCloud c = sample(fixtures::pwna().initial_set, o);
    const std::string csv = io::cloud_csv(2, c);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "step,x1,x2,leaf");
    EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), c.size() + 1);
    EXPECT_NE(csv.find("\n2,-0.40100000000000002,0.76000000000000001,0\n"), std::string::npos) << csv;
    EXPECT_EQ(csv, io::cloud_csv(2, sample(fixtures::pwna().initial_set, o)));
}

TEST(Artifacts, SvgDrawsGuardsAndPoints)
{
    const PwnaModel m = fixtures::pwna();
    SampleOptions o;
    o.grid_res = 4;
    const PointCloud c = sample(m.initial_set, o);
    const std::string svg = io::scatter_svg({&c}, {m.modes[0].guard});
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    EXPECT_NE(svg.find("stroke-dasharray"), std::string::npos);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);

    o.grid_res = 2;
    const PointCloud line = sample(from_zonotope(Vector::Zero(1), Matrix::Ones(1, 1)), o);
    EXPECT_EQ(error_of([&] { io::scatter_svg({&line}, {}); }).first, ErrorCode::DimensionMismatch);
}

TEST(Artifacts, DiagnosticsJson)
{
    const ReachResult r = reach(fixtures::pwna());
    const Json d = io::diagnostics_json(r);
    EXPECT_TRUE(d["ok"].get<bool>());
    ASSERT_EQ(d["steps"].size(), 6u);
    EXPECT_EQ(d["steps"][5]["n_g"].get<int>(), 560);

    const Json e = io::error_json(ErrorCode::SchemaError, "x");
    EXPECT_EQ(e["code"].get<int>(), 31);
    EXPECT_EQ(e["error"].get<std::string>(), to_string(ErrorCode::SchemaError));
}

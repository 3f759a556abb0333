#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "spinbus/experiments.hpp"

using namespace spinbus;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {
fs::path tmpdir(const std::string& tag) {
    auto p = fs::temp_directory_path() / ("spinbus_test_" + tag);
    fs::remove_all(p);
    return p;
}
std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}
} // namespace

TEST_CASE("schema validation") {
    SUBCASE("unknown top-level key rejected") {
        auto r = validate_config(R"({"experiment":"yield","bogus":1})");
        CHECK(r.status == RunStatus::SchemaError);
        CHECK(r.summary_json.find("bogus") != std::string::npos);
    }
    SUBCASE("unknown parameter rejected") {
        auto r = validate_config(R"({"experiment":"yield","parameters":{"p_conv":0.4}})");
        CHECK(r.status == RunStatus::SchemaError);
    }
    SUBCASE("unknown experiment rejected") {
        auto r = validate_config(R"({"experiment":"teleportation"})");
        CHECK(r.status == RunStatus::SchemaError);
    }
    SUBCASE("bad version rejected") {
        auto r = validate_config(R"({"version":2,"experiment":"yield"})");
        CHECK(r.status == RunStatus::SchemaError);
    }
    SUBCASE("valid config accepted") {
        auto r = validate_config(
            R"({"version":1,"experiment":"yield","seed":7,"parameters":{"trials":20000}})");
        CHECK(r.status == RunStatus::Ok);
    }
    SUBCASE("sweep over a non-parameter rejected") {
        auto r = validate_config(
            R"({"experiment":"yield","sweep":[{"key":"nope","values":[1,2]}]})");
        CHECK(r.status == RunStatus::SchemaError);
    }
    SUBCASE("more than three sweep axes rejected") {
        auto r = validate_config(
            R"({"experiment":"ss-budget","sweep":[{"key":"n","values":[1]},{"key":"t1_s","values":[1]},{"key":"t_ss_s","values":[1]},{"key":"kappa_hz","values":[1]}]})");
        CHECK(r.status == RunStatus::SchemaError);
    }
}

TEST_CASE("run writes outputs, echo and manifest") {
    const auto dir = tmpdir("run");
    auto r = run_config(R"({"experiment":"yield","seed":9,"parameters":{"trials":20000}})", dir);
    REQUIRE(r.status == RunStatus::Ok);
    CHECK(fs::exists(dir / "resolved_config.json"));
    CHECK(fs::exists(dir / "summary.json"));
    CHECK(fs::exists(dir / "manifest.json"));
    const auto manifest = json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest.contains("config_hash"));
    CHECK(manifest.contains("tool_version"));
    const auto resolved = json::parse(slurp(dir / "resolved_config.json"));
    CHECK(resolved["seed"] == 9);
    const auto summary = json::parse(r.summary_json);
    CHECK(summary["trials"] == 20000);
    fs::remove_all(dir);
}

TEST_CASE("determinism: identical config and seed give byte-identical outputs") {
    const auto d1 = tmpdir("det1");
    const auto d2 = tmpdir("det2");
    const std::string cfg =
        R"({"experiment":"contours","seed":3,"parameters":{"method":"SS","n_t1":6,"n_time":12}})";
    REQUIRE(run_config(cfg, d1).status == RunStatus::Ok);
    REQUIRE(run_config(cfg, d2).status == RunStatus::Ok);
    CHECK(slurp(d1 / "data.csv") == slurp(d2 / "data.csv"));
    CHECK(slurp(d1 / "summary.json") == slurp(d2 / "summary.json"));
    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST_CASE("optimize experiment wraps the optimizer") {
    const auto dir = tmpdir("opt");
    auto r = run_config(R"({"experiment":"optimize","parameters":{"method":"SS","n":18}})", dir);
    REQUIRE(r.status == RunStatus::Ok);
    const auto s = json::parse(r.summary_json);
    CHECK(s.contains("omega_i_hz"));
    CHECK(s.contains("t_ss_s"));
    CHECK(s["budget"].contains("terms"));
    const double om = s["omega_i_hz"].get<double>();
    CHECK(om > 225e3);
    CHECK(om < 900e3);
    fs::remove_all(dir);
}

TEST_CASE("sweep produces a merged csv") {
    const auto dir = tmpdir("sweep");
    const std::string cfg = R"({
      "experiment":"ffst-budget","seed":1,
      "parameters":{"n":7},
      "sweep":[{"key":"t1_s","values":[0.05,0.1,0.25]}]
    })";
    auto r = run_config(cfg, dir, false, 2);
    REQUIRE(r.status == RunStatus::Ok);
    const auto csv = slurp(dir / "data.csv");
    // header + 3 rows
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
    CHECK(csv.find("t1_s") == 0);
    const auto s = json::parse(r.summary_json);
    CHECK(s["cells"] == 3);
    fs::remove_all(dir);
}

TEST_CASE("empty sweep axis list behaves like run") {
    const auto dir = tmpdir("sweep0");
    auto r = run_config(R"({"experiment":"yield","sweep":[],"parameters":{"trials":15000}})", dir);
    // zero axes -> single cell
    REQUIRE(r.status == RunStatus::Ok);
    const auto s = json::parse(r.summary_json);
    CHECK(s["cells"] == 1);
    fs::remove_all(dir);
}

TEST_CASE("numerical failures exit with code 3") {
    const auto dir = tmpdir("numfail");
    // layout with a broken geometry violates the link tolerance
    auto r = run_config(R"({"experiment":"layout","parameters":{"w_nm":1e-6}})", dir);
    CHECK(r.status == RunStatus::NumericalError);
    CHECK(json::parse(r.summary_json)["code"] == 3);
    fs::remove_all(dir);
}

TEST_CASE("constants overridable via the config document") {
    const auto dir = tmpdir("consts");
    // freq-plan exact mode: doubled hyperfine constants double the minimum
    // spacing while the nitrogen-nitrogen pairs dominate (few rows; with many
    // rows the NV ladder enters the nitrogen band and a new pair class wins)
    const std::string base =
        R"({"experiment":"freq-plan","parameters":{"rows":16,"offsets":"exact"}})";
    auto r1 = run_config(base, dir);
    REQUIRE(r1.status == RunStatus::Ok);
    const double m1 = json::parse(r1.summary_json)["min_spacing_hz"].get<double>();
    const std::string doubled = R"({
      "experiment":"freq-plan","parameters":{"rows":16,"offsets":"exact"},
      "constants":{"n_hyperfine_par":-319.4e6,"n_hyperfine_perp":-227.6e6}
    })";
    auto r2 = run_config(doubled, dir);
    REQUIRE(r2.status == RunStatus::Ok);
    const double m2 = json::parse(r2.summary_json)["min_spacing_hz"].get<double>();
    CHECK(m2 == doctest::Approx(2 * m1).epsilon(1e-9));
    SUBCASE("unknown constant rejected") {
        auto r = validate_config(R"({"experiment":"yield","constants":{"plancks":1}})");
        CHECK(r.status == RunStatus::SchemaError);
    }
    fs::remove_all(dir);
}

TEST_CASE("boundary-optimum warning escalates under strict") {
    const auto dir = tmpdir("strict");
    // an absurd T1 pushes the SS optimum onto the grid boundary
    const std::string cfg =
        R"({"experiment":"optimize","parameters":{"method":"SS","n":18,"t1_s":1e12}})";
    auto relaxed = run_config(cfg, dir, false);
    CHECK(relaxed.status == RunStatus::Ok);
    CHECK(relaxed.boundary_warning);
    auto strict = run_config(cfg, dir, true);
    CHECK(strict.status == RunStatus::BoundaryWarning);
    fs::remove_all(dir);
}

TEST_CASE("contours experiment emits grid csv and levels") {
    const auto dir = tmpdir("contours");
    auto r = run_config(
        R"({"experiment":"contours","parameters":{"method":"FFST","n_t1":5,"n_time":16}})", dir);
    REQUIRE(r.status == RunStatus::Ok);
    CHECK(fs::exists(dir / "data.csv"));
    const auto s = json::parse(r.summary_json);
    CHECK(s["levels"].size() == 3);
    CHECK(s["min_over_time"].size() == 5);
    fs::remove_all(dir);
}

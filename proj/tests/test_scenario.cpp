#include "cvlambda/errors.hpp"
#include "cvlambda/scenario.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace cvlambda;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json base_doc(const std::string& command) {
    return json{{"command", command},
                {"params", {{"alpha", 50.0}, {"delta", 0.0}, {"gamma12", 0.0}, {"omega_in", 0.1}}}};
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

std::size_t column(const Table& t, const std::string& name) {
    for (std::size_t k = 0; k < t.columns.size(); ++k)
        if (t.columns[k] == name) return k;
    FAIL("missing column " << name);
    return 0;
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "cvlambda_scenario_tests";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("parse fills defaults") {
    const auto c = parse_config(base_doc("propagate"));
    CHECK(c.command == "propagate");
    CHECK(c.mode == PropagationMode::stable);
    CHECK(c.format == OutputFormat::csv);
    CHECK(c.xi_points.size() == 101);
    CHECK(c.params.gamma1 == 0.5);
    CHECK(c.params.gamma2 == 0.5);
    CHECK(c.params.gamma_phi == 0.0);
    CHECK(std::abs(c.params.c1 - cd(std::sqrt(0.5))) < 1e-15);
}

TEST_CASE("missing alpha names the key") {
    json doc = base_doc("sweep");
    doc["params"].erase("alpha");
    try {
        parse_config(doc);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("alpha") != std::string::npos);
    }
    doc.erase("params");
    CHECK_THROWS_WITH_AS(parse_config(doc), doctest::Contains("alpha"), ConfigError);
}

TEST_CASE("schema violations are rejected") {
    json doc = base_doc("propagate");
    doc["params"]["alpah"] = 3;
    CHECK_THROWS_AS(parse_config(doc), ConfigError);

    doc = base_doc("propagate");
    doc["colour"] = "red";
    CHECK_THROWS_AS(parse_config(doc), ConfigError);

    doc = base_doc("propagate");
    doc["sweep"] = json::object();
    CHECK_THROWS_AS(parse_config(doc), ConfigError);

    doc = base_doc("launch");
    CHECK_THROWS_AS(parse_config(doc), ConfigError);

    doc = base_doc("propagate");
    doc["params"]["gamma"] = "fast";
    CHECK_THROWS_AS(parse_config(doc), ConfigError);

    doc = base_doc("propagate");
    doc["params"]["c1"] = 1.0;
    CHECK_THROWS_WITH_AS(parse_config(doc), doctest::Contains("c1"), ConfigError);

    doc = base_doc("sweep");
    doc["sweep"]["axes"] = json::array({{{"name", "delta"}, {"values", {1e-3, 1e-4}}}});
    CHECK_THROWS(parse_config(doc));
}

TEST_CASE("overrides win and accept bare parameter names") {
    json doc = base_doc("sweep");
    apply_override(doc, "alpha=80");
    apply_override(doc, "params.c1={\"re\":0.6,\"im\":0}");
    apply_override(doc, "params.c2={\"re\":0.8,\"im\":0}");
    apply_override(doc, "sweep.refine=false");
    apply_override(doc, "mode=full");
    const auto c = parse_config(doc);
    CHECK(c.params.alpha == 80.0);
    CHECK(c.params.c1 == cd(0.6));
    CHECK_FALSE(c.refine);
    CHECK(c.mode == PropagationMode::full);
    CHECK_THROWS_AS(apply_override(doc, "alpha"), ConfigError);
    CHECK_THROWS_AS(apply_override(doc, "=3"), ConfigError);
}

TEST_CASE("config survives a round trip through its JSON form") {
    for (const std::string cmd : {"propagate", "sweep", "optimize", "vortexmap", "analytic"}) {
        auto c = parse_config(base_doc(cmd));
        c.params.delta_s = 1e-3;
        c.params.omega_in = std::polar(0.2, 0.5);
        const auto again = parse_config(config_to_json(c));
        CHECK(config_to_json(again) == config_to_json(c));
    }
}

TEST_CASE("format_double keeps 17 significant digits") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK(format_double(std::nan("")) == "NaN");
}

TEST_CASE("csv is rfc-4180 with crlf rows") {
    Table t{{"a_over_Gamma", "quoted,name"}, {{1.5, 2.0}}};
    std::ostringstream os;
    write_csv(os, t);
    CHECK(os.str() == "a_over_Gamma,\"quoted,name\"\r\n1.5,2\r\n");
}

TEST_CASE("propagate at the transparency plateau") {
    json doc = base_doc("propagate");
    doc["propagate"] = {{"samples", 11}};
    const auto r = run_scenario(parse_config(doc));
    CHECK(r.table.columns[0] == "xi");
    CHECK(r.table.columns[1] == "Ic_norm");
    CHECK(r.table.columns[2] == "Is_norm");
    const auto& last = r.table.rows.back();
    CHECK(last[0] == 1.0);
    CHECK(std::abs(last[1] - 0.25) < 0.01);
    CHECK(std::abs(last[2] - 0.25) < 0.01);
    CHECK(std::abs(last[column(r.table, "V")] - 4.0) < 1e-4);
    CHECK(r.table.rows.front()[1] == 1.0);
    for (const auto& name : r.table.columns) {
        if (name == "xi" || name == "V" || name.rfind("n_", 0) == 0) continue;
        const bool has_unit = name.find("_over_") != std::string::npos || name.find("norm") != std::string::npos ||
                              name.find("_rad") != std::string::npos || name.find("commutator") != std::string::npos ||
                              name.find("cross") != std::string::npos || name == "alpha" ||
                              name.rfind("c1", 0) == 0 || name.rfind("c2", 0) == 0;
        CHECK_MESSAGE(has_unit, name);
    }
}

TEST_CASE("single-point sweep matches propagate") {
    json doc = base_doc("sweep");
    doc["params"]["delta"] = 2e-4;
    doc["sweep"] = {{"axes", json::array({{{"name", "delta"}, {"values", {2e-4}}}})}, {"refine", false}};
    const auto s = run_scenario(parse_config(doc));
    REQUIRE(s.table.rows.size() == 1);

    json pdoc = base_doc("propagate");
    pdoc["params"]["delta"] = 2e-4;
    pdoc["propagate"] = {{"xi_points", {1.0}}};
    const auto p = run_scenario(parse_config(pdoc));
    CHECK(s.table.rows[0][column(s.table, "V")] == p.table.rows[0][column(p.table, "V")]);
    CHECK(s.table.rows[0][column(s.table, "delta_over_Gamma")] == 2e-4);
}

TEST_CASE("resolved defaults are embedded in every output") {
    const auto c = parse_config(base_doc("analytic"));
    const auto meta = metadata_document(c);
    const auto& rp = meta.at("resolved_params");
    CHECK(rp.at("delta_s").get<double>() == 0.0);
    CHECK(rp.at("gamma1").get<double>() == 0.5);
    CHECK(rp.at("gamma_phi").get<double>() == 0.0);
    CHECK(meta.at("tool") == kToolName);
    CHECK(meta.at("version") == kToolVersion);
    const auto r = run_scenario(c);
    CHECK(r.table.columns.size() == r.table.rows.front().size());
    CHECK(std::find(r.table.columns.begin(), r.table.columns.end(), "gamma1_over_Gamma") != r.table.columns.end());
}

TEST_CASE("json output re-read as input reproduces the results") {
    for (const std::string cmd : {"propagate", "sweep", "vortexmap", "analytic"}) {
        json doc = base_doc(cmd);
        doc["params"]["delta"] = 3e-4;
        doc["format"] = "json";
        doc["output"] = scratch("roundtrip_" + cmd + ".json").string();
        if (cmd == "propagate") doc["propagate"] = {{"samples", 5}};
        if (cmd == "sweep")
            doc["sweep"] = {{"axes", json::array({{{"name", "delta"}, {"min", 1e-4}, {"max", 1e-3}, {"count", 4}, {"spacing", "log"}}})}};
        if (cmd == "vortexmap") doc["vortexmap"] = {{"count", 5}};
        if (cmd == "analytic") doc["analytic"] = {{"deltas", {1e-4, 5e-4}}};
        const auto paths = run_and_write(parse_config(doc));
        REQUIRE(paths.size() == 2);
        const json first = json::parse(slurp(paths[0]));
        CHECK(fs::exists(paths[1]));

        auto again = parse_config(first);
        again.output_path = scratch("roundtrip_" + cmd + "_2.json").string();
        const auto paths2 = run_and_write(again);
        const json second = json::parse(slurp(paths2[0]));
        CHECK(second.at("result") == first.at("result"));
        CHECK(second.at("resolved_params") == first.at("resolved_params"));
    }
}

TEST_CASE("csv run writes the sidecar metadata") {
    json doc = base_doc("analytic");
    doc["output"] = scratch("analytic.csv").string();
    doc["analytic"] = {{"deltas", {1e-4, 5e-4, 1e-3}}};
    const auto paths = run_and_write(parse_config(doc));
    const std::string text = slurp(paths[0]);
    const auto first_line = text.substr(0, text.find("\r\n"));
    const auto header = split(first_line);
    CHECK(header.front() == "gamma_over_Gamma");
    CHECK(std::find(header.begin(), header.end(), "nu") != header.end());
    std::size_t lines = 0;
    for (std::size_t pos = 0; (pos = text.find("\r\n", pos)) != std::string::npos; pos += 2) ++lines;
    CHECK(lines == 4);
    const json meta = json::parse(slurp(paths[1]));
    CHECK(meta.at("command") == "analytic");
    CHECK(meta.at("config").at("params").at("alpha") == 50.0);
}

TEST_CASE("unwritable output path is an io error") {
    json doc = base_doc("analytic");
    doc["output"] = "/nonexistent-dir/x.csv";
    CHECK_THROWS_AS(run_and_write(parse_config(doc)), IoError);
}

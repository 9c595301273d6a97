// Command-line front end: cvlambda <propagate|sweep|optimize|vortexmap|analytic> [flags]

#include "cvlambda/errors.hpp"
#include "cvlambda/scenario.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <string>
#include <vector>

namespace {

int exit_code(const std::string& kind) {
    if (kind == "ConfigError" || kind == "InvalidParams") return 2;
    if (kind == "IoError") return 3;
    return 4;
}

void report(const std::string& kind, const std::string& message) {
    nlohmann::json err{{"error", {{"kind", kind}, {"message", message}}}};
    std::cerr << err.dump() << '\n';
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Continuous-variable entanglement in a coherently prepared Lambda medium"};
    app.set_version_flag("--version", std::string(cvlambda::kToolVersion));
    app.require_subcommand(1);

    std::string config_path, mode, out, format;
    std::vector<std::string> sets;
    int workers = -1;

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"propagate", "mean fields and correlations along the medium"},
        {"sweep", "V over a 1-3 axis parameter grid"},
        {"optimize", "seeded simplex search for the smallest V"},
        {"vortexmap", "radial map over a Laguerre-Gaussian input"},
        {"analytic", "closed-form small-detuning approximation"}};
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
        sub->add_option("--set", sets, "override key=value (repeatable)")->take_all();
        sub->add_option("--mode", mode, "field model")->check(CLI::IsMember({"full", "stable"}));
        sub->add_option("--workers", workers, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
        sub->add_option("--out", out, "output file");
        sub->add_option("--format", format, "output format")->check(CLI::IsMember({"csv", "json"}));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        nlohmann::json doc = config_path.empty() ? nlohmann::json::object()
                                                 : cvlambda::load_config_file(config_path);
        nlohmann::json& cfg = doc.contains("config") && doc.contains("tool") ? doc["config"] : doc;
        if (cfg.contains("command") && cfg["command"] != command) {
            // A config written for another command keeps its params only.
            nlohmann::json trimmed{{"params", cfg.value("params", nlohmann::json::object())}};
            cfg = trimmed;
        }
        cfg["command"] = command;
        for (const auto& s : sets) cvlambda::apply_override(cfg, s);
        if (!mode.empty()) cfg["mode"] = mode;
        if (workers >= 0) cfg["workers"] = workers;
        if (!out.empty()) cfg["output"] = out;
        if (!format.empty()) cfg["format"] = format;
        else if (!out.empty() && ends_with(out, ".json")) cfg["format"] = "json";

        const auto config = cvlambda::parse_config(cfg);
        for (const auto& path : cvlambda::run_and_write(config)) std::cout << path << '\n';
        return 0;
    } catch (const cvlambda::Error& e) {
        report(e.kind(), e.what());
        return exit_code(e.kind());
    } catch (const nlohmann::json::exception& e) {
        report("ConfigError", e.what());
        return 2;
    } catch (const std::exception& e) {
        report("InternalError", e.what());
        return 1;
    }
}

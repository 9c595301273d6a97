#pragma once

#include "cvlambda/model.hpp"
#include "cvlambda/sweep.hpp"
#include "cvlambda/types.hpp"
#include "cvlambda/vortex.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace cvlambda {

inline constexpr const char* kToolName = "cvlambda";
inline constexpr const char* kToolVersion = CVLAMBDA_VERSION;

enum class OutputFormat { csv, json };

/// A fully resolved run description. Built from JSON by parse_config.
struct ScenarioConfig {
    std::string command;
    ModelParams params;
    PropagationMode mode = PropagationMode::stable;
    OutputFormat format = OutputFormat::csv;
    std::string output_path;
    unsigned workers = 0;

    // propagate
    std::vector<double> xi_points;
    // sweep
    std::vector<SweepAxis> axes;
    bool refine = true;
    // optimize
    std::vector<ParameterBound> bounds;
    std::size_t seeds_per_axis = 7;
    std::size_t refine_top = 3;
    // vortexmap
    VortexProfile profile;
    double phi = 0.0;
    std::vector<double> radii;
    // analytic
    std::vector<double> analytic_deltas;
    double analytic_xi = 1.0;
};

/// Plot-ready table; every column name carries its unit.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct ScenarioResult {
    Table table;
    nlohmann::json result;  ///< structured form used by the JSON writer
};

/// Parses a configuration document. A previously written JSON output (which
/// carries its input under "config") is accepted as well. Unknown keys and a
/// missing params.alpha raise ConfigError.
ScenarioConfig parse_config(const nlohmann::json& doc);

/// Reads and parses a JSON file; IoError/ConfigError on failure.
nlohmann::json load_config_file(const std::string& path);

/// Applies `key=value`. Model parameter names may be given bare (`alpha=80`);
/// other keys use dotted paths (`sweep.refine=false`). The value is parsed as
/// JSON when possible and kept as a string otherwise.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// Canonical JSON form of a config; parse_config(config_to_json(c)) == c.
nlohmann::json config_to_json(const ScenarioConfig& config);

nlohmann::json params_to_json(const ModelParams& params);
/// Explicit values of every parameter, defaults filled in.
nlohmann::json resolved_params_json(const ModelParams& params);

ScenarioResult run_scenario(const ScenarioConfig& config);

/// Full output document for the JSON writer.
nlohmann::json output_document(const ScenarioConfig& config, const ScenarioResult& result);
nlohmann::json metadata_document(const ScenarioConfig& config);

void write_csv(std::ostream& os, const Table& table);
std::string format_double(double v);

/// Runs the scenario, writes the output file and its `.meta.json` sidecar.
/// Returns the paths written.
std::vector<std::string> run_and_write(const ScenarioConfig& config);

}  // namespace cvlambda

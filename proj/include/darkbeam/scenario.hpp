#pragma once

#include <darkbeam/config.hpp>

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace darkbeam {

enum class ScenarioName { Transfer, Validate, Sweep, Entangle, Feasibility };

const char* to_string(ScenarioName name);
/// Throws SchemaError for an unknown name.
ScenarioName scenario_from_string(const std::string& name);

struct Assertion
{
    std::string name;
    bool pass = false;
    double value = 0.0;
    double limit = 0.0;
};

struct ScenarioResult
{
    std::vector<Assertion> assertions;
    nlohmann::json results = nlohmann::json::object();
    std::map<std::string, std::string> files; ///< file name -> contents

    bool all_pass() const;
    nlohmann::json summary(ScenarioName name) const;
};

/// Pure computation; physics failures propagate as darkbeam::Error.
ScenarioResult run_scenario(ScenarioName name, const Config& config);

enum ExitCode : int {
    exit_ok = 0,
    exit_config_error = 2,
    exit_physics_error = 3,
    exit_assertion_failure = 4,
};

/**
 * Full command: parse, write resolved_config.json before computing, run,
 * write the artifacts and summary.json. Returns one of ExitCode.
 */
int run_command(const std::string& scenario, const std::string& config_path,
                const std::string& out_dir,
                const std::vector<std::string>& overrides, std::ostream& log);

} // namespace darkbeam

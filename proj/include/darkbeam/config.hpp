#pragma once

#include <darkbeam/model.hpp>
#include <darkbeam/pde_solver.hpp>
#include <darkbeam/quantum_stats.hpp>

#include <string>
#include <vector>

#include <json.hpp>

namespace darkbeam {

/// Temporal shape of the input mode at z = 0.
struct PulseSpec
{
    std::string shape = "Gaussian"; ///< Gaussian | Square
    double sigma = 2.0;             ///< Gaussian intensity rms
    double center = 0.0;            ///< 0: placed at 8 sigma
    double t_on = 1.0;              ///< Square
    double t_off = 11.0;

    /// Unit-norm envelope, recorded from t = 0.
    InputEnvelope envelope() const;
};

struct SweepSpec
{
    std::string variable = "x"; ///< x | alpha | r | gamma_tilde | big_delta
    std::vector<double> values{0.0, 0.025, 0.05, 0.075, 0.1, 0.125, 0.15,
                               0.175, 0.2};
};

struct Config
{
    SystemParams params;
    StokesProfile stokes;
    VelocityDistribution velocities;
    FeasibilityThresholds thresholds;
    GridSpec grid;
    int levels = 3;       ///< refinement levels for `validate`
    int map_samples = 201;
    PulseSpec pulse;
    QuantumInput quantum;
    SweepSpec sweep;
    long seed = 0;

    /// Every setting, defaults included; parses back to the same Config.
    nlohmann::json resolved() const;
};

/**
 * Builds and validates a Config. Unknown keys and type mismatches raise
 * SchemaError carrying the JSON pointer; broken physical constraints
 * raise InvariantError. The scalar parameters may also be given at top
 * level instead of under "params".
 */
Config parse_config(const nlohmann::json& doc);

/**
 * Applies "a.b.c=value" overrides in order. The value is read as JSON when
 * it parses (numbers, booleans, arrays) and as a plain string otherwise.
 * Throws SchemaError on a malformed override.
 */
nlohmann::json apply_overrides(nlohmann::json doc,
                               const std::vector<std::string>& overrides);

/// Reads a JSON file; SchemaError on unreadable or malformed input.
nlohmann::json load_json_file(const std::string& path);

} // namespace darkbeam

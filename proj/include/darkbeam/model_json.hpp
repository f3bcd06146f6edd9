#pragma once

#include <darkbeam/model.hpp>

#include <set>
#include <string>

#include <json.hpp>

namespace darkbeam {

using json = nlohmann::json;

/**
 * Strict reader for one JSON object: every key must be consumed, type
 * mismatches and leftovers raise SchemaError carrying the JSON pointer.
 */
class ObjectReader
{
public:
    ObjectReader(const json& obj, std::string pointer);

    bool has(const std::string& key) const;
    double number(const std::string& key, double fallback);
    double number(const std::string& key); // required
    int integer(const std::string& key, int fallback);
    bool boolean(const std::string& key, bool fallback);
    std::string string(const std::string& key, const std::string& fallback);
    const json& value(const std::string& key); // required, any type
    const json* optional(const std::string& key);
    std::string child(const std::string& key) const
    {
        return m_pointer + "/" + key;
    }
    const std::string& pointer() const { return m_pointer; }

    /// Throws SchemaError for the first key that was never read.
    void finish() const;

private:
    const json& m_obj;
    std::string m_pointer;
    std::set<std::string> m_seen;

    const json* lookup(const std::string& key);
};

json to_json(const SystemParams& p);
json to_json(const StokesProfile& p);
json to_json(const VelocityDistribution& d);
json to_json(const FeasibilityThresholds& t);
json to_json(const FeasibilityReport& r);

SystemParams params_from_json(const json& doc, const std::string& pointer);
StokesProfile stokes_from_json(const json& doc, const std::string& pointer);
/// Missing or empty `classes` yields a single class at params.r.
VelocityDistribution velocities_from_json(const json& doc,
                                          const std::string& pointer,
                                          const SystemParams& params);
FeasibilityThresholds thresholds_from_json(const json& doc,
                                           const std::string& pointer);

} // namespace darkbeam

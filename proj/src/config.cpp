#include <darkbeam/config.hpp>

#include <darkbeam/errors.hpp>
#include <darkbeam/model_json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace darkbeam {

namespace {

const char* const flat_param_keys[] = {"alpha",       "r",
                                       "gamma_tilde", "x",
                                       "big_delta",   "length_L",
                                       "dispersion_factor"};

json null_or(const json* v)
{
    return v == nullptr ? json() : *v;
}

GridSpec grid_from_json(const json* doc, int& levels)
{
    GridSpec g;
    if (doc == nullptr) {
        return g;
    }
    ObjectReader in(*doc, "/grid");
    g.nz = in.integer("nz", g.nz);
    g.dt = in.number("dt", g.dt);
    g.weak_bound = in.number("weak_bound", g.weak_bound);
    levels = in.integer("levels", levels);
    if (const json* nt = in.optional("nt")) {
        if (!nt->is_number_integer()) {
            throw SchemaError("/grid/nt", "expected an integer");
        }
        g.nt = nt->get<long>();
    }
    if (const json* planes = in.optional("record_planes")) {
        if (!planes->is_array() || planes->empty()) {
            throw SchemaError("/grid/record_planes",
                              "expected a non-empty array of positions");
        }
        g.record_planes.clear();
        for (std::size_t i = 0; i < planes->size(); ++i) {
            if (!(*planes)[i].is_number()) {
                throw SchemaError("/grid/record_planes/" + std::to_string(i),
                                  "expected a number");
            }
            g.record_planes.push_back((*planes)[i].get<double>());
        }
    }
    in.finish();
    return g;
}

complex complex_from_json(const json& v, const std::string& pointer)
{
    if (v.is_number()) {
        return {v.get<double>(), 0.0};
    }
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
        return {v[0].get<double>(), v[1].get<double>()};
    }
    throw SchemaError(pointer, "expected a number or [re, im]");
}

void input_from_json(const json* doc, PulseSpec& pulse, QuantumInput& quantum)
{
    quantum = QuantumInput::fock(10, InputEnvelope::zero());
    quantum.amplitude = 3.0;
    quantum.r_squeeze = 1.0;
    if (doc != nullptr) {
        ObjectReader in(*doc, "/input");
        pulse.shape = in.string("shape", pulse.shape);
        pulse.sigma = in.number("sigma", pulse.sigma);
        pulse.center = in.number("center", pulse.center);
        pulse.t_on = in.number("t_on", pulse.t_on);
        pulse.t_off = in.number("t_off", pulse.t_off);
        try {
            quantum.kind = input_kind_from_string(in.string("kind", "Fock"));
        } catch (const Error& e) {
            throw SchemaError("/input/kind", e.what());
        }
        quantum.n_photons = in.integer("n_photons", quantum.n_photons);
        if (const json* a = in.optional("amplitude")) {
            quantum.amplitude = complex_from_json(*a, "/input/amplitude");
        }
        quantum.r_squeeze = in.number("r_squeeze", quantum.r_squeeze);
        in.finish();
    }
    if (pulse.shape != "Gaussian" && pulse.shape != "Square") {
        throw SchemaError("/input/shape", "expected Gaussian or Square");
    }
    if (pulse.shape == "Gaussian" && !(pulse.sigma > 0.0)) {
        throw Error(ErrorKind::InvariantError, "input sigma > 0");
    }
    if (pulse.shape == "Square" && !(pulse.t_off > pulse.t_on && pulse.t_on >= 0.0)) {
        throw Error(ErrorKind::InvariantError, "input needs 0 <= t_on < t_off");
    }
    quantum.envelope = pulse.envelope();
    quantum.validate();
}

SweepSpec sweep_from_json(const json* doc)
{
    SweepSpec s;
    if (doc == nullptr) {
        return s;
    }
    ObjectReader in(*doc, "/sweep");
    s.variable = in.string("variable", s.variable);
    if (const json* values = in.optional("values")) {
        if (!values->is_array() || values->empty()) {
            throw SchemaError("/sweep/values", "expected a non-empty array");
        }
        s.values.clear();
        for (std::size_t i = 0; i < values->size(); ++i) {
            if (!(*values)[i].is_number()) {
                throw SchemaError("/sweep/values/" + std::to_string(i),
                                  "expected a number");
            }
            s.values.push_back((*values)[i].get<double>());
        }
    }
    in.finish();
    const std::string known[] = {"x", "alpha", "r", "gamma_tilde", "big_delta"};
    if (std::find(std::begin(known), std::end(known), s.variable) ==
        std::end(known)) {
        throw SchemaError("/sweep/variable",
                          "expected one of x, alpha, r, gamma_tilde, big_delta");
    }
    return s;
}

} // namespace

InputEnvelope PulseSpec::envelope() const
{
    if (shape == "Square") {
        return InputEnvelope::square(t_on, t_off);
    }
    const double c = center > 0.0 ? center : 8.0 * sigma;
    return InputEnvelope::gaussian(c, sigma);
}

Config parse_config(const json& doc)
{
    ObjectReader in(doc, "");
    Config cfg;

    // Flat shorthand: scalar parameters at the top level.
    json params = json::object();
    if (const json* p = in.optional("params")) {
        if (!p->is_object()) {
            throw SchemaError("/params", "expected an object");
        }
        params = *p;
    }
    for (const char* key : flat_param_keys) {
        if (const json* v = in.optional(key)) {
            if (params.contains(key)) {
                throw SchemaError(std::string("/") + key,
                                  "given both at top level and in params");
            }
            params[key] = *v;
        }
    }
    cfg.params = params_from_json(params, "/params");

    const json stokes = null_or(in.optional("stokes"));
    cfg.stokes = stokes_from_json(stokes.is_null() ? json::object() : stokes,
                                  "/stokes");
    cfg.stokes.validate();

    cfg.velocities = velocities_from_json(null_or(in.optional("velocities")),
                                          "/velocities", cfg.params);
    cfg.thresholds =
        thresholds_from_json(null_or(in.optional("thresholds")), "/thresholds");

    cfg.grid = grid_from_json(in.optional("grid"), cfg.levels);
    cfg.grid.validate();
    if (cfg.levels < 3) {
        throw Error(ErrorKind::InvariantError, "grid levels >= 3");
    }

    input_from_json(in.optional("input"), cfg.pulse, cfg.quantum);
    cfg.sweep = sweep_from_json(in.optional("sweep"));

    cfg.map_samples = in.integer("map_samples", cfg.map_samples);
    if (cfg.map_samples < 2) {
        throw Error(ErrorKind::InvariantError, "map_samples >= 2");
    }
    if (const json* seed = in.optional("seed")) {
        if (!seed->is_number_integer()) {
            throw SchemaError("/seed", "expected an integer");
        }
        cfg.seed = seed->get<long>();
    }
    in.finish();
    return cfg;
}

json Config::resolved() const
{
    json amplitude = {quantum.amplitude.real(), quantum.amplitude.imag()};
    return {{"params", to_json(params)},
            {"stokes", to_json(stokes)},
            {"velocities", to_json(velocities)},
            {"thresholds", to_json(thresholds)},
            {"grid",
             {{"nz", grid.nz},
              {"nt", grid.nt},
              {"dt", grid.dt},
              {"record_planes", grid.record_planes},
              {"weak_bound", grid.weak_bound},
              {"levels", levels}}},
            {"input",
             {{"shape", pulse.shape},
              {"sigma", pulse.sigma},
              {"center", pulse.center},
              {"t_on", pulse.t_on},
              {"t_off", pulse.t_off},
              {"kind", to_string(quantum.kind)},
              {"n_photons", quantum.n_photons},
              {"amplitude", amplitude},
              {"r_squeeze", quantum.r_squeeze}}},
            {"sweep", {{"variable", sweep.variable}, {"values", sweep.values}}},
            {"map_samples", map_samples},
            {"seed", seed}};
}

json apply_overrides(json doc, const std::vector<std::string>& overrides)
{
    if (!doc.is_object()) {
        throw SchemaError("/", "expected an object");
    }
    for (const auto& item : overrides) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw SchemaError("/", "override '" + item + "' is not key=value");
        }
        const std::string key = item.substr(0, eq);
        const std::string text = item.substr(eq + 1);
        json value = json::parse(text, nullptr, false);
        if (value.is_discarded()) {
            value = text;
        }

        json* node = &doc;
        std::string pointer;
        std::istringstream parts(key);
        std::string part;
        std::vector<std::string> path;
        while (std::getline(parts, part, '.')) {
            if (part.empty()) {
                throw SchemaError("/", "override key '" + key + "' is malformed");
            }
            path.push_back(part);
        }
        for (std::size_t i = 0; i + 1 < path.size(); ++i) {
            pointer += "/" + path[i];
            json& next = (*node)[path[i]];
            if (next.is_null()) {
                next = json::object();
            }
            if (!next.is_object()) {
                throw SchemaError(pointer, "override descends into a non-object");
            }
            node = &next;
        }
        (*node)[path.back()] = value;
    }
    return doc;
}

json load_json_file(const std::string& path)
{
    std::ifstream file(path);
    if (!file) {
        throw SchemaError("/", "cannot read config file '" + path + "'");
    }
    json doc = json::parse(file, nullptr, false);
    if (doc.is_discarded()) {
        throw SchemaError("/", "config file '" + path + "' is not valid JSON");
    }
    return doc;
}

} // namespace darkbeam

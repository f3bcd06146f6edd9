#include <darkbeam/model_json.hpp>

#include <darkbeam/errors.hpp>

namespace darkbeam {

ObjectReader::ObjectReader(const json& obj, std::string pointer)
  : m_obj(obj), m_pointer(std::move(pointer))
{
    if (!m_obj.is_object()) {
        throw SchemaError(m_pointer.empty() ? "/" : m_pointer,
                          "expected an object");
    }
}

bool ObjectReader::has(const std::string& key) const
{
    return m_obj.contains(key);
}

const json* ObjectReader::lookup(const std::string& key)
{
    m_seen.insert(key);
    auto it = m_obj.find(key);
    return it == m_obj.end() ? nullptr : &*it;
}

double ObjectReader::number(const std::string& key, double fallback)
{
    const json* v = lookup(key);
    if (v == nullptr) {
        return fallback;
    }
    if (!v->is_number()) {
        throw SchemaError(child(key), "expected a number");
    }
    return v->get<double>();
}

double ObjectReader::number(const std::string& key)
{
    if (!has(key)) {
        throw SchemaError(child(key), "required number missing");
    }
    return number(key, 0.0);
}

int ObjectReader::integer(const std::string& key, int fallback)
{
    const json* v = lookup(key);
    if (v == nullptr) {
        return fallback;
    }
    if (!v->is_number_integer()) {
        throw SchemaError(child(key), "expected an integer");
    }
    return v->get<int>();
}

bool ObjectReader::boolean(const std::string& key, bool fallback)
{
    const json* v = lookup(key);
    if (v == nullptr) {
        return fallback;
    }
    if (!v->is_boolean()) {
        throw SchemaError(child(key), "expected a boolean");
    }
    return v->get<bool>();
}

std::string ObjectReader::string(const std::string& key,
                                 const std::string& fallback)
{
    const json* v = lookup(key);
    if (v == nullptr) {
        return fallback;
    }
    if (!v->is_string()) {
        throw SchemaError(child(key), "expected a string");
    }
    return v->get<std::string>();
}

const json& ObjectReader::value(const std::string& key)
{
    const json* v = lookup(key);
    if (v == nullptr) {
        throw SchemaError(child(key), "required key missing");
    }
    return *v;
}

const json* ObjectReader::optional(const std::string& key)
{
    return lookup(key);
}

void ObjectReader::finish() const
{
    for (auto it = m_obj.begin(); it != m_obj.end(); ++it) {
        if (!m_seen.contains(it.key())) {
            throw SchemaError(child(it.key()), "unknown key");
        }
    }
}

json to_json(const SystemParams& p)
{
    return {{"alpha", p.alpha},
            {"r", p.r},
            {"gamma_tilde", p.gamma_tilde},
            {"x", p.x},
            {"big_delta", p.big_delta},
            {"length_L", p.length_L},
            {"dispersion_factor", p.dispersion_factor}};
}

json to_json(const StokesProfile& p)
{
    json j = {{"kind", to_string(p.kind())}, {"omega_min", p.omega_min()}};
    switch (p.kind()) {
    case ProfileKind::Constant:
        j["omega_max"] = p.omega_max();
        break;
    case ProfileKind::Tabulated: {
        json samples = json::array();
        for (const auto& [z, w] : p.samples()) {
            samples.push_back({z, w});
        }
        j["samples"] = samples;
        break;
    }
    default:
        j["omega_max"] = p.omega_max();
        j["center"] = p.center();
        j["width"] = p.width();
    }
    return j;
}

json to_json(const VelocityDistribution& d)
{
    json classes = json::array();
    for (const auto& c : d.classes) {
        classes.push_back({{"k", c.k},
                           {"xi", c.xi},
                           {"delta", c.delta},
                           {"big_delta", c.big_delta}});
    }
    return {{"classes", classes}, {"pump_k", d.pump_k}, {"beat_k", d.beat_k}};
}

json to_json(const FeasibilityThresholds& t)
{
    return {{"much_less", t.much_less}, {"much_greater", t.much_greater}};
}

json to_json(const FeasibilityReport& r)
{
    auto check = [](const FeasibilityCheck& c) {
        return json{{"lhs", c.lhs}, {"pass", c.pass}};
    };
    return {{"two_photon", check(r.two_photon)},
            {"doppler", check(r.doppler)},
            {"adiabaticity", check(r.adiabaticity)},
            {"opacity", check(r.opacity)},
            {"nonadiabatic_flux_loss", r.nonadiabatic_flux_loss},
            {"all_pass", r.all_pass()}};
}

SystemParams params_from_json(const json& doc, const std::string& pointer)
{
    ObjectReader in(doc, pointer);
    SystemParams p;
    p.alpha = in.number("alpha");
    p.r = in.number("r");
    p.gamma_tilde = in.number("gamma_tilde");
    p.x = in.number("x", p.x);
    p.big_delta = in.number("big_delta", p.big_delta);
    p.length_L = in.number("length_L", p.length_L);
    p.dispersion_factor = in.number("dispersion_factor", p.dispersion_factor);
    in.finish();
    p.validate();
    return p;
}

StokesProfile stokes_from_json(const json& doc, const std::string& pointer)
{
    ObjectReader in(doc, pointer);
    const auto kind = in.string("kind", "TanhRampDown");
    const double omega_min = in.number("omega_min", 1e-3);
    StokesProfile profile;
    if (kind == "Tabulated") {
        const json& samples = in.value("samples");
        if (!samples.is_array()) {
            throw SchemaError(in.child("samples"), "expected an array");
        }
        std::vector<std::pair<double, double>> table;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const auto& s = samples[i];
            if (!s.is_array() || s.size() != 2 || !s[0].is_number() ||
                !s[1].is_number()) {
                throw SchemaError(in.child("samples") + "/" + std::to_string(i),
                                  "expected [z, omega]");
            }
            table.emplace_back(s[0].get<double>(), s[1].get<double>());
        }
        in.finish();
        return StokesProfile::tabulated(std::move(table), omega_min);
    }
    if (kind == "Constant") {
        const double omega = in.number("omega_max", 1.0);
        in.finish();
        return StokesProfile::constant(omega);
    }
    const double omega_max = in.number("omega_max", 100.0);
    const double center = in.number("center", -0.1);
    const double width = in.number("width", 0.3);
    in.finish();
    switch (profile_kind_from_string(kind)) {
    case ProfileKind::CosSquaredRamp:
        return StokesProfile::cos2_ramp(omega_max, omega_min, center, width);
    default:
        return StokesProfile::tanh_ramp(omega_max, omega_min, center, width);
    }
}

VelocityDistribution velocities_from_json(const json& doc,
                                          const std::string& pointer,
                                          const SystemParams& params)
{
    if (doc.is_null()) {
        return VelocityDistribution::single(params);
    }
    ObjectReader in(doc, pointer);
    const double pump_k = in.number("pump_k", 0.0);
    const double beat_k = in.number("beat_k", 0.0);
    VelocityDistribution d;
    if (const json* dop = in.optional("doppler")) {
        ObjectReader din(*dop, in.child("doppler"));
        const double spread = din.number("spread");
        const int n = din.integer("n_classes", 5);
        din.finish();
        d = VelocityDistribution::doppler(params, spread, n, beat_k);
        if (in.has("classes")) {
            throw SchemaError(in.child("classes"),
                              "give either 'classes' or 'doppler', not both");
        }
    } else if (const json* classes = in.optional("classes")) {
        if (!classes->is_array()) {
            throw SchemaError(in.child("classes"), "expected an array");
        }
        for (std::size_t i = 0; i < classes->size(); ++i) {
            ObjectReader cin((*classes)[i],
                             in.child("classes") + "/" + std::to_string(i));
            VelocityClass c;
            if (cin.has("v")) {
                c.k = cin.number("v") / params.dispersion_factor;
            } else {
                c.k = cin.number("k");
            }
            c.xi = cin.number("xi");
            c.delta = cin.number("delta", 0.0);
            c.big_delta = cin.number("big_delta", 0.0);
            cin.finish();
            d.classes.push_back(c);
        }
    }
    if (d.classes.empty()) {
        d = VelocityDistribution::single(params);
    }
    d.pump_k = pump_k;
    d.beat_k = beat_k;
    in.finish();
    d.validate(params);
    return d;
}

FeasibilityThresholds thresholds_from_json(const json& doc,
                                           const std::string& pointer)
{
    FeasibilityThresholds t;
    if (doc.is_null()) {
        return t;
    }
    ObjectReader in(doc, pointer);
    t.much_less = in.number("much_less", t.much_less);
    t.much_greater = in.number("much_greater", t.much_greater);
    in.finish();
    if (!(t.much_less > 0.0) || !(t.much_greater > 0.0)) {
        throw Error(ErrorKind::InvariantError, "thresholds must be positive");
    }
    return t;
}

} // namespace darkbeam

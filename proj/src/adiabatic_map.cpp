#include <darkbeam/adiabatic_map.hpp>

#include <darkbeam/errors.hpp>
#include <darkbeam/model_json.hpp>
#include <darkbeam/quadrature.hpp>

#include <cmath>
#include <iomanip>
#include <sstream>

namespace darkbeam {

namespace {

constexpr double tau_tol = 1e-9;
constexpr double eta_tol = 1e-8;

// Interior breakpoints of the profile restricted to (a, b).
std::vector<double> panel_breaks(const StokesProfile& profile, double a,
                                 double b)
{
    std::vector<double> out;
    for (double p : profile.breakpoints()) {
        if (p > a && p < b) {
            out.push_back(p);
        }
    }
    return out;
}

double loss_exponent(const SystemParams& params, const StokesProfile& profile,
                     double x, double a, double b)
{
    if (x == 0.0 || a >= b) {
        return 0.0;
    }
    auto f = [&](double z) {
        return loss_integrand(std::atan2(1.0, profile.omega(z)), x);
    };
    const auto bp = panel_breaks(profile, a, b);
    return params.alpha * quad::integrate(f, a, b, eta_tol, bp).value;
}

double tau_increment(const SystemParams& params, const StokesProfile& profile,
                     double a, double b)
{
    if (a >= b) {
        return 0.0;
    }
    auto f = [&](double z) { return 1.0 / group_velocity(params, profile, z); };
    const auto bp = panel_breaks(profile, a, b);
    return quad::integrate(f, a, b, tau_tol, bp).value;
}

MapSample make_sample(const SystemParams& params, const StokesProfile& profile,
                      double cos_theta0, double z, double tau,
                      double loss_exp)
{
    MapSample s;
    s.z = z;
    s.theta = mixing_angle(params, profile, z);
    s.eta = std::exp(-loss_exp);
    s.t = s.eta * std::cos(s.theta) / cos_theta0;
    s.s = s.eta * std::sin(s.theta) / cos_theta0;
    s.tau = tau;
    s.v_gr = group_velocity(params, profile, z);
    return s;
}

} // namespace

double loss_integrand(double theta, double x)
{
    const double c2 = std::cos(theta) * std::cos(theta);
    const double s2 = std::sin(theta) * std::sin(theta);
    const double x2 = x * x;
    const double den = c2 * c2 + x2 * s2 * s2;
    if (den == 0.0) {
        return 0.0;
    }
    return s2 * s2 * c2 * x2 / den;
}

TransferMap TransferMap::build(const SystemParams& params,
                               const StokesProfile& profile, int n_samples,
                               double x)
{
    if (n_samples < 2) {
        throw Error(ErrorKind::InvariantError, "n_samples >= 2");
    }
    if (!(params.r > 0.0)) {
        throw Error(ErrorKind::NonPositiveVelocity,
                    "transfer map requires v0 > 0");
    }
    TransferMap map;
    map.m_params = params;
    map.m_profile = profile;
    map.m_x = x;
    map.m_cos_theta0 = std::cos(mixing_angle(params, profile, 0.0));
    if (map.m_cos_theta0 < 1e-6) {
        throw Error(ErrorKind::DegenerateProfile,
                    "cos(theta(0)) < 1e-6: input already atomic");
    }

    map.m_samples.reserve(n_samples);
    double tau = 0.0;
    double loss = 0.0;
    double z_prev = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        const double z = double(i) / (n_samples - 1);
        tau += tau_increment(params, profile, z_prev, z);
        loss += loss_exponent(params, profile, x, z_prev, z);
        map.m_samples.push_back(
            make_sample(params, profile, map.m_cos_theta0, z, tau, loss));
        z_prev = z;
    }
    return map;
}

TransferMap build_transfer_map(const SystemParams& params,
                               const StokesProfile& profile, int n_samples)
{
    return TransferMap::build(params, profile, n_samples, params.x);
}

MapSample TransferMap::at(double z) const
{
    z = std::clamp(z, 0.0, 1.0);
    if (z == 1.0) {
        return m_samples.back();
    }
    return make_sample(m_params, m_profile, m_cos_theta0, z,
                       tau_increment(m_params, m_profile, 0.0, z),
                       loss_exponent(m_params, m_profile, m_x, 0.0, z));
}

double TransferMap::residual_photon_fraction() const
{
    const double c = std::cos(m_samples.back().theta);
    return c * c;
}

std::string TransferMap::to_csv() const
{
    std::ostringstream out;
    out << "z,theta,t,s,eta,tau,v_gr\n" << std::setprecision(17);
    for (const auto& s : m_samples) {
        out << s.z << ',' << s.theta << ',' << s.t << ',' << s.s << ','
            << s.eta << ',' << s.tau << ',' << s.v_gr << '\n';
    }
    return out.str();
}

json TransferMap::to_json() const
{
    json samples = json::array();
    for (const auto& s : m_samples) {
        samples.push_back({{"z", s.z},
                           {"theta", s.theta},
                           {"t", s.t},
                           {"s", s.s},
                           {"eta", s.eta},
                           {"tau", s.tau},
                           {"v_gr", s.v_gr}});
    }
    return {{"params", darkbeam::to_json(m_params)},
            {"stokes", darkbeam::to_json(m_profile)},
            {"x", m_x},
            {"cos_theta0", m_cos_theta0},
            {"samples", samples}};
}

TransferMap TransferMap::from_json(const json& doc)
{
    ObjectReader in(doc, "");
    TransferMap map;
    map.m_params = params_from_json(in.value("params"), "/params");
    map.m_profile = stokes_from_json(in.value("stokes"), "/stokes");
    map.m_x = in.number("x");
    map.m_cos_theta0 = in.number("cos_theta0");
    const json& samples = in.value("samples");
    if (!samples.is_array() || samples.size() < 2) {
        throw SchemaError("/samples", "expected an array of >= 2 samples");
    }
    for (std::size_t i = 0; i < samples.size(); ++i) {
        ObjectReader s(samples[i], "/samples/" + std::to_string(i));
        MapSample m;
        m.z = s.number("z");
        m.theta = s.number("theta");
        m.t = s.number("t");
        m.s = s.number("s");
        m.eta = s.number("eta");
        m.tau = s.number("tau");
        m.v_gr = s.number("v_gr");
        s.finish();
        map.m_samples.push_back(m);
    }
    in.finish();
    return map;
}

complex field_solution(const TransferMap& map, const InputEnvelope& input,
                       double z, double t)
{
    if (z <= 0.0) {
        return input.at_checked(t);
    }
    const MapSample m = map.at(z);
    return input.at_checked(t - m.tau) * m.t;
}

AtomOutput atom_output(const TransferMap& map, const InputEnvelope& input,
                       double t)
{
    const MapSample& end = map.back();
    AtomOutput out;
    out.residual_photon_fraction = map.residual_photon_fraction();
    out.incomplete_transfer = out.residual_photon_fraction > 1e-3;
    // Phi3 = -sqrt(c/v0) tan(theta) E with E = E_in t(L).
    out.amplitude = -std::sqrt(1.0 / map.params().r) * end.s *
                    input.at_checked(t - end.tau);
    return out;
}

FluxBalance flux_balance(const TransferMap& map, const InputEnvelope& input,
                         TimeWindow window)
{
    const double tau = map.back().tau;
    const double lo = input.support_lo() + tau;
    const double hi = input.support_hi() + tau;
    if (window.lo > lo || window.hi < hi) {
        throw Error(ErrorKind::WindowTooShort,
                    "window does not cover the delayed output support");
    }
    FluxBalance fb;
    fb.residual_photon_fraction = map.residual_photon_fraction();
    const double mid = 0.5 * (input.support_lo() + input.support_hi());
    const std::vector<double> in_breaks{mid};
    fb.photon_flux_in =
        quad::integrate([&](double t) { return std::norm(input(t)); },
                        input.support_lo(), input.support_hi(), 1e-10,
                        in_breaks)
            .value;
    const std::vector<double> out_breaks{mid + tau};
    const double r = map.params().r;
    fb.atom_flux_out =
        quad::integrate(
            [&](double t) {
                return r * std::norm(atom_output(map, input, t).amplitude);
            },
            lo, hi, 1e-10, out_breaks)
            .value;
    if (fb.photon_flux_in > 0.0) {
        const double eta2 = map.back().eta * map.back().eta;
        fb.relative_mismatch =
            std::abs(fb.atom_flux_out - eta2 * fb.photon_flux_in) /
            fb.photon_flux_in;
    }
    return fb;
}

LossProfile loss_factor_eta(const SystemParams& params,
                            const StokesProfile& profile, double x,
                            int n_samples)
{
    LossProfile out;
    n_samples = std::max(n_samples, 2);
    double loss = 0.0;
    double z_prev = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        const double z = double(i) / (n_samples - 1);
        loss += loss_exponent(params, profile, x, z_prev, z);
        out.eta_z.emplace_back(z, std::exp(-loss));
        z_prev = z;
    }
    out.eta = out.eta_z.back().second;
    return out;
}

LossBound loss_bound(const SystemParams& params, double x)
{
    return {std::exp(-0.5 * params.alpha * std::abs(x)), std::abs(x) >= 0.3};
}

} // namespace darkbeam

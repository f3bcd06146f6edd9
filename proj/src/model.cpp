#include <darkbeam/model.hpp>

#include <darkbeam/errors.hpp>
#include <darkbeam/quadrature.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

namespace darkbeam {

namespace {

void require(bool condition, const std::string& what)
{
    if (!condition) {
        throw Error(ErrorKind::InvariantError, what);
    }
}

double clamp_unit(double z) { return std::clamp(z, 0.0, 1.0); }

} // namespace

double SystemParams::coupling_g() const { return std::sqrt(coupling_G()); }

void SystemParams::validate() const
{
    require(std::isfinite(alpha) && alpha > 0.0, "alpha > 0");
    require(std::isfinite(gamma_tilde) && gamma_tilde > 0.0,
            "gamma_tilde > 0");
    require(std::isfinite(r) && std::abs(r) < 1.0, "|r| < 1");
    require(std::isfinite(x), "x finite");
    require(std::isfinite(big_delta), "big_delta finite");
    require(length_L == 1.0, "length_L = 1");
    require(dispersion_factor == 0.5 || dispersion_factor == 1.0,
            "dispersion_factor in {0.5, 1}");
}

const char* to_string(ProfileKind kind)
{
    switch (kind) {
    case ProfileKind::TanhRampDown: return "TanhRampDown";
    case ProfileKind::CosSquaredRamp: return "CosSquaredRamp";
    case ProfileKind::Constant: return "Constant";
    case ProfileKind::Tabulated: return "Tabulated";
    }
    return "Unknown";
}

ProfileKind profile_kind_from_string(const std::string& name)
{
    for (auto kind : {ProfileKind::TanhRampDown, ProfileKind::CosSquaredRamp,
                      ProfileKind::Constant, ProfileKind::Tabulated}) {
        if (name == to_string(kind)) {
            return kind;
        }
    }
    throw Error(ErrorKind::InvariantError, "unknown Stokes profile kind '" +
                                               name + "'");
}

StokesProfile StokesProfile::tanh_ramp(double omega_max, double omega_min,
                                       double center, double width)
{
    StokesProfile p;
    p.m_kind = ProfileKind::TanhRampDown;
    p.m_omega_max = omega_max;
    p.m_omega_min = omega_min;
    p.m_center = center;
    p.m_width = width;
    p.validate();
    return p;
}

StokesProfile StokesProfile::cos2_ramp(double omega_max, double omega_min,
                                       double center, double width)
{
    StokesProfile p;
    p.m_kind = ProfileKind::CosSquaredRamp;
    p.m_omega_max = omega_max;
    p.m_omega_min = omega_min;
    p.m_center = center;
    p.m_width = width;
    p.validate();
    return p;
}

StokesProfile StokesProfile::constant(double omega)
{
    StokesProfile p;
    p.m_kind = ProfileKind::Constant;
    p.m_omega_max = omega;
    p.m_omega_min = omega;
    p.validate();
    return p;
}

StokesProfile
StokesProfile::tabulated(std::vector<std::pair<double, double>> samples,
                         double omega_min)
{
    StokesProfile p;
    p.m_kind = ProfileKind::Tabulated;
    std::sort(samples.begin(), samples.end());
    p.m_samples = std::move(samples);
    p.m_omega_min = omega_min;
    p.m_omega_max = 0.0;
    for (const auto& s : p.m_samples) {
        p.m_omega_max = std::max(p.m_omega_max, s.second);
    }
    p.validate();
    return p;
}

// Normalised so that shape(0) = 1 and shape(L) = 0 exactly.
double StokesProfile::tanh_shape(double z) const
{
    auto raw = [this](double s) {
        return 0.5 * (1.0 - std::tanh((s - m_center) / m_width));
    };
    const double top = raw(0.0);
    const double bottom = raw(1.0);
    return (raw(z) - bottom) / (top - bottom);
}

double StokesProfile::omega(double z) const
{
    z = clamp_unit(z);
    const double span = m_omega_max - m_omega_min;
    switch (m_kind) {
    case ProfileKind::Constant:
        return m_omega_max;
    case ProfileKind::TanhRampDown:
        return m_omega_min + span * tanh_shape(z);
    case ProfileKind::CosSquaredRamp: {
        const double s = std::clamp((z - (m_center - 0.5 * m_width)) / m_width,
                                    0.0, 1.0);
        const double c = std::cos(0.5 * std::numbers::pi * s);
        return m_omega_min + span * c * c;
    }
    case ProfileKind::Tabulated: {
        const auto& t = m_samples;
        if (z <= t.front().first) {
            return std::max(t.front().second, m_omega_min);
        }
        if (z >= t.back().first) {
            return std::max(t.back().second, m_omega_min);
        }
        auto hi = std::upper_bound(
            t.begin(), t.end(), z,
            [](double v, const auto& s) { return v < s.first; });
        auto lo = hi - 1;
        const double w = (z - lo->first) / (hi->first - lo->first);
        return std::max((1.0 - w) * lo->second + w * hi->second, m_omega_min);
    }
    }
    return m_omega_max;
}

double StokesProfile::omega_prime(double z) const
{
    z = clamp_unit(z);
    const double span = m_omega_max - m_omega_min;
    switch (m_kind) {
    case ProfileKind::Constant:
        return 0.0;
    case ProfileKind::TanhRampDown: {
        const double top = 0.5 * (1.0 - std::tanh((0.0 - m_center) / m_width));
        const double bottom =
            0.5 * (1.0 - std::tanh((1.0 - m_center) / m_width));
        const double sech = 1.0 / std::cosh((z - m_center) / m_width);
        return -span * 0.5 * sech * sech / m_width / (top - bottom);
    }
    case ProfileKind::CosSquaredRamp: {
        const double s = (z - (m_center - 0.5 * m_width)) / m_width;
        if (s <= 0.0 || s >= 1.0) {
            return 0.0;
        }
        // d/dz cos^2(pi s / 2) = -(pi / 2w) sin(pi s)
        return -span * 0.5 * std::numbers::pi / m_width *
               std::sin(std::numbers::pi * s);
    }
    case ProfileKind::Tabulated: {
        const auto& t = m_samples;
        if (z < t.front().first || z >= t.back().first) {
            return 0.0;
        }
        auto hi = std::upper_bound(
            t.begin(), t.end(), z,
            [](double v, const auto& s) { return v < s.first; });
        auto lo = hi - 1;
        const double w = (z - lo->first) / (hi->first - lo->first);
        if ((1.0 - w) * lo->second + w * hi->second < m_omega_min) {
            return 0.0; // on the floor
        }
        return (hi->second - lo->second) / (hi->first - lo->first);
    }
    }
    return 0.0;
}

std::vector<double> StokesProfile::breakpoints() const
{
    std::vector<double> out;
    if (m_kind == ProfileKind::CosSquaredRamp) {
        out = {m_center - 0.5 * m_width, m_center + 0.5 * m_width};
    } else if (m_kind == ProfileKind::TanhRampDown) {
        // Smooth, but splitting at the centre helps narrow ramps.
        out = {m_center};
    } else if (m_kind == ProfileKind::Tabulated) {
        for (const auto& s : m_samples) {
            out.push_back(s.first);
        }
    }
    std::erase_if(out, [](double z) { return z <= 0.0 || z >= 1.0; });
    return out;
}

void StokesProfile::validate() const
{
    require(std::isfinite(m_omega_min) && m_omega_min > 0.0,
            "Stokes omega_min > 0");
    require(std::isfinite(m_omega_max) && m_omega_max >= m_omega_min,
            "Stokes omega_max >= omega_min");
    if (is_ramp()) {
        require(std::isfinite(m_width) && m_width > 0.0, "Stokes width > 0");
        require(std::isfinite(m_center), "Stokes center finite");
    }
    if (m_kind == ProfileKind::Tabulated) {
        require(m_samples.size() >= 2, "tabulated Stokes profile needs >= 2 samples");
        for (std::size_t i = 0; i < m_samples.size(); ++i) {
            require(std::isfinite(m_samples[i].first) &&
                        std::isfinite(m_samples[i].second),
                    "tabulated Stokes samples finite");
            if (i > 0) {
                require(m_samples[i].first > m_samples[i - 1].first,
                        "tabulated Stokes positions strictly increasing");
            }
        }
    }
}

VelocityDistribution VelocityDistribution::single(const SystemParams& params)
{
    VelocityDistribution d;
    d.classes.push_back({params.r / params.dispersion_factor, 1.0, 0.0, 0.0});
    return d;
}

VelocityDistribution VelocityDistribution::doppler(const SystemParams& params,
                                                   double spread,
                                                   int n_classes,
                                                   double beat_k)
{
    if (n_classes < 1) {
        throw Error(ErrorKind::InvariantError, "n_classes >= 1");
    }
    VelocityDistribution d;
    d.beat_k = beat_k;
    if (n_classes == 1 || spread == 0.0) {
        d.classes.push_back(
            {params.r / params.dispersion_factor, 1.0, 0.0, 0.0});
        return d;
    }
    // Golub-Welsch for the probabilists' Hermite weight exp(-t^2 / 2).
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n_classes, n_classes);
    for (int k = 1; k < n_classes; ++k) {
        jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(double(k));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
    double total = 0.0;
    for (int i = 0; i < n_classes; ++i) {
        const double w = eig.eigenvectors()(0, i) * eig.eigenvectors()(0, i);
        total += w;
        const double v = params.r + spread * eig.eigenvalues()(i);
        d.classes.push_back({v / params.dispersion_factor, w,
                             (v - params.r) * beat_k, 0.0});
    }
    for (auto& c : d.classes) {
        c.xi /= total;
    }
    return d;
}

double VelocityDistribution::mean_velocity(double dispersion_factor) const
{
    double v = 0.0;
    for (const auto& c : classes) {
        v += c.xi * velocity(c, dispersion_factor);
    }
    return v;
}

void VelocityDistribution::validate(const SystemParams& params) const
{
    require(!classes.empty(), "at least one velocity class");
    double sum = 0.0;
    for (const auto& c : classes) {
        require(std::isfinite(c.k) && std::isfinite(c.delta) &&
                    std::isfinite(c.big_delta),
                "velocity class entries finite");
        require(c.xi >= 0.0, "velocity weights xi >= 0");
        sum += c.xi;
    }
    require(std::abs(sum - 1.0) <= 1e-12, "sum of velocity weights xi = 1");
    const double v0 = mean_velocity(params.dispersion_factor);
    require(std::abs(v0 - params.r) <= 1e-9 * std::max(std::abs(params.r), 1e-12),
            "weighted mean velocity equals r");
}

double mixing_angle(const SystemParams& params, const StokesProfile& profile,
                    double z)
{
    if (!(params.r > 0.0)) {
        throw Error(ErrorKind::NonPositiveVelocity,
                    "mixing angle requires v0 > 0");
    }
    return std::atan2(1.0, profile.omega(z));
}

double mixing_angle_prime(const StokesProfile& profile, double z)
{
    const double w = profile.omega(z);
    return -profile.omega_prime(z) / (1.0 + w * w);
}

double group_velocity_at(const SystemParams& params, double omega_scaled)
{
    // With g^2 n / Omega0^2 = 1 / (omega^2 |r|):
    // v_gr = |r| (omega^2 + sign r) / (|r| omega^2 + 1).
    const double a = std::abs(params.r);
    const double w2 = omega_scaled * omega_scaled;
    const double sign = params.r >= 0.0 ? 1.0 : -1.0;
    return a * (w2 + sign) / (a * w2 + 1.0);
}

double group_velocity(const SystemParams& params, const StokesProfile& profile,
                      double z)
{
    return group_velocity_at(params, profile.omega(z));
}

double delay_tau(const SystemParams& params, const StokesProfile& profile,
                 double z)
{
    if (z <= 0.0) {
        return 0.0;
    }
    z = std::min(z, 1.0);
    constexpr int scan = 1024;
    for (int i = 0; i <= scan; ++i) {
        if (group_velocity(params, profile, z * i / scan) <= 0.0) {
            throw Error(ErrorKind::NonTransportingChannel,
                        "group velocity <= 0 inside [0, z]");
        }
    }
    auto inverse_v = [&](double s) {
        const double v = group_velocity(params, profile, s);
        if (v <= 0.0) {
            throw Error(ErrorKind::NonTransportingChannel,
                        "group velocity <= 0 inside [0, z]");
        }
        return 1.0 / v;
    };
    const auto bp = profile.breakpoints();
    return quad::integrate(inverse_v, 0.0, z, 1e-9, bp).value;
}

FeasibilityReport check_feasibility(const SystemParams& params,
                                    const StokesProfile& profile,
                                    const VelocityDistribution& velocities,
                                    const FeasibilityThresholds& thresholds)
{
    FeasibilityReport report;
    const double v0 = std::abs(params.r);
    const double delta = params.two_photon_detuning();

    double max_delta = std::abs(delta);
    double max_dv = 0.0;
    for (const auto& c : velocities.classes) {
        max_delta = std::max(max_delta, std::abs(delta + c.delta));
        max_dv = std::max(
            max_dv,
            std::abs(velocities.velocity(c, params.dispersion_factor) - params.r));
    }
    report.two_photon.lhs = max_delta / v0;
    report.doppler.lhs = max_dv / v0 * std::abs(velocities.beat_k);

    // gamma v0 int theta'^2 / (g^2 n + Omega0^2)
    //   = (|r| / alpha) int theta'^2 / (1 + |r| omega^2)
    auto integrand = [&](double z) {
        const double tp = mixing_angle_prime(profile, z);
        const double w = profile.omega(z);
        return tp * tp / (1.0 + v0 * w * w);
    };
    const auto bp = profile.breakpoints();
    report.adiabaticity.lhs =
        v0 / params.alpha * quad::integrate(integrand, 0.0, 1.0, 1e-9, bp).value;

    report.opacity.lhs = params.alpha / v0;

    // Decay through |2> driven by the rotation of the dark state itself:
    // the flux falls as exp(-(2/alpha) int sin^2(theta) theta'^2 dz), which
    // for v0 << c is far larger than the adiabaticity integral above.
    auto leak = [&](double z) {
        const double tp = mixing_angle_prime(profile, z);
        const double w = profile.omega(z);
        return tp * tp / (1.0 + w * w);
    };
    report.nonadiabatic_flux_loss =
        1.0 - std::exp(-2.0 / params.alpha *
                       quad::integrate(leak, 0.0, 1.0, 1e-9, bp).value);

    report.two_photon.pass = report.two_photon.lhs < thresholds.much_less;
    report.doppler.pass = report.doppler.lhs < thresholds.much_less;
    report.adiabaticity.pass = report.adiabaticity.lhs < thresholds.much_less;
    report.opacity.pass = report.opacity.lhs > thresholds.much_greater;
    return report;
}

} // namespace darkbeam

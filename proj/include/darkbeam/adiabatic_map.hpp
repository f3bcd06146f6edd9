#pragma once

#include <darkbeam/envelope.hpp>
#include <darkbeam/model.hpp>

#include <string>
#include <vector>

#include <json.hpp>

namespace darkbeam {

/**
 * One position of the closed-form adiabatic transfer map. Amplitudes are
 * flux normalised: t^2 is the photon flux and s^2 the state-3 atom flux
 * at z, both relative to the photon flux entering at z = 0.
 */
struct MapSample
{
    double z = 0.0;
    double theta = 0.0;
    double t = 1.0;   ///< eta cos(theta) / cos(theta_0)
    double s = 0.0;   ///< eta sin(theta) / cos(theta_0)
    double eta = 1.0; ///< cumulative amplitude loss factor
    double tau = 0.0; ///< group delay
    double v_gr = 1.0;
};

class TransferMap
{
public:
    /// Throws NonPositiveVelocity, DegenerateProfile.
    static TransferMap build(const SystemParams& params,
                             const StokesProfile& profile, int n_samples,
                             double x);

    /// Exact evaluation at an arbitrary position (quadrature from 0).
    MapSample at(double z) const;

    const std::vector<MapSample>& samples() const { return m_samples; }
    const MapSample& front() const { return m_samples.front(); }
    const MapSample& back() const { return m_samples.back(); }

    const SystemParams& params() const { return m_params; }
    const StokesProfile& profile() const { return m_profile; }
    double x() const { return m_x; }
    double cos_theta0() const { return m_cos_theta0; }

    /// cos^2 theta(L): photons left over because Omega0(L) > 0.
    double residual_photon_fraction() const;

    /// Columns z, theta, t, s, eta, tau, v_gr.
    std::string to_csv() const;
    nlohmann::json to_json() const;
    static TransferMap from_json(const nlohmann::json& doc);

private:
    SystemParams m_params;
    StokesProfile m_profile;
    double m_x = 0.0;
    double m_cos_theta0 = 1.0;
    std::vector<MapSample> m_samples;
};

TransferMap build_transfer_map(const SystemParams& params,
                               const StokesProfile& profile, int n_samples);

/// E(z, t) = E(0, t - tau(z)) eta(z) cos(theta(z)) / cos(theta(0)).
complex field_solution(const TransferMap& map, const InputEnvelope& input,
                       double z, double t);

struct AtomOutput
{
    complex amplitude;            ///< Phi3(L, t), density normalised
    double residual_photon_fraction = 0.0;
    bool incomplete_transfer = false; ///< residual > 1e-3
};

/**
 * State-3 atom amplitude leaving the interaction region,
 * -sqrt(c/v0) eta(L) sin(theta(L)) / cos(theta(0)) E(0, t - tau(L)).
 */
AtomOutput atom_output(const TransferMap& map, const InputEnvelope& input,
                       double t);

struct TimeWindow
{
    double lo = 0.0;
    double hi = 0.0;
};

struct FluxBalance
{
    double photon_flux_in = 0.0; ///< c int |E(0,t)|^2 dt
    double atom_flux_out = 0.0;  ///< v0 int |Phi3(L,t)|^2 dt
    double relative_mismatch = 0.0; ///< |out - eta^2 in| / in
    double residual_photon_fraction = 0.0;
};

/// Throws WindowTooShort if `window` clips the delayed output support.
FluxBalance flux_balance(const TransferMap& map, const InputEnvelope& input,
                         TimeWindow window);

struct LossProfile
{
    double eta = 1.0;
    std::vector<std::pair<double, double>> eta_z; ///< (z, eta(z))
};

/**
 * Amplitude loss from a constant two-photon detuning at Delta = 0:
 * eta = exp(-alpha int_0^1 cos^2(theta) x^2 / (cot^4(theta) + x^2) dzeta),
 * evaluated in the overflow-free form
 * sin^4 cos^2 x^2 / (cos^4 + x^2 sin^4), relative tolerance 1e-8.
 */
LossProfile loss_factor_eta(const SystemParams& params,
                            const StokesProfile& profile, double x,
                            int n_samples = 101);

/// Integrand of the loss exponent at mixing angle theta.
double loss_integrand(double theta, double x);

struct LossBound
{
    double bound = 1.0;
    bool inapplicable = false; ///< |x| >= 0.3
};

/// exp(-alpha |x| / 2).
LossBound loss_bound(const SystemParams& params, double x);

} // namespace darkbeam

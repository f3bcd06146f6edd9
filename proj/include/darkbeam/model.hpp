#pragma once

#include <string>
#include <utility>
#include <vector>

namespace darkbeam {

/*
 * Units throughout: c = 1, L = 1, atomic density n = 1. Rates are in c/L,
 * velocities in c, and the Stokes Rabi frequency is quoted in units of
 * g*sqrt(n*|v0|/c), so that tan(theta) = 1/omega for the scaled value.
 */

/// Dimensionless physical configuration of the beam and the fields.
struct SystemParams
{
    double alpha = 10.0;       ///< opacity g^2 n L / (gamma c)
    double r = 0.05;           ///< v0 / c, signed
    double gamma_tilde = 50.0; ///< gamma L / c
    double x = 0.0;            ///< two-photon detuning delta*gamma / (g^2 n v0/c)
    double big_delta = 0.0;    ///< single-photon detuning Delta / gamma
    double length_L = 1.0;

    /// Matter-wave advection speed is dispersion_factor * hbar k / m.
    /// 0.5 is the phase velocity of a free matter wave, 1 its group
    /// velocity.
    double dispersion_factor = 0.5;

    /// g^2 n in units of c/L.
    double coupling_G() const { return alpha * gamma_tilde; }
    double coupling_g() const;

    /// delta in units of c/L.
    double two_photon_detuning() const { return x * alpha * r; }

    /// Delta in units of c/L.
    double single_photon_detuning() const { return big_delta * gamma_tilde; }

    /// Throws InvariantError.
    void validate() const;
};

enum class ProfileKind { TanhRampDown, CosSquaredRamp, Constant, Tabulated };

const char* to_string(ProfileKind kind);
ProfileKind profile_kind_from_string(const std::string& name);

/**
 * Spatial Stokes Rabi frequency Omega0(z) in scaled units. Ramp kinds fall
 * from omega_max at z = 0 to omega_min at z = L; the floor omega_min > 0
 * keeps the mixing angle strictly below pi/2.
 *
 * TanhRampDown: tanh step of half-width `width` about `center`, affinely
 * rescaled so both endpoint values are hit exactly.
 * CosSquaredRamp: cos^2 fall over [center - width/2, center + width/2],
 * flat outside.
 * Tabulated: piecewise linear through `samples`, floored at omega_min.
 */
class StokesProfile
{
public:
    StokesProfile() = default;

    static StokesProfile tanh_ramp(double omega_max, double omega_min,
                                   double center, double width);
    static StokesProfile cos2_ramp(double omega_max, double omega_min,
                                   double center, double width);
    static StokesProfile constant(double omega);
    static StokesProfile tabulated(std::vector<std::pair<double, double>> samples,
                                   double omega_min);

    ProfileKind kind() const { return m_kind; }
    double omega_max() const { return m_omega_max; }
    double omega_min() const { return m_omega_min; }
    double center() const { return m_center; }
    double width() const { return m_width; }
    const std::vector<std::pair<double, double>>& samples() const
    {
        return m_samples;
    }

    /// Scaled Rabi frequency at z (clamped to [0, L]).
    double omega(double z) const;
    /// d omega / dz; one-sided at kinks.
    double omega_prime(double z) const;

    /// Positions in (0, L) where the profile is not smooth.
    std::vector<double> breakpoints() const;

    bool is_ramp() const
    {
        return m_kind == ProfileKind::TanhRampDown ||
               m_kind == ProfileKind::CosSquaredRamp;
    }

    /// Throws InvariantError on a non-positive value or a rising ramp.
    void validate() const;

private:
    ProfileKind m_kind = ProfileKind::Constant;
    double m_omega_max = 1.0;
    double m_omega_min = 1e-3;
    double m_center = 0.5;
    double m_width = 0.1;
    std::vector<std::pair<double, double>> m_samples;

    double tanh_shape(double z) const;
};

struct VelocityClass
{
    double k = 0.0;         ///< hbar k_l / (m c)
    double xi = 1.0;        ///< weight
    double delta = 0.0;     ///< extra two-photon detuning, c/L units
    double big_delta = 0.0; ///< extra single-photon detuning, c/L units
};

/**
 * Discrete longitudinal velocity distribution. The per-class detunings add
 * to the global ones carried by SystemParams.
 */
struct VelocityDistribution
{
    std::vector<VelocityClass> classes;
    double pump_k = 0.0; ///< hbar k_p / (m c); shifts the |2> advection speed
    double beat_k = 0.0; ///< (k_p - k_s) L, beat-note wavenumber on z

    /// One class moving at params.r.
    static VelocityDistribution single(const SystemParams& params);

    /**
     * Gauss-Hermite discretisation of a Gaussian velocity spread with
     * standard deviation `spread` (in c) around params.r. Each class gets
     * the Doppler two-photon detuning (v_l - v0) * beat_k.
     */
    static VelocityDistribution doppler(const SystemParams& params,
                                        double spread, int n_classes,
                                        double beat_k);

    double velocity(const VelocityClass& cls, double dispersion_factor) const
    {
        return dispersion_factor * cls.k;
    }
    double excited_velocity(const VelocityClass& cls,
                            double dispersion_factor) const
    {
        return dispersion_factor * (cls.k + pump_k);
    }
    double mean_velocity(double dispersion_factor) const;

    /// Weights sum to one, are non-negative and reproduce v0 = r.
    void validate(const SystemParams& params) const;
};

/// Mixing angle theta(z) with tan^2 theta = g^2 n v0 / (Omega0^2 c).
double mixing_angle(const SystemParams& params, const StokesProfile& profile,
                    double z);

/// Group velocity for a scaled Rabi frequency value.
double group_velocity_at(const SystemParams& params, double omega_scaled);

double group_velocity(const SystemParams& params, const StokesProfile& profile,
                      double z);

/// tau(z) = int_0^z dz' / v_gr(z'), relative tolerance 1e-9.
double delay_tau(const SystemParams& params, const StokesProfile& profile,
                 double z);

/// d theta / dz, analytic from the profile derivative.
double mixing_angle_prime(const StokesProfile& profile, double z);

struct FeasibilityThresholds
{
    double much_less = 0.1;     ///< LHS below this counts as "<< 1"
    double much_greater = 10.0; ///< ratio above this counts as ">>"
};

struct FeasibilityCheck
{
    double lhs = 0.0;
    bool pass = false;
};

struct FeasibilityReport
{
    FeasibilityCheck two_photon;  ///< max |delta_l| L / v0
    FeasibilityCheck doppler;     ///< max |v_l - v0| / v0 * (k_p - k_s) L
    FeasibilityCheck adiabaticity; ///< gamma int v0 theta'^2/(g^2 n + Omega0^2)
    FeasibilityCheck opacity;     ///< alpha / |r|, passes when large

    /// Informational: predicted fraction of the flux lost to |2> decay
    /// while the dark state rotates, 1 - exp(-(2/alpha) int sin^2 theta'^2).
    double nonadiabatic_flux_loss = 0.0;

    bool all_pass() const
    {
        return two_photon.pass && doppler.pass && adiabaticity.pass &&
               opacity.pass;
    }
};

FeasibilityReport check_feasibility(const SystemParams& params,
                                    const StokesProfile& profile,
                                    const VelocityDistribution& velocities,
                                    const FeasibilityThresholds& thresholds = {});

} // namespace darkbeam

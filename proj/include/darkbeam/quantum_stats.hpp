#pragma once

#include <darkbeam/adiabatic_map.hpp>
#include <darkbeam/envelope.hpp>

#include <string>
#include <vector>

#include <Eigen/Core>

namespace darkbeam {

/*
 * Quadrature convention: hbar = 1, x = (a + a^dag)/sqrt2, p = (a - a^dag)/(i sqrt2),
 * so the vacuum variance is 1/2 per quadrature. Two-mode covariances are
 * ordered (x1, p1, x2, p2).
 */

enum class InputKind { Fock, Coherent, TwoModeSqueezed };

const char* to_string(InputKind kind);
InputKind input_kind_from_string(const std::string& name);

/**
 * Quantum state carried by a single temporal mode of the input beam. The
 * mode envelope is normalised to c int |u(t)|^2 dt = 1.
 */
struct QuantumInput
{
    InputKind kind = InputKind::Fock;
    int n_photons = 1;          ///< Fock
    complex amplitude{0.0, 0.0}; ///< Coherent
    double r_squeeze = 0.0;     ///< TwoModeSqueezed
    InputEnvelope envelope = InputEnvelope::zero();

    static QuantumInput fock(int n, InputEnvelope envelope);
    static QuantumInput coherent(complex amplitude, InputEnvelope envelope);
    static QuantumInput two_mode_squeezed(double r, InputEnvelope envelope);

    /// Mean photon number of this beam.
    double mean_photons() const;

    /// Throws InvariantError (negative N, envelope norm off by > 1e-6).
    void validate() const;
};

/// Three-port partition of one excitation: photon, state-3 atom, reservoir.
struct ChannelSplit
{
    double p_light = 1.0;
    double q_atom = 0.0;
    double l_loss = 0.0;

    /// Throws InvariantError unless each entry is in [0,1] and they sum to 1.
    void validate() const;
};

/// p = eta^2 cos^2 theta, q = eta^2 sin^2 theta, l = 1 - eta^2.
ChannelSplit channel_split(double theta, double eta);

/// Split at position z. Throws DegenerateProfile via the map.
ChannelSplit channel_from_map(const TransferMap& map, double z);

struct CountStats
{
    double photon_mean = 0.0;
    double photon_var = 0.0;
    double atom_mean = 0.0;
    double atom_var = 0.0;
    double loss_mean = 0.0;
};

/**
 * Integrated counts at one plane when the window covers the whole delayed
 * mode. For a two-mode squeezed input the statistics are those of one arm.
 */
CountStats count_stats(const QuantumInput& input, const ChannelSplit& split);

struct Fig2Row
{
    double z = 0.0;
    double n_mean = 0.0; ///< photon mean / N
    double m_mean = 0.0; ///< atom mean / N
    double n_var = 0.0;  ///< photon variance / N
    double m_var = 0.0;  ///< atom variance / N
    double omega_scaled = 0.0;
};

/// Photon and atom statistics on a uniform z grid for a Fock-N input.
std::vector<Fig2Row> fig2_curves(const SystemParams& params,
                                 const StokesProfile& profile, int n_photons,
                                 int n_z = 201);

/// Columns z, n_mean, m_mean, n_var, m_var, omega_scaled.
std::string fig2_csv(const std::vector<Fig2Row>& rows);

using TwoModeCov = Eigen::Matrix4d;
using SingleModeCov = Eigen::Matrix2d;

TwoModeCov vacuum_cov();
TwoModeCov two_mode_squeezed(double r);

/// Smallest eigenvalue of V + i Omega / 2; >= 0 for a physical state.
double uncertainty_margin(const TwoModeCov& cov);

/// Throws UnphysicalCovariance if cov is asymmetric or breaks the bound.
void check_physical(const TwoModeCov& cov);

/**
 * Each arm goes through a beamsplitter of transmissivity q_atom into the
 * atomic port: V -> S V S + (1 - S^2) / 2 with S = diag(sqrt q1, sqrt q1,
 * sqrt q2, sqrt q2).
 */
TwoModeCov gaussian_channel_apply(const TwoModeCov& cov,
                                  const ChannelSplit& first,
                                  const ChannelSplit& second);

struct DuanResult
{
    double value = 0.0;    ///< Var(x1 - x2) + Var(p1 + p2)
    bool entangled = false; ///< value < 2
};

DuanResult duan_criterion(const TwoModeCov& cov);

/// Mean and variance of the number of quanta in a zero-mean Gaussian mode.
struct GaussianCounts
{
    double mean = 0.0;
    double variance = 0.0;
};
GaussianCounts gaussian_counts(const SingleModeCov& cov);

/**
 * Single-mode validity check. The photon survival probability of a
 * spectral component detuned by w from the carrier behaves like a
 * two-photon detuning delta = w; the relative change of p at the pulse's
 * rms spectral width is compared against 5%.
 */
struct MultimodeDiagnostic
{
    double spectral_rms = 0.0;
    double relative_variation = 0.0;
    bool multimode = false;
};

MultimodeDiagnostic multimode_diagnostic(const SystemParams& params,
                                         const StokesProfile& profile,
                                         double pulse_sigma);

} // namespace darkbeam

#pragma once

#include <darkbeam/adiabatic_map.hpp>
#include <darkbeam/envelope.hpp>
#include <darkbeam/model.hpp>

#include <string>
#include <vector>

#include <json.hpp>

namespace darkbeam {

/// z-t lattice. The time step is locked to dz / c.
struct GridSpec
{
    int nz = 512;
    long nt = 0;       ///< 0: sized from the input support and tau(L)
    double dt = 0.0;   ///< 0: dz; anything else must equal dz
    std::vector<double> record_planes{1.0};
    double weak_bound = 0.1;

    double dz() const { return 1.0 / nz; }
    double step() const { return dz(); }

    /// Throws CFLViolation / InvariantError.
    void validate() const;
};

/**
 * Envelopes on the nodes z_j = j dz, j = 0..nz. phi1 is pinned at
 * sqrt(n xi_l) (weak excitation), phi2 and phi3 are stored per velocity
 * class.
 */
struct GridState
{
    std::vector<complex> E;
    std::vector<double> phi1;
    std::vector<std::vector<complex>> phi2;
    std::vector<std::vector<complex>> phi3;
    double t_now = 0.0;
    long step_index = 0;
};

/// Per-step increments of the excitation ledger.
struct StepFluxes
{
    double photon_in = 0.0;
    double photon_out = 0.0;
    double atom_out = 0.0;
    double decay = 0.0;
};

/**
 * photon_in = photon_out + atom_out + decay + remaining, where decay is
 * 2 gamma int int sum_l |phi2_l|^2 dz dt and remaining is the excitation
 * still inside [0, L] when the run stops.
 */
struct ExcitationBudget
{
    double photon_in = 0.0;
    double photon_out = 0.0;
    double atom_out = 0.0;
    double decay = 0.0;
    double remaining = 0.0;

    double closure() const;
};

struct PlaneSeries
{
    double z = 0.0;
    int node = 0;
    std::vector<double> t;
    std::vector<complex> E;
    /// Collective state-3 amplitude sum_l sqrt(xi_l) phi3_l.
    std::vector<complex> phi3;
    /// sum_l (v_l |phi3_l|^2 + v2_l |phi2_l|^2) through the plane.
    std::vector<double> atom_flux;
};

struct SimulationRecord
{
    int nz = 0;
    double dt = 0.0;
    long steps = 0;
    std::vector<PlaneSeries> planes;
    ExcitationBudget budget;
    double weak_excitation_max = 0.0;
    bool weak_excitation_flag = false;

    /// Nearest recorded plane.
    const PlaneSeries& plane(double z) const;

    /// Columns t, then Re/Im of E and phi3 for every plane.
    std::string to_csv() const;
    nlohmann::json summary() const;
};

class PdeSolver
{
public:
    /// An empty velocity distribution means no atoms (pure field advection).
    PdeSolver(SystemParams params, StokesProfile profile,
              VelocityDistribution velocities, GridSpec grid);

    /// Stationary |1> input, no excitation, E(0) = input(0).
    GridState initialize(const InputEnvelope& input) const;

    /// One Strang step: react dt/2, advect, react dt/2.
    StepFluxes step(GridState& state, const InputEnvelope& input) const;

    SimulationRecord run(const InputEnvelope& input) const;

    /// Steps needed to flush the input support past z = L.
    long auto_steps(const InputEnvelope& input) const;

    const GridSpec& grid() const { return m_grid; }
    const SystemParams& params() const { return m_params; }
    std::size_t n_classes() const { return m_velocities.classes.size(); }

private:
    SystemParams m_params;
    StokesProfile m_profile;
    VelocityDistribution m_velocities;
    GridSpec m_grid;

    int m_dim = 1; // 1 + 2 * classes
    std::vector<double> m_phi1;
    std::vector<double> m_v3;  // phi3 advection speed per class
    std::vector<double> m_v2;  // phi2 advection speed per class
    // exp(M_j dt/2), row-major m_dim x m_dim per node.
    std::vector<complex> m_half;

    void react(GridState& state, double& norm_loss, double& max_abs) const;
    void advect(std::vector<complex>& field, double speed,
                std::vector<complex>& scratch) const;
};

/**
 * Relative L2 distance between the simulated flux-normalised atom output
 * sqrt(v0) Phi3(L, t) and the adiabatic prediction over the recorded times.
 */
double adiabatic_output_error(const PlaneSeries& at_end, const TransferMap& map,
                              const InputEnvelope& input);

struct ConvergenceReport
{
    std::vector<int> nz;
    std::vector<double> diffs;  ///< ||u_{k+1} - u_k|| on the coarse times
    std::vector<double> orders; ///< log2 of successive diff ratios
    std::vector<double> adiabatic_error; ///< per level, vs the transfer map
    std::vector<ExcitationBudget> budgets; ///< per level
    double observed_order = 0.0;
    bool low_order = false;     ///< order < 1: flagged, not failed
};

struct PdeScenario
{
    SystemParams params;
    StokesProfile profile;
    VelocityDistribution velocities;
    GridSpec grid;        ///< coarsest level
    InputEnvelope input = InputEnvelope::zero();
};

/**
 * Runs `levels` >= 3 grids nz, 2nz, 4nz, ... and estimates the observed
 * order from the atom output at z = L. Throws NonConvergent if the
 * level-to-level difference grows under refinement.
 */
ConvergenceReport convergence_study(const PdeScenario& scenario, int levels);

} // namespace darkbeam

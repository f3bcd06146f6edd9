#include <darkbeam/pde_solver.hpp>

#include <darkbeam/errors.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <iomanip>
#include <sstream>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace darkbeam {

using nlohmann::json;

namespace {

constexpr double blowup_factor = 1e6;

int node_of(double z, int nz)
{
    return std::clamp(int(std::lround(z * nz)), 0, nz);
}

double input_scale(const InputEnvelope& input)
{
    double scale = 0.0;
    const double lo = input.support_lo();
    const double hi = input.support_hi();
    for (int i = 0; i <= 1000; ++i) {
        scale = std::max(scale, std::abs(input(lo + (hi - lo) * i / 1000.0)));
    }
    return scale > 0.0 ? scale : 1.0;
}

} // namespace

void GridSpec::validate() const
{
    if (nz < 64) {
        throw Error(ErrorKind::InvariantError, "grid nz >= 64");
    }
    if (dt > dz() * (1.0 + 1e-12)) {
        throw Error(ErrorKind::CFLViolation,
                    "dt > dz/c: light would skip cells");
    }
    if (dt != 0.0 && std::abs(dt - dz()) > 1e-12 * dz()) {
        throw Error(ErrorKind::InvariantError,
                    "dt is locked to dz/c; leave it at 0 or set dt = 1/nz");
    }
    if (nt < 0) {
        throw Error(ErrorKind::InvariantError, "grid nt >= 0");
    }
    for (double z : record_planes) {
        if (!(z >= 0.0 && z <= 1.0)) {
            throw Error(ErrorKind::InvariantError,
                        "record planes must lie in [0, L]");
        }
    }
    if (!(weak_bound > 0.0)) {
        throw Error(ErrorKind::InvariantError, "weak_bound > 0");
    }
}

double ExcitationBudget::closure() const
{
    if (photon_in <= 0.0) {
        return 0.0;
    }
    return std::abs(photon_in -
                    (photon_out + atom_out + decay + remaining)) /
           photon_in;
}

const PlaneSeries& SimulationRecord::plane(double z) const
{
    if (planes.empty()) {
        throw Error(ErrorKind::InvariantError, "no planes recorded");
    }
    auto best = std::min_element(
        planes.begin(), planes.end(), [z](const auto& a, const auto& b) {
            return std::abs(a.z - z) < std::abs(b.z - z);
        });
    return *best;
}

std::string SimulationRecord::to_csv() const
{
    std::ostringstream out;
    out << "t";
    for (const auto& p : planes) {
        std::ostringstream tag;
        tag << "z" << p.z;
        out << ",re_E_" << tag.str() << ",im_E_" << tag.str() << ",re_phi3_"
            << tag.str() << ",im_phi3_" << tag.str();
    }
    out << '\n' << std::setprecision(17);
    if (planes.empty()) {
        return out.str();
    }
    for (std::size_t n = 0; n < planes.front().t.size(); ++n) {
        out << planes.front().t[n];
        for (const auto& p : planes) {
            out << ',' << p.E[n].real() << ',' << p.E[n].imag() << ','
                << p.phi3[n].real() << ',' << p.phi3[n].imag();
        }
        out << '\n';
    }
    return out.str();
}

json SimulationRecord::summary() const
{
    return {{"nz", nz},
            {"dt", dt},
            {"steps", steps},
            {"budget",
             {{"photon_in", budget.photon_in},
              {"photon_out", budget.photon_out},
              {"atom_out", budget.atom_out},
              {"decay", budget.decay},
              {"remaining", budget.remaining},
              {"closure", budget.closure()}}},
            {"weak_excitation_max", weak_excitation_max},
            {"weak_excitation_flag", weak_excitation_flag}};
}

PdeSolver::PdeSolver(SystemParams params, StokesProfile profile,
                     VelocityDistribution velocities, GridSpec grid)
  : m_params(params), m_profile(std::move(profile)),
    m_velocities(std::move(velocities)), m_grid(std::move(grid))
{
    m_params.validate();
    m_profile.validate();
    m_grid.validate();
    if (!m_velocities.classes.empty()) {
        m_velocities.validate(m_params);
    }

    const std::size_t nc = m_velocities.classes.size();
    m_dim = 1 + 2 * int(nc);
    const double f = m_params.dispersion_factor;
    for (const auto& c : m_velocities.classes) {
        m_phi1.push_back(std::sqrt(c.xi));
        m_v3.push_back(m_velocities.velocity(c, f));
        m_v2.push_back(m_velocities.excited_velocity(c, f));
        if (m_v3.back() < 0.0 || m_v2.back() < 0.0) {
            throw Error(ErrorKind::NonPositiveVelocity,
                        "solver needs every class moving towards +z");
        }
        if (m_v3.back() >= 1.0 || m_v2.back() >= 1.0) {
            throw Error(ErrorKind::CFLViolation,
                        "matter advection speed must stay below c");
        }
    }

    const double g = m_params.coupling_g();
    const double omega_unit = std::sqrt(m_params.coupling_G() * std::abs(m_params.r));
    const double gamma = m_params.gamma_tilde;
    const double delta = m_params.two_photon_detuning();
    const double big_delta = m_params.single_photon_detuning();
    const double half = 0.5 * m_grid.step();
    const complex i{0.0, 1.0};
    const int nz = m_grid.nz;

    m_half.resize(std::size_t(nz + 1) * m_dim * m_dim);
    Eigen::MatrixXcd m(m_dim, m_dim);
    for (int j = 0; j <= nz; ++j) {
        const double omega0 = omega_unit * m_profile.omega(double(j) / nz);
        m.setZero();
        for (std::size_t l = 0; l < nc; ++l) {
            const auto& c = m_velocities.classes[l];
            const int k2 = 1 + 2 * int(l);
            const int k3 = k2 + 1;
            const double a = m_phi1[l];
            m(0, k2) = -i * g * a;
            m(k2, 0) = -i * g * a;
            m(k2, k2) = -(gamma + i * (big_delta + c.big_delta));
            m(k2, k3) = -i * omega0;
            m(k3, k2) = -i * omega0;
            m(k3, k3) = -i * (delta + c.delta);
        }
        const Eigen::MatrixXcd p = (m * half).exp();
        complex* dst = &m_half[std::size_t(j) * m_dim * m_dim];
        for (int r = 0; r < m_dim; ++r) {
            for (int s = 0; s < m_dim; ++s) {
                dst[r * m_dim + s] = p(r, s);
            }
        }
    }
}

GridState PdeSolver::initialize(const InputEnvelope& input) const
{
    const int nz = m_grid.nz;
    GridState s;
    s.E.assign(nz + 1, complex{});
    s.E[0] = input(0.0);
    s.phi1 = m_phi1;
    s.phi2.assign(n_classes(), std::vector<complex>(nz + 1));
    s.phi3.assign(n_classes(), std::vector<complex>(nz + 1));
    s.t_now = 0.0;
    return s;
}

void PdeSolver::react(GridState& state, double& norm_loss,
                      double& max_abs) const
{
    const int nz = m_grid.nz;
    const std::size_t nc = n_classes();
    const double dz = m_grid.dz();
    std::vector<complex> y(m_dim);
    std::vector<complex> out(m_dim);
    for (int j = 0; j <= nz; ++j) {
        y[0] = state.E[j];
        for (std::size_t l = 0; l < nc; ++l) {
            y[1 + 2 * l] = state.phi2[l][j];
            y[2 + 2 * l] = state.phi3[l][j];
        }
        const complex* p = &m_half[std::size_t(j) * m_dim * m_dim];
        double before = 0.0;
        double after = 0.0;
        for (int r = 0; r < m_dim; ++r) {
            complex acc{};
            for (int s = 0; s < m_dim; ++s) {
                acc += p[r * m_dim + s] * y[s];
            }
            out[r] = acc;
            before += std::norm(y[r]);
            after += std::norm(acc);
        }
        norm_loss += (before - after) * dz;
        state.E[j] = out[0];
        for (std::size_t l = 0; l < nc; ++l) {
            state.phi2[l][j] = out[1 + 2 * l];
            state.phi3[l][j] = out[2 + 2 * l];
        }
        // Written so that a NaN sticks; std::max would drop it.
        if (!(after <= max_abs)) {
            max_abs = after;
        }
    }
}

// Semi-Lagrangian cubic advection at `speed`; zero inflow at z < 0 and a
// one-sided stencil at the outflow node.
void PdeSolver::advect(std::vector<complex>& field, double speed,
                       std::vector<complex>& scratch) const
{
    if (speed == 0.0) {
        return;
    }
    const int nz = m_grid.nz;
    const double shift = speed * m_grid.step() / m_grid.dz();
    scratch.assign(field.begin(), field.end());
    auto at = [&](int k) { return k < 0 ? complex{} : scratch[k]; };
    for (int j = 0; j <= nz; ++j) {
        const double xd = j - shift;
        const int m = int(std::floor(xd));
        const int base = std::min(m - 1, nz - 3);
        const double p = xd - base;
        const double w0 = -(p - 1.0) * (p - 2.0) * (p - 3.0) / 6.0;
        const double w1 = p * (p - 2.0) * (p - 3.0) / 2.0;
        const double w2 = -p * (p - 1.0) * (p - 3.0) / 2.0;
        const double w3 = p * (p - 1.0) * (p - 2.0) / 6.0;
        field[j] = w0 * at(base) + w1 * at(base + 1) + w2 * at(base + 2) +
                   w3 * at(base + 3);
    }
}

StepFluxes PdeSolver::step(GridState& state, const InputEnvelope& input) const
{
    const int nz = m_grid.nz;
    const double dt = m_grid.step();
    const double dz = m_grid.dz();
    StepFluxes flux;
    double max_abs = 0.0;

    react(state, flux.decay, max_abs);

    flux.photon_out = std::norm(state.E[nz]) * dz;
    for (std::size_t l = 0; l < n_classes(); ++l) {
        flux.atom_out += (m_v3[l] * std::norm(state.phi3[l][nz]) +
                          m_v2[l] * std::norm(state.phi2[l][nz])) *
                         dt;
    }

    // Light moves exactly one cell per step.
    std::rotate(state.E.rbegin(), state.E.rbegin() + 1, state.E.rend());
    state.E[0] = input(state.t_now + dt);
    flux.photon_in = std::norm(state.E[0]) * dz;

    std::vector<complex> scratch;
    for (std::size_t l = 0; l < n_classes(); ++l) {
        advect(state.phi2[l], m_v2[l], scratch);
        advect(state.phi3[l], m_v3[l], scratch);
    }

    react(state, flux.decay, max_abs);

    state.t_now += dt;
    ++state.step_index;

    if (!std::isfinite(max_abs)) {
        throw Error(ErrorKind::NumericalBlowup, "non-finite field value");
    }
    return flux;
}

long PdeSolver::auto_steps(const InputEnvelope& input) const
{
    double tau = 1.0;
    if (m_params.r > 0.0 && !m_velocities.classes.empty()) {
        tau = delay_tau(m_params, m_profile, 1.0);
    }
    const double t_end = input.support_hi() + tau + 1.0;
    return long(std::ceil(t_end / m_grid.step()));
}

SimulationRecord PdeSolver::run(const InputEnvelope& input) const
{
    const int nz = m_grid.nz;
    const double dz = m_grid.dz();
    const std::size_t nc = n_classes();
    const long steps = m_grid.nt > 0 ? m_grid.nt : auto_steps(input);
    const double scale = input_scale(input);
    const double limit = blowup_factor * scale;

    SimulationRecord rec;
    rec.nz = nz;
    rec.dt = m_grid.step();
    rec.steps = steps;
    for (double z : m_grid.record_planes) {
        PlaneSeries p;
        p.node = node_of(z, nz);
        p.z = double(p.node) / nz;
        p.t.reserve(steps + 1);
        p.E.reserve(steps + 1);
        p.phi3.reserve(steps + 1);
        p.atom_flux.reserve(steps + 1);
        rec.planes.push_back(std::move(p));
    }

    GridState state = initialize(input);
    rec.budget.photon_in = std::norm(state.E[0]) * dz;

    auto record = [&] {
        for (auto& p : rec.planes) {
            const int j = p.node;
            complex collective{};
            double atom_flux = 0.0;
            for (std::size_t l = 0; l < nc; ++l) {
                collective += m_phi1[l] * state.phi3[l][j];
                atom_flux += m_v3[l] * std::norm(state.phi3[l][j]) +
                             m_v2[l] * std::norm(state.phi2[l][j]);
            }
            p.t.push_back(state.t_now);
            p.E.push_back(state.E[j]);
            p.phi3.push_back(collective);
            p.atom_flux.push_back(atom_flux);
        }
    };
    record();

    for (long n = 0; n < steps; ++n) {
        const StepFluxes f = step(state, input);
        rec.budget.photon_in += f.photon_in;
        rec.budget.photon_out += f.photon_out;
        rec.budget.atom_out += f.atom_out;
        rec.budget.decay += f.decay;

        double weak = 0.0;
        double peak = 0.0;
        for (int j = 0; j <= nz; ++j) {
            double excited = 0.0;
            for (std::size_t l = 0; l < nc; ++l) {
                excited += std::norm(state.phi2[l][j]) +
                           std::norm(state.phi3[l][j]);
            }
            weak = std::max(weak, excited);
            peak = std::max(peak, std::max(std::abs(state.E[j]),
                                           std::sqrt(excited)));
        }
        rec.weak_excitation_max = std::max(rec.weak_excitation_max, weak);
        if (!(peak <= limit)) {
            throw Error(ErrorKind::NumericalBlowup,
                        "field magnitude exceeds 1e6 x input scale at t = " +
                            std::to_string(state.t_now));
        }
        record();
    }
    rec.weak_excitation_flag = rec.weak_excitation_max > m_grid.weak_bound;

    double remaining = 0.0;
    for (int j = 0; j <= nz; ++j) {
        remaining += std::norm(state.E[j]);
        for (std::size_t l = 0; l < nc; ++l) {
            remaining += std::norm(state.phi2[l][j]) + std::norm(state.phi3[l][j]);
        }
    }
    rec.budget.remaining = remaining * dz;
    return rec;
}

double adiabatic_output_error(const PlaneSeries& at_end, const TransferMap& map,
                              const InputEnvelope& input)
{
    const double root_v0 = std::sqrt(map.params().r);
    const double tau = map.back().tau;
    double diff = 0.0;
    double norm = 0.0;
    for (std::size_t n = 0; n < at_end.t.size(); ++n) {
        const double t = at_end.t[n];
        const complex predicted =
            t - tau < input.record_start()
                ? complex{}
                : root_v0 * atom_output(map, input, t).amplitude;
        const complex simulated = root_v0 * at_end.phi3[n];
        diff += std::norm(simulated - predicted);
        norm += std::norm(predicted);
    }
    return norm > 0.0 ? std::sqrt(diff / norm) : std::sqrt(diff);
}

ConvergenceReport convergence_study(const PdeScenario& scenario, int levels)
{
    if (levels < 3) {
        throw Error(ErrorKind::InvariantError, "convergence study needs >= 3 levels");
    }
    std::vector<SimulationRecord> runs;
    ConvergenceReport report;
    const bool with_map = scenario.params.r > 0.0 &&
                          !scenario.velocities.classes.empty();
    std::optional<TransferMap> map;
    if (with_map) {
        map = TransferMap::build(scenario.params, scenario.profile, 2,
                                 scenario.params.x);
    }

    // Same physical duration on every level.
    GridSpec base = scenario.grid;
    base.record_planes = {1.0};
    const long base_steps =
        base.nt > 0 ? base.nt
                    : PdeSolver(scenario.params, scenario.profile,
                                scenario.velocities, base)
                          .auto_steps(scenario.input);
    for (int k = 0; k < levels; ++k) {
        GridSpec g = base;
        g.nz = base.nz << k;
        g.nt = base_steps << k;
        g.dt = 0.0;
        PdeSolver solver(scenario.params, scenario.profile, scenario.velocities,
                         g);
        runs.push_back(solver.run(scenario.input));
        report.nz.push_back(g.nz);
        report.budgets.push_back(runs.back().budget);
        if (map) {
            report.adiabatic_error.push_back(adiabatic_output_error(
                runs.back().planes.front(), *map, scenario.input));
        }
    }

    // Observable: output at z = L on the coarse time samples. Atoms when
    // present, otherwise the transmitted field.
    auto sample = [&](int k, long n) {
        const auto& p = runs[k].planes.front();
        const long idx = n << k;
        return with_map ? p.phi3[idx] : p.E[idx];
    };
    const double dt0 = runs.front().dt;
    for (int k = 0; k + 1 < levels; ++k) {
        double acc = 0.0;
        for (long n = 0; n <= base_steps; ++n) {
            acc += std::norm(sample(k + 1, n) - sample(k, n));
        }
        report.diffs.push_back(std::sqrt(acc * dt0));
    }
    for (std::size_t k = 0; k + 1 < report.diffs.size(); ++k) {
        if (report.diffs[k + 1] > report.diffs[k]) {
            throw Error(ErrorKind::NonConvergent,
                        "level difference grows under refinement");
        }
        report.orders.push_back(
            report.diffs[k + 1] > 0.0
                ? std::log2(report.diffs[k] / report.diffs[k + 1])
                : std::numeric_limits<double>::infinity());
    }
    report.observed_order = report.orders.back();
    report.low_order = report.observed_order < 1.0;
    return report;
}

} // namespace darkbeam

#include <darkbeam/scenario.hpp>

#include <darkbeam/adiabatic_map.hpp>
#include <darkbeam/errors.hpp>
#include <darkbeam/model_json.hpp>
#include <darkbeam/worker_pool.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace darkbeam {

namespace fs = std::filesystem;

namespace {

Assertion below(std::string name, double value, double limit)
{
    return {std::move(name), value < limit, value, limit};
}

Assertion above(std::string name, double value, double limit)
{
    return {std::move(name), value > limit, value, limit};
}

Assertion holds(std::string name, bool ok)
{
    return {std::move(name), ok, ok ? 1.0 : 0.0, 1.0};
}

// ------------------------------------------------------------------ transfer

ScenarioResult run_transfer(const Config& cfg)
{
    ScenarioResult out;
    const TransferMap map = TransferMap::build(cfg.params, cfg.stokes,
                                               cfg.map_samples, cfg.params.x);
    const int n_photons =
        cfg.quantum.kind == InputKind::Fock && cfg.quantum.n_photons > 0
            ? cfg.quantum.n_photons
            : 10;
    const auto rows = fig2_curves(cfg.params, cfg.stokes, n_photons,
                                  cfg.map_samples);

    // Single interior maximum of the atom variance.
    std::size_t peak = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].m_var > rows[peak].m_var) {
            peak = i;
        }
    }
    bool unimodal = peak > 0 && peak + 1 < rows.size();
    for (std::size_t i = 1; i < rows.size() && unimodal; ++i) {
        const double step = rows[i].m_var - rows[i - 1].m_var;
        unimodal = i <= peak ? step >= -1e-15 : step <= 1e-15;
    }
    // The peak must sit where p = q, up to one grid step in q.
    double max_dq = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        max_dq = std::max(max_dq, std::abs(rows[i].m_mean - rows[i - 1].m_mean));
    }
    const double peak_gap = std::abs(rows[peak].n_mean - rows[peak].m_mean);

    double closure = 0.0;
    for (const auto& r : rows) {
        const double loss = 1.0 - std::pow(map.at(r.z).eta, 2);
        closure = std::max(closure, std::abs(r.n_mean + r.m_mean + loss - 1.0));
    }

    const auto& end = rows.back();
    out.assertions.push_back(below("photon_mean_at_L_per_N", end.n_mean, 1e-2));
    out.assertions.push_back(above("atom_mean_at_L_per_N", end.m_mean, 0.99));
    out.assertions.push_back(holds("atom_variance_single_interior_max", unimodal));
    out.assertions.push_back(
        below("atom_variance_peak_offset_from_p_eq_q", peak_gap, 2.0 * max_dq + 1e-12));
    out.assertions.push_back(below("atom_variance_at_L_per_N", end.m_var, 1e-3 + 1e-15));
    out.assertions.push_back(below("partition_closure", closure, 1e-12));

    const ChannelSplit split = channel_from_map(map, 1.0);
    const CountStats stats = count_stats(cfg.quantum, split);
    const auto mm = multimode_diagnostic(cfg.params, cfg.stokes, cfg.pulse.sigma);
    out.results = {
        {"n_photons", n_photons},
        {"peak_z", rows[peak].z},
        {"peak_atom_variance_per_N", rows[peak].m_var},
        {"residual_photon_fraction", map.residual_photon_fraction()},
        {"eta_L", map.back().eta},
        {"tau_L", map.back().tau},
        {"split_at_L",
         {{"p_light", split.p_light}, {"q_atom", split.q_atom}, {"l_loss", split.l_loss}}},
        {"configured_input",
         {{"kind", to_string(cfg.quantum.kind)},
          {"photon_mean", stats.photon_mean},
          {"photon_var", stats.photon_var},
          {"atom_mean", stats.atom_mean},
          {"atom_var", stats.atom_var},
          {"loss_mean", stats.loss_mean}}},
        {"multimode",
         {{"spectral_rms", mm.spectral_rms},
          {"relative_variation", mm.relative_variation},
          {"flagged", mm.multimode}}}};
    out.files["fig2.csv"] = fig2_csv(rows);
    out.files["transfer_map.csv"] = map.to_csv();
    return out;
}

// ------------------------------------------------------------------ validate

ScenarioResult run_validate(const Config& cfg)
{
    ScenarioResult out;
    const InputEnvelope input = cfg.pulse.envelope();
    PdeScenario scenario{cfg.params, cfg.stokes, cfg.velocities, cfg.grid, input};
    const ConvergenceReport conv = convergence_study(scenario, cfg.levels);

    // Coarsest grid again with every configured plane for the time series.
    const SimulationRecord rec =
        PdeSolver(cfg.params, cfg.stokes, cfg.velocities, cfg.grid).run(input);
    const TransferMap map =
        TransferMap::build(cfg.params, cfg.stokes, cfg.map_samples, cfg.params.x);
    const FeasibilityReport feas =
        check_feasibility(cfg.params, cfg.stokes, cfg.velocities, cfg.thresholds);

    bool improving = true;
    for (std::size_t k = 1; k < conv.adiabatic_error.size(); ++k) {
        improving = improving && conv.adiabatic_error[k] < conv.adiabatic_error[k - 1];
    }
    double worst_closure = 0.0;
    for (const auto& b : conv.budgets) {
        worst_closure = std::max(worst_closure, b.closure());
    }
    out.assertions.push_back(
        below("l2_error_vs_adiabatic_map", conv.adiabatic_error.front(), 0.02));
    out.assertions.push_back(holds("error_decreases_under_refinement", improving));
    out.assertions.push_back(below("budget_closure", worst_closure, 0.005));
    out.assertions.push_back(
        {"observed_order_at_least_1", conv.observed_order >= 1.0,
         conv.observed_order, 1.0});

    const auto& b = rec.budget;
    const double eta2 = map.back().eta * map.back().eta;
    out.results = {
        {"pde", rec.summary()},
        {"photon_fraction_out", b.photon_in > 0 ? b.photon_out / b.photon_in : 0.0},
        {"atom_fraction_out", b.photon_in > 0 ? b.atom_out / b.photon_in : 0.0},
        {"predicted_atom_fraction", eta2 * std::pow(std::sin(map.back().theta), 2)},
        {"predicted_nonadiabatic_flux_loss", feas.nonadiabatic_flux_loss},
        {"convergence",
         {{"nz", conv.nz},
          {"adiabatic_error", conv.adiabatic_error},
          {"diffs", conv.diffs},
          {"orders", conv.orders},
          {"observed_order", conv.observed_order},
          {"low_order", conv.low_order}}},
        {"feasibility", to_json(feas)}};

    std::ostringstream csv;
    csv << "nz,adiabatic_error,budget_closure,diff_to_next\n" << std::setprecision(17);
    for (std::size_t k = 0; k < conv.nz.size(); ++k) {
        csv << conv.nz[k] << ','
            << (k < conv.adiabatic_error.size() ? conv.adiabatic_error[k] : 0.0)
            << ',' << conv.budgets[k].closure() << ','
            << (k < conv.diffs.size() ? conv.diffs[k] : 0.0) << '\n';
    }
    out.files["convergence.csv"] = csv.str();
    out.files["pde.csv"] = rec.to_csv();
    return out;
}

// --------------------------------------------------------------------- sweep

SystemParams with_value(SystemParams p, const std::string& variable, double v)
{
    if (variable == "x") {
        p.x = v;
    } else if (variable == "alpha") {
        p.alpha = v;
    } else if (variable == "r") {
        p.r = v;
    } else if (variable == "gamma_tilde") {
        p.gamma_tilde = v;
    } else {
        p.big_delta = v;
    }
    p.validate();
    return p;
}

// Moves every class rigidly so the mean velocity follows a swept r.
VelocityDistribution follow_r(VelocityDistribution d, const SystemParams& from,
                              const SystemParams& to)
{
    const double dk = (to.r - from.r) / to.dispersion_factor;
    for (auto& c : d.classes) {
        c.k += dk;
    }
    return d;
}

struct SweepRow
{
    double value = 0.0;
    double eta = 1.0;
    LossBound bound;
    double tau_L = 0.0;
    double residual = 0.0;
    FeasibilityReport feas;
};

ScenarioResult run_sweep(const Config& cfg)
{
    ScenarioResult out;
    const auto& values = cfg.sweep.values;
    const std::function<SweepRow(std::size_t)> eval = [&](std::size_t i) {
        SweepRow row;
        row.value = values[i];
        const SystemParams p = with_value(cfg.params, cfg.sweep.variable, values[i]);
        const VelocityDistribution vel = follow_r(cfg.velocities, cfg.params, p);
        const TransferMap map = TransferMap::build(p, cfg.stokes, cfg.map_samples, p.x);
        row.eta = map.back().eta;
        row.bound = loss_bound(p, p.x);
        row.tau_L = map.back().tau;
        row.residual = map.residual_photon_fraction();
        row.feas = check_feasibility(p, cfg.stokes, vel, cfg.thresholds);
        return row;
    };
    const auto rows = parallel_map(values.size(), eval);

    std::ostringstream csv;
    csv << cfg.sweep.variable
        << ",eta,eta_bound,bound_ok,tau_L,residual_photon_fraction,"
           "two_photon_lhs,adiabaticity_lhs,opacity_lhs,nonadiabatic_flux_loss,"
           "feasible\n"
        << std::setprecision(17);
    int violations = 0;
    json table = json::array();
    for (const auto& r : rows) {
        const bool ok = r.bound.inapplicable || !cfg.stokes.is_ramp() ||
                        r.eta >= r.bound.bound;
        violations += ok ? 0 : 1;
        csv << r.value << ',' << r.eta << ',' << r.bound.bound << ',' << ok << ','
            << r.tau_L << ',' << r.residual << ',' << r.feas.two_photon.lhs << ','
            << r.feas.adiabaticity.lhs << ',' << r.feas.opacity.lhs << ','
            << r.feas.nonadiabatic_flux_loss << ',' << r.feas.all_pass() << '\n';
        table.push_back({{"value", r.value},
                         {"eta", r.eta},
                         {"eta_bound", r.bound.bound},
                         {"bound_inapplicable", r.bound.inapplicable}});
    }
    out.assertions.push_back(
        {"eta_above_bound_violations", violations == 0, double(violations), 0.0});
    out.results = {{"variable", cfg.sweep.variable}, {"rows", table}};
    out.files["sweep.csv"] = csv.str();
    return out;
}

// ------------------------------------------------------------------ entangle

ScenarioResult run_entangle(const Config& cfg)
{
    ScenarioResult out;
    const double r = cfg.quantum.r_squeeze;
    const TransferMap map =
        TransferMap::build(cfg.params, cfg.stokes, cfg.map_samples, cfg.params.x);
    const TwoModeCov cov_in = two_mode_squeezed(r);

    std::ostringstream csv;
    csv << "z,q_atom,duan_value,entangled\n" << std::setprecision(17);
    std::vector<std::pair<double, double>> by_q;
    bool physical = true;
    for (const auto& s : map.samples()) {
        const ChannelSplit split = channel_split(s.theta, s.eta);
        const TwoModeCov cov = gaussian_channel_apply(cov_in, split, split);
        physical = physical && uncertainty_margin(cov) > -1e-10;
        const DuanResult d = duan_criterion(cov);
        by_q.emplace_back(split.q_atom, d.value);
        csv << s.z << ',' << split.q_atom << ',' << d.value << ',' << d.entangled
            << '\n';
    }
    std::sort(by_q.begin(), by_q.end());
    bool monotone = true;
    for (std::size_t i = 1; i < by_q.size(); ++i) {
        monotone = monotone && by_q[i].second <= by_q[i - 1].second + 1e-12;
    }

    const ChannelSplit end = channel_from_map(map, 1.0);
    const TwoModeCov cov_out = gaussian_channel_apply(cov_in, end, end);
    const DuanResult duan = duan_criterion(cov_out);
    const double expected =
        2.0 * (end.q_atom * std::exp(-2.0 * r) + 1.0 - end.q_atom);
    out.assertions.push_back(
        below("duan_vs_channel_formula", std::abs(duan.value - expected), 1e-10));
    out.assertions.push_back(holds("output_physical", physical));
    out.assertions.push_back(holds("duan_non_increasing_in_q", monotone));

    auto matrix = [](const TwoModeCov& m) {
        json rows = json::array();
        for (int i = 0; i < 4; ++i) {
            rows.push_back({m(i, 0), m(i, 1), m(i, 2), m(i, 3)});
        }
        return rows;
    };
    out.results = {{"r_squeeze", r},
                   {"q_atom", end.q_atom},
                   {"duan_in", duan_criterion(cov_in).value},
                   {"duan_out", duan.value},
                   {"entangled_out", duan.entangled},
                   {"cov_in", matrix(cov_in)},
                   {"cov_out", matrix(cov_out)}};
    out.files["entangle.csv"] = csv.str();
    return out;
}

// --------------------------------------------------------------- feasibility

ScenarioResult run_feasibility(const Config& cfg)
{
    ScenarioResult out;
    const FeasibilityReport rep =
        check_feasibility(cfg.params, cfg.stokes, cfg.velocities, cfg.thresholds);
    const bool finite = std::isfinite(rep.two_photon.lhs) &&
                        std::isfinite(rep.doppler.lhs) &&
                        std::isfinite(rep.adiabaticity.lhs) &&
                        std::isfinite(rep.opacity.lhs);
    out.assertions.push_back(holds("report_finite", finite));
    out.results = to_json(rep);
    out.results["residual_photon_fraction"] =
        std::pow(std::cos(mixing_angle(cfg.params, cfg.stokes, 1.0)), 2);

    std::ostringstream csv;
    csv << "condition,lhs,threshold,pass\n" << std::setprecision(17);
    csv << "two_photon," << rep.two_photon.lhs << ',' << cfg.thresholds.much_less
        << ',' << rep.two_photon.pass << '\n';
    csv << "doppler," << rep.doppler.lhs << ',' << cfg.thresholds.much_less << ','
        << rep.doppler.pass << '\n';
    csv << "adiabaticity," << rep.adiabaticity.lhs << ','
        << cfg.thresholds.much_less << ',' << rep.adiabaticity.pass << '\n';
    csv << "opacity," << rep.opacity.lhs << ',' << cfg.thresholds.much_greater
        << ',' << rep.opacity.pass << '\n';
    out.files["feasibility.csv"] = csv.str();
    return out;
}

void write_file(const fs::path& path, const std::string& contents)
{
    std::ofstream f(path, std::ios::binary);
    f << contents;
    if (!f) {
        throw Error(ErrorKind::InvariantError,
                    "cannot write '" + path.string() + "'");
    }
}

} // namespace

const char* to_string(ScenarioName name)
{
    switch (name) {
    case ScenarioName::Transfer: return "transfer";
    case ScenarioName::Validate: return "validate";
    case ScenarioName::Sweep: return "sweep";
    case ScenarioName::Entangle: return "entangle";
    case ScenarioName::Feasibility: return "feasibility";
    }
    return "transfer";
}

ScenarioName scenario_from_string(const std::string& name)
{
    for (auto s : {ScenarioName::Transfer, ScenarioName::Validate,
                   ScenarioName::Sweep, ScenarioName::Entangle,
                   ScenarioName::Feasibility}) {
        if (name == to_string(s)) {
            return s;
        }
    }
    throw SchemaError("/", "unknown scenario '" + name + "'");
}

bool ScenarioResult::all_pass() const
{
    return std::all_of(assertions.begin(), assertions.end(),
                       [](const Assertion& a) { return a.pass; });
}

json ScenarioResult::summary(ScenarioName name) const
{
    json list = json::array();
    for (const auto& a : assertions) {
        list.push_back({{"name", a.name},
                        {"pass", a.pass},
                        {"value", a.value},
                        {"limit", a.limit}});
    }
    return {{"scenario", to_string(name)},
            {"status", all_pass() ? "ok" : "assertion_failure"},
            {"assertions", list},
            {"all_pass", all_pass()},
            {"results", results}};
}

ScenarioResult run_scenario(ScenarioName name, const Config& config)
{
    switch (name) {
    case ScenarioName::Transfer: return run_transfer(config);
    case ScenarioName::Validate: return run_validate(config);
    case ScenarioName::Sweep: return run_sweep(config);
    case ScenarioName::Entangle: return run_entangle(config);
    case ScenarioName::Feasibility: return run_feasibility(config);
    }
    return {};
}

int run_command(const std::string& scenario, const std::string& config_path,
                const std::string& out_dir,
                const std::vector<std::string>& overrides, std::ostream& log)
{
    ScenarioName name;
    Config cfg;
    fs::path dir(out_dir);
    try {
        name = scenario_from_string(scenario);
        cfg = parse_config(apply_overrides(load_json_file(config_path), overrides));
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec || !fs::is_directory(dir)) {
            throw Error(ErrorKind::InvariantError,
                        "output directory '" + out_dir + "' is not writable");
        }
        write_file(dir / "resolved_config.json", cfg.resolved().dump(2) + "\n");
    } catch (const std::exception& e) {
        log << "config error: " << e.what() << '\n';
        return exit_config_error;
    }

    ScenarioResult result;
    try {
        result = run_scenario(name, cfg);
    } catch (const std::exception& e) {
        log << "physics error: " << e.what() << '\n';
        json summary = {{"scenario", to_string(name)},
                        {"status", "physics_error"},
                        {"error", e.what()}};
        try {
            write_file(dir / "summary.json", summary.dump(2) + "\n");
        } catch (const std::exception&) {
        }
        return exit_physics_error;
    }

    try {
        for (const auto& [file, contents] : result.files) {
            write_file(dir / file, contents);
        }
        write_file(dir / "summary.json", result.summary(name).dump(2) + "\n");
    } catch (const std::exception& e) {
        log << "config error: " << e.what() << '\n';
        return exit_config_error;
    }

    for (const auto& a : result.assertions) {
        log << (a.pass ? "pass  " : "FAIL  ") << a.name << "  value=" << a.value
            << "  limit=" << a.limit << '\n';
    }
    return result.all_pass() ? exit_ok : exit_assertion_failure;
}

} // namespace darkbeam

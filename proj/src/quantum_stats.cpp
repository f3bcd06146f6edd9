#include <darkbeam/quantum_stats.hpp>

#include <darkbeam/errors.hpp>
#include <darkbeam/quadrature.hpp>

#include <cmath>
#include <iomanip>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace darkbeam {

const char* to_string(InputKind kind)
{
    switch (kind) {
    case InputKind::Fock: return "Fock";
    case InputKind::Coherent: return "Coherent";
    case InputKind::TwoModeSqueezed: return "TwoModeSqueezed";
    }
    return "Fock";
}

InputKind input_kind_from_string(const std::string& name)
{
    if (name == "Fock") {
        return InputKind::Fock;
    }
    if (name == "Coherent") {
        return InputKind::Coherent;
    }
    if (name == "TwoModeSqueezed") {
        return InputKind::TwoModeSqueezed;
    }
    throw Error(ErrorKind::InvariantError, "unknown input kind '" + name + "'");
}

QuantumInput QuantumInput::fock(int n, InputEnvelope envelope)
{
    QuantumInput in;
    in.kind = InputKind::Fock;
    in.n_photons = n;
    in.envelope = std::move(envelope);
    return in;
}

QuantumInput QuantumInput::coherent(complex amplitude, InputEnvelope envelope)
{
    QuantumInput in;
    in.kind = InputKind::Coherent;
    in.amplitude = amplitude;
    in.envelope = std::move(envelope);
    return in;
}

QuantumInput QuantumInput::two_mode_squeezed(double r, InputEnvelope envelope)
{
    QuantumInput in;
    in.kind = InputKind::TwoModeSqueezed;
    in.r_squeeze = r;
    in.envelope = std::move(envelope);
    return in;
}

double QuantumInput::mean_photons() const
{
    switch (kind) {
    case InputKind::Fock: return n_photons;
    case InputKind::Coherent: return std::norm(amplitude);
    case InputKind::TwoModeSqueezed: {
        const double s = std::sinh(r_squeeze);
        return s * s;
    }
    }
    return 0.0;
}

void QuantumInput::validate() const
{
    if (kind == InputKind::Fock && n_photons < 0) {
        throw Error(ErrorKind::InvariantError, "Fock N must be >= 0");
    }
    if (kind == InputKind::TwoModeSqueezed && !std::isfinite(r_squeeze)) {
        throw Error(ErrorKind::InvariantError, "squeezing must be finite");
    }
    const double lo = envelope.support_lo();
    const double hi = envelope.support_hi();
    const double mid = 0.5 * (lo + hi);
    const double breaks[] = {mid};
    const double norm =
        hi > lo ? quad::integrate(
                      [&](double t) { return std::norm(envelope(t)); }, lo, hi,
                      1e-10, breaks)
                      .value
                : 0.0;
    if (std::abs(norm - 1.0) > 1e-6) {
        throw Error(ErrorKind::InvariantError,
                    "mode envelope must satisfy c int |u|^2 dt = 1, got " +
                        std::to_string(norm));
    }
}

void ChannelSplit::validate() const
{
    auto in_unit = [](double v) { return v >= -1e-15 && v <= 1.0 + 1e-15; };
    if (!in_unit(p_light) || !in_unit(q_atom) || !in_unit(l_loss) ||
        std::abs(p_light + q_atom + l_loss - 1.0) > 1e-12) {
        throw Error(ErrorKind::InvariantError,
                    "channel split must be a probability partition");
    }
}

ChannelSplit channel_split(double theta, double eta)
{
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double e2 = eta * eta;
    return {e2 * c * c, e2 * s * s, 1.0 - e2};
}

ChannelSplit channel_from_map(const TransferMap& map, double z)
{
    // A photon entering at a nonzero theta(0) is not fully a dark-state
    // polariton; the unnormalised form keeps p + q + l = 1 exactly.
    const MapSample s = map.at(z);
    return channel_split(s.theta, s.eta);
}

namespace {

SingleModeCov reduce(const TwoModeCov& cov, int mode)
{
    return cov.block<2, 2>(2 * mode, 2 * mode);
}

} // namespace

GaussianCounts gaussian_counts(const SingleModeCov& v)
{
    // <n> = (Vxx + Vpp - 1) / 2,
    // Var n = (Vxx^2 + Vpp^2 + 2 Vxp^2 - 1/2) / 2 for zero mean.
    GaussianCounts out;
    out.mean = 0.5 * (v(0, 0) + v(1, 1) - 1.0);
    out.variance = 0.5 * (v(0, 0) * v(0, 0) + v(1, 1) * v(1, 1) +
                          2.0 * v(0, 1) * v(0, 1) - 0.5);
    return out;
}

CountStats count_stats(const QuantumInput& input, const ChannelSplit& split)
{
    const double p = split.p_light;
    const double q = split.q_atom;
    CountStats out;
    switch (input.kind) {
    case InputKind::Fock: {
        const double n = input.n_photons;
        out.photon_mean = n * p;
        out.photon_var = n * p * (1.0 - p);
        out.atom_mean = n * q;
        out.atom_var = n * q * (1.0 - q);
        out.loss_mean = n * split.l_loss;
        break;
    }
    case InputKind::Coherent: {
        const double n = std::norm(input.amplitude);
        out.photon_mean = out.photon_var = n * p;
        out.atom_mean = out.atom_var = n * q;
        out.loss_mean = n * split.l_loss;
        break;
    }
    case InputKind::TwoModeSqueezed: {
        const SingleModeCov arm = reduce(two_mode_squeezed(input.r_squeeze), 0);
        const SingleModeCov vac = 0.5 * SingleModeCov::Identity();
        const auto light = gaussian_counts(p * arm + (1.0 - p) * vac);
        const auto atom = gaussian_counts(q * arm + (1.0 - q) * vac);
        out.photon_mean = light.mean;
        out.photon_var = light.variance;
        out.atom_mean = atom.mean;
        out.atom_var = atom.variance;
        out.loss_mean = input.mean_photons() * split.l_loss;
        break;
    }
    }
    return out;
}

std::vector<Fig2Row> fig2_curves(const SystemParams& params,
                                 const StokesProfile& profile, int n_photons,
                                 int n_z)
{
    if (n_photons <= 0) {
        throw Error(ErrorKind::InvariantError, "photon number must be > 0");
    }
    const TransferMap map = build_transfer_map(params, profile, n_z);
    const QuantumInput input = QuantumInput::fock(n_photons, InputEnvelope::zero());
    const double n = n_photons;
    std::vector<Fig2Row> rows;
    rows.reserve(map.samples().size());
    for (const auto& s : map.samples()) {
        const auto st = count_stats(input, channel_split(s.theta, s.eta));
        rows.push_back({s.z, st.photon_mean / n, st.atom_mean / n,
                        st.photon_var / n, st.atom_var / n,
                        profile.omega(s.z)});
    }
    return rows;
}

std::string fig2_csv(const std::vector<Fig2Row>& rows)
{
    std::ostringstream out;
    out << "z,n_mean,m_mean,n_var,m_var,omega_scaled\n" << std::setprecision(17);
    for (const auto& r : rows) {
        out << r.z << ',' << r.n_mean << ',' << r.m_mean << ',' << r.n_var
            << ',' << r.m_var << ',' << r.omega_scaled << '\n';
    }
    return out.str();
}

TwoModeCov vacuum_cov()
{
    return 0.5 * TwoModeCov::Identity();
}

TwoModeCov two_mode_squeezed(double r)
{
    const double c = 0.5 * std::cosh(2.0 * r);
    const double s = 0.5 * std::sinh(2.0 * r);
    TwoModeCov v = TwoModeCov::Zero();
    v.diagonal().setConstant(c);
    v(0, 2) = v(2, 0) = s;
    v(1, 3) = v(3, 1) = -s;
    return v;
}

double uncertainty_margin(const TwoModeCov& cov)
{
    Eigen::Matrix4cd h = cov.cast<complex>();
    const complex half_i(0.0, 0.5);
    for (int k = 0; k < 2; ++k) {
        h(2 * k, 2 * k + 1) += half_i;
        h(2 * k + 1, 2 * k) -= half_i;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

void check_physical(const TwoModeCov& cov)
{
    if (!cov.allFinite()) {
        throw Error(ErrorKind::UnphysicalCovariance, "non-finite covariance");
    }
    const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
    if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw Error(ErrorKind::UnphysicalCovariance, "covariance not symmetric");
    }
    const double margin = uncertainty_margin(cov);
    if (margin < -1e-10 * scale) {
        throw Error(ErrorKind::UnphysicalCovariance,
                    "uncertainty bound violated, min eigenvalue " +
                        std::to_string(margin));
    }
}

TwoModeCov gaussian_channel_apply(const TwoModeCov& cov,
                                  const ChannelSplit& first,
                                  const ChannelSplit& second)
{
    check_physical(cov);
    first.validate();
    second.validate();
    Eigen::Vector4d gain;
    gain << first.q_atom, first.q_atom, second.q_atom, second.q_atom;
    const Eigen::Vector4d s = gain.cwiseSqrt();
    TwoModeCov out = s.asDiagonal() * cov * s.asDiagonal();
    out.diagonal() += 0.5 * (Eigen::Vector4d::Ones() - gain);
    return out;
}

DuanResult duan_criterion(const TwoModeCov& cov)
{
    check_physical(cov);
    DuanResult out;
    const double var_x = cov(0, 0) + cov(2, 2) - 2.0 * cov(0, 2);
    const double var_p = cov(1, 1) + cov(3, 3) + 2.0 * cov(1, 3);
    out.value = var_x + var_p;
    out.entangled = out.value < 2.0;
    return out;
}

MultimodeDiagnostic multimode_diagnostic(const SystemParams& params,
                                         const StokesProfile& profile,
                                         double pulse_sigma)
{
    MultimodeDiagnostic out;
    // |E(t)|^2 with rms sigma has a spectral intensity of rms 1 / (2 sigma).
    out.spectral_rms = 0.5 / pulse_sigma;
    const double x_carrier = params.x;
    const double x_edge =
        std::abs(x_carrier) + out.spectral_rms / (params.alpha * params.r);
    const double e0 = loss_factor_eta(params, profile, x_carrier, 2).eta;
    const double e1 = loss_factor_eta(params, profile, x_edge, 2).eta;
    out.relative_variation = 1.0 - (e1 * e1) / (e0 * e0);
    out.multimode = out.relative_variation > 0.05;
    return out;
}

} // namespace darkbeam

#include <darkbeam/adiabatic_map.hpp>
#include <darkbeam/errors.hpp>

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <doctest.h>

using namespace darkbeam;

namespace {

SystemParams desk(double alpha = 10.0, double r = 0.05)
{
    SystemParams p;
    p.alpha = alpha;
    p.r = r;
    p.gamma_tilde = 50.0;
    return p;
}

const StokesProfile ramp = StokesProfile::tanh_ramp(100, 1e-3, 0.3, 0.08);

// Loss exponent per unit alpha straight from cot^4, away from theta = 0.
double eta_reference(const SystemParams& p, const StokesProfile& prof, double x)
{
    auto f = [&](double z) {
        const double th = std::atan(1.0 / prof.omega(z));
        const double c = std::cos(th);
        const double s = std::sin(th);
        if (s == 0.0) {
            return 0.0;
        }
        const double cot = c / s;
        return c * c * x * x / (cot * cot * cot * cot + x * x);
    };
    return std::exp(-p.alpha * oracle::adaptive_simpson(f, 0.0, 1.0, 1e-13));
}

} // namespace

TEST_SUITE("adiabatic_map")
{
    TEST_CASE("constant profile: pure delay, no amplitude change")
    {
        const SystemParams p = desk();
        const auto prof = StokesProfile::constant(3.0);
        const auto map = build_transfer_map(p, prof, 11);
        const double v = group_velocity_at(p, 3.0);
        for (const auto& s : map.samples()) {
            CHECK(s.t == doctest::Approx(1.0).epsilon(1e-15));
            CHECK(s.s == doctest::Approx(std::tan(map.front().theta)).epsilon(1e-13));
            CHECK(s.tau == doctest::Approx(s.z / v).epsilon(1e-12));
        }
    }

    TEST_CASE("full ramp converts light into atoms")
    {
        const auto map = build_transfer_map(desk(), StokesProfile::tanh_ramp(1e4, 1e-2, 0.5, 0.1), 101);
        CHECK(map.front().t == doctest::Approx(1.0));
        CHECK(map.back().t * map.back().t <= 1e-4);
        CHECK(map.back().s * map.back().s >= 1.0 - 1e-4);
    }

    TEST_CASE("lossless closure and monotonicity")
    {
        const auto map = build_transfer_map(desk(), ramp, 257);
        const double c0 = map.cos_theta0();
        double prev_t = 2.0;
        double prev_s = -1.0;
        for (const auto& s : map.samples()) {
            CHECK(std::isfinite(s.t));
            CHECK((s.t * s.t + s.s * s.s) * c0 * c0 == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(s.t <= prev_t + 1e-15);
            CHECK(s.s >= prev_s - 1e-15);
            prev_t = s.t;
            prev_s = s.s;
        }
    }

    TEST_CASE("with theta(0) -> 0 the amplitudes close to one")
    {
        const auto map =
            build_transfer_map(desk(), StokesProfile::tanh_ramp(1e7, 1e-3, 0.5, 0.1), 65);
        CHECK(map.cos_theta0() == doctest::Approx(1.0).epsilon(1e-12));
        for (const auto& s : map.samples()) {
            CHECK(s.t * s.t + s.s * s.s == doctest::Approx(1.0).epsilon(1e-12));
        }
    }

    TEST_CASE("loss keeps the flux below the lossless value")
    {
        SystemParams p = desk();
        p.x = 0.05;
        const auto map = build_transfer_map(p, ramp, 65);
        const double c0 = map.cos_theta0();
        for (const auto& s : map.samples()) {
            CHECK((s.t * s.t + s.s * s.s) <= 1.0 / (c0 * c0) + 1e-15);
            CHECK((s.t * s.t + s.s * s.s) * c0 * c0 ==
                  doctest::Approx(s.eta * s.eta).epsilon(1e-12));
        }
    }

    TEST_CASE("map errors")
    {
        CHECK_THROWS_AS(build_transfer_map(desk(10, -0.05), ramp, 11), Error);
        try {
            build_transfer_map(desk(), StokesProfile::constant(1e-7), 11);
            FAIL("expected DegenerateProfile");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::DegenerateProfile);
        }
    }

    TEST_CASE("exact evaluation matches the samples")
    {
        SystemParams p = desk();
        p.x = 0.03;
        const auto map = build_transfer_map(p, ramp, 21);
        for (const auto& s : map.samples()) {
            const MapSample e = map.at(s.z);
            CHECK(e.tau == doctest::Approx(s.tau).epsilon(1e-9));
            CHECK(e.eta == doctest::Approx(s.eta).epsilon(1e-9));
            CHECK(e.t == doctest::Approx(s.t).epsilon(1e-9));
        }
    }

    TEST_CASE("field solution: identity at the entrance and linear")
    {
        const auto map = build_transfer_map(desk(), ramp, 33);
        const auto a = InputEnvelope::gaussian(20, 2, {1.0, 0.5});
        const auto b = InputEnvelope::gaussian(25, 3, {-0.3, 2.0});
        CHECK(field_solution(map, a, 0.0, 19.0) == a(19.0));
        for (double z : {0.2, 0.6, 1.0}) {
            for (double t : {30.0, 40.0, 50.0}) {
                const complex lhs = field_solution(map, a + b, z, t);
                const complex rhs =
                    field_solution(map, a, z, t) + field_solution(map, b, z, t);
                CHECK(std::abs(lhs - rhs) < 1e-14);
                const complex scaled = field_solution(map, a.scaled({0.0, 3.0}), z, t);
                CHECK(std::abs(scaled - complex{0.0, 3.0} * field_solution(map, a, z, t)) <
                      1e-14);
            }
        }
    }

    TEST_CASE("field solution: constant profile delays a Gaussian")
    {
        const SystemParams p = desk();
        const auto prof = StokesProfile::constant(2.0);
        const auto map = build_transfer_map(p, prof, 11);
        const auto in = InputEnvelope::gaussian(16, 2);
        const double delay = 0.8 / group_velocity_at(p, 2.0);
        for (double t : {10.0, 16.0, 25.0}) {
            CHECK(std::abs(field_solution(map, in, 0.8, t + delay) - in(t)) < 1e-12);
        }
    }

    TEST_CASE("field solution refuses times before the record")
    {
        const auto map = build_transfer_map(desk(), ramp, 11);
        const auto in = InputEnvelope::gaussian(16, 2);
        try {
            field_solution(map, in, 1.0, 0.5);
            FAIL("expected OutOfRecord");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::OutOfRecord);
        }
    }

    TEST_CASE("output peak is delayed by tau(L)")
    {
        const auto map = build_transfer_map(desk(), ramp, 65);
        const auto in = InputEnvelope::gaussian(16, 2);
        const double dt = 0.01;
        double best_t = 0.0;
        double best = 0.0;
        for (double t = 0.0; t < 16 + map.back().tau + 20; t += dt) {
            if (t - map.back().tau < 0.0) {
                continue;
            }
            const double a = std::abs(atom_output(map, in, t).amplitude);
            if (a > best) {
                best = a;
                best_t = t;
            }
        }
        CHECK(std::abs(best_t - (16 + map.back().tau)) <= dt);
    }

    TEST_CASE("atom output amplitude and prefactor")
    {
        SystemParams p = desk(10, 0.04);
        const auto full = StokesProfile::tanh_ramp(1e7, 1e-7, 0.5, 0.05);
        const auto map = build_transfer_map(p, full, 33);
        const auto flat = InputEnvelope([](double) { return complex{1.0, 0.0}; },
                                        0.0, 0.0, 100.0);
        const AtomOutput out = atom_output(map, flat, 50.0);
        CHECK(std::norm(out.amplitude) == doctest::Approx(25.0).epsilon(1e-10));
        CHECK(out.amplitude.real() < 0.0);
        CHECK_FALSE(out.incomplete_transfer);
        CHECK(atom_output(map, InputEnvelope::zero(), 50.0).amplitude == complex{});

        const auto partial = build_transfer_map(p, StokesProfile::tanh_ramp(100, 1.0, 0.5, 0.1), 11);
        const AtomOutput warn = atom_output(partial, flat, 50.0);
        CHECK(warn.incomplete_transfer);
        CHECK(warn.residual_photon_fraction == doctest::Approx(0.5));
    }

    TEST_CASE("flux balance")
    {
        const auto full = StokesProfile::tanh_ramp(1e7, 1e-7, 0.5, 0.1);
        const auto in = InputEnvelope::gaussian(16, 2, 1.5);
        const auto map = build_transfer_map(desk(), full, 65);
        const double tau = map.back().tau;
        const TimeWindow window{0.0, 40.0 + tau};
        const FluxBalance fb = flux_balance(map, in, window);
        CHECK(fb.photon_flux_in == doctest::Approx(2.25).epsilon(1e-9));
        CHECK(fb.relative_mismatch <= 1e-6 + fb.residual_photon_fraction);

        SystemParams lossy = desk();
        lossy.x = 0.1;
        const auto lossy_map = TransferMap::build(lossy, full, 65, 0.1);
        const FluxBalance lb = flux_balance(lossy_map, in, window);
        const double eta = lossy_map.back().eta;
        CHECK(lb.atom_flux_out == doctest::Approx(eta * eta * lb.photon_flux_in).epsilon(1e-6));

        const FluxBalance zero = flux_balance(map, InputEnvelope::gaussian(16, 2, 0.0), window);
        CHECK(zero.photon_flux_in == 0.0);
        CHECK(zero.atom_flux_out == 0.0);

        try {
            flux_balance(map, in, {0.0, 20.0});
            FAIL("expected WindowTooShort");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::WindowTooShort);
        }
    }

    TEST_CASE("loss factor examples")
    {
        SystemParams p = desk();
        CHECK(loss_factor_eta(p, ramp, 0.0).eta == 1.0);
        SystemParams tiny = p;
        tiny.alpha = 1e-300;
        CHECK(loss_factor_eta(tiny, ramp, 0.1).eta == doctest::Approx(1.0));
        const double eta = loss_factor_eta(p, ramp, 0.05).eta;
        CHECK(eta >= std::exp(-0.25));
        CHECK(eta == doctest::Approx(eta_reference(p, ramp, 0.05)).epsilon(1e-8));
    }

    TEST_CASE("loss factor is monotone in |x| and alpha")
    {
        double prev = 1.0;
        for (double x : {0.01, 0.03, 0.07, 0.15}) {
            const double e = loss_factor_eta(desk(), ramp, -x).eta;
            CHECK(e <= prev);
            prev = e;
        }
        prev = 1.0;
        for (double a : {1.0, 5.0, 20.0, 50.0}) {
            const double e = loss_factor_eta(desk(a), ramp, 0.05).eta;
            CHECK(e <= prev);
            prev = e;
        }
    }

    TEST_CASE("overflow-free integrand equals the cot form")
    {
        for (double th : {1e-3, 0.1, 0.7, 1.3, 1.5707}) {
            for (double x : {0.01, 0.2}) {
                const double cot = 1.0 / std::tan(th);
                const double direct =
                    std::cos(th) * std::cos(th) * x * x / (std::pow(cot, 4) + x * x);
                CHECK(loss_integrand(th, x) == doctest::Approx(direct).epsilon(1e-12));
            }
        }
        CHECK(loss_integrand(0.0, 0.1) == 0.0);
        CHECK(std::isfinite(loss_integrand(1e-200, 0.1)));
    }

    TEST_CASE("loss bound examples")
    {
        CHECK(loss_bound(desk(), 0.0).bound == 1.0);
        CHECK(loss_bound(desk(), 0.05).bound == doctest::Approx(0.7788007830714049));
        CHECK_FALSE(loss_bound(desk(), 0.05).inapplicable);
        CHECK(loss_bound(desk(), 0.3).inapplicable);
    }

    TEST_CASE("loss bound holds on random monotone ramps")
    {
        std::mt19937_64 rng(2024);
        std::uniform_real_distribution<double> ua(1.0, 50.0), ux(0.0, 0.2),
            uc(0.1, 0.9), uw(0.02, 0.4), uo(1.0, 3.0);
        int violations = 0;
        for (int i = 0; i < 100; ++i) {
            const double alpha = ua(rng);
            const double x = ux(rng);
            const double omax = std::pow(10.0, uo(rng));
            const auto prof = (i % 2 == 0)
                                  ? StokesProfile::tanh_ramp(omax, 1e-3, uc(rng), uw(rng))
                                  : StokesProfile::cos2_ramp(omax, 1e-3, uc(rng), 2 * uw(rng));
            const SystemParams p = desk(alpha);
            const double eta = loss_factor_eta(p, prof, x, 2).eta;
            violations += eta >= loss_bound(p, x).bound ? 0 : 1;
        }
        CHECK(violations == 0);
    }

    TEST_CASE("eta depends on the ramp only through theta(zeta)")
    {
        // Same theta(zeta): a cos^2 ramp and its tabulated copy.
        const auto a = StokesProfile::cos2_ramp(50, 1e-3, 0.5, 0.6);
        std::vector<std::pair<double, double>> table;
        for (int i = 0; i <= 4000; ++i) {
            table.emplace_back(i / 4000.0, a.omega(i / 4000.0));
        }
        const auto b = StokesProfile::tabulated(table, 1e-3);
        const double ea = loss_factor_eta(desk(20), a, 0.08).eta;
        const double eb = loss_factor_eta(desk(20), b, 0.08).eta;
        CHECK(ea == doctest::Approx(eb).epsilon(1e-6));
    }

    TEST_CASE("csv and json round trip")
    {
        SystemParams p = desk();
        p.x = 0.02;
        const auto map = build_transfer_map(p, ramp, 17);
        const std::string csv = map.to_csv();
        CHECK(csv.rfind("z,theta,t,s,eta,tau,v_gr\n", 0) == 0);
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 18);
        const auto back = TransferMap::from_json(map.to_json());
        REQUIRE(back.samples().size() == map.samples().size());
        for (std::size_t i = 0; i < map.samples().size(); ++i) {
            CHECK(back.samples()[i].t == map.samples()[i].t);
            CHECK(back.samples()[i].tau == map.samples()[i].tau);
            CHECK(back.samples()[i].eta == map.samples()[i].eta);
        }
        CHECK(back.x() == map.x());
        CHECK(back.to_json() == map.to_json());
    }
}

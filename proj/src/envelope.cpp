#include <darkbeam/envelope.hpp>

#include <darkbeam/errors.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace darkbeam {

InputEnvelope::InputEnvelope(Fn fn, double record_start, double support_lo,
                             double support_hi)
  : m_fn(std::move(fn)), m_record_start(record_start),
    m_support_lo(support_lo), m_support_hi(support_hi)
{}

InputEnvelope InputEnvelope::gaussian(double center, double sigma,
                                      complex amplitude, double record_start)
{
    // |E|^2 is a normal density of rms sigma scaled by |amplitude|^2.
    const double norm =
        1.0 / std::sqrt(std::sqrt(2.0 * std::numbers::pi) * sigma);
    auto fn = [=](double t) -> complex {
        const double u = (t - center) / sigma;
        return amplitude * norm * std::exp(-0.25 * u * u);
    };
    return {fn, record_start, center - 8.0 * sigma, center + 8.0 * sigma};
}

InputEnvelope InputEnvelope::square(double t_on, double t_off,
                                    complex amplitude, double record_start)
{
    const double norm = 1.0 / std::sqrt(t_off - t_on);
    auto fn = [=](double t) -> complex {
        return (t >= t_on && t < t_off) ? amplitude * norm : complex{};
    };
    return {fn, record_start, t_on, t_off};
}

InputEnvelope InputEnvelope::zero()
{
    return {[](double) { return complex{}; },
            -std::numeric_limits<double>::infinity(), 0.0, 0.0};
}

complex InputEnvelope::at_checked(double t) const
{
    if (t < m_record_start) {
        throw Error(ErrorKind::OutOfRecord,
                    "t = " + std::to_string(t) + " precedes record start " +
                        std::to_string(m_record_start));
    }
    return m_fn(t);
}

InputEnvelope InputEnvelope::scaled(complex factor) const
{
    Fn inner = m_fn;
    return {[inner, factor](double t) { return factor * inner(t); },
            m_record_start, m_support_lo, m_support_hi};
}

InputEnvelope operator+(const InputEnvelope& a, const InputEnvelope& b)
{
    InputEnvelope::Fn fa = a.m_fn;
    InputEnvelope::Fn fb = b.m_fn;
    return {[fa, fb](double t) { return fa(t) + fb(t); },
            std::max(a.m_record_start, b.m_record_start),
            std::min(a.m_support_lo, b.m_support_lo),
            std::max(a.m_support_hi, b.m_support_hi)};
}

} // namespace darkbeam

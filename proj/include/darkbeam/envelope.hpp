#pragma once

#include <complex>
#include <functional>

namespace darkbeam {

using complex = std::complex<double>;

/**
 * Temporal envelope of the quantum field at the entrance plane z = 0.
 *
 * The envelope is only known from `record_start` on; asking for earlier
 * times is an OutOfRecord error. [support_lo, support_hi] bounds the
 * region where the envelope is non-negligible and is used to size
 * integration windows and simulation run times.
 */
class InputEnvelope
{
public:
    using Fn = std::function<complex(double)>;

    InputEnvelope(Fn fn, double record_start, double support_lo,
                  double support_hi);

    /// Gaussian with int |E|^2 dt = |amplitude|^2 and intensity rms sigma.
    static InputEnvelope gaussian(double center, double sigma,
                                  complex amplitude = 1.0,
                                  double record_start = 0.0);
    /// Flat-top pulse switched on and off abruptly.
    static InputEnvelope square(double t_on, double t_off,
                                complex amplitude = 1.0,
                                double record_start = 0.0);
    static InputEnvelope zero();

    complex operator()(double t) const { return m_fn(t); }

    /// Throws OutOfRecord if t precedes the record.
    complex at_checked(double t) const;

    double record_start() const { return m_record_start; }
    double support_lo() const { return m_support_lo; }
    double support_hi() const { return m_support_hi; }

    InputEnvelope scaled(complex factor) const;
    friend InputEnvelope operator+(const InputEnvelope& a,
                                   const InputEnvelope& b);

private:
    Fn m_fn;
    double m_record_start;
    double m_support_lo;
    double m_support_hi;
};

} // namespace darkbeam

#include <darkbeam/quadrature.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace darkbeam::quad {

namespace {

constexpr unsigned max_depth = 18;

Result integrate_panel(const std::function<double(double)>& f, double a,
                       double b, double rel_tol)
{
    if (a == b) {
        return {};
    }
    double error = 0.0;
    double l1 = 0.0;
    const double value =
        boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
            f, a, b, max_depth, rel_tol, &error, &l1);
    return {value, error};
}

} // namespace

Result integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol, std::span<const double> breakpoints)
{
    if (a > b) {
        Result r = integrate(f, b, a, rel_tol, breakpoints);
        r.value = -r.value;
        return r;
    }
    std::vector<double> edges{a};
    for (double p : breakpoints) {
        if (p > a && p < b) {
            edges.push_back(p);
        }
    }
    edges.push_back(b);
    std::sort(edges.begin(), edges.end());

    Result total;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const Result r = integrate_panel(f, edges[i], edges[i + 1], rel_tol);
        total.value += r.value;
        total.error += r.error;
    }
    return total;
}

} // namespace darkbeam::quad

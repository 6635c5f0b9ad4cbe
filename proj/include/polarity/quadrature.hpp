#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace polarity {

/// Adaptive Gauss-Kronrod (31-point) quadrature on [a, b] to relative tolerance `tol`.
template <typename F>
double integrate_adaptive(F&& f, double a, double b, double tol = 1e-12) {
    double error = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, tol, &error);
}

}  // namespace polarity

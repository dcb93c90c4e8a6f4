#pragma once

#include <complex>

namespace shelving {

using Complex = std::complex<double>;

/// (e^z - 1) / z, accurate near z = 0.
Complex phi1(Complex z);

/// First divided difference of p -> exp(p t) at nodes x, y:
///   (e^{x t} - e^{y t}) / (x - y),  tending to t e^{x t} as y -> x.
Complex exp_divided_difference(Complex x, Complex y, double t);

/// Second divided difference of p -> exp(p t) at nodes x, y, z. Equal to
///   t^2 * integral over the unit simplex of exp(t (s0 x + s1 y + s2 z)),
/// finite for coincident nodes.
Complex exp_divided_difference(Complex x, Complex y, Complex z, double t);

}  // namespace shelving

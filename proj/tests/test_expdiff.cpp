#include <doctest.h>

#include <cmath>

#include "shelving/expdiff.hpp"

using shelving::Complex;
using shelving::exp_divided_difference;
using shelving::phi1;

namespace {

// t^2 * integral over the simplex of exp(t (s0 x + s1 y + s2 z)) by
// Gauss-Legendre in collapsed coordinates.
Complex simplex_quadrature(Complex x, Complex y, Complex z, double t) {
  static const double nodes[] = {-0.9739065285171717, -0.8650633666889845, -0.6794095682990244,
                                 -0.4333953941292472, -0.1488743389816312, 0.1488743389816312,
                                 0.4333953941292472,  0.6794095682990244,  0.8650633666889845,
                                 0.9739065285171717};
  static const double weights[] = {0.0666713443086881, 0.1494513491505806, 0.2190863625159820,
                                   0.2692667193099963, 0.2955242247147529, 0.2955242247147529,
                                   0.2692667193099963, 0.2190863625159820, 0.1494513491505806,
                                   0.0666713443086881};
  Complex sum = 0.0;
  for (int a = 0; a < 10; ++a) {
    const double u = 0.5 * (nodes[a] + 1.0);
    for (int b = 0; b < 10; ++b) {
      const double v = 0.5 * (nodes[b] + 1.0) * (1.0 - u);
      const double w = 0.25 * weights[a] * weights[b] * (1.0 - u);
      sum += w * std::exp(t * (u * x + v * y + (1.0 - u - v) * z));
    }
  }
  return t * t * sum;
}

}  // namespace

TEST_SUITE("expdiff") {

TEST_CASE("phi1 near and away from zero") {
  CHECK(std::abs(phi1(0.0) - 1.0) < 1e-16);
  for (Complex z : {Complex(1e-9, 0), Complex(1e-5, 2e-5), Complex(0.3, -0.2), Complex(-0.39, 0.0)}) {
    const Complex series = 1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0 + z * z * z * z / 120.0 +
                           z * z * z * z * z / 720.0 + std::pow(z, 6) / 5040.0 +
                           std::pow(z, 7) / 40320.0 + std::pow(z, 8) / 362880.0;
    CHECK(std::abs(phi1(z) - series) < 1e-10 * std::abs(series));
  }
  for (Complex z : {Complex(2.0, 1.0), Complex(-5.0, 3.0), Complex(0.0, 4.0)})
    CHECK(std::abs(phi1(z) - (std::exp(z) - 1.0) / z) < 1e-14 * std::abs(phi1(z)));
}

TEST_CASE("first divided difference") {
  const double t = 3.0;
  const Complex x(-0.4, 1.2), y(-0.1, -0.7);
  const Complex direct = (std::exp(x * t) - std::exp(y * t)) / (x - y);
  CHECK(std::abs(exp_divided_difference(x, y, t) - direct) < 1e-14 * std::abs(direct));
  CHECK(std::abs(exp_divided_difference(x, x, t) - t * std::exp(x * t)) < 1e-14);
  CHECK(std::abs(exp_divided_difference(0.0, 0.0, 10.0) - 10.0) < 1e-14);
  // Symmetric in its nodes.
  CHECK(std::abs(exp_divided_difference(x, y, t) - exp_divided_difference(y, x, t)) < 1e-14);
  // Huge decay: no overflow in either order.
  const Complex big = exp_divided_difference(Complex(-400.0), Complex(0.0), 10.0);
  CHECK(std::isfinite(big.real()));
  CHECK(big.real() == doctest::Approx(1.0 / 400.0));
}

TEST_CASE("second divided difference against simplex quadrature") {
  const double t = 2.0;
  const Complex cases[][3] = {
      {{-0.3, 0.5}, {-0.05, 0.0}, {-0.6, -1.5}},
      {{-0.1, 0.0}, {-0.1, 0.0}, {-0.1, 0.0}},
      {{-0.2, 0.1}, {-0.2 + 1e-9, 0.1}, {-0.7, 0.0}},
      {{0.0, 0.0}, {-1e-7, 0.0}, {0.0, 1e-7}},
  };
  for (const auto& c : cases) {
    const Complex ref = simplex_quadrature(c[0], c[1], c[2], t);
    const Complex got = exp_divided_difference(c[0], c[1], c[2], t);
    CHECK(std::abs(got - ref) < 1e-12 * std::max(1.0, std::abs(ref)));
  }
  // Coincident nodes: t^2/2 e^{x t}.
  const Complex x(-0.3, 0.8);
  CHECK(std::abs(exp_divided_difference(x, x, x, t) - 0.5 * t * t * std::exp(x * t)) < 1e-14);
}

TEST_CASE("second divided difference for well separated nodes") {
  const Complex x(-0.015, 3.5), y(-0.1, 0.0), z(-0.5, -2.0);
  const double t = 150.0;
  auto e = [&](Complex p) { return std::exp(p * t); };
  const Complex direct = e(x) / ((x - y) * (x - z)) + e(y) / ((y - x) * (y - z)) +
                         e(z) / ((z - x) * (z - y));
  CHECK(std::abs(exp_divided_difference(x, y, z, t) - direct) < 1e-12 * std::abs(direct));
  // Permutation symmetry.
  CHECK(std::abs(exp_divided_difference(z, x, y, t) - direct) < 1e-12 * std::abs(direct));
}

}  // TEST_SUITE

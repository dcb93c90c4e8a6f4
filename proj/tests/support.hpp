#pragma once

#include <random>

#include <Eigen/Dense>

#include "shelving/atom.hpp"

namespace testing {

using shelving::AtomParams;
using shelving::Complex;

// Random parameters in the shelving regime (gamma = 1).
inline AtomParams random_params(std::mt19937_64& rng, double min_gamma_a = 0.005) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  AtomParams p;
  p.rabi = 0.05 + 4.95 * u(rng);
  p.detuning = -3.0 + 6.0 * u(rng);
  p.gamma = 1.0;
  p.gamma_d = 0.1 * u(rng);
  p.gamma_a = min_gamma_a + (0.1 - min_gamma_a) * u(rng);
  return p;
}

// Right-hand side of the three-level master equation, basis (g, e, a),
// H = Delta |e><e| + Omega/2 (|e><g| + |g><e|).
inline Eigen::Matrix3cd lindblad_rhs(const AtomParams& p, const Eigen::Matrix3cd& rho) {
  const Complex i(0.0, 1.0);
  Eigen::Matrix3cd h = Eigen::Matrix3cd::Zero();
  h(1, 1) = p.detuning;
  h(0, 1) = h(1, 0) = p.rabi / 2.0;
  Eigen::Matrix3cd out = -i * (h * rho - rho * h);
  auto dissipate = [&](int to, int from, double rate) {
    Eigen::Matrix3cd l = Eigen::Matrix3cd::Zero();
    l(to, from) = std::sqrt(rate);
    const Eigen::Matrix3cd ld = l.adjoint();
    out += l * rho * ld - 0.5 * (ld * l * rho + rho * ld * l);
  };
  dissipate(0, 1, p.gamma);
  dissipate(2, 1, p.gamma_d);
  dissipate(0, 2, p.gamma_a);
  return out;
}

inline Eigen::Matrix3cd random_density(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Matrix3cd a;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) a(r, c) = Complex(n(rng), n(rng));
  Eigen::Matrix3cd rho = a * a.adjoint();
  return rho / rho.trace().real();
}

}  // namespace testing

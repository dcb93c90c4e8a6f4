#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace shelving {

using Complex = std::complex<double>;

template <typename Real>
using Vector4 = Eigen::Matrix<std::complex<Real>, 4, 1>;
template <typename Real>
using Matrix4 = Eigen::Matrix<std::complex<Real>, 4, 4>;

using Vector4c = Vector4<double>;
using Matrix4c = Matrix4<double>;

/// Thrown when a parameter set violates the physical constraints
/// (negative rates, non-positive metastable decay, non-finite values).
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Laser-driven three-level shelving atom. Rates and frequencies are in units
/// of the strong-transition decay rate, so `gamma` is normally 1.
///
/// Levels: |g> ground, |e> excited (driven, decays to |g> at gamma and to |a>
/// at gamma_d), |a> metastable (decays to |g> at gamma_a).
template <typename Real>
struct BasicAtomParams {
  Real rabi = Real(0.2625);
  Real detuning = Real(0);
  Real gamma = Real(1);
  Real gamma_d = Real(0.05);
  Real gamma_a = Real(0.015);

  Real gamma_plus() const { return gamma + gamma_d; }
  Real gamma_minus() const { return gamma - gamma_a; }
  Real q() const { return gamma_d / gamma_a; }

  // gamma >> gamma_d, gamma_a, read as a factor of 10. Diagnostic only.
  bool shelving_regime() const {
    return gamma >= Real(10) * std::max(gamma_d, gamma_a);
  }

  template <typename Other>
  BasicAtomParams<Other> cast() const {
    return {Other(rabi), Other(detuning), Other(gamma), Other(gamma_d),
            Other(gamma_a)};
  }
};

using AtomParams = BasicAtomParams<double>;

/// Parameter sets of the three time-dependent spectrum scenarios: near
/// saturation, strong resonant driving, strong detuned driving.
AtomParams moderate_drive();
AtomParams strong_drive();
AtomParams strong_detuned_drive();

struct Diagnostics {
  double gamma_plus = 0;
  double gamma_minus = 0;
  double q = 0;
  bool shelving_regime = false;
  std::vector<std::string> warnings;
};

/// Throws InvalidParameter on any violation; warnings are advisory.
Diagnostics validate(const AtomParams& params);

template <typename Real>
void check_params(const BasicAtomParams<Real>& p) {
  using std::isfinite;
  auto finite = [](Real x) { return isfinite(static_cast<double>(x)); };
  if (!finite(p.rabi) || !finite(p.detuning) || !finite(p.gamma) ||
      !finite(p.gamma_d) || !finite(p.gamma_a))
    throw InvalidParameter("parameters must be finite");
  if (p.gamma_a <= Real(0)) throw InvalidParameter("gamma_a must be positive");
  if (p.gamma <= Real(0)) throw InvalidParameter("gamma must be positive");
  if (p.gamma_d < Real(0)) throw InvalidParameter("gamma_d must be nonnegative");
  if (p.rabi < Real(0)) throw InvalidParameter("rabi must be nonnegative");
}

/// Bloch generator of the driven transition, acting on
/// s = (<s_ge>, <s_eg>, <s_ee>, <s_gg>) as ds/dt = m s + b.
template <typename Real>
struct BasicBlochGenerator {
  Matrix4<Real> m;
  Vector4<Real> b;
};

using BlochGenerator = BasicBlochGenerator<double>;

template <typename Real>
BasicBlochGenerator<Real> build_generator(const BasicAtomParams<Real>& p) {
  check_params(p);
  using C = std::complex<Real>;
  const C i(0, 1);
  const Real gp = p.gamma_plus();
  const Real gm = p.gamma_minus();
  const C half_rabi = i * (p.rabi / Real(2));

  BasicBlochGenerator<Real> g;
  // clang-format off
  g.m << -i * p.detuning - gp / Real(2), C(0), half_rabi, -half_rabi,
         C(0), i * p.detuning - gp / Real(2), -half_rabi, half_rabi,
         half_rabi, -half_rabi, C(-gp), C(0),
         -half_rabi, half_rabi, C(gm), C(-p.gamma_a);
  // clang-format on
  g.b << C(0), C(0), C(0), C(p.gamma_a);
  return g;
}

}  // namespace shelving

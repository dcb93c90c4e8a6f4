#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "shelving/atom.hpp"

namespace shelving {

/// Single-time expectations (<s_ge>, <s_eg>, <s_ee>, <s_gg>) at `time`.
/// The metastable population is 1 - s_ee - s_gg.
struct BlochVector {
  Vector4c s = Vector4c::Zero();
  double time = 0.0;

  Complex sigma_ge() const { return s(0); }
  Complex sigma_eg() const { return s(1); }
  double sigma_ee() const { return s(2).real(); }
  double sigma_gg() const { return s(3).real(); }
  double sigma_aa() const { return 1.0 - sigma_ee() - sigma_gg(); }

  static BlochVector ground() {
    BlochVector v;
    v.s(3) = 1.0;
    return v;
  }
};

template <typename Real>
struct BasicSteadyState {
  std::complex<Real> sigma_eg;
  std::complex<Real> sigma_ge;
  Real sigma_ee;
  Real sigma_gg;
  Real sigma_aa;
};

using SteadyState = BasicSteadyState<double>;

/// Closed-form stationary solution of the Bloch system.
template <typename Real>
BasicSteadyState<Real> steady_state_closed_form(const BasicAtomParams<Real>& p) {
  check_params(p);
  using C = std::complex<Real>;
  const Real rabi2 = p.rabi * p.rabi;
  const Real gp = p.gamma_plus();
  const Real det4 = Real(4) * p.detuning * p.detuning;
  const Real q = p.q();
  const Real denom = (Real(2) + q) * rabi2 + gp * gp + det4;

  BasicSteadyState<Real> st;
  st.sigma_eg = C(0, 1) * p.rabi * C(gp, Real(2) * p.detuning) / denom;
  st.sigma_ge = std::conj(st.sigma_eg);
  st.sigma_ee = rabi2 / denom;
  st.sigma_gg = (rabi2 + gp * gp + det4) / denom;
  st.sigma_aa = q * rabi2 / denom;
  return st;
}

inline BlochVector to_bloch(const SteadyState& st) {
  BlochVector v;
  v.s << st.sigma_ge, st.sigma_eg, st.sigma_ee, st.sigma_gg;
  return v;
}

/// Raised when the generator's eigenvector matrix is too ill-conditioned for
/// the modal solution; callers fall back to ODE integration.
class DegenerateSpectrum : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exact solution of the affine system dx/dt = M x + c for constant c,
///   x(t) = V exp(L t) V^-1 (x0 - x_f) + x_f,   x_f = -M^-1 c,
/// built from the eigendecomposition M = V L V^-1.
class Propagator {
 public:
  static constexpr double kMaxCondition = 1e8;

  explicit Propagator(const BlochGenerator& gen,
                      double max_condition = kMaxCondition);

  const BlochGenerator& generator() const { return gen_; }

  bool diagonalizable() const { return diagonalizable_; }
  double condition() const { return condition_; }

  const Vector4c& eigenvalues() const { return lambda_; }
  const Matrix4c& right() const { return right_; }
  /// Rows are the left eigenvectors, i.e. the inverse of right().
  const Matrix4c& left() const { return left_; }

  /// s_st = -M^-1 b.
  const Vector4c& fixed_point() const { return fixed_point_; }
  /// -M^-1 c for an arbitrary constant drive.
  Vector4c fixed_point(const Vector4c& drive) const;

  /// Modal amplitudes V^-1 (x0 - x_f).
  Vector4c modal_amplitudes(const Vector4c& x0, const Vector4c& x_fixed) const;

  /// x(t) for x(0) = x0 and fixed point x_fixed. Throws DegenerateSpectrum
  /// when the modal solution is unavailable.
  Vector4c propagate(const Vector4c& x0, const Vector4c& x_fixed,
                     double t) const;

  /// Throws DegenerateSpectrum if !diagonalizable().
  void require_modes() const;

 private:
  BlochGenerator gen_;
  Eigen::PartialPivLU<Matrix4c> lu_;
  Vector4c lambda_;
  Matrix4c right_;
  Matrix4c left_;
  Vector4c fixed_point_;
  double condition_ = 0.0;
  bool diagonalizable_ = false;
};

Propagator build_propagator(const BlochGenerator& gen);

/// Exact evolution of s0 (taken at time 0) to each of `times`.
std::vector<BlochVector> evolve(const Propagator& prop, const BlochVector& s0,
                                std::span<const double> times);

class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Adaptive Dormand-Prince integration of dx/dt = M x + c from x(0) = x0,
/// sampled at ascending `times` (all >= 0).
std::vector<Vector4c> integrate_affine(const Matrix4c& m, const Vector4c& drive,
                                       const Vector4c& x0,
                                       std::span<const double> times,
                                       double tol = 1e-10);

std::vector<BlochVector> evolve_ode(const BlochGenerator& gen,
                                    const BlochVector& s0,
                                    std::span<const double> times,
                                    double tol = 1e-10);

/// evolve() when the spectrum allows it, evolve_ode() otherwise.
std::vector<BlochVector> evolve_robust(const Propagator& prop,
                                       const BlochVector& s0,
                                       std::span<const double> times);

}  // namespace shelving

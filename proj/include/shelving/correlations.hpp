#pragma once

#include <span>
#include <vector>

#include "shelving/dynamics.hpp"

namespace shelving {

/// Regression vector for <A(t2 + tau) s_ge(t2)> with
///   u = (<s_ge s_ge>, <s_eg s_ge>, <s_ee s_ge>, <s_gg s_ge>),
/// obeying du/dtau = M u + c(t2),  c = (0, 0, 0, gamma_a <s_ge(t2)>).
struct RegressionState {
  Vector4c u = Vector4c::Zero();
  Vector4c drive = Vector4c::Zero();
  double t2 = 0.0;
  double tau = 0.0;

  /// u(t2, 0) = (0, <s_ee(t2)>, 0, <s_ge(t2)>).
  static RegressionState initial(const BlochVector& s_at_t2, double gamma_a);
};

/// C(t2, tau) = sum_k coef_k exp(tau_rate_k tau + t2_rate_k t2).
struct ExpTerm {
  Complex coef;
  Complex tau_rate;
  Complex t2_rate;
};

struct ModeExpansion {
  std::vector<ExpTerm> terms;

  Complex operator()(double t2, double tau) const;
  /// Terms of the difference this - other.
  ModeExpansion minus(const ModeExpansion& other) const;
};

/// <s_eg(t2 + tau) s_ge(t2)> for an atom prepared in s0 at time 0.
ModeExpansion correlation_modes(const Propagator& prop, const BlochVector& s0);

/// <s_eg(t2 + tau)> <s_ge(t2)>.
ModeExpansion factorized_modes(const Propagator& prop, const BlochVector& s0);

/// Stationary correlation C_st(tau) (t2_rate = 0 throughout). The constant
/// term is the elastic part |<s_eg>_st|^2.
ModeExpansion stationary_modes(const Propagator& prop);

/// Decaying part of the stationary correlation, C_st(tau) - |<s_eg>_st|^2.
/// The residual constant (roundoff only) is dropped after a consistency
/// check.
ModeExpansion stationary_fluctuation_modes(const Propagator& prop);

/// Correlation at fixed t2 on a tau grid, via the exact affine solution of
/// the regression system.
std::vector<Complex> correlation(const Propagator& prop, const BlochVector& s0,
                                 double t2, std::span<const double> taus);

/// Same quantity from adaptive ODE integration (single-time and regression).
std::vector<Complex> correlation_ode(const BlochGenerator& gen,
                                     const BlochVector& s0, double t2,
                                     std::span<const double> taus,
                                     double tol = 1e-10);

std::vector<Complex> stationary_correlation(const AtomParams& params,
                                            std::span<const double> taus);

/// Stationary fluctuation correlation <dS_eg(tau) dS_ge(0)>.
std::vector<Complex> stationary_fluctuation_correlation(
    const AtomParams& params, std::span<const double> taus);

/// int_0^T exp(k tau) C(tau) dtau for the regression solution from u0 with
/// fixed point ust, in closed form per eigenmode.
Complex tau_transform(const Propagator& prop, const Vector4c& u0,
                      const Vector4c& ust, Complex k, double T);

/// exp(-decay T) * tau_transform(...), evaluated without forming the two
/// factors separately.
Complex damped_tau_transform(const Propagator& prop, const Vector4c& u0,
                             const Vector4c& ust, Complex k, double T,
                             double decay);

struct CorrelationGrid {
  std::vector<double> t2;
  std::vector<double> tau;
  Eigen::MatrixXcd values;      // rows: t2, cols: tau
  Eigen::MatrixXcd factorized;  // <s_eg(t2 + tau)> <s_ge(t2)>
};

CorrelationGrid correlation_grid(const Propagator& prop, const BlochVector& s0,
                                 std::span<const double> t2s,
                                 std::span<const double> taus);

}  // namespace shelving

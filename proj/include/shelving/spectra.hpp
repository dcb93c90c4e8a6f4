#pragma once

#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "shelving/dynamics.hpp"

namespace shelving {

// Closed-form stationary quantities. Templated so they can be cross-checked
// in extended precision.

/// Weight of the elastic delta peak, pi |<s_eg>_st|^2.
template <typename Real>
Real coherent_intensity(const BasicAtomParams<Real>& p) {
  check_params(p);
  const Real rabi2 = p.rabi * p.rabi;
  const Real gp = p.gamma_plus();
  const Real x = Real(4) * p.detuning * p.detuning;
  const Real denom = (Real(2) + p.q()) * rabi2 + gp * gp + x;
  return std::numbers::pi_v<Real> * rabi2 * (gp * gp + x) / (denom * denom);
}

/// Elastic weight of the same drive on a closed two-level transition
/// (gamma_d = 0).
template <typename Real>
Real two_level_coherent_intensity(const BasicAtomParams<Real>& p) {
  check_params(p);
  const Real rabi2 = p.rabi * p.rabi;
  const Real g2 = p.gamma * p.gamma;
  const Real x = Real(4) * p.detuning * p.detuning;
  const Real denom = Real(2) * rabi2 + g2 + x;
  return std::numbers::pi_v<Real> * rabi2 * (g2 + x) / (denom * denom);
}

/// Intensity of the narrow inelastic peak, the elastic weight lost to
/// shelving: |<s_eg>|^2 (two-level) - |<s_eg>|^2 (three-level).
template <typename Real>
struct BasicNarrowPeakIntensity {
  Real closed_form;  // single rational expression
  Real difference;   // (I_2LA - I_3LA) / pi from coherent_intensity
};

template <typename Real>
BasicNarrowPeakIntensity<Real> narrow_peak_intensity(const BasicAtomParams<Real>& p) {
  check_params(p);
  const Real rabi2 = p.rabi * p.rabi;
  const Real g2 = p.gamma * p.gamma;
  const Real gp2 = p.gamma_plus() * p.gamma_plus();
  const Real x = Real(4) * p.detuning * p.detuning;
  const Real q = p.q();
  const Real two_level = Real(2) * rabi2 + g2 + x;
  const Real three_level = (Real(2) + q) * rabi2 + gp2 + x;
  const Real numer =
      rabi2 * (rabi2 * rabi2 *
                   ((Real(2) + q) * (Real(2) + q) * g2 - Real(4) * gp2 +
                    q * (q + Real(4)) * x) +
               (g2 + x) * (gp2 + x) * (Real(2) * q * rabi2 + gp2 - g2));
  const Real denom = two_level * two_level * three_level * three_level;
  return {numer / denom,
          (two_level_coherent_intensity(p) - coherent_intensity(p)) /
              std::numbers::pi_v<Real>};
}

/// Half-width of the narrow peak, gamma_a [1 + q Omega^2 / (2 Omega^2 +
/// gamma^2 + 4 Delta^2)] = 1/T_D + 1/T_B.
template <typename Real>
Real narrow_peak_width(const BasicAtomParams<Real>& p) {
  check_params(p);
  const Real rabi2 = p.rabi * p.rabi;
  return p.gamma_a * (Real(1) + p.q() * rabi2 /
                                    (Real(2) * rabi2 + p.gamma * p.gamma +
                                     Real(4) * p.detuning * p.detuning));
}

template <typename Real>
struct BasicTelegraphTimes {
  Real bright;  // infinite when gamma_d = 0 or rabi = 0
  Real dark;
};

/// Random-telegraph mean bright and dark periods.
template <typename Real>
BasicTelegraphTimes<Real> bright_dark_times(const BasicAtomParams<Real>& p) {
  check_params(p);
  const Real rabi2 = p.rabi * p.rabi;
  const Real rate = p.gamma_d * rabi2;
  const Real bright =
      rate > Real(0)
          ? (Real(2) * rabi2 + p.gamma * p.gamma + Real(4) * p.detuning * p.detuning) / rate
          : std::numeric_limits<Real>::infinity();
  return {bright, Real(1) / p.gamma_a};
}

using NarrowPeakIntensity = BasicNarrowPeakIntensity<double>;
using TelegraphTimes = BasicTelegraphTimes<double>;

/// Exact mean bright period of the jump process: mean time to the first
/// shelving jump from |g>, (2 Omega^2 + gamma_+^2 + 4 Delta^2) / (gamma_d
/// Omega^2). Differs from bright_dark_times().bright by gamma -> gamma_+.
double exact_mean_bright_time(const AtomParams& p);

/// Detuning maximizing the narrow peak, sqrt([(q - 2) Omega^2 - 2 gamma^2] /
/// 8), or nullopt when the radicand is not positive.
std::optional<double> optimal_detuning(const AtomParams& p);

/// Detuning maximizing narrow_peak_intensity() found numerically (the closed
/// form above is only approximate).
double optimal_detuning_numeric(const AtomParams& p);

struct StationarySpectrum {
  std::vector<double> omega;
  std::vector<double> s_inc;
  double coherent_intensity = 0.0;
  /// <s_ee>_st - |<s_eg>_st|^2, the tau = 0 fluctuation correlation.
  double incoherent_total = 0.0;
};

/// Nonuniform frequency grid: step Gamma_np/10 within 10 Gamma_np of the
/// laser line, step gamma/50 out to max(20, 4 Omega).
std::vector<double> spectrum_grid(const AtomParams& p);

/// S_inc(w) = Re sum_j a_j / (i w - lambda_j) from the eigenmodes of the
/// stationary fluctuation correlation. Falls back to quadrature when the
/// generator is not diagonalizable.
StationarySpectrum incoherent_spectrum(const AtomParams& p,
                                       std::span<const double> omega);

/// Quadrature route: ODE-integrated fluctuation correlation, trapezoid
/// Fourier transform with Richardson extrapolation.
std::vector<double> incoherent_spectrum_quadrature(const AtomParams& p,
                                                   std::span<const double> omega,
                                                   double tau_step = 0.01);

struct SumRule {
  double integral = 0.0;  // (1/pi) int S_inc dw
  double expected = 0.0;  // <s_ee> - |<s_eg>|^2
  double relative_error() const {
    return std::abs(integral - expected) / std::abs(expected);
  }
};

/// Trapezoid integral of S_inc on spectrum_grid() extended by a geometric
/// tail to |w| = 1e4.
SumRule sum_rule(const AtomParams& p);

struct LorentzianFit {
  double half_width = 0.0;
  double amplitude = 0.0;
  double pedestal = 0.0;
  double slope = 0.0;
  double rms_residual = 0.0;
};

/// Least-squares fit of A / (w^2 + w0^2) + B + C w to S_inc over
/// |w| <= window (default 3 Gamma_np).
LorentzianFit fit_narrow_peak(const AtomParams& p, double window = 0.0);

/// Indices of strict local maxima of a sampled curve.
std::vector<std::size_t> local_maxima(std::span<const double> values);

}  // namespace shelving

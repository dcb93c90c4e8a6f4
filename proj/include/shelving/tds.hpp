#pragma once

#include <functional>
#include <span>
#include <vector>

#include "shelving/correlations.hpp"

namespace shelving {

/// Lorentzian filter of the physical spectrum: bandwidth and the grid of
/// filter detunings D = w - w_laser.
struct FilterParams {
  double bandwidth = 0.1;
  std::vector<double> detunings;
};

void check_filter(const FilterParams& filter);

/// S(D, t, Gamma) sampled on observation times x filter detunings.
struct TdsSurface {
  std::vector<double> times;
  std::vector<double> detunings;
  Eigen::MatrixXd values;  // rows: times, cols: detunings

  double max() const { return values.size() ? values.maxCoeff() : 0.0; }
  double at(std::size_t t, std::size_t d) const {
    return values(Eigen::Index(t), Eigen::Index(d));
  }
};

struct TdsDecomposition {
  TdsSurface total;
  TdsSurface factorized;  // <s_eg(t2 + tau)> <s_ge(t2)> in place of the correlation
  TdsSurface incoherent;  // total - factorized
};

/// Physical spectrum of a correlation given as a sum of exponentials:
///   S = 2 Gamma Re int_0^t dt2 e^{-Gamma (t - t2)} int_0^{t - t2} dtau
///         e^{(Gamma/2 - i D) tau} C(t2, tau),
/// both integrals in closed form (second divided differences of exp).
double filtered_spectrum(const ModeExpansion& c, double bandwidth,
                         double detuning, double t);

/// Physical spectrum from the eigenmode expansion of the regression
/// solution. Falls back to tds_oracle() when the generator is degenerate.
TdsSurface tds_fast(const AtomParams& params, const FilterParams& filter,
                    const BlochVector& s0, std::span<const double> times);

/// Default t2 step: min(0.02/gamma_+, 0.1/Gamma, 0.05/max(Omega, 1)).
double default_t2_step(const AtomParams& params, double bandwidth);

/// Semi-analytic variant: closed-form tau integral per eigenmode, composite
/// trapezoid over t2. `t2_step` <= 0 selects default_t2_step().
TdsSurface tds_trapezoid(const AtomParams& params, const FilterParams& filter,
                         const BlochVector& s0, std::span<const double> times,
                         double t2_step = 0.0);

struct OracleOptions {
  double step = 0.01;       // uniform (t2, tau) step; times must be multiples
  bool richardson = true;   // combine steps h and h/2
  std::size_t max_nodes = 200'000;  // per axis
};

/// Reference implementation: 2D trapezoid over (t2, tau), correlation
/// marched with exp(M h) (Pade), no eigendecomposition.
TdsSurface tds_oracle(const AtomParams& params, const FilterParams& filter,
                      const BlochVector& s0, std::span<const double> times,
                      const OracleOptions& options = {});

/// Oracle on a synthetic correlation C(t2, tau) (tabulated by the callback).
TdsSurface tds_oracle_synthetic(
    const std::function<Complex(double t2, double tau)>& correlation,
    const FilterParams& filter, std::span<const double> times,
    const OracleOptions& options = {});

TdsDecomposition tds_decompose(const AtomParams& params,
                               const FilterParams& filter,
                               const BlochVector& s0,
                               std::span<const double> times);

enum class SpectrumPart { Total, Factorized, Incoherent };

/// t -> infinity limit, 2 Re int_0^inf e^{-(Gamma/2 + i D) tau} C_st(tau) dtau.
std::vector<double> tds_longtime_limit(const AtomParams& params,
                                       double bandwidth,
                                       std::span<const double> detunings,
                                       SpectrumPart part = SpectrumPart::Total);

/// Half-width point of the central Mollow peak of the stationary spectrum,
/// with the slow (shelving) mode removed.
double central_half_width(const AtomParams& params);

/// R(t) = S(0, t) / S(D_side, t) on the total surface.
std::vector<double> emergence_ratio(const AtomParams& params, double bandwidth,
                                    const BlochVector& s0,
                                    std::span<const double> times,
                                    double d_side);

/// |S(+D1, t) - S(-D1, t)| / max_D S(D, t) for each time.
std::vector<double> asymmetry(const TdsSurface& surface, double d1);

/// Full width at half maximum of the peak nearest D = 0 in row `time_index`,
/// by linear interpolation. NaN if the peak does not fall below half height
/// inside the grid.
double central_fwhm(const TdsSurface& surface, std::size_t time_index);

/// First time on `times` where S(D, t) reaches `fraction` of its long-time
/// limit, or a negative value if never reached.
double saturation_time(const AtomParams& params, double bandwidth,
                       const BlochVector& s0, double detuning,
                       std::span<const double> times, double fraction = 0.95);

}  // namespace shelving

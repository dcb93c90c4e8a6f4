#include "shelving/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "shelving/correlations.hpp"

namespace shelving {

double exact_mean_bright_time(const AtomParams& p) {
  check_params(p);
  const double rabi2 = p.rabi * p.rabi;
  const double rate = p.gamma_d * rabi2;
  if (rate <= 0.0) return std::numeric_limits<double>::infinity();
  const double gp = p.gamma_plus();
  return (2.0 * rabi2 + gp * gp + 4.0 * p.detuning * p.detuning) / rate;
}

std::optional<double> optimal_detuning(const AtomParams& p) {
  check_params(p);
  const double radicand =
      ((p.q() - 2.0) * p.rabi * p.rabi - 2.0 * p.gamma * p.gamma) / 8.0;
  if (!(radicand > 0.0)) return std::nullopt;
  return std::sqrt(radicand);
}

namespace {

// Golden-section maximization of a unimodal function on [lo, hi].
double golden_max(const std::function<double(double)>& f, double lo, double hi,
                  double tol) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

double optimal_detuning_numeric(const AtomParams& p) {
  check_params(p);
  auto intensity = [&](double delta) {
    AtomParams q = p;
    q.detuning = delta;
    return narrow_peak_intensity(q).closed_form;
  };
  const double hi = 2.0 * std::max(p.rabi, p.gamma) + 1.0;
  const int n = 2000;
  int best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (int k = 0; k <= n; ++k) {
    const double v = intensity(hi * k / n);
    if (v > best_value) {
      best_value = v;
      best = k;
    }
  }
  const double step = hi / n;
  const double lo = std::max(0.0, (best - 1) * step);
  return golden_max(intensity, lo, (best + 1) * step, 1e-10);
}

std::vector<double> spectrum_grid(const AtomParams& p) {
  const double width = narrow_peak_width(p);
  const double core = 10.0 * width;
  const double fine = width / 10.0;
  const double coarse = p.gamma / 50.0;
  const double span = std::max(20.0 * p.gamma, 4.0 * p.rabi);

  std::vector<double> grid;
  for (int k = -100; k <= 100; ++k) grid.push_back(k * fine);
  const int n_coarse = int(std::ceil((span - core) / coarse));
  for (int k = 1; k <= n_coarse; ++k) {
    const double w = std::min(core + k * coarse, span);
    grid.push_back(w);
    grid.push_back(-w);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

StationarySpectrum incoherent_spectrum(const AtomParams& p,
                                       std::span<const double> omega) {
  StationarySpectrum out;
  out.omega.assign(omega.begin(), omega.end());
  const SteadyState st = steady_state_closed_form(p);
  out.coherent_intensity = coherent_intensity(p);
  out.incoherent_total = st.sigma_ee - std::norm(st.sigma_eg);

  const Propagator prop(build_generator(p));
  if (!prop.diagonalizable()) {
    out.s_inc = incoherent_spectrum_quadrature(p, omega);
    return out;
  }
  const ModeExpansion modes = stationary_fluctuation_modes(prop);
  out.s_inc.reserve(omega.size());
  for (double w : omega) {
    Complex sum = 0.0;
    for (const auto& term : modes.terms)
      sum += term.coef / (Complex(0.0, w) - term.tau_rate);
    out.s_inc.push_back(sum.real());
  }
  return out;
}

std::vector<double> incoherent_spectrum_quadrature(const AtomParams& p,
                                                   std::span<const double> omega,
                                                   double tau_step) {
  const BlochGenerator gen = build_generator(p);
  const SteadyState st = steady_state_closed_form(p);
  BlochVector s = to_bloch(st);
  const auto reg = RegressionState::initial(s, p.gamma_a);

  const double slowest = std::min(narrow_peak_width(p), 0.5 * p.gamma_plus());
  std::size_t n = std::size_t(std::ceil(40.0 / slowest / tau_step));
  if (n % 2) ++n;
  std::vector<double> taus(n + 1);
  for (std::size_t j = 0; j <= n; ++j) taus[j] = j * tau_step;
  const auto us = integrate_affine(gen.m, reg.drive, reg.u, taus, 1e-12);
  const Complex elastic = st.sigma_eg * st.sigma_ge;
  std::vector<Complex> c(n + 1);
  for (std::size_t j = 0; j <= n; ++j) c[j] = us[j](1) - elastic;

  std::vector<double> out;
  out.reserve(omega.size());
  for (double w : omega) {
    const Complex rot = std::exp(Complex(0.0, -w * tau_step));
    Complex phase = 1.0;
    Complex fine = 0.0, coarse = 0.0;
    for (std::size_t j = 0; j <= n; ++j) {
      const Complex f = phase * c[j];
      const double end_weight = (j == 0 || j == n) ? 0.5 : 1.0;
      fine += end_weight * f;
      if (j % 2 == 0) coarse += end_weight * f;
      phase *= rot;
    }
    fine *= tau_step;
    coarse *= 2.0 * tau_step;
    out.push_back(((4.0 * fine - coarse) / 3.0).real());
  }
  return out;
}

SumRule sum_rule(const AtomParams& p) {
  std::vector<double> grid = spectrum_grid(p);
  const double edge = grid.back();
  std::vector<double> tail;
  for (double w = edge * 1.01; w < 1e4; w *= 1.01) tail.push_back(w);
  tail.push_back(1e4);
  for (double w : tail) {
    grid.push_back(w);
    grid.push_back(-w);
  }
  std::sort(grid.begin(), grid.end());

  const StationarySpectrum spec = incoherent_spectrum(p, grid);
  double integral = 0.0;
  for (std::size_t k = 1; k < grid.size(); ++k)
    integral += 0.5 * (spec.s_inc[k] + spec.s_inc[k - 1]) * (grid[k] - grid[k - 1]);
  return {integral / std::numbers::pi, spec.incoherent_total};
}

LorentzianFit fit_narrow_peak(const AtomParams& p, double window) {
  const double width = narrow_peak_width(p);
  if (window <= 0.0) window = 3.0 * width;
  const int n = 301;
  std::vector<double> omega(n);
  for (int k = 0; k < n; ++k) omega[k] = -window + 2.0 * window * k / (n - 1);
  const StationarySpectrum spec = incoherent_spectrum(p, omega);
  Eigen::VectorXd y(n);
  for (int k = 0; k < n; ++k) y(k) = spec.s_inc[k];

  auto solve = [&](double w0, Eigen::Vector3d* coef) {
    Eigen::MatrixXd a(n, 3);
    for (int k = 0; k < n; ++k) {
      a(k, 0) = 1.0 / (omega[k] * omega[k] + w0 * w0);
      a(k, 1) = 1.0;
      a(k, 2) = omega[k];
    }
    const Eigen::Vector3d c = a.colPivHouseholderQr().solve(y);
    if (coef) *coef = c;
    return (a * c - y).norm();
  };

  // Coarse scan in log(w0), then golden refinement of the residual minimum.
  const double lo = std::log(0.05 * width), hi = std::log(20.0 * width);
  const int scan = 200;
  int best = 0;
  double best_res = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= scan; ++k) {
    const double r = solve(std::exp(lo + (hi - lo) * k / scan), nullptr);
    if (r < best_res) {
      best_res = r;
      best = k;
    }
  }
  const double step = (hi - lo) / scan;
  const double a = lo + std::max(0, best - 1) * step;
  const double b = lo + std::min(scan, best + 1) * step;
  const double log_w = golden_max([&](double lw) { return -solve(std::exp(lw), nullptr); },
                                  a, b, 1e-10);

  LorentzianFit fit;
  fit.half_width = std::exp(log_w);
  Eigen::Vector3d c;
  const double res = solve(fit.half_width, &c);
  fit.amplitude = c(0);
  fit.pedestal = c(1);
  fit.slope = c(2);
  fit.rms_residual = res / std::sqrt(double(n));
  return fit;
}

std::vector<std::size_t> local_maxima(std::span<const double> values) {
  std::vector<std::size_t> out;
  for (std::size_t k = 1; k + 1 < values.size(); ++k)
    if (values[k] > values[k - 1] && values[k] > values[k + 1]) out.push_back(k);
  return out;
}

}  // namespace shelving

#include "shelving/tds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

#include "shelving/expdiff.hpp"

namespace shelving {

void check_filter(const FilterParams& filter) {
  if (!(filter.bandwidth > 0.0) || !std::isfinite(filter.bandwidth))
    throw InvalidParameter("filter bandwidth must be positive");
  for (std::size_t k = 1; k < filter.detunings.size(); ++k)
    if (!(filter.detunings[k] > filter.detunings[k - 1]))
      throw InvalidParameter("filter detuning grid must be strictly ascending");
}

namespace {

void check_times(std::span<const double> times) {
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!(times[k] >= 0.0) || !std::isfinite(times[k]))
      throw InvalidParameter("observation times must be finite and nonnegative");
    if (k > 0 && times[k] < times[k - 1])
      throw InvalidParameter("observation times must be ascending");
  }
}

TdsSurface empty_surface(const FilterParams& filter,
                         std::span<const double> times) {
  TdsSurface s;
  s.times.assign(times.begin(), times.end());
  s.detunings = filter.detunings;
  s.values = Eigen::MatrixXd::Zero(Eigen::Index(times.size()),
                                   Eigen::Index(filter.detunings.size()));
  return s;
}

TdsSurface surface_from_modes(const ModeExpansion& modes,
                              const FilterParams& filter,
                              std::span<const double> times) {
  TdsSurface s = empty_surface(filter, times);
  for (std::size_t i = 0; i < times.size(); ++i)
    for (std::size_t d = 0; d < filter.detunings.size(); ++d)
      s.values(Eigen::Index(i), Eigen::Index(d)) = filtered_spectrum(
          modes, filter.bandwidth, filter.detunings[d], times[i]);
  return s;
}

// Fills row[j] = C(i h, j h) for j = 0..len.
using RowFill = std::function<void(std::size_t i, std::size_t len,
                                   std::vector<Complex>& row)>;

// One 2D trapezoid pass at step h over the triangle 0 <= t2, t2 + tau <= t.
Eigen::MatrixXd oracle_pass(const RowFill& fill, double h, double bandwidth,
                            std::span<const double> detunings,
                            std::span<const double> times,
                            std::size_t max_nodes) {
  std::vector<std::size_t> n_of(times.size());
  for (std::size_t a = 0; a < times.size(); ++a) {
    const double n = std::round(times[a] / h);
    if (std::abs(n * h - times[a]) > 1e-9 * std::max(1.0, times[a]))
      throw InvalidParameter("oracle step must divide every observation time");
    n_of[a] = std::size_t(n);
  }
  const std::size_t n_max = times.empty() ? 0 : *std::max_element(n_of.begin(), n_of.end());
  if (n_max > max_nodes)
    throw InvalidParameter("oracle grid exceeds max_nodes; increase the step");

  const std::size_t nd = detunings.size();
  std::vector<Complex> rot(nd);
  for (std::size_t d = 0; d < nd; ++d)
    rot[d] = std::exp(Complex(bandwidth / 2.0, -detunings[d]) * h);

  std::vector<std::vector<std::size_t>> times_at(n_max + 1);
  for (std::size_t a = 0; a < times.size(); ++a) times_at[n_of[a]].push_back(a);

  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(Eigen::Index(times.size()), Eigen::Index(nd));
  std::vector<Complex> row, phase(nd), sum(nd), first(nd);
  for (std::size_t i = 0; i <= n_max; ++i) {
    const std::size_t len = n_max - i;
    fill(i, len, row);
    std::fill(phase.begin(), phase.end(), Complex(1.0));
    std::fill(sum.begin(), sum.end(), Complex(0.0));
    for (std::size_t j = 0; j <= len; ++j) {
      const Complex c = row[j];
      for (std::size_t d = 0; d < nd; ++d) {
        const Complex f = phase[d] * c;
        if (j == 0) first[d] = f;
        sum[d] += f;
        phase[d] *= rot[d];
      }
      // Inner integrals up to tau = j h are complete for times with n = i + j.
      for (std::size_t a : times_at[i + j]) {
        const double outer_weight = (i == 0 || j == 0) ? 0.5 * h : h;
        const double damping = std::exp(-bandwidth * double(j) * h);
        for (std::size_t d = 0; d < nd; ++d) {
          const Complex last = phase[d] / rot[d] * c;
          const Complex inner = h * (sum[d] - 0.5 * (first[d] + last));
          acc(Eigen::Index(a), Eigen::Index(d)) += outer_weight * damping * inner;
        }
      }
    }
  }
  return (2.0 * bandwidth) * acc.real();
}

// Single-time states on the node grid, marched with exp(M h).
std::vector<Vector4c> march_states(const BlochGenerator& gen,
                                   const Vector4c& s0, double h,
                                   std::size_t n) {
  const Matrix4c step = (gen.m * h).exp();
  const Vector4c st = gen.m.partialPivLu().solve(-gen.b);
  std::vector<Vector4c> s(n + 1);
  s[0] = s0;
  for (std::size_t i = 0; i < n; ++i) s[i + 1] = step * (s[i] - st) + st;
  return s;
}

std::size_t oracle_nodes(std::span<const double> times, double h) {
  return times.empty() ? 0 : std::size_t(std::llround(times.back() / h));
}

enum class OracleKind { Correlation, Factorized };

TdsSurface physical_oracle(const AtomParams& params, const FilterParams& filter,
                           const BlochVector& s0, std::span<const double> times,
                           const OracleOptions& options, OracleKind kind) {
  check_filter(filter);
  check_times(times);
  if (!(options.step > 0.0)) throw InvalidParameter("oracle step must be positive");
  const BlochGenerator gen = build_generator(params);

  auto pass = [&](double h) {
    const std::size_t n = oracle_nodes(times, h);
    if (n > options.max_nodes)
      throw InvalidParameter("oracle grid exceeds max_nodes; increase the step");
    const auto states = march_states(gen, s0.s, h, n);
    const Matrix4c step = (gen.m * h).exp();
    const Vector4c st = states.empty() ? Vector4c::Zero()
                                       : Vector4c(gen.m.partialPivLu().solve(-gen.b));
    RowFill fill;
    if (kind == OracleKind::Correlation) {
      fill = [&](std::size_t i, std::size_t len, std::vector<Complex>& row) {
        row.resize(len + 1);
        BlochVector s;
        s.s = states[i];
        const auto reg = RegressionState::initial(s, params.gamma_a);
        const Vector4c ust = s.s(0) * st;
        Vector4c u = reg.u;
        for (std::size_t j = 0; j <= len; ++j) {
          row[j] = u(1);
          u = step * (u - ust) + ust;
        }
      };
    } else {
      fill = [&](std::size_t i, std::size_t len, std::vector<Complex>& row) {
        row.resize(len + 1);
        for (std::size_t j = 0; j <= len; ++j) row[j] = states[i + j](1) * states[i](0);
      };
    }
    return oracle_pass(fill, h, filter.bandwidth, filter.detunings, times,
                       options.max_nodes);
  };

  TdsSurface s = empty_surface(filter, times);
  if (options.richardson) {
    const Eigen::MatrixXd coarse = pass(options.step);
    const Eigen::MatrixXd fine = pass(options.step / 2.0);
    s.values = (4.0 * fine - coarse) / 3.0;
  } else {
    s.values = pass(options.step);
  }
  return s;
}

}  // namespace

double filtered_spectrum(const ModeExpansion& c, double bandwidth,
                         double detuning, double t) {
  const Complex k(bandwidth / 2.0, -detuning);
  Complex sum = 0.0;
  for (const auto& term : c.terms)
    sum += term.coef * exp_divided_difference(term.tau_rate + k - bandwidth,
                                              Complex(-bandwidth), term.t2_rate, t);
  return 2.0 * bandwidth * sum.real();
}

TdsSurface tds_fast(const AtomParams& params, const FilterParams& filter,
                    const BlochVector& s0, std::span<const double> times) {
  check_filter(filter);
  check_times(times);
  const Propagator prop(build_generator(params));
  if (!prop.diagonalizable()) return tds_oracle(params, filter, s0, times);
  return surface_from_modes(correlation_modes(prop, s0), filter, times);
}

double default_t2_step(const AtomParams& params, double bandwidth) {
  return std::min({0.02 / params.gamma_plus(), 0.1 / bandwidth,
                   0.05 / std::max(params.rabi, 1.0)});
}

TdsSurface tds_trapezoid(const AtomParams& params, const FilterParams& filter,
                         const BlochVector& s0, std::span<const double> times,
                         double t2_step) {
  check_filter(filter);
  check_times(times);
  const Propagator prop(build_generator(params));
  prop.require_modes();
  if (t2_step <= 0.0) t2_step = default_t2_step(params, filter.bandwidth);
  const double gamma_f = filter.bandwidth;
  const std::size_t nd = filter.detunings.size();

  TdsSurface s = empty_surface(filter, times);
  std::vector<double> nodes;
  for (std::size_t a = 0; a < times.size(); ++a) {
    const double t = times[a];
    if (t == 0.0) continue;
    const std::size_t n = std::size_t(std::ceil(t / t2_step - 1e-9));
    const double h = t / double(n);
    nodes.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) nodes[i] = h * double(i);
    const auto states = evolve(prop, s0, nodes);

    std::vector<Complex> acc(nd, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      const auto reg = RegressionState::initial(states[i], params.gamma_a);
      const Vector4c ust = prop.fixed_point(reg.drive);
      const Vector4c y = prop.modal_amplitudes(reg.u, ust);
      const double T = t - nodes[i];
      const double w = (i == 0 || i == n) ? 0.5 * h : h;
      for (std::size_t d = 0; d < nd; ++d) {
        const Complex k(gamma_f / 2.0, -filter.detunings[d]);
        Complex g = ust(1) * exp_divided_difference(k - gamma_f, Complex(-gamma_f), T);
        for (int j = 0; j < 4; ++j)
          g += prop.right()(1, j) * y(j) *
               exp_divided_difference(k + prop.eigenvalues()(j) - gamma_f,
                                      Complex(-gamma_f), T);
        acc[d] += w * g;
      }
    }
    for (std::size_t d = 0; d < nd; ++d)
      s.values(Eigen::Index(a), Eigen::Index(d)) = 2.0 * gamma_f * acc[d].real();
  }
  return s;
}

TdsSurface tds_oracle(const AtomParams& params, const FilterParams& filter,
                      const BlochVector& s0, std::span<const double> times,
                      const OracleOptions& options) {
  return physical_oracle(params, filter, s0, times, options,
                         OracleKind::Correlation);
}

TdsSurface tds_oracle_synthetic(
    const std::function<Complex(double, double)>& correlation,
    const FilterParams& filter, std::span<const double> times,
    const OracleOptions& options) {
  check_filter(filter);
  check_times(times);
  auto pass = [&](double h) {
    RowFill fill = [&](std::size_t i, std::size_t len, std::vector<Complex>& row) {
      row.resize(len + 1);
      for (std::size_t j = 0; j <= len; ++j)
        row[j] = correlation(double(i) * h, double(j) * h);
    };
    return oracle_pass(fill, h, filter.bandwidth, filter.detunings, times,
                       options.max_nodes);
  };
  TdsSurface s = empty_surface(filter, times);
  if (options.richardson)
    s.values = (4.0 * pass(options.step / 2.0) - pass(options.step)) / 3.0;
  else
    s.values = pass(options.step);
  return s;
}

TdsDecomposition tds_decompose(const AtomParams& params,
                               const FilterParams& filter,
                               const BlochVector& s0,
                               std::span<const double> times) {
  check_filter(filter);
  check_times(times);
  const Propagator prop(build_generator(params));
  TdsDecomposition out;
  if (prop.diagonalizable()) {
    out.total = surface_from_modes(correlation_modes(prop, s0), filter, times);
    out.factorized = surface_from_modes(factorized_modes(prop, s0), filter, times);
  } else {
    out.total = physical_oracle(params, filter, s0, times, {}, OracleKind::Correlation);
    out.factorized = physical_oracle(params, filter, s0, times, {}, OracleKind::Factorized);
  }
  out.incoherent = out.total;
  out.incoherent.values = out.total.values - out.factorized.values;
  return out;
}

std::vector<double> tds_longtime_limit(const AtomParams& params,
                                       double bandwidth,
                                       std::span<const double> detunings,
                                       SpectrumPart part) {
  if (!(bandwidth > 0.0)) throw InvalidParameter("filter bandwidth must be positive");
  const Propagator prop(build_generator(params));
  ModeExpansion modes;
  const Vector4c& st = prop.fixed_point();
  switch (part) {
    case SpectrumPart::Total:
      modes = stationary_modes(prop);
      break;
    case SpectrumPart::Factorized:
      modes.terms.push_back({st(1) * st(0), 0.0, 0.0});
      break;
    case SpectrumPart::Incoherent:
      modes = stationary_fluctuation_modes(prop);
      break;
  }
  std::vector<double> out;
  out.reserve(detunings.size());
  for (double d : detunings) {
    const Complex k(bandwidth / 2.0, d);
    Complex sum = 0.0;
    for (const auto& term : modes.terms) sum += term.coef / (k - term.tau_rate);
    out.push_back(2.0 * sum.real());
  }
  return out;
}

double central_half_width(const AtomParams& params) {
  const Propagator prop(build_generator(params));
  const ModeExpansion modes = stationary_fluctuation_modes(prop);
  // The shelving mode is the slowest decaying eigenvalue.
  Complex slow = prop.eigenvalues()(0);
  for (int j = 1; j < 4; ++j)
    if (std::abs(prop.eigenvalues()(j).real()) < std::abs(slow.real()))
      slow = prop.eigenvalues()(j);
  auto broad = [&](double w) {
    Complex sum = 0.0;
    for (const auto& term : modes.terms)
      if (term.tau_rate != slow) sum += term.coef / (Complex(0.0, w) - term.tau_rate);
    return sum.real();
  };
  const double half = 0.5 * broad(0.0);
  const double limit = std::max(params.rabi, params.gamma_plus()) * 2.0;
  const double step = 1e-3;
  double lo = 0.0, hi = step;
  while (broad(hi) > half) {
    lo = hi;
    hi += step;
    if (hi > limit) throw std::runtime_error("central peak has no half-width point");
  }
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (broad(mid) > half ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> emergence_ratio(const AtomParams& params, double bandwidth,
                                    const BlochVector& s0,
                                    std::span<const double> times,
                                    double d_side) {
  FilterParams filter{bandwidth, {0.0, d_side}};
  if (d_side < 0.0) filter.detunings = {d_side, 0.0};
  const TdsSurface s = tds_fast(params, filter, s0, times);
  const std::size_t center = d_side < 0.0 ? 1 : 0;
  std::vector<double> out(times.size());
  for (std::size_t i = 0; i < times.size(); ++i)
    out[i] = s.at(i, center) / s.at(i, 1 - center);
  return out;
}

namespace {

std::size_t nearest_index(const std::vector<double>& grid, double x) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < grid.size(); ++k)
    if (std::abs(grid[k] - x) < std::abs(grid[best] - x)) best = k;
  return best;
}

}  // namespace

std::vector<double> asymmetry(const TdsSurface& surface, double d1) {
  const std::size_t plus = nearest_index(surface.detunings, d1);
  const std::size_t minus = nearest_index(surface.detunings, -d1);
  std::vector<double> out(surface.times.size());
  for (std::size_t i = 0; i < surface.times.size(); ++i) {
    const double peak = surface.values.row(Eigen::Index(i)).maxCoeff();
    out[i] = peak > 0.0 ? std::abs(surface.at(i, plus) - surface.at(i, minus)) / peak : 0.0;
  }
  return out;
}

double saturation_time(const AtomParams& params, double bandwidth,
                       const BlochVector& s0, double detuning,
                       std::span<const double> times, double fraction) {
  const double d[] = {detuning};
  const double limit = tds_longtime_limit(params, bandwidth, d).front();
  const TdsSurface s = tds_fast(params, FilterParams{bandwidth, {detuning}}, s0, times);
  for (std::size_t i = 0; i < times.size(); ++i)
    if (s.at(i, 0) >= fraction * limit) return times[i];
  return -1.0;
}

double central_fwhm(const TdsSurface& surface, std::size_t time_index) {
  const auto& d = surface.detunings;
  if (d.empty() || time_index >= surface.times.size())
    throw InvalidParameter("central_fwhm: empty surface or bad time index");
  const auto row = surface.values.row(Eigen::Index(time_index));
  auto value = [&](std::size_t k) { return row(Eigen::Index(k)); };

  std::size_t k = 0;
  for (std::size_t j = 1; j < d.size(); ++j)
    if (std::abs(d[j]) < std::abs(d[k])) k = j;
  // Climb to the local maximum.
  while (k + 1 < d.size() && value(k + 1) > value(k)) ++k;
  while (k > 0 && value(k - 1) > value(k)) --k;
  const double half = 0.5 * value(k);
  if (!(half > 0.0)) return std::numeric_limits<double>::quiet_NaN();

  std::size_t r = k;
  while (r + 1 < d.size() && value(r + 1) > half) ++r;
  std::size_t l = k;
  while (l > 0 && value(l - 1) > half) --l;
  if (r + 1 == d.size() || l == 0) return std::numeric_limits<double>::quiet_NaN();
  auto cross = [&](std::size_t a, std::size_t b) {
    return d[a] + (half - value(a)) * (d[b] - d[a]) / (value(b) - value(a));
  };
  return cross(r, r + 1) - cross(l, l - 1);
}

}  // namespace shelving

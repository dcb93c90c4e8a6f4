#include "shelving/correlations.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "shelving/expdiff.hpp"

namespace shelving {

RegressionState RegressionState::initial(const BlochVector& s_at_t2,
                                         double gamma_a) {
  RegressionState r;
  r.t2 = s_at_t2.time;
  r.u << 0.0, s_at_t2.s(2), 0.0, s_at_t2.s(0);
  r.drive << 0.0, 0.0, 0.0, gamma_a * s_at_t2.s(0);
  return r;
}

Complex ModeExpansion::operator()(double t2, double tau) const {
  Complex sum = 0.0;
  for (const auto& term : terms)
    sum += term.coef * std::exp(term.tau_rate * tau + term.t2_rate * t2);
  return sum;
}

ModeExpansion ModeExpansion::minus(const ModeExpansion& other) const {
  ModeExpansion out = *this;
  out.terms.reserve(terms.size() + other.terms.size());
  for (auto term : other.terms) {
    term.coef = -term.coef;
    out.terms.push_back(term);
  }
  return out;
}

namespace {

double metastable_rate(const Propagator& prop) {
  return prop.generator().b(3).real();
}

// Single-time solution as a sum of exponentials in t2:
//   s(t2) = sum_m components[m] exp(rates[m] t2),  m = 0 is the fixed point.
struct ModalSolution {
  std::array<Vector4c, 5> components;
  std::array<Complex, 5> rates;
};

ModalSolution modal_solution(const Propagator& prop, const BlochVector& s0) {
  const Vector4c& st = prop.fixed_point();
  const Vector4c amp = prop.modal_amplitudes(s0.s, st);
  ModalSolution sol;
  sol.components[0] = st;
  sol.rates[0] = 0.0;
  for (int m = 0; m < 4; ++m) {
    sol.components[m + 1] = amp(m) * prop.right().col(m);
    sol.rates[m + 1] = prop.eigenvalues()(m);
  }
  return sol;
}

// Regression contributions of one single-time component x (the regression
// map is linear in the single-time state, so components add).
void append_regression_terms(const Propagator& prop, const Vector4c& x,
                             Complex t2_rate, ModeExpansion& out) {
  // The drive is gamma_a x_ge e_gg = x_ge b, hence the fixed point x_ge s_st.
  Vector4c u0;
  u0 << 0.0, x(2), 0.0, x(0);
  const Vector4c ust = x(0) * prop.fixed_point();
  if (ust(1) != Complex(0.0)) out.terms.push_back({ust(1), 0.0, t2_rate});
  const Vector4c y = prop.left() * (u0 - ust);
  for (int j = 0; j < 4; ++j) {
    const Complex coef = prop.right()(1, j) * y(j);
    if (coef != Complex(0.0))
      out.terms.push_back({coef, prop.eigenvalues()(j), t2_rate});
  }
}

}  // namespace

ModeExpansion correlation_modes(const Propagator& prop, const BlochVector& s0) {
  prop.require_modes();
  const ModalSolution sol = modal_solution(prop, s0);
  ModeExpansion out;
  for (int m = 0; m < 5; ++m)
    append_regression_terms(prop, sol.components[m], sol.rates[m], out);
  return out;
}

ModeExpansion factorized_modes(const Propagator& prop, const BlochVector& s0) {
  prop.require_modes();
  const ModalSolution sol = modal_solution(prop, s0);
  ModeExpansion out;
  for (int j = 0; j < 5; ++j) {
    for (int m = 0; m < 5; ++m) {
      const Complex coef = sol.components[j](1) * sol.components[m](0);
      if (coef == Complex(0.0)) continue;
      out.terms.push_back({coef, sol.rates[j], sol.rates[j] + sol.rates[m]});
    }
  }
  return out;
}

ModeExpansion stationary_modes(const Propagator& prop) {
  prop.require_modes();
  ModeExpansion out;
  append_regression_terms(prop, prop.fixed_point(), 0.0, out);
  return out;
}

ModeExpansion stationary_fluctuation_modes(const Propagator& prop) {
  const ModeExpansion full = stationary_modes(prop);
  const Vector4c& st = prop.fixed_point();
  const Complex elastic = st(1) * st(0);
  ModeExpansion out;
  Complex residual = -elastic;
  for (const auto& term : full.terms) {
    if (term.tau_rate == Complex(0.0)) residual += term.coef;
    else out.terms.push_back(term);
  }
  if (std::abs(residual) > 1e-12)
    throw std::logic_error("stationary correlation does not factorize at long times");
  return out;
}

std::vector<Complex> correlation(const Propagator& prop, const BlochVector& s0,
                                 double t2, std::span<const double> taus) {
  if (t2 < 0.0) throw std::invalid_argument("t2 must be nonnegative");
  const double grid[] = {t2};
  const BlochVector s = evolve(prop, s0, grid).front();
  const auto reg = RegressionState::initial(s, metastable_rate(prop));
  const Vector4c ust = prop.fixed_point(reg.drive);
  const Vector4c amp = prop.modal_amplitudes(reg.u, ust);
  std::vector<Complex> out;
  out.reserve(taus.size());
  for (double tau : taus) {
    const Vector4c decay = (prop.eigenvalues() * tau).array().exp().matrix();
    const Vector4c u = prop.right() * decay.cwiseProduct(amp) + ust;
    out.push_back(u(1));
  }
  return out;
}

std::vector<Complex> correlation_ode(const BlochGenerator& gen,
                                     const BlochVector& s0, double t2,
                                     std::span<const double> taus, double tol) {
  const double grid[] = {t2};
  BlochVector s;
  s.time = t2;
  s.s = integrate_affine(gen.m, gen.b, s0.s, grid, tol).front();
  const auto reg = RegressionState::initial(s, gen.b(3).real());
  const auto us = integrate_affine(gen.m, reg.drive, reg.u, taus, tol);
  std::vector<Complex> out;
  out.reserve(us.size());
  for (const auto& u : us) out.push_back(u(1));
  return out;
}

std::vector<Complex> stationary_correlation(const AtomParams& params,
                                            std::span<const double> taus) {
  const Propagator prop(build_generator(params));
  const ModeExpansion modes = stationary_modes(prop);
  std::vector<Complex> out;
  out.reserve(taus.size());
  for (double tau : taus) out.push_back(modes(0.0, tau));
  return out;
}

std::vector<Complex> stationary_fluctuation_correlation(
    const AtomParams& params, std::span<const double> taus) {
  const Propagator prop(build_generator(params));
  const ModeExpansion modes = stationary_fluctuation_modes(prop);
  std::vector<Complex> out;
  out.reserve(taus.size());
  for (double tau : taus) out.push_back(modes(0.0, tau));
  return out;
}

Complex tau_transform(const Propagator& prop, const Vector4c& u0,
                      const Vector4c& ust, Complex k, double T) {
  const Vector4c y = prop.modal_amplitudes(u0, ust);
  Complex sum = ust(1) * exp_divided_difference(k, 0.0, T);
  for (int j = 0; j < 4; ++j) {
    sum += prop.right()(1, j) * y(j) *
           exp_divided_difference(k + prop.eigenvalues()(j), 0.0, T);
  }
  return sum;
}

Complex damped_tau_transform(const Propagator& prop, const Vector4c& u0,
                             const Vector4c& ust, Complex k, double T,
                             double decay) {
  const Vector4c y = prop.modal_amplitudes(u0, ust);
  Complex sum = ust(1) * exp_divided_difference(k - decay, -decay, T);
  for (int j = 0; j < 4; ++j) {
    sum += prop.right()(1, j) * y(j) *
           exp_divided_difference(k + prop.eigenvalues()(j) - decay, -decay, T);
  }
  return sum;
}

CorrelationGrid correlation_grid(const Propagator& prop, const BlochVector& s0,
                                 std::span<const double> t2s,
                                 std::span<const double> taus) {
  CorrelationGrid grid;
  grid.t2.assign(t2s.begin(), t2s.end());
  grid.tau.assign(taus.begin(), taus.end());
  grid.values.resize(Eigen::Index(t2s.size()), Eigen::Index(taus.size()));
  grid.factorized.resizeLike(grid.values);

  const auto states = evolve(prop, s0, t2s);
  std::vector<double> shifted(taus.size());
  for (std::size_t i = 0; i < t2s.size(); ++i) {
    const auto c = correlation(prop, s0, t2s[i], taus);
    for (std::size_t j = 0; j < taus.size(); ++j) shifted[j] = t2s[i] + taus[j];
    const auto later = evolve(prop, s0, shifted);
    for (std::size_t j = 0; j < taus.size(); ++j) {
      grid.values(Eigen::Index(i), Eigen::Index(j)) = c[j];
      grid.factorized(Eigen::Index(i), Eigen::Index(j)) =
          later[j].sigma_eg() * states[i].sigma_ge();
    }
  }
  return grid;
}

}  // namespace shelving

#include "shelving/dynamics.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include <boost/numeric/odeint.hpp>

namespace shelving {

Propagator::Propagator(const BlochGenerator& gen, double max_condition)
    : gen_(gen), lu_(gen.m) {
  fixed_point_ = lu_.solve(-gen_.b);

  Eigen::ComplexEigenSolver<Matrix4c> es(gen_.m);
  if (es.info() != Eigen::Success) return;
  lambda_ = es.eigenvalues();
  right_ = es.eigenvectors();

  Eigen::JacobiSVD<Matrix4c> svd(right_);
  const auto& sv = svd.singularValues();
  condition_ = sv(sv.size() - 1) > 0.0
                   ? sv(0) / sv(sv.size() - 1)
                   : std::numeric_limits<double>::infinity();
  if (!(condition_ <= max_condition)) return;

  left_ = right_.inverse();
  diagonalizable_ = true;
}

Vector4c Propagator::fixed_point(const Vector4c& drive) const {
  return lu_.solve(-drive);
}

void Propagator::require_modes() const {
  if (!diagonalizable_) {
    std::ostringstream os;
    os << "generator eigenvector matrix is ill-conditioned (cond = "
       << condition_ << ")";
    throw DegenerateSpectrum(os.str());
  }
}

Vector4c Propagator::modal_amplitudes(const Vector4c& x0,
                                      const Vector4c& x_fixed) const {
  require_modes();
  return left_ * (x0 - x_fixed);
}

Vector4c Propagator::propagate(const Vector4c& x0, const Vector4c& x_fixed,
                               double t) const {
  const Vector4c amp = modal_amplitudes(x0, x_fixed);
  const Vector4c decay = (lambda_ * t).array().exp().matrix();
  return right_ * decay.cwiseProduct(amp) + x_fixed;
}

Propagator build_propagator(const BlochGenerator& gen) { return Propagator(gen); }

namespace {

void check_time_grid(std::span<const double> times) {
  for (std::size_t k = 0; k < times.size(); ++k)
    if (times[k] < 0.0 || (k > 0 && times[k] < times[k - 1]))
      throw std::invalid_argument("time grid must be nonnegative and ascending");
}

}  // namespace

std::vector<BlochVector> evolve(const Propagator& prop, const BlochVector& s0,
                                std::span<const double> times) {
  prop.require_modes();
  check_time_grid(times);
  const Vector4c& st = prop.fixed_point();
  const Vector4c amp = prop.modal_amplitudes(s0.s, st);
  std::vector<BlochVector> out;
  out.reserve(times.size());
  for (double t : times) {
    BlochVector v;
    v.time = t;
    const Vector4c decay = (prop.eigenvalues() * t).array().exp().matrix();
    v.s = prop.right() * decay.cwiseProduct(amp) + st;
    out.push_back(v);
  }
  return out;
}

namespace {

using RealState = std::array<double, 8>;

RealState pack(const Vector4c& x) {
  RealState r{};
  for (int k = 0; k < 4; ++k) {
    r[2 * k] = x(k).real();
    r[2 * k + 1] = x(k).imag();
  }
  return r;
}

Vector4c unpack(const RealState& r) {
  Vector4c x;
  for (int k = 0; k < 4; ++k) x(k) = Complex(r[2 * k], r[2 * k + 1]);
  return x;
}

}  // namespace

std::vector<Vector4c> integrate_affine(const Matrix4c& m, const Vector4c& drive,
                                       const Vector4c& x0,
                                       std::span<const double> times,
                                       double tol) {
  namespace ode = boost::numeric::odeint;
  std::vector<Vector4c> out;
  if (times.empty()) return out;
  check_time_grid(times);

  auto rhs = [&](const RealState& r, RealState& dr, double) {
    const Vector4c x = unpack(r);
    dr = pack(m * x + drive);
  };

  // integrate_times starts at the first grid time, so anchor the grid at 0.
  std::vector<double> grid;
  grid.reserve(times.size() + 1);
  const bool anchored = times.front() > 0.0;
  if (anchored) grid.push_back(0.0);
  grid.insert(grid.end(), times.begin(), times.end());

  RealState state = pack(x0);
  out.reserve(times.size());
  std::size_t seen = 0;
  auto observer = [&](const RealState& r, double) {
    if (!anchored || seen > 0) out.push_back(unpack(r));
    ++seen;
  };

  auto stepper = ode::make_controlled(tol, tol, ode::runge_kutta_dopri5<RealState>());
  try {
    ode::integrate_times(stepper, rhs, state, grid.begin(), grid.end(), 1e-3,
                         observer, ode::max_step_checker(50'000'000));
  } catch (const std::exception& e) {
    throw IntegrationError(std::string("ODE integration failed: ") + e.what());
  }
  return out;
}

std::vector<BlochVector> evolve_ode(const BlochGenerator& gen,
                                    const BlochVector& s0,
                                    std::span<const double> times, double tol) {
  const auto xs = integrate_affine(gen.m, gen.b, s0.s, times, tol);
  std::vector<BlochVector> out(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) {
    out[k].s = xs[k];
    out[k].time = times[k];
  }
  return out;
}

std::vector<BlochVector> evolve_robust(const Propagator& prop,
                                       const BlochVector& s0,
                                       std::span<const double> times) {
  if (prop.diagonalizable()) return evolve(prop, s0, times);
  return evolve_ode(prop.generator(), s0, times);
}

}  // namespace shelving

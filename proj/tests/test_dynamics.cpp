#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "shelving/dynamics.hpp"
#include "support.hpp"

using namespace shelving;

namespace {

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int k = 0; k < n; ++k) v[k] = a + (b - a) * k / (n - 1);
  return v;
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("closed-form steady state") {
  const auto st = steady_state_closed_form(moderate_drive());
  CHECK(st.sigma_ee == doctest::Approx(0.046875).epsilon(1e-12));
  CHECK(st.sigma_aa == doctest::Approx(0.15625).epsilon(1e-12));
  CHECK(st.sigma_gg == doctest::Approx(0.796875).epsilon(1e-12));
  CHECK(std::abs(st.sigma_ge - std::conj(st.sigma_eg)) < 1e-16);

  AtomParams off = moderate_drive();
  off.rabi = 0.0;
  const auto z = steady_state_closed_form(off);
  CHECK(z.sigma_gg == 1.0);
  CHECK(z.sigma_ee == 0.0);
  CHECK(z.sigma_aa == 0.0);
  CHECK(std::abs(z.sigma_eg) == 0.0);

  AtomParams hard = moderate_drive();
  hard.rabi = 1e4;
  const auto h = steady_state_closed_form(hard);
  const double q = hard.q();
  CHECK(h.sigma_ee == doctest::Approx(1.0 / (2.0 + q)).epsilon(1e-6));
  CHECK(h.sigma_aa == doctest::Approx(q / (2.0 + q)).epsilon(1e-6));
}

TEST_CASE("eigenvalues of the undriven generator") {
  AtomParams p{0.0, 0.0, 1.0, 0.0, 0.015};
  const Propagator prop(build_generator(p));
  REQUIRE(prop.diagonalizable());
  std::vector<double> re, im;
  for (int k = 0; k < 4; ++k) {
    re.push_back(prop.eigenvalues()(k).real());
    im.push_back(prop.eigenvalues()(k).imag());
  }
  std::sort(re.begin(), re.end());
  CHECK(re[0] == doctest::Approx(-1.0));
  CHECK(re[1] == doctest::Approx(-0.5));
  CHECK(re[2] == doctest::Approx(-0.5));
  CHECK(re[3] == doctest::Approx(-0.015));
  for (double x : im) CHECK(std::abs(x) < 1e-14);
}

TEST_CASE("fixed point matches the closed form") {
  const Propagator prop(build_generator(moderate_drive()));
  const Vector4c closed = to_bloch(steady_state_closed_form(moderate_drive())).s;
  CHECK((prop.fixed_point() - closed).cwiseAbs().maxCoeff() < 1e-10);

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = testing::random_params(rng);
    const auto gen = build_generator(p);
    const Vector4c s = to_bloch(steady_state_closed_form(p)).s;
    CHECK((gen.m * s + gen.b).norm() < 1e-12);
    CHECK((Propagator(gen).fixed_point() - s).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("steady state is a fixed point of evolve") {
  const AtomParams p = strong_detuned_drive();
  const Propagator prop(build_generator(p));
  const BlochVector st = to_bloch(steady_state_closed_form(p));
  const auto out = evolve(prop, st, linspace(0.0, 500.0, 51));
  for (const auto& s : out) CHECK((s.s - st.s).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("modal evolution matches adaptive integration") {
  std::mt19937_64 rng(17);
  const auto times = linspace(0.0, 60.0, 121);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = testing::random_params(rng);
    const auto gen = build_generator(p);
    const Propagator prop(gen);
    REQUIRE(prop.diagonalizable());
    const auto a = evolve(prop, BlochVector::ground(), times);
    const auto b = evolve_ode(gen, BlochVector::ground(), times, 1e-10);
    double worst = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k)
      worst = std::max(worst, (a[k].s - b[k].s).cwiseAbs().maxCoeff());
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("physicality along trajectories of the Bloch equations") {
  std::mt19937_64 rng(23);
  const auto times = linspace(0.0, 300.0, 301);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = testing::random_params(rng);
    const Propagator prop(build_generator(p));
    for (const auto& s : evolve(prop, BlochVector::ground(), times)) {
      for (double pop : {s.sigma_ee(), s.sigma_gg(), s.sigma_aa()}) {
        CHECK(pop >= -1e-9);
        CHECK(pop <= 1.0 + 1e-9);
      }
      CHECK(std::abs(s.s(2).imag()) < 1e-10);
      CHECK(std::abs(s.s(3).imag()) < 1e-10);
      CHECK(std::abs(s.sigma_ge() - std::conj(s.sigma_eg())) < 1e-10);
    }
  }
}

TEST_CASE("distance to the steady state is bounded by the slowest mode") {
  const AtomParams p = strong_drive();
  const Propagator prop(build_generator(p));
  const double rate = prop.eigenvalues().real().maxCoeff();
  const BlochVector s0 = BlochVector::ground();
  const double bound = prop.right().norm() * prop.left().norm() *
                       (s0.s - prop.fixed_point()).norm();
  for (double lt = 0.0; lt <= 3.0; lt += 0.25) {
    const double t = std::pow(10.0, lt);
    const std::vector<double> ts{t};
    const auto s = evolve(prop, s0, ts);
    CHECK((s[0].s - prop.fixed_point()).norm() <= bound * std::exp(rate * t) + 1e-15);
  }
}

TEST_CASE("two-timescale relaxation near saturation") {
  const AtomParams p = moderate_drive();
  const Propagator prop(build_generator(p));
  const double st = steady_state_closed_form(p).sigma_ee;
  const auto times = linspace(0.0, 400.0, 4001);
  const auto s = evolve(prop, BlochVector::ground(), times);

  // Fast rise: the excited population overshoots its steady value within a
  // few lifetimes.
  double peak = 0.0, t_peak = 0.0;
  for (const auto& x : s)
    if (x.sigma_ee() > peak) peak = x.sigma_ee(), t_peak = x.time;
  CHECK(t_peak < 20.0 / p.gamma_plus());
  CHECK(peak > st);

  // Slow tail: log-linear fit of |s_ee - s_ee_st| on [100, 400].
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& x : s) {
    if (x.time < 100.0) continue;
    const double y = std::log(std::abs(x.sigma_ee() - st));
    sx += x.time, sy += y, sxx += x.time * x.time, sxy += x.time * y, ++n;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(-slope == doctest::Approx(p.gamma_a).epsilon(0.25));
}

TEST_CASE("ill-conditioned modes fall back to integration") {
  const auto gen = build_generator(strong_drive());
  const Propagator strict(gen, 1.0);  // any nontrivial V exceeds this
  CHECK_FALSE(strict.diagonalizable());
  const auto times = linspace(0.0, 20.0, 11);
  CHECK_THROWS_AS(evolve(strict, BlochVector::ground(), times), DegenerateSpectrum);
  const auto a = evolve_robust(strict, BlochVector::ground(), times);
  const auto b = evolve(Propagator(gen), BlochVector::ground(), times);
  for (std::size_t k = 0; k < times.size(); ++k)
    CHECK((a[k].s - b[k].s).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("time grids must be ascending") {
  const Propagator prop(build_generator(moderate_drive()));
  const std::vector<double> bad{1.0, 0.5};
  CHECK_THROWS(evolve(prop, BlochVector::ground(), bad));
  CHECK_THROWS(evolve_ode(prop.generator(), BlochVector::ground(), bad));
}

}  // TEST_SUITE

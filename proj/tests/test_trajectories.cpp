#include <doctest.h>

#include <cmath>
#include <random>

#include "shelving/spectra.hpp"
#include "shelving/trajectories.hpp"

using namespace shelving;

namespace {

void check_segmentation(const TrajectoryRecord& rec) {
  std::vector<std::pair<Interval, bool>> all;  // (interval, dark)
  for (const auto& b : rec.bright) all.push_back({b, false});
  for (const auto& d : rec.dark) all.push_back({d, true});
  std::sort(all.begin(), all.end(),
            [](const auto& x, const auto& y) { return x.first.start < y.first.start; });
  REQUIRE_FALSE(all.empty());
  CHECK(all.front().first.start == 0.0);
  CHECK(all.back().first.end == rec.t_max);
  for (std::size_t k = 1; k < all.size(); ++k) {
    CHECK(all[k].first.start == all[k - 1].first.end);
    CHECK(all[k].second != all[k - 1].second);  // alternating
  }
  // Dark intervals open on a shelve event and close on the next unshelve.
  for (const auto& d : rec.dark) {
    const auto open = std::find_if(rec.events.begin(), rec.events.end(),
                                   [&](const EmissionEvent& e) { return e.time == d.start; });
    REQUIRE(open != rec.events.end());
    CHECK(open->channel == Channel::Shelve);
    if (d.complete) {
      REQUIRE(open + 1 != rec.events.end());
      CHECK((open + 1)->channel == Channel::Unshelve);
      CHECK((open + 1)->time == d.end);
    }
  }
}

}  // namespace

TEST_SUITE("trajectories") {

TEST_CASE("undriven atom never jumps") {
  AtomParams p = moderate_drive();
  p.rabi = 0.0;
  JumpConfig c;
  c.t_max = 1e4;
  const auto rec = simulate(p, c);
  CHECK(rec.events.empty());
  REQUIRE(rec.bright.size() == 1);
  CHECK(rec.dark.empty());
  CHECK(rec.bright[0].start == 0.0);
  CHECK(rec.bright[0].end == 1e4);
  CHECK_FALSE(rec.bright[0].complete);
}

TEST_CASE("no shelving channel means one bright interval") {
  AtomParams p = strong_drive();
  p.gamma_d = 0.0;
  JumpConfig c;
  c.t_max = 500.0;
  const auto rec = simulate(p, c);
  CHECK(rec.dark.empty());
  CHECK(rec.bright.size() == 1);
  CHECK(rec.photon_count == rec.events.size());
  CHECK(rec.photon_count > 100);
}

TEST_CASE("seeded reproducibility and stream independence") {
  const AtomParams p = strong_drive();
  JumpConfig c;
  c.t_max = 2000.0;
  const auto a = simulate(p, c);
  const auto b = simulate(p, c);
  REQUIRE(a.events.size() == b.events.size());
  for (std::size_t k = 0; k < a.events.size(); ++k) {
    CHECK(a.events[k].time == b.events[k].time);
    CHECK(a.events[k].channel == b.events[k].channel);
  }
  const auto other = simulate(p, trajectory_config(c, 1));
  CHECK((other.events.size() != a.events.size() || other.events[0].time != a.events[0].time));
  CHECK(trajectory_config(c, 0).seed != trajectory_config(c, 1).seed);

  const std::vector<double> samples{10.0, 100.0};
  const auto one = run_ensemble(p, c, 6, samples, 1);
  const auto three = run_ensemble(p, c, 6, samples, 3);
  for (std::size_t k = 0; k < 6; ++k) {
    REQUIRE(one[k].events.size() == three[k].events.size());
    CHECK(one[k].events.back().time == three[k].events.back().time);
    CHECK((one[k].samples[1].s - three[k].samples[1].s).norm() == 0.0);
  }
}

TEST_CASE("segmentation is exact and tiles the record") {
  for (const AtomParams& p : {moderate_drive(), strong_detuned_drive()}) {
    JumpConfig c;
    c.t_max = 5000.0;
    for (std::uint64_t k = 0; k < 5; ++k) check_segmentation(simulate(p, trajectory_config(c, k)));
  }
}

TEST_CASE("telegraph statistics of a synthetic record") {
  TrajectoryRecord rec;
  rec.t_max = 100.0;
  rec.dark = {{0.0, 5.0, false}, {15.0, 25.0, true}, {35.0, 55.0, true}, {65.0, 95.0, true}};
  rec.bright = {{5.0, 15.0, true}, {25.0, 35.0, true}, {55.0, 65.0, true}, {95.0, 100.0, false}};
  const std::vector<TrajectoryRecord> recs{rec};
  const auto s = telegraph_stats(recs);
  CHECK(s.mean_dark == doctest::Approx(20.0));
  CHECK(s.n_dark == 3);
  CHECK(s.se_dark == doctest::Approx(10.0 / std::sqrt(3.0)));
  CHECK(s.mean_bright == doctest::Approx(10.0));
  CHECK(s.sufficient);
  CHECK_FALSE(telegraph_stats(std::vector<TrajectoryRecord>{}).sufficient);
}

TEST_CASE("mean dark time near saturation") {
  JumpConfig c;
  c.t_max = 5e4;
  c.record_events = false;
  const auto recs = run_ensemble(moderate_drive(), c, 400);
  const auto s = telegraph_stats(recs);
  CHECK(std::abs(s.mean_dark - 1.0 / 0.015) < 3.0 * s.se_dark);
  // Renewal mean of the bright periods. Dropping the final, censored interval
  // biases the complete-interval mean low by a few units at this window, so
  // use all bright time over the number of bright periods that ended.
  double bright_time = 0.0;
  std::size_t ended = 0;
  for (const auto& r : recs)
    for (const auto& b : r.bright) {
      bright_time += b.length();
      if (b.end < r.t_max) ++ended;
    }
  CHECK(std::abs(bright_time / double(ended) - exact_mean_bright_time(moderate_drive())) <
        3.0 * s.se_bright);
}

TEST_CASE("mean bright time under strong driving") {
  for (const AtomParams& p : {strong_drive(), strong_detuned_drive()}) {
    JumpConfig c;
    c.t_max = 5e4;
    c.record_events = false;
    const auto s = telegraph_stats(run_ensemble(p, c, 40));
    CHECK(std::abs(s.mean_bright - bright_dark_times(p).bright) < 3.0 * s.se_bright);
  }
}

TEST_CASE("ensemble average") {
  AtomParams off = moderate_drive();
  off.rabi = 0.0;
  JumpConfig c;
  const std::vector<double> times{0.0, 1.0, 50.0};
  const auto avg = ensemble_average(off, c, 1, times);
  for (const auto& v : avg.mean) CHECK((v.s - BlochVector::ground().s).norm() == 0.0);

  // Error scaling n -> 4n.
  const AtomParams p = strong_drive();
  std::vector<double> grid;
  for (double t = 2.0; t <= 100.0; t += 2.0) grid.push_back(t);
  const auto exact = evolve(Propagator(build_generator(p)), BlochVector::ground(), grid);
  auto rms = [&](std::size_t n, std::uint64_t seed) {
    JumpConfig jc;
    jc.seed = seed;
    const auto a = ensemble_average(p, jc, n, grid);
    double s = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k)
      s += std::pow(a.mean[k].sigma_ee() - exact[k].sigma_ee(), 2);
    return std::sqrt(s / double(grid.size()));
  };
  const double ratio = rms(1600, 2) / rms(400, 1);
  CHECK(ratio >= 0.3);
  CHECK(ratio <= 0.8);
}

TEST_CASE("Kolmogorov-Smirnov test") {
  std::mt19937_64 rng(99);
  std::exponential_distribution<double> ex(0.015);
  std::vector<double> good(1000);
  for (auto& x : good) x = ex(rng);
  CHECK(ks_exponential(good, 0.015).p_value > 0.01);
  CHECK(ks_exponential(good, 0.03).p_value < 0.01);

  // Reference values of the limiting Kolmogorov distribution,
  // Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2):
  // Q(0.5) = 0.963945, Q(1.0) = 0.270000, Q(1.36) = 0.049486.
  for (auto [lambda, q] : {std::pair{0.5, 0.9639452436648751}, {1.0, 0.26999967167735456},
                           {1.36, 0.049485876755377876}}) {
    // A sample of n equally spaced quantiles shifted to produce statistic D.
    const std::size_t n = 400;
    const double d = lambda / (std::sqrt(double(n)) + 0.12 + 0.11 / std::sqrt(double(n)));
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = std::min(1.0 - 1e-12, (double(i) + 1.0) / double(n) - 1.0 / double(n) + d);
      xs[i] = -std::log1p(-u);
    }
    const auto r = ks_exponential(xs, 1.0);
    CHECK(r.statistic == doctest::Approx(d).epsilon(1e-9));
    CHECK(r.p_value == doctest::Approx(q).epsilon(1e-5));
  }
}

TEST_CASE("configuration errors") {
  JumpConfig c;
  c.t_max = 0.0;
  CHECK_THROWS_AS(simulate(moderate_drive(), c), InvalidParameter);
  c = JumpConfig{};
  const std::vector<double> bad{2.0, 1.0};
  CHECK_THROWS_AS(simulate(moderate_drive(), c, bad), InvalidParameter);
}

}  // TEST_SUITE

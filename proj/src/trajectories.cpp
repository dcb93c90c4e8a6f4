#include "shelving/trajectories.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

#include <boost/math/tools/roots.hpp>

namespace shelving {

const char* channel_name(Channel c) {
  switch (c) {
    case Channel::Strong: return "strong";
    case Channel::Shelve: return "shelve";
    case Channel::Unshelve: return "unshelve";
  }
  return "?";
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform on (0, 1], built from the top 53 bits so the stream is identical
// across standard library implementations.
class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) {
    std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32)};
    engine_.seed(seq);
  }
  double operator()() {
    return (double((engine_() >> 11) + 1)) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 engine_;
};

// exp(-i H_eff t) restricted to span{|g>, |e>}, with
//   -i H_eff = [[0, -i W/2], [-i W/2, -i D - gamma_+/2]] = c I + B,
// B traceless, B^2 = beta^2 I. Exact at the exceptional point beta = 0.
class NoJumpPropagator {
 public:
  explicit NoJumpPropagator(const AtomParams& p) : gamma_a_(p.gamma_a) {
    const Complex i(0.0, 1.0);
    const Complex a11 = -i * p.detuning - 0.5 * p.gamma_plus();
    c_ = 0.5 * a11;
    b_ << -c_, -i * (0.5 * p.rabi), -i * (0.5 * p.rabi), c_;
    beta_ = std::sqrt(c_ * c_ - 0.25 * p.rabi * p.rabi);
  }

  Eigen::Matrix2cd block(double t) const {
    const Complex z = beta_ * t;
    Eigen::Matrix2cd out;
    if (std::abs(z) < 1.0) {
      // cosh(z) and sinh(z)/z by series.
      const Complex z2 = z * z;
      Complex ch = 1.0, sh = 1.0, term_c = 1.0, term_s = 1.0;
      for (int n = 1; n <= 12; ++n) {
        term_c *= z2 / double((2 * n - 1) * (2 * n));
        term_s *= z2 / double((2 * n) * (2 * n + 1));
        ch += term_c;
        sh += term_s;
      }
      out = std::exp(c_ * t) *
            (ch * Eigen::Matrix2cd::Identity() + (sh * t) * b_);
    } else {
      const Eigen::Matrix2cd ratio = b_ / beta_;
      const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
      out = 0.5 * std::exp((c_ + beta_) * t) * (id + ratio) +
            0.5 * std::exp((c_ - beta_) * t) * (id - ratio);
    }
    return out;
  }

  StateVector apply(const StateVector& psi, double t) const {
    StateVector out;
    out.head<2>() = block(t) * psi.head<2>();
    out(2) = std::exp(-0.5 * gamma_a_ * t) * psi(2);
    return out;
  }

 private:
  double gamma_a_;
  Complex c_;
  Complex beta_;
  Eigen::Matrix2cd b_;
};

BlochVector expectations(const StateVector& psi, double t) {
  const StateVector n = psi / psi.norm();
  BlochVector v;
  v.time = t;
  v.s << std::conj(n(0)) * n(1), std::conj(n(1)) * n(0), std::norm(n(1)),
      std::norm(n(0));
  return v;
}

}  // namespace

TrajectoryRecord simulate(const AtomParams& params, const JumpConfig& config,
                          std::span<const double> sample_times) {
  check_params(params);
  if (!(config.t_max > 0.0)) throw InvalidParameter("t_max must be positive");
  if (!(config.bracket_step > 0.0)) throw InvalidParameter("bracket_step must be positive");
  if (!(config.initial.norm() > 0.0)) throw InvalidParameter("initial state must be nonzero");
  for (std::size_t k = 1; k < sample_times.size(); ++k)
    if (sample_times[k] < sample_times[k - 1])
      throw InvalidParameter("sample times must be ascending");

  const NoJumpPropagator prop(params);
  Uniform uniform(config.seed);

  TrajectoryRecord rec;
  rec.t_max = config.t_max;
  rec.samples.reserve(sample_times.size());
  std::size_t next_sample = 0;

  StateVector psi = config.initial / config.initial.norm();
  Period period = std::norm(psi(2)) == 1.0 ? Period::Dark : Period::Bright;
  double period_start = 0.0;
  bool started_by_jump = false;
  double t = 0.0;

  auto close_period = [&](double end, bool by_jump) {
    Interval iv{period_start, end, started_by_jump && by_jump};
    (period == Period::Bright ? rec.bright : rec.dark).push_back(iv);
  };
  auto record_samples = [&](const StateVector& from, double until) {
    while (next_sample < sample_times.size() && sample_times[next_sample] < until) {
      const double s = sample_times[next_sample];
      if (s >= t) rec.samples.push_back(expectations(prop.apply(from, s - t), s));
      ++next_sample;
    }
  };
  auto norm_at = [&](double dt) { return prop.apply(psi, dt).squaredNorm(); };

  while (true) {
    const double remaining = config.t_max - t;
    const double r = uniform();
    double wait;
    if (psi.head<2>().squaredNorm() == 0.0) {
      // Pure |a>: the norm is exp(-gamma_a t).
      wait = -std::log(r) / params.gamma_a;
    } else if (norm_at(remaining) > r) {
      wait = std::numeric_limits<double>::infinity();
    } else {
      double lo = 0.0, hi = std::min(config.bracket_step, remaining);
      while (norm_at(hi) > r) {
        lo = hi;
        hi = std::min(2.0 * hi, remaining);
      }
      boost::uintmax_t iters = 200;
      const auto root = boost::math::tools::toms748_solve(
          [&](double x) { return norm_at(x) - r; }, lo, hi,
          boost::math::tools::eps_tolerance<double>(50), iters);
      wait = 0.5 * (root.first + root.second);
      if (iters >= 200) throw TrajectoryError("jump-time root finding did not converge");
    }

    if (!(wait < remaining)) {
      record_samples(psi, std::numeric_limits<double>::infinity());
      close_period(config.t_max, false);
      break;
    }

    record_samples(psi, t + wait);
    const StateVector pre = prop.apply(psi, wait);
    t += wait;
    if (!(pre.squaredNorm() > 0.0) || !std::isfinite(pre.squaredNorm()))
      throw TrajectoryError("state became unnormalizable");

    const double excited = std::norm(pre(1));
    const double strong = params.gamma * excited;
    const double shelve = params.gamma_d * excited;
    const double unshelve = params.gamma_a * std::norm(pre(2));
    const double pick = uniform() * (strong + shelve + unshelve);

    Channel channel;
    if (pick <= strong) channel = Channel::Strong;
    else if (pick <= strong + shelve) channel = Channel::Shelve;
    else channel = Channel::Unshelve;

    if (config.record_events) rec.events.push_back({t, channel});
    switch (channel) {
      case Channel::Strong:
        psi = StateVector(1.0, 0.0, 0.0);
        ++rec.photon_count;
        break;
      case Channel::Shelve:
        psi = StateVector(0.0, 0.0, 1.0);
        if (period == Period::Bright) {
          close_period(t, true);
          period = Period::Dark;
          period_start = t;
          started_by_jump = true;
        }
        break;
      case Channel::Unshelve:
        psi = StateVector(1.0, 0.0, 0.0);
        if (period == Period::Dark) {
          close_period(t, true);
          period = Period::Bright;
          period_start = t;
          started_by_jump = true;
        }
        break;
    }
  }
  rec.final_period = period;
  return rec;
}

JumpConfig trajectory_config(const JumpConfig& base, std::uint64_t index) {
  JumpConfig c = base;
  c.seed = splitmix64(base.seed ^ splitmix64(index));
  return c;
}

TelegraphStats telegraph_stats(std::span<const TrajectoryRecord> records) {
  auto summarize = [](const std::vector<double>& xs, double& mean, double& se) {
    if (xs.empty()) return;
    double sum = 0.0;
    for (double x : xs) sum += x;
    mean = sum / double(xs.size());
    if (xs.size() < 2) return;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    se = std::sqrt(ss / double(xs.size() - 1) / double(xs.size()));
  };
  std::vector<double> bright, dark;
  for (const auto& rec : records) {
    for (const auto& iv : rec.bright)
      if (iv.complete) bright.push_back(iv.length());
    for (const auto& iv : rec.dark)
      if (iv.complete) dark.push_back(iv.length());
  }
  TelegraphStats s;
  s.n_bright = bright.size();
  s.n_dark = dark.size();
  summarize(bright, s.mean_bright, s.se_bright);
  summarize(dark, s.mean_dark, s.se_dark);
  s.sufficient = !bright.empty() && !dark.empty();
  return s;
}

std::vector<double> dark_lengths(std::span<const TrajectoryRecord> records) {
  std::vector<double> out;
  for (const auto& rec : records)
    for (const auto& iv : rec.dark)
      if (iv.complete) out.push_back(iv.length());
  return out;
}

std::vector<TrajectoryRecord> run_ensemble(const AtomParams& params,
                                           const JumpConfig& config,
                                           std::size_t n,
                                           std::span<const double> sample_times,
                                           unsigned threads) {
  std::vector<TrajectoryRecord> out(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < n; k = next++)
      out[k] = simulate(params, trajectory_config(config, k), sample_times);
  };
  threads = std::max(1u, std::min<unsigned>(threads, unsigned(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    worker();
    return out;
  }
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker);
  return (pool.clear(), out);
}

EnsembleAverage ensemble_average(const AtomParams& params,
                                 const JumpConfig& config, std::size_t n,
                                 std::span<const double> times,
                                 unsigned threads) {
  JumpConfig c = config;
  c.record_events = false;
  if (!times.empty()) c.t_max = std::max(c.t_max, std::nextafter(times.back(), INFINITY));
  const auto records = run_ensemble(params, c, n, times, threads);

  EnsembleAverage avg;
  avg.n = n;
  avg.mean.resize(times.size());
  avg.sd_excited.assign(times.size(), 0.0);
  for (std::size_t k = 0; k < times.size(); ++k) avg.mean[k].time = times[k];
  for (const auto& rec : records)
    for (std::size_t k = 0; k < times.size(); ++k) avg.mean[k].s += rec.samples[k].s;
  for (auto& v : avg.mean) v.s /= double(n);
  if (n > 1) {
    for (const auto& rec : records)
      for (std::size_t k = 0; k < times.size(); ++k) {
        const double d = rec.samples[k].sigma_ee() - avg.mean[k].sigma_ee();
        avg.sd_excited[k] += d * d;
      }
    for (auto& v : avg.sd_excited) v = std::sqrt(v / double(n - 1));
  }
  return avg;
}

KsResult ks_exponential(std::span<const double> samples, double rate) {
  std::vector<double> xs(samples.begin(), samples.end());
  std::sort(xs.begin(), xs.end());
  const double n = double(xs.size());
  KsResult r;
  if (xs.empty()) return r;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double cdf = -std::expm1(-rate * xs[i]);
    r.statistic = std::max({r.statistic, double(i + 1) / n - cdf, cdf - double(i) / n});
  }
  // Asymptotic Kolmogorov distribution with the Stephens small-n correction.
  const double sqrt_n = std::sqrt(n);
  const double lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * r.statistic;
  if (lambda < 0.2) {
    r.p_value = 1.0;
    return r;
  }
  double q = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    q += (k % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  r.p_value = std::clamp(q, 0.0, 1.0);
  return r;
}

}  // namespace shelving

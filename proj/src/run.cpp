#include "shelving/run.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "shelving/spectra.hpp"

namespace shelving {

using nlohmann::json;
namespace fs = std::filesystem;

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) x = 0.0;  // drop the sign of zero
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::scientific, 11);
  return std::string(buf, res.ptr);
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string write_table(const std::string& dir, const Table& table, Format format) {
  const std::string file = table.name + (format == Format::Csv ? ".csv" : ".json");
  std::ofstream os(fs::path(dir) / file, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + (fs::path(dir) / file).string());
  if (format == Format::Csv) {
    for (std::size_t k = 0; k < table.columns.size(); ++k)
      os << (k ? "," : "") << table.columns[k];
    os << '\n';
    for (const auto& row : table.rows) {
      for (std::size_t k = 0; k < row.size(); ++k) {
        if (k) os << ',';
        if (const auto* d = std::get_if<double>(&row[k])) os << format_number(*d);
        else if (const auto* i = std::get_if<std::int64_t>(&row[k])) os << *i;
        else os << std::get<std::string>(row[k]);
      }
      os << '\n';
    }
  } else {
    json rows = json::array();
    for (const auto& row : table.rows) {
      json r = json::array();
      for (const auto& cell : row) std::visit([&](const auto& v) { r.push_back(v); }, cell);
      rows.push_back(std::move(r));
    }
    os << json{{"columns", table.columns}, {"rows", rows}}.dump() << '\n';
  }
  if (!os) throw std::runtime_error("write failed for " + file);
  return file;
}

namespace {

std::string fixed(double x, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

void add_check(RunResult& r, std::string name, double value, double tol) {
  r.checks.push_back({std::move(name), value, tol, value <= tol});
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t k = 0; k < n; ++k) g[k] = lo + (hi - lo) * double(k) / double(n - 1);
  return g;
}

std::vector<double> default_detunings(const AtomParams& p) {
  const double span = std::max(3.0, 1.5 * std::hypot(p.rabi, p.detuning) + 2.0);
  return uniform_grid(-span, span, 401);
}

Table surface_table(const std::string& name, const TdsSurface& s) {
  Table t{name, {"t", "D", "S"}, {}};
  for (std::size_t i = 0; i < s.times.size(); ++i)
    for (std::size_t d = 0; d < s.detunings.size(); ++d)
      t.rows.push_back({s.times[i], s.detunings[d], s.at(i, d)});
  return t;
}

void run_steady(const RunConfig& c, RunResult& r) {
  const SteadyState st = steady_state_closed_form(c.atom);
  Table t{"steady", {"quantity", "value"}, {}};
  t.rows = {{std::string("sigma_ge_re"), st.sigma_ge.real()},
            {std::string("sigma_ge_im"), st.sigma_ge.imag()},
            {std::string("sigma_eg_re"), st.sigma_eg.real()},
            {std::string("sigma_eg_im"), st.sigma_eg.imag()},
            {std::string("sigma_ee"), st.sigma_ee},
            {std::string("sigma_gg"), st.sigma_gg},
            {std::string("sigma_aa"), st.sigma_aa}};
  r.files.push_back(write_table(c.out, t, c.format));
  const BlochGenerator gen = build_generator(c.atom);
  const double residual = (gen.m * to_bloch(st).s + gen.b).cwiseAbs().maxCoeff();
  add_check(r, "steady_residual", residual, c.tol.identity);
  r.summary["steady"] = {{"sigma_ee", st.sigma_ee},
                         {"sigma_gg", st.sigma_gg},
                         {"sigma_aa", st.sigma_aa},
                         {"sigma_eg", {st.sigma_eg.real(), st.sigma_eg.imag()}}};
  r.lines.push_back("steady  s_ee = " + fixed(st.sigma_ee) + "  s_gg = " + fixed(st.sigma_gg) +
                    "  s_aa = " + fixed(st.sigma_aa) + "  |s_eg| = " + fixed(std::abs(st.sigma_eg)));
}

void run_evolve(const RunConfig& c, RunResult& r) {
  const std::vector<double> times = c.times ? *c.times : uniform_grid(0.0, 400.0, 801);
  const Propagator prop(build_generator(c.atom), c.tol.condition);
  const auto states = prop.diagonalizable()
                          ? evolve(prop, c.initial_state(), times)
                          : evolve_ode(prop.generator(), c.initial_state(), times, c.tol.ode);
  Table t{"evolve", {"t", "sigma_ge_re", "sigma_ge_im", "sigma_ee", "sigma_gg", "sigma_aa"}, {}};
  double worst = 0.0;
  for (const auto& s : states) {
    t.rows.push_back({s.time, s.sigma_ge().real(), s.sigma_ge().imag(), s.sigma_ee(),
                      s.sigma_gg(), s.sigma_aa()});
    for (double pop : {s.sigma_ee(), s.sigma_gg(), s.sigma_aa()})
      worst = std::max({worst, -pop, pop - 1.0});
  }
  r.files.push_back(write_table(c.out, t, c.format));
  add_check(r, "populations_in_unit_interval", worst, 1e-10);
  r.summary["evolve"] = {{"points", states.size()},
                         {"modal", prop.diagonalizable()},
                         {"final_sigma_ee", states.empty() ? 0.0 : states.back().sigma_ee()}};
  r.lines.push_back("evolve  " + std::to_string(states.size()) + " points, " +
                    (prop.diagonalizable() ? "modal propagator" : "ODE fallback"));
}

void run_spectrum(const RunConfig& c, RunResult& r) {
  const std::vector<double> omega = c.omega ? *c.omega : spectrum_grid(c.atom);
  const StationarySpectrum spec = incoherent_spectrum(c.atom, omega);
  Table t{"spectrum", {"omega", "S_inc"}, {}};
  for (std::size_t k = 0; k < omega.size(); ++k) t.rows.push_back({omega[k], spec.s_inc[k]});
  r.files.push_back(write_table(c.out, t, c.format));

  const SumRule rule = sum_rule(c.atom);
  add_check(r, "sum_rule", rule.relative_error(), c.tol.sum_rule);
  const LorentzianFit fit = fit_narrow_peak(c.atom);
  r.summary["spectrum"] = {{"coherent_intensity", spec.coherent_intensity},
                           {"incoherent_total", spec.incoherent_total},
                           {"sum_rule_integral", rule.integral},
                           {"narrow_peak_fit_width", fit.half_width}};
  r.lines.push_back("spectrum  I_coh = " + fixed(spec.coherent_intensity) +
                    "  incoherent total = " + fixed(spec.incoherent_total) +
                    "  sum rule = " + fixed(rule.integral));
  r.lines.push_back("spectrum  fitted narrow-peak half width = " + fixed(fit.half_width) +
                    "  (Gamma_np = " + fixed(narrow_peak_width(c.atom)) + ")");
}

void run_tds(const RunConfig& c, RunResult& r) {
  FilterParams filter = c.filter;
  if (filter.detunings.empty()) filter.detunings = default_detunings(c.atom);
  const std::vector<double> times =
      c.times ? *c.times : std::vector<double>{10.0, 20.0, 50.0, 100.0, 150.0};
  const BlochVector s0 = c.initial_state();
  const TdsSurface fast = tds_fast(c.atom, filter, s0, times);
  r.files.push_back(write_table(c.out, surface_table("tds", fast), c.format));

  json rows = json::array();
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double width = central_fwhm(fast, i);
    rows.push_back({{"t", times[i]},
                    {"max", fast.values.row(Eigen::Index(i)).maxCoeff()},
                    {"central_fwhm", width}});
    r.lines.push_back("tds  t = " + fixed(times[i]) + "  max S = " +
                      fixed(fast.values.row(Eigen::Index(i)).maxCoeff()) +
                      "  central FWHM = " + fixed(width));
  }
  r.summary["tds"] = {{"bandwidth", filter.bandwidth}, {"rows", rows}};

  if (c.oracle) {
    OracleOptions options;
    options.step = c.tol.oracle_step;
    const TdsSurface slow = tds_oracle(c.atom, filter, s0, times, options);
    r.files.push_back(write_table(c.out, surface_table("tds_oracle", slow), c.format));
    const double scale = fast.values.cwiseAbs().maxCoeff();
    const double diff = (fast.values - slow.values).cwiseAbs().maxCoeff() / scale;
    add_check(r, "tds_fast_vs_oracle", diff, c.tol.oracle);
    r.summary["tds"]["oracle_max_relative_difference"] = diff;
    r.lines.push_back("tds  fast vs oracle max relative difference = " + fixed(diff, 3));
  }
}

void run_trajectories(const RunConfig& c, RunResult& r) {
  if (c.initial != InitialKind::Ground)
    throw ConfigError("initial: trajectories start in the ground state");
  JumpConfig jc;
  jc.seed = c.seed;
  jc.t_max = c.trajectories.t_max;
  jc.bracket_step = c.trajectories.bracket_step;
  jc.record_events = c.trajectories.events;
  const std::vector<double> samples = c.times ? *c.times : std::vector<double>{};
  if (!samples.empty() && !(samples.back() < jc.t_max))
    throw ConfigError("times: sample times must lie below trajectories.t_max");
  const auto records = run_ensemble(c.atom, jc, c.trajectories.count, samples, c.threads);

  if (c.trajectories.events) {
    Table ev{"events", {"trajectory", "event_time", "channel"}, {}};
    for (std::size_t k = 0; k < records.size(); ++k)
      for (const auto& e : records[k].events)
        ev.rows.push_back({std::int64_t(k), e.time, std::string(channel_name(e.channel))});
    r.files.push_back(write_table(c.out, ev, c.format));
  }
  Table iv{"intervals", {"trajectory", "kind", "start", "end", "complete"}, {}};
  for (std::size_t k = 0; k < records.size(); ++k) {
    for (const auto& b : records[k].bright)
      iv.rows.push_back({std::int64_t(k), std::string("bright"), b.start, b.end, std::int64_t(b.complete)});
    for (const auto& d : records[k].dark)
      iv.rows.push_back({std::int64_t(k), std::string("dark"), d.start, d.end, std::int64_t(d.complete)});
  }
  r.files.push_back(write_table(c.out, iv, c.format));

  const TelegraphStats stats = telegraph_stats(records);
  const KsResult ks = ks_exponential(dark_lengths(records), c.atom.gamma_a);
  std::size_t photons = 0;
  for (const auto& rec : records) photons += rec.photon_count;
  r.summary["trajectories"] = {{"count", records.size()},
                               {"photons", photons},
                               {"mean_bright", stats.mean_bright},
                               {"se_bright", stats.se_bright},
                               {"n_bright", stats.n_bright},
                               {"mean_dark", stats.mean_dark},
                               {"se_dark", stats.se_dark},
                               {"n_dark", stats.n_dark},
                               {"sufficient", stats.sufficient},
                               {"ks_statistic", ks.statistic},
                               {"ks_p_value", ks.p_value}};
  if (!stats.sufficient)
    r.lines.push_back("trajectories  insufficient data: need a complete bright and dark interval");
  r.lines.push_back("trajectories  mean bright = " + fixed(stats.mean_bright) + " +- " +
                    fixed(stats.se_bright, 3) + " (n = " + std::to_string(stats.n_bright) + ")");
  r.lines.push_back("trajectories  mean dark = " + fixed(stats.mean_dark) + " +- " +
                    fixed(stats.se_dark, 3) + " (n = " + std::to_string(stats.n_dark) +
                    "), KS p = " + fixed(ks.p_value, 3));

  if (!samples.empty()) {
    const auto exact = evolve_robust(Propagator(build_generator(c.atom), c.tol.condition),
                                     BlochVector::ground(), samples);
    Table en{"ensemble", {"t", "sigma_ee_mc", "sigma_ee_dynamics", "binomial_se"}, {}};
    double worst = 0.0;
    for (std::size_t k = 0; k < samples.size(); ++k) {
      double mean = 0.0;
      for (const auto& rec : records) mean += rec.samples[k].sigma_ee();
      mean /= double(records.size());
      const double p = exact[k].sigma_ee();
      const double se = std::sqrt(p * (1.0 - p) / double(records.size()));
      en.rows.push_back({samples[k], mean, p, se});
      if (se > 0.0) worst = std::max(worst, std::abs(mean - p) / se);
    }
    r.files.push_back(write_table(c.out, en, c.format));
    r.summary["trajectories"]["max_deviation_in_se"] = worst;
    r.lines.push_back("trajectories  ensemble <s_ee> max deviation = " + fixed(worst, 3) +
                      " binomial SE");
  }
}

void run_times(const RunConfig& c, RunResult& r) {
  const TelegraphTimes tt = bright_dark_times(c.atom);
  const double exact = exact_mean_bright_time(c.atom);
  Table t{"times", {"quantity", "value"}, {}};
  t.rows = {{std::string("T_B"), tt.bright},
            {std::string("T_B_exact"), exact},
            {std::string("T_D"), tt.dark},
            {std::string("Gamma_np"), narrow_peak_width(c.atom)}};
  r.files.push_back(write_table(c.out, t, c.format));
  r.lines.push_back("times  gamma T_B = " + fixed(c.atom.gamma * tt.bright, 5) +
                    "  (exact renewal mean " + fixed(c.atom.gamma * exact, 5) + ")");
  r.lines.push_back("times  gamma T_D = " + fixed(c.atom.gamma * tt.dark, 5));
}

void run_check(const RunConfig& c, RunResult& r) {
  r.checks = invariant_checks(c);
  Table t{"check", {"name", "value", "tolerance", "pass"}, {}};
  for (const auto& k : r.checks)
    t.rows.push_back({k.name, k.value, k.tolerance, std::int64_t(k.pass)});
  r.files.push_back(write_table(c.out, t, c.format));
}

json canonical_inputs(const RunConfig& c) {
  json j = to_json(c);
  j.erase("out");
  j.erase("threads");
  return j;
}

std::string hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void finish(const RunConfig& c, RunResult& r, std::ostream& log, double seconds) {
  r.ok = true;
  json checks = json::array();
  for (const auto& k : r.checks) {
    r.ok = r.ok && k.pass;
    checks.push_back({{"name", k.name}, {"value", k.value}, {"tolerance", k.tolerance},
                      {"pass", k.pass}});
  }
  const json inputs = canonical_inputs(c);
  json index = {{"program", "shelving"},
                {"version", std::string(kVersion)},
                {"subcommand", c.subcommand},
                {"input_hash", hex(fnv1a(inputs.dump()))},
                {"config", to_json(c)},
                {"files", r.files},
                {"summary", r.summary},
                {"checks", checks},
                {"ok", r.ok}};
  std::ofstream os(fs::path(c.out) / "index.json", std::ios::binary);
  os << index.dump(2) << '\n';
  if (!os) throw std::runtime_error("cannot write index.json in " + c.out);

  const json& p = r.summary["parameters"];
  log << "== " << c.subcommand << " -> " << c.out << "\n";
  log << "  Omega = " << fixed(c.atom.rabi) << "  Delta = " << fixed(c.atom.detuning)
      << "  gamma_d = " << fixed(c.atom.gamma_d) << "  gamma_a = " << fixed(c.atom.gamma_a)
      << "\n";
  log << "  gamma_+ = " << fixed(p["gamma_plus"].get<double>()) << "  gamma_- = " << fixed(p["gamma_minus"].get<double>())
      << "  q = " << fixed(p["q"].get<double>()) << (p["shelving_regime"].get<bool>() ? "" : "  (outside shelving regime)")
      << "\n";
  log << "  T_B = " << fixed(p["T_B"].get<double>()) << "  T_D = " << fixed(p["T_D"].get<double>())
      << "  Gamma_np = " << fixed(p["Gamma_np"].get<double>()) << "  I_np = " << fixed(p["I_np"].get<double>()) << "\n";
  for (const auto& line : r.lines) log << "  " << line << "\n";
  for (const auto& k : r.checks)
    log << "  check " << k.name << ": " << (k.pass ? "pass" : "FAIL") << "  "
        << fixed(k.value, 3) << " (tol " << fixed(k.tolerance, 3) << ")\n";
  log << "  elapsed " << fixed(seconds, 3) << " s\n";
}

void set_axis(RunConfig& c, const std::string& axis, double value) {
  if (axis == "rabi") c.atom.rabi = value;
  else if (axis == "detuning") c.atom.detuning = value;
  else if (axis == "gamma") c.atom.gamma = value;
  else if (axis == "gamma_d") c.atom.gamma_d = value;
  else if (axis == "gamma_a") c.atom.gamma_a = value;
  else if (axis == "filter.bandwidth") c.filter.bandwidth = value;
  else throw ConfigError("sweep.axis: invalid axis name '" + axis + "'");
}

}  // namespace

json parameter_summary(const AtomParams& p) {
  const TelegraphTimes tt = bright_dark_times(p);
  const NarrowPeakIntensity np = narrow_peak_intensity(p);
  return {{"gamma_plus", p.gamma_plus()},
          {"gamma_minus", p.gamma_minus()},
          {"q", p.q()},
          {"shelving_regime", p.shelving_regime()},
          {"T_B", tt.bright},
          {"T_B_exact", exact_mean_bright_time(p)},
          {"T_D", tt.dark},
          {"Gamma_np", narrow_peak_width(p)},
          {"I_np", np.difference},
          {"I_coh", coherent_intensity(p)}};
}

RunResult run(const RunConfig& c, std::ostream& log) {
  if (c.subcommand == "sweep") return sweep(c, log);
  const auto start = std::chrono::steady_clock::now();
  fs::create_directories(c.out);
  RunResult r;
  r.summary["parameters"] = parameter_summary(c.atom);
  if (c.subcommand == "steady") run_steady(c, r);
  else if (c.subcommand == "evolve") run_evolve(c, r);
  else if (c.subcommand == "spectrum") run_spectrum(c, r);
  else if (c.subcommand == "tds") run_tds(c, r);
  else if (c.subcommand == "trajectories") run_trajectories(c, r);
  else if (c.subcommand == "times") run_times(c, r);
  else if (c.subcommand == "check") run_check(c, r);
  else throw ConfigError("subcommand: unknown subcommand '" + c.subcommand + "'");
  finish(c, r, log,
         std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  return r;
}

RunResult sweep(const RunConfig& c, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  fs::create_directories(c.out);
  RunResult r;
  r.summary["parameters"] = parameter_summary(c.atom);
  std::string stem = c.sweep.axis;
  std::replace(stem.begin(), stem.end(), '.', '_');

  Table t{"sweep", {c.sweep.axis, "dir", "T_B", "T_B_exact", "T_D", "Gamma_np", "I_np", "I_coh"}, {}};
  const bool tds = c.sweep.subcommand == "tds";
  if (tds) t.columns.push_back("central_fwhm");
  json points = json::array();
  bool ok = true;
  for (std::size_t k = 0; k < c.sweep.values.size(); ++k) {
    RunConfig sub = c;
    sub.subcommand = c.sweep.subcommand;
    set_axis(sub, c.sweep.axis, c.sweep.values[k]);
    check_params(sub.atom);
    char name[64];
    std::snprintf(name, sizeof name, "%s_%03zu", stem.c_str(), k);
    sub.out = (fs::path(c.out) / name).string();
    const RunResult point = run(sub, log);
    ok = ok && point.ok;

    const json& p = point.summary["parameters"];
    std::vector<Cell> row = {c.sweep.values[k], std::string(name), p["T_B"].get<double>(),
                             p["T_B_exact"].get<double>(), p["T_D"].get<double>(),
                             p["Gamma_np"].get<double>(), p["I_np"].get<double>(),
                             p["I_coh"].get<double>()};
    if (tds) {
      const json& last = point.summary["tds"]["rows"].back()["central_fwhm"];
      row.push_back(last.is_number() ? last.get<double>() : std::nan(""));
    }
    t.rows.push_back(std::move(row));
    for (const auto& f : point.files) r.files.push_back(std::string(name) + "/" + f);
    points.push_back({{"value", c.sweep.values[k]},
                      {"dir", name},
                      {"input_hash", hex(fnv1a(canonical_inputs(sub).dump()))},
                      {"ok", point.ok}});
  }
  r.files.push_back(write_table(c.out, t, c.format));
  r.summary["sweep"] = {{"axis", c.sweep.axis}, {"subcommand", c.sweep.subcommand},
                        {"points", points}};
  r.checks.push_back({"sweep_points_ok", ok ? 0.0 : 1.0, 0.0, ok});
  r.lines.push_back("sweep  " + std::to_string(c.sweep.values.size()) + " points over " +
                    c.sweep.axis);
  finish(c, r, log,
         std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  return r;
}

std::vector<CheckResult> invariant_checks(const RunConfig& c) {
  RunResult r;
  const AtomParams& p = c.atom;
  const BlochGenerator gen = build_generator(p);
  const Propagator prop(gen, c.tol.condition);
  const SteadyState st = steady_state_closed_form(p);

  // Long-time evolution reaches the closed-form steady state.
  {
    const std::vector<double> t{1e4};
    const auto s = evolve_robust(prop, BlochVector::ground(), t);
    add_check(r, "evolve_to_steady_state",
              (s[0].s - to_bloch(st).s).cwiseAbs().maxCoeff(), c.tol.steady);
  }
  // Modal propagator against adaptive integration.
  if (prop.diagonalizable()) {
    const auto times = uniform_grid(0.0, 50.0, 101);
    const auto a = evolve(prop, c.initial_state(), times);
    const auto b = evolve_ode(gen, c.initial_state(), times, c.tol.ode);
    double worst = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k)
      worst = std::max(worst, (a[k].s - b[k].s).cwiseAbs().maxCoeff());
    add_check(r, "propagator_vs_ode", worst, 1e-8);
  }
  {
    const NarrowPeakIntensity np = narrow_peak_intensity(p);
    add_check(r, "narrow_peak_intensity_identity",
              std::abs(np.closed_form - np.difference) / std::max(std::abs(np.difference), 1e-300),
              c.tol.identity);
    const TelegraphTimes tt = bright_dark_times(p);
    const double width = narrow_peak_width(p);
    add_check(r, "narrow_peak_width_identity",
              std::abs(width - (1.0 / tt.bright + 1.0 / tt.dark)) / width, c.tol.identity);
  }
  add_check(r, "sum_rule", sum_rule(p).relative_error(), c.tol.sum_rule);
  {
    FilterParams f{c.filter.bandwidth, {-p.rabi, 0.0, p.rabi}};
    if (p.rabi == 0.0) f.detunings = {-1.0, 0.0, 1.0};
    const std::vector<double> times{0.0, 10.0};
    const TdsSurface fast = tds_fast(p, f, c.initial_state(), times);
    OracleOptions o;
    o.step = c.tol.oracle_step;
    const TdsSurface slow = tds_oracle(p, f, c.initial_state(), times, o);
    const double scale = fast.values.cwiseAbs().maxCoeff();
    add_check(r, "tds_zero_at_t0", fast.values.row(0).cwiseAbs().maxCoeff(), 0.0);
    add_check(r, "tds_fast_vs_oracle",
              scale > 0.0 ? (fast.values - slow.values).cwiseAbs().maxCoeff() / scale : 0.0,
              c.tol.oracle);
  }
  {
    JumpConfig jc;
    jc.seed = c.seed;
    jc.t_max = 2000.0;
    const auto a = simulate(p, jc);
    const auto b = simulate(p, jc);
    bool same = a.events.size() == b.events.size();
    for (std::size_t k = 0; same && k < a.events.size(); ++k)
      same = a.events[k].time == b.events[k].time && a.events[k].channel == b.events[k].channel;
    add_check(r, "trajectory_seed_determinism", same ? 0.0 : 1.0, 0.0);

    double gap = 0.0;
    std::vector<Interval> all = a.bright;
    all.insert(all.end(), a.dark.begin(), a.dark.end());
    std::sort(all.begin(), all.end(), [](const Interval& x, const Interval& y) { return x.start < y.start; });
    gap = std::abs(all.front().start) + std::abs(all.back().end - jc.t_max);
    for (std::size_t k = 1; k < all.size(); ++k) gap += std::abs(all[k].start - all[k - 1].end);
    add_check(r, "intervals_tile_record", gap, 0.0);
  }
  return r.checks;
}

}  // namespace shelving

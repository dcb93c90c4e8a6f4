#include "shelving/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace shelving {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) fail(path.empty() ? "<root>" : path, "expected an object");
  for (const auto& item : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
      throw ConfigError("unknown key '" + join(path, item.key()) + "'");
  }
}

double number(const json& obj, const std::string& key, const std::string& path,
              double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) fail(join(path, key), "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(join(path, key), "must be finite");
  return x;
}

double positive(const json& obj, const std::string& key, const std::string& path,
                double fallback) {
  const double x = number(obj, key, path, fallback);
  if (!(x > 0.0)) fail(join(path, key), "must be positive");
  return x;
}

std::uint64_t unsigned_integer(const json& obj, const std::string& key,
                               const std::string& path, std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
    fail(join(path, key), "expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

bool boolean(const json& obj, const std::string& key, const std::string& path,
             bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) fail(join(path, key), "expected true or false");
  return v.get<bool>();
}

std::string string(const json& obj, const std::string& key, const std::string& path,
                   const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) fail(join(path, key), "expected a string");
  return v.get<std::string>();
}

template <typename Range>
bool member(const Range& range, std::string_view value) {
  return std::find(std::begin(range), std::end(range), value) != std::end(range);
}

// Explicit list, {min, max, step} or {min, max, points}.
bool is_empty_list(const json& v) { return v.is_array() && v.empty(); }

std::vector<double> grid(const json& v, const std::string& path) {
  std::vector<double> out;
  if (v.is_array()) {
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (!v[k].is_number()) fail(path + "[" + std::to_string(k) + "]", "expected a number");
      out.push_back(v[k].get<double>());
    }
  } else if (v.is_object()) {
    check_keys(v, path, {"min", "max", "step", "points"});
    if (!v.contains("min") || !v.contains("max")) fail(path, "grid needs min and max");
    const double lo = number(v, "min", path, 0.0);
    const double hi = number(v, "max", path, 0.0);
    if (!(hi >= lo)) fail(path, "max must not be below min");
    if (v.contains("step") == v.contains("points"))
      fail(path, "grid needs exactly one of step or points");
    if (v.contains("step")) {
      const double step = positive(v, "step", path, 1.0);
      const double span = (hi - lo) / step;
      const auto n = std::size_t(std::floor(span + 1e-9));
      if (n > 10'000'000) fail(path, "grid too large");
      for (std::size_t k = 0; k <= n; ++k) out.push_back(lo + double(k) * step);
    } else {
      const std::uint64_t n = unsigned_integer(v, "points", path, 2);
      if (n < 1 || n > 10'000'000) fail(join(path, "points"), "out of range");
      if (n == 1) out.push_back(lo);
      for (std::uint64_t k = 0; n > 1 && k < n; ++k)
        out.push_back(lo + (hi - lo) * double(k) / double(n - 1));
    }
  } else {
    fail(path, "expected a list or {min, max, step|points}");
  }
  for (double x : out)
    if (!std::isfinite(x)) fail(path, "values must be finite");
  if (out.empty()) fail(path, "grid is empty");
  return out;
}

void require_ascending(const std::vector<double>& xs, const std::string& path,
                       bool strict) {
  for (std::size_t k = 1; k < xs.size(); ++k)
    if (strict ? !(xs[k] > xs[k - 1]) : !(xs[k] >= xs[k - 1]))
      fail(path, strict ? "must be strictly ascending" : "must be ascending");
}

Complex complex_entry(const json& v, const std::string& path) {
  if (v.is_number()) return v.get<double>();
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  fail(path, "expected a number or [re, im]");
}

}  // namespace

BlochVector RunConfig::initial_state() const {
  switch (initial) {
    case InitialKind::Ground: return BlochVector::ground();
    case InitialKind::Steady: return to_bloch(steady_state_closed_form(atom));
    case InitialKind::Custom: {
      BlochVector v;
      v.s = initial_custom;
      return v;
    }
  }
  return BlochVector::ground();
}

std::vector<std::string> config_key_paths() {
  std::vector<std::string> keys = {
      "rabi", "detuning", "gamma", "gamma_d", "gamma_a",
      "filter.bandwidth", "filter.detunings", "times", "omega", "initial",
      "trajectories.count", "trajectories.t_max", "trajectories.bracket_step",
      "trajectories.events", "sweep.axis", "sweep.values", "sweep.subcommand"};
  for (const char* t : {"steady", "ode", "condition", "identity", "sum_rule",
                        "oracle", "oracle_step"})
    keys.push_back(std::string("tol.") + t);
  return keys;
}

RunConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return parse_config(doc);
}

RunConfig parse_config(const json& doc) {
  check_keys(doc, "",
             {"subcommand", "rabi", "detuning", "gamma", "gamma_d", "gamma_a",
              "filter", "times", "omega", "initial", "seed", "out", "format",
              "oracle", "threads", "tol", "trajectories", "sweep"});
  RunConfig c;

  c.subcommand = string(doc, "subcommand", "", c.subcommand);
  if (!member(kSubcommands, c.subcommand))
    fail("subcommand", "unknown subcommand '" + c.subcommand + "'");

  c.atom.rabi = number(doc, "rabi", "", c.atom.rabi);
  c.atom.detuning = number(doc, "detuning", "", c.atom.detuning);
  c.atom.gamma = number(doc, "gamma", "", c.atom.gamma);
  c.atom.gamma_d = number(doc, "gamma_d", "", c.atom.gamma_d);
  c.atom.gamma_a = number(doc, "gamma_a", "", c.atom.gamma_a);
  check_params(c.atom);

  if (doc.contains("filter")) {
    const json& f = doc.at("filter");
    check_keys(f, "filter", {"bandwidth", "detunings"});
    c.filter.bandwidth = positive(f, "bandwidth", "filter", c.filter.bandwidth);
    // An empty list means "use the default grid", as written by to_json().
    if (f.contains("detunings") && !is_empty_list(f.at("detunings"))) {
      c.filter.detunings = grid(f.at("detunings"), "filter.detunings");
      require_ascending(c.filter.detunings, "filter.detunings", true);
    }
  }
  if (doc.contains("times")) {
    c.times = grid(doc.at("times"), "times");
    require_ascending(*c.times, "times", false);
    if (c.times->front() < 0.0) fail("times", "must be nonnegative");
  }
  if (doc.contains("omega")) {
    c.omega = grid(doc.at("omega"), "omega");
    require_ascending(*c.omega, "omega", false);
  }

  if (doc.contains("initial")) {
    const json& v = doc.at("initial");
    if (v.is_string()) {
      const auto s = v.get<std::string>();
      if (s == "ground") c.initial = InitialKind::Ground;
      else if (s == "steady") c.initial = InitialKind::Steady;
      else fail("initial", "expected ground, steady or a 4-vector");
    } else if (v.is_array() && v.size() == 4) {
      c.initial = InitialKind::Custom;
      for (std::size_t k = 0; k < 4; ++k)
        c.initial_custom(Eigen::Index(k)) =
            complex_entry(v[k], "initial[" + std::to_string(k) + "]");
      const Vector4c& s = c.initial_custom;
      const double ee = s(2).real(), gg = s(3).real();
      if (std::abs(s(2).imag()) > 1e-12 || std::abs(s(3).imag()) > 1e-12)
        fail("initial", "populations must be real");
      if (std::abs(s(1) - std::conj(s(0))) > 1e-12)
        fail("initial", "s_eg must be the conjugate of s_ge");
      if (ee < 0.0 || gg < 0.0 || ee + gg > 1.0 + 1e-12)
        fail("initial", "populations must lie in [0, 1] and sum to at most 1");
      if (std::norm(s(0)) > ee * gg + 1e-12) fail("initial", "coherence exceeds sqrt(s_ee s_gg)");
    } else {
      fail("initial", "expected ground, steady or a 4-vector");
    }
  }

  c.seed = unsigned_integer(doc, "seed", "", c.seed);
  c.out = string(doc, "out", "", c.out);
  if (c.out.empty()) fail("out", "must not be empty");
  const std::string format = string(doc, "format", "", "csv");
  if (format == "csv") c.format = Format::Csv;
  else if (format == "json") c.format = Format::Json;
  else fail("format", "expected csv or json");
  c.oracle = boolean(doc, "oracle", "", c.oracle);
  const std::uint64_t threads = unsigned_integer(doc, "threads", "", c.threads);
  if (threads < 1 || threads > 1024) fail("threads", "must be between 1 and 1024");
  c.threads = unsigned(threads);

  if (doc.contains("tol")) {
    const json& t = doc.at("tol");
    check_keys(t, "tol", {"steady", "ode", "condition", "identity", "sum_rule",
                          "oracle", "oracle_step"});
    c.tol.steady = positive(t, "steady", "tol", c.tol.steady);
    c.tol.ode = positive(t, "ode", "tol", c.tol.ode);
    c.tol.condition = positive(t, "condition", "tol", c.tol.condition);
    c.tol.identity = positive(t, "identity", "tol", c.tol.identity);
    c.tol.sum_rule = positive(t, "sum_rule", "tol", c.tol.sum_rule);
    c.tol.oracle = positive(t, "oracle", "tol", c.tol.oracle);
    c.tol.oracle_step = positive(t, "oracle_step", "tol", c.tol.oracle_step);
  }

  if (doc.contains("trajectories")) {
    const json& t = doc.at("trajectories");
    check_keys(t, "trajectories", {"count", "t_max", "bracket_step", "events"});
    c.trajectories.count = unsigned_integer(t, "count", "trajectories", c.trajectories.count);
    if (c.trajectories.count < 1) fail("trajectories.count", "must be at least 1");
    c.trajectories.t_max = positive(t, "t_max", "trajectories", c.trajectories.t_max);
    c.trajectories.bracket_step =
        positive(t, "bracket_step", "trajectories", c.trajectories.bracket_step);
    c.trajectories.events = boolean(t, "events", "trajectories", c.trajectories.events);
  }

  if (doc.contains("sweep")) {
    const json& s = doc.at("sweep");
    check_keys(s, "sweep", {"axis", "values", "subcommand"});
    c.sweep.axis = string(s, "axis", "sweep", "");
    if (s.contains("values") && !is_empty_list(s.at("values"))) c.sweep.values = grid(s.at("values"), "sweep.values");
    c.sweep.subcommand = string(s, "subcommand", "sweep", c.sweep.subcommand);
  }
  if (c.subcommand == "sweep") {
    if (!member(kSweepAxes, c.sweep.axis))
      fail("sweep.axis", "invalid axis name '" + c.sweep.axis + "'");
    if (c.sweep.values.empty()) fail("sweep.values", "no values given");
    if (!member(kSubcommands, c.sweep.subcommand) || c.sweep.subcommand == "sweep" ||
        c.sweep.subcommand == "check")
      fail("sweep.subcommand", "cannot sweep '" + c.sweep.subcommand + "'");
  }
  return c;
}

void apply_override(json& doc, const std::string& path, const std::string& value) {
  if (!doc.is_object()) throw ConfigError("config root must be an object");
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = path.find('.', start);
    const std::string key = path.substr(start, dot - start);
    if (key.empty()) throw ConfigError("bad key path '" + path + "'");
    if (dot == std::string::npos) {
      static const std::set<std::string> strings = {"out", "format", "subcommand",
                                                    "sweep.axis", "sweep.subcommand"};
      json parsed = json::parse(value, nullptr, false);
      (*node)[key] = (strings.count(path) || parsed.is_discarded()) ? json(value) : parsed;
      return;
    }
    json& child = (*node)[key];
    if (child.is_null()) child = json::object();
    if (!child.is_object()) throw ConfigError(path.substr(0, dot) + ": expected an object");
    node = &child;
    start = dot + 1;
  }
}

json to_json(const RunConfig& c) {
  json j;
  j["subcommand"] = c.subcommand;
  j["rabi"] = c.atom.rabi;
  j["detuning"] = c.atom.detuning;
  j["gamma"] = c.atom.gamma;
  j["gamma_d"] = c.atom.gamma_d;
  j["gamma_a"] = c.atom.gamma_a;
  j["filter"] = {{"bandwidth", c.filter.bandwidth}, {"detunings", c.filter.detunings}};
  if (c.times) j["times"] = *c.times;
  if (c.omega) j["omega"] = *c.omega;
  switch (c.initial) {
    case InitialKind::Ground: j["initial"] = "ground"; break;
    case InitialKind::Steady: j["initial"] = "steady"; break;
    case InitialKind::Custom: {
      json v = json::array();
      for (Eigen::Index k = 0; k < 4; ++k)
        v.push_back({c.initial_custom(k).real(), c.initial_custom(k).imag()});
      j["initial"] = v;
    }
  }
  j["seed"] = c.seed;
  j["out"] = c.out;
  j["format"] = c.format == Format::Csv ? "csv" : "json";
  j["oracle"] = c.oracle;
  j["threads"] = c.threads;
  j["tol"] = {{"steady", c.tol.steady},       {"ode", c.tol.ode},
              {"condition", c.tol.condition}, {"identity", c.tol.identity},
              {"sum_rule", c.tol.sum_rule},   {"oracle", c.tol.oracle},
              {"oracle_step", c.tol.oracle_step}};
  j["trajectories"] = {{"count", c.trajectories.count},
                       {"t_max", c.trajectories.t_max},
                       {"bracket_step", c.trajectories.bracket_step},
                       {"events", c.trajectories.events}};
  j["sweep"] = {{"axis", c.sweep.axis},
                {"values", c.sweep.values},
                {"subcommand", c.sweep.subcommand}};
  return j;
}

}  // namespace shelving

#include <doctest.h>

#include <string>

#include "shelving/config.hpp"

using namespace shelving;
using nlohmann::json;

namespace {

std::string error_of(std::string_view text) {
  try {
    parse_config(text);
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("empty document gives the defaults") {
  const RunConfig c = parse_config("{}");
  CHECK(c.subcommand == "steady");
  CHECK(c.atom.rabi == moderate_drive().rabi);
  CHECK(c.atom.detuning == 0.0);
  CHECK(c.atom.gamma == 1.0);
  CHECK(c.atom.gamma_d == 0.05);
  CHECK(c.atom.gamma_a == 0.015);
  CHECK(c.filter.bandwidth == 0.1);
  CHECK_FALSE(c.times.has_value());
  CHECK(c.initial == InitialKind::Ground);
  CHECK(c.seed == 20181);
  CHECK(c.format == Format::Csv);
  CHECK(c.threads == 1);
  CHECK(c.trajectories.count == 100);
}

TEST_CASE("parameter violations name the parameter") {
  CHECK(error_of(R"({"gamma_a": 0})").find("gamma_a must be positive") != std::string::npos);
  CHECK(error_of(R"({"gamma_d": -1})").find("gamma_d") != std::string::npos);
  CHECK(error_of(R"({"rabi": "big"})").find("rabi") != std::string::npos);
  CHECK_THROWS_AS(parse_config(R"({"gamma_a": 0})"), InvalidParameter);
}

TEST_CASE("unknown keys are rejected with their path") {
  CHECK(error_of(R"({"omega_2": 1})") == "unknown key 'omega_2'");
  CHECK(error_of(R"({"filter": {"width": 1}})") == "unknown key 'filter.width'");
  CHECK(error_of(R"({"trajectories": {"n": 3}})") == "unknown key 'trajectories.n'");
  CHECK_THROWS_AS(parse_config(R"({"omega_2": 1})"), ConfigError);
}

TEST_CASE("grid forms") {
  const RunConfig a = parse_config(R"({"times": [0, 1.5, 3]})");
  CHECK(*a.times == std::vector<double>{0.0, 1.5, 3.0});
  const RunConfig b = parse_config(R"({"times": {"min": 0, "max": 1, "step": 0.25}})");
  CHECK(b.times->size() == 5);
  CHECK(b.times->back() == doctest::Approx(1.0));
  const RunConfig d = parse_config(R"({"filter": {"detunings": {"min": -1, "max": 1, "points": 3}}})");
  CHECK(d.filter.detunings == std::vector<double>{-1.0, 0.0, 1.0});

  CHECK(error_of(R"({"times": [2, 1]})").rfind("times", 0) == 0);
  CHECK(error_of(R"({"times": [-1, 1]})").rfind("times", 0) == 0);
  CHECK(error_of(R"({"filter": {"detunings": [0, 0]}})").rfind("filter.detunings", 0) == 0);
  CHECK(error_of(R"({"times": {"min": 0, "max": 1}})").rfind("times", 0) == 0);
  CHECK(error_of(R"({"times": {"min": 0, "max": 1, "step": -1}})").rfind("times", 0) == 0);
}

TEST_CASE("initial state") {
  CHECK(parse_config(R"({"initial": "steady"})").initial == InitialKind::Steady);
  const RunConfig c = parse_config(R"({"initial": [[0.1, 0.2], [0.1, -0.2], 0.4, 0.5]})");
  CHECK(c.initial == InitialKind::Custom);
  CHECK(c.initial_state().sigma_ee() == doctest::Approx(0.4));
  CHECK(error_of(R"({"initial": [0, 0, 0.7, 0.7]})").rfind("initial", 0) == 0);
  CHECK(error_of(R"({"initial": [0.6, 0.6, 0.5, 0.5]})").rfind("initial", 0) == 0);
  CHECK(error_of(R"({"initial": [[0, 0.1], [0, 0.1], 0.5, 0.5]})").rfind("initial", 0) == 0);
  CHECK(error_of(R"({"initial": "excited"})").rfind("initial", 0) == 0);
}

TEST_CASE("other fields") {
  CHECK(error_of(R"({"format": "xml"})").rfind("format", 0) == 0);
  CHECK(error_of(R"({"threads": 0})").rfind("threads", 0) == 0);
  CHECK(error_of(R"({"subcommand": "plot"})").rfind("subcommand", 0) == 0);
  CHECK(parse_config(R"({"format": "json"})").format == Format::Json);

  // Sweep axis is only validated for sweeps.
  CHECK_NOTHROW(parse_config(R"({"sweep": {"axis": "colour"}})"));
  CHECK(error_of(R"({"subcommand": "sweep", "sweep": {"axis": "colour", "values": [1]}})")
            .find("invalid axis name") != std::string::npos);
  CHECK_NOTHROW(parse_config(R"({"subcommand": "sweep", "sweep": {"axis": "filter.bandwidth", "values": [0.1]}})"));
}

TEST_CASE("malformed input") {
  CHECK_THROWS_AS(parse_config("{"), ConfigError);
  CHECK_THROWS_AS(parse_config("[1, 2]"), ConfigError);
}

TEST_CASE("overrides") {
  json doc = json::object();
  apply_override(doc, "rabi", "3.5");
  apply_override(doc, "filter.bandwidth", "0.05");
  apply_override(doc, "out", "123");
  apply_override(doc, "times", "[1, 2]");
  apply_override(doc, "initial", "steady");
  CHECK(doc["rabi"] == 3.5);
  CHECK(doc["filter"]["bandwidth"] == 0.05);
  CHECK(doc["out"] == "123");
  CHECK(doc["initial"] == "steady");
  const RunConfig c = parse_config(doc);
  CHECK(c.atom.rabi == 3.5);
  CHECK(c.filter.bandwidth == 0.05);
  CHECK(*c.times == std::vector<double>{1.0, 2.0});

  // Override paths are well formed.
  for (const auto& path : config_key_paths()) CHECK(path.find("..") == std::string::npos);
}

TEST_CASE("canonical form round-trips") {
  const RunConfig c = parse_config(
      R"({"subcommand": "tds", "rabi": 3.5, "detuning": 1.5, "times": [10, 20],
          "filter": {"bandwidth": 0.2, "detunings": [-1, 0, 1]}, "seed": 7,
          "initial": [[0.1, 0.2], [0.1, -0.2], 0.4, 0.5], "trajectories": {"count": 3}})");
  const json j = to_json(c);
  const RunConfig d = parse_config(j);
  CHECK(to_json(d) == j);
  CHECK(d.atom.detuning == 1.5);
  CHECK(d.trajectories.count == 3);
  CHECK((d.initial_custom - c.initial_custom).norm() == 0.0);

  const json defaults = to_json(parse_config("{}"));
  CHECK(to_json(parse_config(defaults)) == defaults);
}

}  // TEST_SUITE

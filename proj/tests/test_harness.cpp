#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sips/errors.hpp"
#include "sips/harness.hpp"

using namespace sips;

namespace {

Trajectory constant(int n, double infected, double patched, int points = 11, double horizon = 10.0) {
  Trajectory t;
  t.resize(n, static_cast<std::size_t>(points));
  t.times = uniform_grid(horizon, points);
  t.infected.setConstant(infected);
  t.patched.setConstant(patched);
  return t;
}

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.topology.n = 8;
  cfg.topology.attach = 2;
  cfg.count = 2;
  cfg.horizon = 5.0;
  cfg.paths = 200;
  cfg.grid = 21;
  cfg.threads = 2;
  return cfg;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("deviation metrics") {
  const auto a = constant(3, 0.2, 0.1);
  auto d = deviation(a, a);
  CHECK(d.sup_infected == 0.0);
  CHECK(d.sup_patched == 0.0);
  CHECK(d.l2_infected == 0.0);
  CHECK(d.l2_patched == 0.0);

  d = deviation(a, constant(3, 0.3, 0.1));
  CHECK(d.sup_infected == doctest::Approx(0.1));
  CHECK(d.l2_infected == doctest::Approx(0.1));
  CHECK(d.sup_patched == 0.0);

  // Same function sampled two ways on a 200-point grid over [0, 10].
  Trajectory e1, e2;
  e1.resize(1, 200);
  e2.resize(1, 200);
  e1.times = e2.times = uniform_grid(10.0, 200);
  for (int k = 0; k < 200; ++k) {
    e1.infected(0, k) = std::exp(-e1.times[k]);
    e2.infected(0, k) = 1.0 / std::exp(e2.times[k]);
  }
  CHECK(deviation(e1, e2).sup_infected < 1e-12);

  // A spike at one grid point: the RMS is weighted by the trapezoid rule.
  auto spiked = a;
  spiked.patched(0, 5) += 0.3;  // population mean moves by 0.1 at t = 5
  d = deviation(a, spiked);
  CHECK(d.sup_patched == doctest::Approx(0.1));
  CHECK(d.l2_patched == doctest::Approx(std::sqrt(0.01 * 1.0 / 10.0)));

  CHECK_THROWS_AS(deviation(a, constant(3, 0.2, 0.1, 12)), std::invalid_argument);
  CHECK_THROWS_AS(deviation(a, constant(3, 0.2, 0.1, 11, 9.0)), std::invalid_argument);
}

TEST_CASE("collection labels") {
  for (auto c : {Collection::extinction, Collection::infected, Collection::patched, Collection::mixed,
                 Collection::neither})
    CHECK(parse_collection(to_string(c)) == c);
  CHECK(collection_of(Regime::susceptible_attractor) == Collection::extinction);
  CHECK(collection_of(Regime::infected_attractor) == Collection::infected);
  CHECK(collection_of(Regime::patched_attractor) == Collection::patched);
  CHECK(collection_of(Regime::mixed_attractor) == Collection::mixed);
  CHECK(collection_of(Regime::unclassified) == Collection::neither);
}

TEST_CASE("config documents") {
  const auto cfg = config_from_json_text(R"({
    "topology": {"kind": "small-world", "n": 30, "k": 4, "rewire_p": 0.2, "seed": 5},
    "rates": {"beta": [0.1, 0.3]},
    "model": {"family": "exp_saturating", "saturation": 2.0},
    "sweep": {"count": 7, "seed": 11},
    "simulation": {"T": 20, "paths": 500, "grid": 101}
  })");
  CHECK(cfg.topology.kind == "small-world");
  CHECK(cfg.topology.n == 30);
  CHECK(cfg.ranges.beta.max == 0.3);
  CHECK(cfg.ranges.gamma.min == 0.5);
  CHECK(cfg.model.family == RateFamily::exp_saturating);
  CHECK(cfg.count == 7);
  CHECK(cfg.horizon == 20.0);
  CHECK(cfg.grid == 101);

  const auto again = config_from_json_text(config_to_json_text(cfg));
  CHECK(config_to_json_text(again) == config_to_json_text(cfg));

  CHECK_THROWS_AS(config_from_json_text(R"({"sweep": {"cuont": 3}})"), ParseError);
  CHECK_THROWS_AS(config_from_json_text(R"({"sweep": {"count": 0}})"), ParseError);
  CHECK_THROWS_AS(config_from_json_text(R"({"simulation": {"T": -1}})"), ParseError);
  CHECK_THROWS_AS(config_from_json_text(R"({"rates": {"gamma": [0, 1]}})"), ParseError);
  CHECK_THROWS_AS(config_from_json_text(R"({"topology": {"kind": "lattice"}})"), ParseError);
  CHECK_THROWS_AS(config_from_json_text(R"({"topology": {"n": "ten"}})"), ParseError);
  CHECK_THROWS_AS(config_from_json_text("{"), ParseError);
}

TEST_CASE("empty report is valid") {
  ComparisonReport report;
  summarize(report);
  const auto text = report_to_json_text(report);
  CHECK(report_schema_problems(text).empty());
  const auto back = report_from_json_text(text);
  CHECK(back.instances.empty());
  CHECK(back.summaries.size() == 5);
  CHECK(back.invariants_ok());
}

TEST_CASE("small sweep end to end") {
  const auto cfg = small_config();
  const auto report = run_sweep(cfg);
  REQUIRE(report.instances.size() == 2);
  for (const auto& r : report.instances) {
    CHECK(r.error.empty());
    CHECK(r.infected_node != r.patched_node);
    CHECK(r.dev.sup_infected >= 0.0);
    CHECK(r.ode);
    CHECK(r.exact);
  }
  int labelled = 0;
  for (const auto& s : report.summaries) labelled += s.count;
  CHECK(labelled == 2);

  SUBCASE("emitted files") {
    const auto dir = std::filesystem::temp_directory_path() / "sips_test_sweep";
    std::filesystem::remove_all(dir);
    emit_report(report, dir);
    int csv = 0;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
      csv += entry.path().extension() == ".csv";
    CHECK(csv == 4);
    CHECK(std::filesystem::exists(dir / "instance_0000_ode.csv"));
    CHECK(std::filesystem::exists(dir / "instance_0001_exact.csv"));
    const auto text = read_file(dir / "report.json");
    CHECK(report_schema_problems(text).empty());
    const auto back = report_from_json_text(text);
    CHECK(back.instances.size() == 2);
    CHECK(back.instances[1].dev.sup_patched == report.instances[1].dev.sup_patched);
    CHECK(back.instances[0].s_q1 == report.instances[0].s_q1);
    const auto csv_back = read_csv(dir / "instance_0000_ode.csv");
    CHECK(csv_back.infected == report.instances[0].ode->infected);
    std::filesystem::remove_all(dir);
  }
  SUBCASE("same seeds give the same report") {
    auto again_cfg = cfg;
    again_cfg.threads = 1;
    const auto again = run_sweep(again_cfg);
    for (std::size_t k = 0; k < 2; ++k) {
      const auto& a = report.instances[k];
      const auto& b = again.instances[k];
      CHECK(a.infected_node == b.infected_node);
      CHECK(a.patched_node == b.patched_node);
      CHECK(a.s_q1 == b.s_q1);
      CHECK(a.events == b.events);
      CHECK(a.exact->infected == b.exact->infected);
      CHECK(a.ode->patched == b.ode->patched);
      CHECK(a.dev.l2_infected == b.dev.l2_infected);
    }
  }
}

TEST_CASE("schema validator catches tampering") {
  auto cfg = small_config();
  cfg.keep_trajectories = false;
  const auto text = report_to_json_text(run_sweep(cfg));
  REQUIRE(report_schema_problems(text).empty());

  auto doc = nlohmann::json::parse(text);
  doc["instances"][0]["deviation"]["sup_I"] = -0.5;
  CHECK_FALSE(report_schema_problems(doc.dump()).empty());

  doc = nlohmann::json::parse(text);
  const bool virus_grows = doc["instances"][0]["spectral"]["s_q1"].get<double>() > 1e-9;
  doc["instances"][0]["collection"] = virus_grows ? "extinction" : "infected";
  CHECK_FALSE(report_schema_problems(doc.dump()).empty());

  doc = nlohmann::json::parse(text);
  doc["instances"][1].erase("spectral");
  CHECK_FALSE(report_schema_problems(doc.dump()).empty());
  CHECK_THROWS_AS(report_from_json_text(doc.dump()), ParseError);

  CHECK_FALSE(report_schema_problems("[1, 2]").empty());
  CHECK_FALSE(report_schema_problems("{").empty());
}

TEST_CASE("every instance of a scale-free sweep gets one label") {
  ExperimentConfig cfg;
  cfg.topology.n = 50;
  cfg.count = 20;
  cfg.horizon = 5.0;
  cfg.paths = 20;
  cfg.grid = 11;
  cfg.keep_trajectories = false;
  const auto report = run_sweep(cfg);
  int total = 0;
  for (const auto& s : report.summaries) total += s.count;
  CHECK(total == 20);
  CHECK(report.failures == 0);
}

TEST_CASE("property checks count their instances") {
  ComparisonReport report;
  report.threshold = 0.05;
  InstanceResult extinct;
  extinct.s_q1 = -0.2;
  extinct.s_q2 = -0.1;
  extinct.s_q4 = -0.1;
  extinct.dev.sup_infected = 0.01;
  extinct.dev.sup_patched = 0.08;
  InstanceResult infected;
  infected.s_q1 = 0.3;
  infected.s_q2 = -0.1;
  infected.s_q4 = -0.05;
  infected.collection = Collection::infected;
  infected.dev.sup_infected = 0.2;  // not covered by the virus property
  infected.dev.sup_patched = 0.01;
  InstanceResult failed;
  failed.error = "boom";
  report.instances = {extinct, infected, failed};
  summarize(report);
  CHECK(report.failures == 1);
  CHECK(report.virus_extinction.instances == 1);
  CHECK(report.virus_extinction.ok());
  CHECK(report.patch_extinction.instances == 2);
  CHECK(report.patch_extinction.violations == 1);
  CHECK(report.patch_extinction.worst == doctest::Approx(0.08));
  CHECK_FALSE(report.invariants_ok());
}

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sips/equilibria.hpp"
#include "sips/network.hpp"
#include "sips/rates.hpp"
#include "sips/trajectory.hpp"

namespace sips {

struct TopologySpec {
  std::string kind = "scale-free";  // or "small-world"
  int n = 50;
  int attach = 2;         // scale-free
  int k = 4;              // small-world
  double rewire_p = 0.1;  // small-world
  bool shared = true;     // one topology for both layers
  std::uint64_t seed = 1;
};

struct ModelSpec {
  RateFamily family = RateFamily::linear;
  double saturation = 1.0;  // per-node level for the nonlinear families
  bool g_equals_h = false;
};

/// One sweep: a fixed topology, `count` random rate draws on it, and for each draw an
/// ODE solution and a Gillespie average from the same random initial state.
struct ExperimentConfig {
  TopologySpec topology;
  RateRanges ranges;
  ModelSpec model;
  int count = 10;
  std::uint64_t seed = 1;
  double horizon = 50.0;
  double dt = 0.0;  // <= 0: default ODE step
  int paths = 10000;
  int grid = 200;
  double extinction_threshold = 0.05;
  int threads = 0;
  bool keep_trajectories = true;

  /// Throws std::invalid_argument when a field is out of range.
  void check() const;
};

ExperimentConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Sup and grid-weighted RMS distance between the population means of two
/// trajectories on a common grid, reported separately for I and P.
struct Deviation {
  double sup_infected = 0.0;
  double sup_patched = 0.0;
  double l2_infected = 0.0;
  double l2_patched = 0.0;
};

/// Throws std::invalid_argument on a grid mismatch.
Deviation deviation(const Trajectory& a, const Trajectory& b);

/// Instance groups: which attractor criterion holds, or none.
enum class Collection { extinction, infected, patched, mixed, neither };

std::string to_string(Collection c);
Collection parse_collection(const std::string& name);
Collection collection_of(Regime regime);

struct InstanceResult {
  int index = 0;
  int infected_node = -1;
  int patched_node = -1;
  double s_q1 = 0.0, s_q2 = 0.0, s_q3 = 0.0, s_q4 = 0.0;
  std::optional<double> mixed_criterion;
  Collection collection = Collection::neither;
  Deviation dev;
  double ode_seconds = 0.0;
  double exact_seconds = 0.0;
  std::uint64_t events = 0;
  std::string error;  // non-empty when the instance failed

  std::optional<Trajectory> ode, exact;  // kept when keep_trajectories
};

struct CollectionSummary {
  Collection collection = Collection::neither;
  int count = 0;
  double max_sup_infected = 0.0, mean_sup_infected = 0.0;
  double max_sup_patched = 0.0, mean_sup_patched = 0.0;
};

struct PropertyCheck {
  std::string name;
  int instances = 0;  // how many instances the property applies to
  int violations = 0;
  double worst = 0.0;

  bool ok() const { return violations == 0; }
};

struct ComparisonReport {
  double threshold = 0.05;
  std::vector<InstanceResult> instances;
  std::vector<CollectionSummary> summaries;  // one per collection, fixed order
  PropertyCheck virus_extinction;  // s(Q1) <= 0: sup deviation of I within threshold
  PropertyCheck patch_extinction;  // extinction or infected-only case: sup deviation of P within threshold
  int failures = 0;

  bool invariants_ok() const { return virus_extinction.ok() && patch_extinction.ok(); }
};

/// Recomputes summaries and property checks from `instances`.
void summarize(ComparisonReport& report, const SignOptions& sign = {});

ComparisonReport run_sweep(const ExperimentConfig& cfg);

std::string report_to_json_text(const ComparisonReport& report);
ComparisonReport report_from_json_text(const std::string& text);
/// Schema problems of a report document; empty when it is well formed.
std::vector<std::string> report_schema_problems(const std::string& text);

/// Writes report.json and, per instance with kept trajectories,
/// instance_<k>_ode.csv and instance_<k>_exact.csv.
void emit_report(const ComparisonReport& report, const std::filesystem::path& dir);

}  // namespace sips

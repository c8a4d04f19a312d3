#include "sips/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "sips/dynamics.hpp"
#include "sips/errors.hpp"
#include "sips/exact.hpp"
#include "sips/random.hpp"

namespace sips {

using nlohmann::json;

namespace {

constexpr Collection kCollections[] = {Collection::extinction, Collection::infected,
                                       Collection::patched, Collection::mixed,
                                       Collection::neither};

void reject_unknown(const json& obj, std::initializer_list<const char*> known, const char* where) {
  for (const auto& [key, _] : obj.items()) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; }))
      throw ParseError(std::string("unknown key '") + key + "' in " + where);
  }
}

template <class T>
void read_opt(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ParseError(std::string("field '") + key + "' has the wrong type");
  }
}

const json& section(const json& doc, const char* key) {
  static const json empty = json::object();
  if (!doc.contains(key)) return empty;
  const json& s = doc.at(key);
  if (!s.is_object()) throw ParseError(std::string("section '") + key + "' must be an object");
  return s;
}

void read_range(const json& obj, const char* key, Range& r) {
  if (!obj.contains(key)) return;
  const json& a = obj.at(key);
  if (!a.is_array() || a.size() != 2 || !a[0].is_number() || !a[1].is_number())
    throw ParseError(std::string("range '") + key + "' must be [min, max]");
  r = {a[0].get<double>(), a[1].get<double>()};
}

json range_json(const Range& r) { return json::array({r.min, r.max}); }

json opt_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Topology build_topology(const TopologySpec& t, std::uint64_t seed) {
  if (t.kind == "scale-free") return scale_free_topology(t.n, t.attach, seed);
  return small_world_topology(t.n, t.k, t.rewire_p, seed);
}

InstanceResult run_instance(const ExperimentConfig& cfg, const Topology& virus_layer,
                            const Topology& patch_layer, int index) {
  InstanceResult r;
  r.index = index;
  const auto k = static_cast<std::uint64_t>(index);
  try {
    const RateNetwork net = assign_rates(virus_layer, patch_layer, cfg.ranges,
                                         derive_seed(cfg.seed, 3 * k));
    const RateModel model(net, cfg.model.family, Saturation::uniform(net.n, cfg.model.saturation),
                          cfg.model.g_equals_h);

    Engine pick(derive_seed(cfg.seed, 3 * k + 1));
    r.infected_node = static_cast<int>(uniform_index(pick, net.n));
    do {
      r.patched_node = static_cast<int>(uniform_index(pick, net.n));
    } while (net.n > 1 && r.patched_node == r.infected_node);

    const RegimeReport regime = classify(model);
    r.s_q1 = regime.spectral.q1.value;
    r.s_q2 = regime.spectral.q2.value;
    r.s_q3 = regime.spectral.q3.value;
    r.s_q4 = regime.spectral.q4.value;
    if (regime.spectral.mixed) r.mixed_criterion = regime.spectral.mixed->value;
    r.collection = collection_of(regime.predicted);

    PopulationState x0 = PopulationState::zeros(net.n);
    x0.infected[r.infected_node] = 1.0;
    x0.patched[r.patched_node] = 1.0;
    ChainState c0 = ChainState::susceptible(net.n);
    c0.digits[r.infected_node] = kInfected;
    c0.digits[r.patched_node] = kPatched;

    auto start = std::chrono::steady_clock::now();
    IntegrateOptions iopts;
    iopts.dt = cfg.dt;
    iopts.grid_points = cfg.grid;
    Trajectory ode = integrate(model, x0, cfg.horizon, iopts);
    r.ode_seconds = seconds_since(start);

    start = std::chrono::steady_clock::now();
    GillespieOptions gopts;
    gopts.paths = cfg.paths;
    gopts.seed = derive_seed(cfg.seed, 3 * k + 2);
    gopts.grid_points = cfg.grid;
    gopts.threads = 1;
    SampledTrajectory exact = gillespie(model.net(), c0, cfg.horizon, gopts);
    r.exact_seconds = seconds_since(start);
    r.events = exact.events;

    r.dev = deviation(ode, exact.average);
    if (cfg.keep_trajectories) {
      r.ode = std::move(ode);
      r.exact = std::move(exact.average);
    }
  } catch (const std::exception& e) {
    r.error = e.what();
    if (r.error.empty()) r.error = "unknown failure";
  }
  return r;
}

json instance_json(const InstanceResult& r) {
  json spectral = {{"s_q1", r.s_q1}, {"s_q2", r.s_q2}, {"s_q3", r.s_q3}, {"s_q4", r.s_q4},
                   {"mixed", opt_number(r.mixed_criterion)}};
  return {{"index", r.index},
          {"infected_node", r.infected_node},
          {"patched_node", r.patched_node},
          {"spectral", spectral},
          {"collection", to_string(r.collection)},
          {"deviation",
           {{"sup_I", r.dev.sup_infected},
            {"sup_P", r.dev.sup_patched},
            {"l2_I", r.dev.l2_infected},
            {"l2_P", r.dev.l2_patched}}},
          {"runtime", {{"ode_s", r.ode_seconds}, {"exact_s", r.exact_seconds}}},
          {"events", r.events},
          {"error", r.error.empty() ? json(nullptr) : json(r.error)}};
}

json check_json(const PropertyCheck& c) {
  return {{"name", c.name},
          {"instances", c.instances},
          {"violations", c.violations},
          {"worst", c.worst},
          {"ok", c.ok()}};
}

// Minimal structural checks on a parsed document; `problems` collects messages.
struct SchemaWalker {
  std::vector<std::string>& problems;

  bool expect(const json& obj, const std::string& path, const char* key,
              bool (json::*is)() const noexcept) {
    if (!obj.is_object() || !obj.contains(key)) {
      problems.push_back(path + "." + key + " is missing");
      return false;
    }
    if (!(obj.at(key).*is)()) {
      problems.push_back(path + "." + key + " has the wrong type");
      return false;
    }
    return true;
  }

  void nonnegative(const json& obj, const std::string& path, const char* key) {
    if (expect(obj, path, key, &json::is_number) && obj.at(key).get<double>() < 0.0)
      problems.push_back(path + "." + key + " is negative");
  }
};

// Recomputes the label from the signs, in the classifier's order.
bool label_consistent(Collection c, double s1, double s2, double s4,
                      const std::optional<double>& mixed, double tol) {
  const bool p1 = s1 > tol, p2 = s2 > tol, p4 = s4 > tol;
  Collection expected = Collection::neither;
  if (!p1 && !p2)
    expected = Collection::extinction;
  else if (p1 && !p4)
    expected = Collection::infected;
  else if (!p1 && p2)
    expected = Collection::patched;
  else if (p2 && mixed && *mixed > tol)
    expected = Collection::mixed;
  return c == expected;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

void ExperimentConfig::check() const {
  if (topology.kind != "scale-free" && topology.kind != "small-world")
    throw std::invalid_argument("topology kind must be scale-free or small-world");
  if (topology.n < 2) throw std::invalid_argument("topology n must be at least 2");
  ranges.check();
  if (count < 1) throw std::invalid_argument("sweep count must be at least 1");
  if (!(horizon > 0.0)) throw std::invalid_argument("T must be positive");
  if (dt < 0.0 || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive (or 0 for the default)");
  if (paths < 1) throw std::invalid_argument("paths must be positive");
  if (grid < 2) throw std::invalid_argument("grid needs at least 2 points");
  if (!(extinction_threshold > 0.0)) throw std::invalid_argument("extinction threshold must be positive");
  if (model.family != RateFamily::linear && !(model.saturation > 0.0))
    throw std::invalid_argument("saturation must be positive");
  if (threads < 0) throw std::invalid_argument("threads must be nonnegative");
}

ExperimentConfig config_from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what());
  }
  if (!doc.is_object()) throw ParseError("config must be a JSON object");
  reject_unknown(doc, {"topology", "rates", "model", "sweep", "simulation", "thresholds", "output"},
                 "config");

  ExperimentConfig cfg;
  const json& topo = section(doc, "topology");
  reject_unknown(topo, {"kind", "n", "attach", "k", "rewire_p", "shared", "seed"}, "topology");
  read_opt(topo, "kind", cfg.topology.kind);
  read_opt(topo, "n", cfg.topology.n);
  read_opt(topo, "attach", cfg.topology.attach);
  read_opt(topo, "k", cfg.topology.k);
  read_opt(topo, "rewire_p", cfg.topology.rewire_p);
  read_opt(topo, "shared", cfg.topology.shared);
  read_opt(topo, "seed", cfg.topology.seed);

  const json& rates = section(doc, "rates");
  reject_unknown(rates, {"beta", "delta1", "delta2", "gamma", "alpha"}, "rates");
  read_range(rates, "beta", cfg.ranges.beta);
  read_range(rates, "delta1", cfg.ranges.delta1);
  read_range(rates, "delta2", cfg.ranges.delta2);
  read_range(rates, "gamma", cfg.ranges.gamma);
  read_range(rates, "alpha", cfg.ranges.alpha);

  const json& model = section(doc, "model");
  reject_unknown(model, {"family", "saturation", "g_equals_h"}, "model");
  if (model.contains("family")) {
    std::string name;
    read_opt(model, "family", name);
    try {
      cfg.model.family = parse_family(name);
    } catch (const std::exception& e) {
      throw ParseError(e.what());
    }
  }
  read_opt(model, "saturation", cfg.model.saturation);
  read_opt(model, "g_equals_h", cfg.model.g_equals_h);

  const json& sweep = section(doc, "sweep");
  reject_unknown(sweep, {"count", "seed"}, "sweep");
  read_opt(sweep, "count", cfg.count);
  read_opt(sweep, "seed", cfg.seed);

  const json& sim = section(doc, "simulation");
  reject_unknown(sim, {"T", "dt", "paths", "grid", "threads"}, "simulation");
  read_opt(sim, "T", cfg.horizon);
  read_opt(sim, "dt", cfg.dt);
  read_opt(sim, "paths", cfg.paths);
  read_opt(sim, "grid", cfg.grid);
  read_opt(sim, "threads", cfg.threads);

  const json& thr = section(doc, "thresholds");
  reject_unknown(thr, {"extinction_sup"}, "thresholds");
  read_opt(thr, "extinction_sup", cfg.extinction_threshold);

  const json& out = section(doc, "output");
  reject_unknown(out, {"trajectories"}, "output");
  read_opt(out, "trajectories", cfg.keep_trajectories);

  try {
    cfg.check();
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
  return cfg;
}

std::string config_to_json_text(const ExperimentConfig& cfg) {
  json doc = {
      {"topology",
       {{"kind", cfg.topology.kind},
        {"n", cfg.topology.n},
        {"attach", cfg.topology.attach},
        {"k", cfg.topology.k},
        {"rewire_p", cfg.topology.rewire_p},
        {"shared", cfg.topology.shared},
        {"seed", cfg.topology.seed}}},
      {"rates",
       {{"beta", range_json(cfg.ranges.beta)},
        {"delta1", range_json(cfg.ranges.delta1)},
        {"delta2", range_json(cfg.ranges.delta2)},
        {"gamma", range_json(cfg.ranges.gamma)},
        {"alpha", range_json(cfg.ranges.alpha)}}},
      {"model",
       {{"family", to_string(cfg.model.family)},
        {"saturation", cfg.model.saturation},
        {"g_equals_h", cfg.model.g_equals_h}}},
      {"sweep", {{"count", cfg.count}, {"seed", cfg.seed}}},
      {"simulation",
       {{"T", cfg.horizon},
        {"dt", cfg.dt},
        {"paths", cfg.paths},
        {"grid", cfg.grid},
        {"threads", cfg.threads}}},
      {"thresholds", {{"extinction_sup", cfg.extinction_threshold}}},
      {"output", {{"trajectories", cfg.keep_trajectories}}}};
  return doc.dump(2);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return config_from_json_text(buf.str());
}

// ---------------------------------------------------------------------------
// Deviation

Deviation deviation(const Trajectory& a, const Trajectory& b) {
  const std::size_t m = a.size();
  if (m == 0 || b.size() != m) throw std::invalid_argument("deviation: grid sizes differ");
  const double span = std::max(std::abs(a.times.back()), 1.0);
  for (std::size_t k = 0; k < m; ++k)
    if (std::abs(a.times[k] - b.times[k]) > 1e-12 * span)
      throw std::invalid_argument("deviation: grid times differ");

  const Eigen::VectorXd di = a.infected_mean() - b.infected_mean();
  const Eigen::VectorXd dp = a.patched_mean() - b.patched_mean();

  Deviation d;
  d.sup_infected = di.cwiseAbs().maxCoeff();
  d.sup_patched = dp.cwiseAbs().maxCoeff();
  if (m == 1) {
    d.l2_infected = d.sup_infected;
    d.l2_patched = d.sup_patched;
    return d;
  }
  // Trapezoid weights, normalized to the grid span.
  double total = 0.0, si = 0.0, sp = 0.0;
  for (std::size_t k = 0; k + 1 < m; ++k) {
    const double w = a.times[k + 1] - a.times[k];
    const auto e = static_cast<Eigen::Index>(k);
    si += 0.5 * w * (di[e] * di[e] + di[e + 1] * di[e + 1]);
    sp += 0.5 * w * (dp[e] * dp[e] + dp[e + 1] * dp[e + 1]);
    total += w;
  }
  if (total <= 0.0) throw std::invalid_argument("deviation: grid is not increasing");
  d.l2_infected = std::sqrt(si / total);
  d.l2_patched = std::sqrt(sp / total);
  return d;
}

// ---------------------------------------------------------------------------
// Collections

std::string to_string(Collection c) {
  switch (c) {
    case Collection::extinction: return "extinction";
    case Collection::infected: return "infected";
    case Collection::patched: return "patched";
    case Collection::mixed: return "mixed";
    case Collection::neither: return "neither";
  }
  return "neither";
}

Collection parse_collection(const std::string& name) {
  for (Collection c : kCollections)
    if (to_string(c) == name) return c;
  throw ParseError("unknown collection '" + name + "'");
}

Collection collection_of(Regime regime) {
  switch (regime) {
    case Regime::susceptible_attractor: return Collection::extinction;
    case Regime::infected_attractor: return Collection::infected;
    case Regime::patched_attractor: return Collection::patched;
    case Regime::mixed_attractor: return Collection::mixed;
    case Regime::unclassified: return Collection::neither;
  }
  return Collection::neither;
}

// ---------------------------------------------------------------------------
// Sweep

void summarize(ComparisonReport& report, const SignOptions& sign) {
  report.summaries.clear();
  report.failures = 0;
  report.virus_extinction = {"virus extinction: s(Q1) <= 0 implies sup deviation of I within threshold"};
  report.patch_extinction = {"patch extinction: sup deviation of P within threshold"};

  for (Collection c : kCollections) report.summaries.push_back({c});
  for (const auto& r : report.instances) {
    if (!r.error.empty()) {
      ++report.failures;
      continue;
    }
    auto& s = report.summaries[static_cast<std::size_t>(r.collection)];
    ++s.count;
    s.max_sup_infected = std::max(s.max_sup_infected, r.dev.sup_infected);
    s.max_sup_patched = std::max(s.max_sup_patched, r.dev.sup_patched);
    s.mean_sup_infected += r.dev.sup_infected;
    s.mean_sup_patched += r.dev.sup_patched;

    const double tol = sign.zero_tol;
    const bool q1_pos = r.s_q1 > tol;
    if (!q1_pos) {
      auto& chk = report.virus_extinction;
      ++chk.instances;
      chk.worst = std::max(chk.worst, r.dev.sup_infected);
      if (r.dev.sup_infected > report.threshold) ++chk.violations;
    }
    if ((!q1_pos && r.s_q2 <= tol) || (q1_pos && r.s_q4 <= tol)) {
      auto& chk = report.patch_extinction;
      ++chk.instances;
      chk.worst = std::max(chk.worst, r.dev.sup_patched);
      if (r.dev.sup_patched > report.threshold) ++chk.violations;
    }
  }
  for (auto& s : report.summaries) {
    if (s.count == 0) continue;
    s.mean_sup_infected /= s.count;
    s.mean_sup_patched /= s.count;
  }
}

ComparisonReport run_sweep(const ExperimentConfig& cfg) {
  cfg.check();
  const Topology virus_layer = build_topology(cfg.topology, derive_seed(cfg.topology.seed, 0));
  const Topology patch_layer = cfg.topology.shared
                                   ? virus_layer
                                   : build_topology(cfg.topology, derive_seed(cfg.topology.seed, 1));

  ComparisonReport report;
  report.threshold = cfg.extinction_threshold;
  report.instances.resize(static_cast<std::size_t>(cfg.count));

  int threads = cfg.threads > 0 ? cfg.threads
                                : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, cfg.count);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int k = next++; k < cfg.count; k = next++)
      report.instances[static_cast<std::size_t>(k)] = run_instance(cfg, virus_layer, patch_layer, k);
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  summarize(report);
  return report;
}

// ---------------------------------------------------------------------------
// Report I/O

std::string report_to_json_text(const ComparisonReport& report) {
  json instances = json::array();
  for (const auto& r : report.instances) instances.push_back(instance_json(r));
  json summaries = json::array();
  for (const auto& s : report.summaries)
    summaries.push_back({{"collection", to_string(s.collection)},
                         {"count", s.count},
                         {"max_sup_I", s.max_sup_infected},
                         {"mean_sup_I", s.mean_sup_infected},
                         {"max_sup_P", s.max_sup_patched},
                         {"mean_sup_P", s.mean_sup_patched}});
  json doc = {{"threshold", report.threshold},
              {"failures", report.failures},
              {"instances", instances},
              {"summaries", summaries},
              {"checks",
               {{"virus_extinction", check_json(report.virus_extinction)},
                {"patch_extinction", check_json(report.patch_extinction)}}},
              {"invariants_ok", report.invariants_ok()}};
  return doc.dump(1);
}

std::vector<std::string> report_schema_problems(const std::string& text) {
  std::vector<std::string> problems;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    problems.push_back(e.what());
    return problems;
  }
  if (!doc.is_object()) {
    problems.push_back("report must be an object");
    return problems;
  }
  SchemaWalker w{problems};
  w.nonnegative(doc, "$", "threshold");
  w.expect(doc, "$", "failures", &json::is_number_integer);
  w.expect(doc, "$", "invariants_ok", &json::is_boolean);
  const double tol = SignOptions{}.zero_tol;

  if (w.expect(doc, "$", "instances", &json::is_array)) {
    int k = 0;
    for (const auto& inst : doc["instances"]) {
      const std::string path = "$.instances[" + std::to_string(k++) + "]";
      w.expect(inst, path, "index", &json::is_number_integer);
      w.expect(inst, path, "infected_node", &json::is_number_integer);
      w.expect(inst, path, "patched_node", &json::is_number_integer);
      w.expect(inst, path, "events", &json::is_number_unsigned);
      if (!inst.is_object() || !inst.contains("error") ||
          !(inst["error"].is_null() || inst["error"].is_string()))
        problems.push_back(path + ".error must be null or a string");
      bool spectral_ok = w.expect(inst, path, "spectral", &json::is_object);
      if (spectral_ok) {
        const json& s = inst["spectral"];
        for (const char* key : {"s_q1", "s_q2", "s_q3", "s_q4"})
          spectral_ok &= w.expect(s, path + ".spectral", key, &json::is_number);
        if (!s.contains("mixed") || !(s["mixed"].is_null() || s["mixed"].is_number())) {
          problems.push_back(path + ".spectral.mixed must be null or a number");
          spectral_ok = false;
        }
      }
      if (w.expect(inst, path, "deviation", &json::is_object))
        for (const char* key : {"sup_I", "sup_P", "l2_I", "l2_P"})
          w.nonnegative(inst["deviation"], path + ".deviation", key);
      if (w.expect(inst, path, "runtime", &json::is_object))
        for (const char* key : {"ode_s", "exact_s"}) w.nonnegative(inst["runtime"], path + ".runtime", key);
      if (w.expect(inst, path, "collection", &json::is_string)) {
        try {
          const Collection c = parse_collection(inst["collection"].get<std::string>());
          const bool failed = inst.contains("error") && inst["error"].is_string();
          if (spectral_ok && !failed) {
            const json& s = inst["spectral"];
            std::optional<double> mixed;
            if (s["mixed"].is_number()) mixed = s["mixed"].get<double>();
            if (!label_consistent(c, s["s_q1"].get<double>(), s["s_q2"].get<double>(),
                                  s["s_q4"].get<double>(), mixed, tol))
              problems.push_back(path + ".collection disagrees with its spectral report");
          }
        } catch (const ParseError& e) {
          problems.push_back(path + ".collection: " + e.what());
        }
      }
    }
  }
  if (w.expect(doc, "$", "summaries", &json::is_array)) {
    int k = 0;
    for (const auto& s : doc["summaries"]) {
      const std::string path = "$.summaries[" + std::to_string(k++) + "]";
      w.expect(s, path, "collection", &json::is_string);
      w.expect(s, path, "count", &json::is_number_integer);
      for (const char* key : {"max_sup_I", "mean_sup_I", "max_sup_P", "mean_sup_P"})
        w.nonnegative(s, path, key);
    }
  }
  if (w.expect(doc, "$", "checks", &json::is_object)) {
    for (const char* name : {"virus_extinction", "patch_extinction"}) {
      if (!w.expect(doc["checks"], "$.checks", name, &json::is_object)) continue;
      const json& c = doc["checks"][name];
      const std::string path = std::string("$.checks.") + name;
      w.expect(c, path, "name", &json::is_string);
      w.expect(c, path, "instances", &json::is_number_integer);
      w.expect(c, path, "violations", &json::is_number_integer);
      w.nonnegative(c, path, "worst");
      w.expect(c, path, "ok", &json::is_boolean);
    }
  }
  return problems;
}

ComparisonReport report_from_json_text(const std::string& text) {
  const auto problems = report_schema_problems(text);
  if (!problems.empty()) throw ParseError("invalid report: " + problems.front());
  const json doc = json::parse(text);

  ComparisonReport report;
  report.threshold = doc["threshold"].get<double>();
  for (const auto& inst : doc["instances"]) {
    InstanceResult r;
    r.index = inst["index"].get<int>();
    r.infected_node = inst["infected_node"].get<int>();
    r.patched_node = inst["patched_node"].get<int>();
    const json& s = inst["spectral"];
    r.s_q1 = s["s_q1"].get<double>();
    r.s_q2 = s["s_q2"].get<double>();
    r.s_q3 = s["s_q3"].get<double>();
    r.s_q4 = s["s_q4"].get<double>();
    if (s["mixed"].is_number()) r.mixed_criterion = s["mixed"].get<double>();
    r.collection = parse_collection(inst["collection"].get<std::string>());
    const json& d = inst["deviation"];
    r.dev = {d["sup_I"].get<double>(), d["sup_P"].get<double>(), d["l2_I"].get<double>(),
             d["l2_P"].get<double>()};
    r.ode_seconds = inst["runtime"]["ode_s"].get<double>();
    r.exact_seconds = inst["runtime"]["exact_s"].get<double>();
    r.events = inst["events"].get<std::uint64_t>();
    if (inst["error"].is_string()) r.error = inst["error"].get<std::string>();
    report.instances.push_back(std::move(r));
  }
  summarize(report);
  return report;
}

void emit_report(const ComparisonReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "report.json");
    if (!out) throw Error("cannot write " + (dir / "report.json").string());
    out << report_to_json_text(report) << '\n';
    if (!out) throw Error("write failed: " + (dir / "report.json").string());
  }
  for (const auto& r : report.instances) {
    if (!r.ode || !r.exact) continue;
    std::ostringstream stem;
    stem << "instance_" << std::setw(4) << std::setfill('0') << r.index;
    write_csv(dir / (stem.str() + "_ode.csv"), *r.ode);
    write_csv(dir / (stem.str() + "_exact.csv"), *r.exact);
  }
}

}  // namespace sips

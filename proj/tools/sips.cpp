// Command-line front end: network generation, analysis, ODE and exact runs, sweeps.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "sips/dynamics.hpp"
#include "sips/equilibria.hpp"
#include "sips/errors.hpp"
#include "sips/exact.hpp"
#include "sips/harness.hpp"
#include "sips/network.hpp"
#include "sips/rates.hpp"
#include "sips/spectral.hpp"

namespace {

using nlohmann::json;

struct ModelArgs {
  std::string family = "linear";
  double saturation = 1.0;
  bool g_equals_h = false;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--model", family, "Rate family: linear, exp_saturating, rational_saturating")
        ->capture_default_str();
    cmd->add_option("--saturation", saturation, "Saturation level of the nonlinear families")
        ->capture_default_str();
    cmd->add_flag("--g-equals-h", g_equals_h, "Use the same rate function for g and h");
  }

  sips::RateModel build(sips::RateNetwork net) const {
    const int n = net.n;
    return sips::RateModel(std::move(net), sips::parse_family(family),
                           sips::Saturation::uniform(n, saturation), g_equals_h);
  }
};

json vector_json(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

json spectral_json(const sips::SpectralReport& r) {
  json doc = {{"s_q1", r.q1.value}, {"s_q2", r.q2.value}, {"s_q3", r.q3.value}, {"s_q4", r.q4.value}};
  doc["mixed"] = r.mixed ? json(r.mixed->value) : json(nullptr);
  return doc;
}

// Initial state from either a JSON file {"infected": [...], "patched": [...]} or
// an "i:3,p:7" node list.
sips::PopulationState read_init(const std::string& arg, int n) {
  if (!std::filesystem::exists(arg)) {
    const auto chain = sips::parse_init(arg, n);
    auto x = sips::PopulationState::zeros(n);
    for (int i = 0; i < n; ++i) {
      x.infected[i] = chain.digits[i] == sips::kInfected ? 1.0 : 0.0;
      x.patched[i] = chain.digits[i] == sips::kPatched ? 1.0 : 0.0;
    }
    return x;
  }
  std::ifstream in(arg);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw sips::ParseError(e.what());
  }
  auto read = [&](const char* key) {
    if (!doc.contains(key) || !doc[key].is_array() || static_cast<int>(doc[key].size()) != n)
      throw sips::ParseError(std::string("init field '") + key + "' must be an array of length n");
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = doc[key][i].get<double>();
    return v;
  };
  sips::PopulationState x{read("infected"), read("patched")};
  if (x.omega_violation() > 0.0) throw sips::InvariantError("initial state lies outside Omega");
  return x;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw sips::Error("cannot write " + path);
  out << text << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SIPS epidemic models on directed networks"};
  app.require_subcommand(1);

  // net gen / net validate
  auto* net_cmd = app.add_subcommand("net", "Generate or validate network files");
  net_cmd->require_subcommand(1);

  auto* gen = net_cmd->add_subcommand("gen", "Generate a random network");
  std::string kind = "scale-free", gen_out;
  int n = 50, attach = 2, k = 4;
  double rewire_p = 0.1;
  std::uint64_t gen_seed = 0;
  bool independent = false;
  sips::RateRanges ranges;
  gen->add_option("--kind", kind)->check(CLI::IsMember({"scale-free", "small-world"}))->capture_default_str();
  gen->add_option("--n", n)->required();
  gen->add_option("--seed", gen_seed)->required();
  gen->add_option("--attach", attach, "Links per new node (scale-free)")->capture_default_str();
  gen->add_option("--k", k, "Ring degree (small-world)")->capture_default_str();
  gen->add_option("--rewire-p", rewire_p, "Rewiring probability (small-world)")->capture_default_str();
  gen->add_flag("--independent-layers", independent, "Draw the patch layer separately");
  for (auto [name, range] : {std::pair{"beta", &ranges.beta}, std::pair{"delta1", &ranges.delta1},
                             std::pair{"delta2", &ranges.delta2}, std::pair{"gamma", &ranges.gamma},
                             std::pair{"alpha", &ranges.alpha}}) {
    gen->add_option(std::string("--") + name + "-min", range->min)->capture_default_str();
    gen->add_option(std::string("--") + name + "-max", range->max)->capture_default_str();
  }
  gen->add_option("-o,--output", gen_out, "Output file (default stdout)");

  auto* validate_cmd = net_cmd->add_subcommand("validate", "Check a network file");
  std::string validate_path;
  bool allow_reducible = false;
  validate_cmd->add_option("file", validate_path)->required();
  validate_cmd->add_flag("--allow-reducible", allow_reducible);

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Spectral report of a network");
  std::string analyze_path;
  ModelArgs analyze_model;
  analyze->add_option("net", analyze_path)->required();
  analyze_model.add_to(analyze);

  // ode run
  auto* ode = app.add_subcommand("ode", "Deterministic model");
  ode->require_subcommand(1);
  auto* ode_run = ode->add_subcommand("run", "Integrate the ODE");
  std::string ode_net, ode_init, ode_out;
  double ode_t = 50.0, ode_dt = 0.0;
  int ode_grid = 0;
  ModelArgs ode_model;
  ode_run->add_option("--net", ode_net)->required();
  ode_run->add_option("--init", ode_init, "JSON file or node list like i:3,p:7")->required();
  ode_run->add_option("--T", ode_t)->capture_default_str();
  ode_run->add_option("--dt", ode_dt, "Step (default from the largest rate)");
  ode_run->add_option("--grid", ode_grid, "Output points (default: every step)");
  ode_run->add_option("-o,--output", ode_out);
  ode_model.add_to(ode_run);

  // exact run / exact forward
  auto* exact = app.add_subcommand("exact", "Exact Markov chain");
  exact->require_subcommand(1);
  auto* exact_run = exact->add_subcommand("run", "Average Gillespie sample paths");
  std::string ex_net, ex_init, ex_out;
  double ex_t = 50.0;
  sips::GillespieOptions gopts;
  bool ex_reducible = false;
  exact_run->add_option("--net", ex_net)->required();
  exact_run->add_option("--init", ex_init, "Node list like i:3,p:7")->required();
  exact_run->add_option("--T", ex_t)->capture_default_str();
  exact_run->add_option("--paths", gopts.paths)->capture_default_str();
  exact_run->add_option("--seed", gopts.seed)->capture_default_str();
  exact_run->add_option("--grid", gopts.grid_points)->capture_default_str();
  exact_run->add_option("--threads", gopts.threads, "0: all cores")->capture_default_str();
  exact_run->add_flag("--allow-reducible", ex_reducible);
  exact_run->add_option("-o,--output", ex_out);

  auto* forward = exact->add_subcommand("forward", "Solve the forward equation (small n)");
  std::string fw_net, fw_init, fw_out;
  double fw_t = 20.0;
  sips::ForwardOptions fopts;
  fopts.grid_points = 200;
  forward->add_option("--net", fw_net)->required();
  forward->add_option("--init", fw_init)->required();
  forward->add_option("--T", fw_t)->capture_default_str();
  forward->add_option("--dt", fopts.dt)->capture_default_str();
  forward->add_option("--grid", fopts.grid_points)->capture_default_str();
  forward->add_option("-o,--output", fw_out);

  // classify
  auto* classify_cmd = app.add_subcommand("classify", "Predict the global attractor");
  std::string cl_net;
  ModelArgs cl_model;
  classify_cmd->add_option("--net", cl_net)->required();
  cl_model.add_to(classify_cmd);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Compare ODE and exact averages over random instances");
  std::string sw_config, sw_out;
  sweep->add_option("--config", sw_config)->required();
  sweep->add_option("-o,--output", sw_out, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      sips::GenerateOptions opts{!independent};
      const auto net = kind == "scale-free"
                           ? sips::generate_scale_free(n, attach, ranges, gen_seed, opts)
                           : sips::generate_small_world(n, k, rewire_p, ranges, gen_seed, opts);
      write_text(gen_out, sips::to_json_text(net));
    } else if (validate_cmd->parsed()) {
      // Load without validation so every failing check can be listed.
      sips::ValidateOptions vopts{allow_reducible};
      std::ifstream in(validate_path);
      if (!in) throw sips::Error("cannot open " + validate_path);
      std::stringstream buf;
      buf << in.rdbuf();
      const auto net = sips::from_json_text(buf.str(), {true});
      const auto report = sips::validate(net, vopts);
      for (const auto& c : report.checks)
        std::cout << (c.passed ? "ok    " : "FAIL  ") << c.name
                  << (c.detail.empty() ? "" : ": " + c.detail) << '\n';
      return report.ok() ? 0 : 1;
    } else if (analyze->parsed()) {
      const auto model = analyze_model.build(sips::load(analyze_path));
      const auto report = sips::spectral_report(model);
      const auto c1 = sips::extinction_conditions(model);
      const auto c2 = sips::infected_conditions(model, report);
      json doc = spectral_json(report);
      doc["extinction_conditions"] = {{"a", c1.a}, {"b", c1.b}, {"c", c1.c}, {"d", c1.d}};
      doc["infected_conditions"] = {{"a", c2.a}, {"b", c2.b}};
      std::cout << doc.dump(2) << '\n';
    } else if (ode_run->parsed()) {
      const auto model = ode_model.build(sips::load(ode_net));
      const auto x0 = read_init(ode_init, model.n());
      const auto traj = sips::integrate(model, x0, ode_t, {ode_dt, ode_grid});
      if (ode_out.empty())
        sips::write_csv(std::cout, traj);
      else
        sips::write_csv(ode_out, traj);
    } else if (exact_run->parsed()) {
      gopts.allow_reducible = ex_reducible;
      const auto net = sips::load(ex_net, {ex_reducible});
      const auto result = sips::gillespie(net, sips::parse_init(ex_init, net.n), ex_t, gopts);
      if (ex_out.empty())
        sips::write_csv(std::cout, result.average);
      else
        sips::write_csv(ex_out, result.average);
      std::cerr << result.paths << " paths, " << result.events << " events\n";
    } else if (forward->parsed()) {
      const auto net = sips::load(fw_net);
      const auto gen_matrix = sips::build_generator(net);
      const auto sol = sips::solve_forward(
          gen_matrix, sips::point_mass(sips::parse_init(fw_init, net.n)), fw_t, fopts);
      const auto traj = sips::marginal_trajectory(sol, net.n);
      if (fw_out.empty())
        sips::write_csv(std::cout, traj);
      else
        sips::write_csv(fw_out, traj);
      if (sol.drift_flagged) std::cerr << "warning: probability drift " << sol.max_drift << '\n';
    } else if (classify_cmd->parsed()) {
      const auto model = cl_model.build(sips::load(cl_net));
      const auto report = sips::classify(model);
      json doc = {{"regime", sips::to_string(report.predicted)},
                  {"spectral", spectral_json(report.spectral)}};
      auto mean = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
      doc["means"] = {{"infected_star", mean(report.infected_star)},
                      {"patched_star", mean(report.patched_star)},
                      {"infected_mixed", mean(report.infected_mixed)},
                      {"patched_mixed", mean(report.patched_mixed)}};
      if (report.equilibrium) {
        const auto& eq = *report.equilibrium;
        doc["equilibrium"] = {
            {"kind", sips::to_string(eq.kind)},
            {"infected", eq.infected ? vector_json(*eq.infected) : json(nullptr)},
            {"patched", eq.patched ? vector_json(*eq.patched) : json(nullptr)},
            {"iterations", eq.iterations},
            {"residual", eq.residual}};
      } else {
        doc["equilibrium"] = nullptr;
      }
      std::cout << doc.dump(2) << '\n';
    } else if (sweep->parsed()) {
      const auto cfg = sips::load_config(sw_config);
      const auto report = sips::run_sweep(cfg);
      sips::emit_report(report, sw_out);
      for (const auto& s : report.summaries)
        std::cout << sips::to_string(s.collection) << ": " << s.count << " instances, max sup I "
                  << s.max_sup_infected << ", max sup P " << s.max_sup_patched << '\n';
      for (const auto* chk : {&report.virus_extinction, &report.patch_extinction})
        std::cout << (chk->ok() ? "PASS  " : "FAIL  ") << chk->name << " (" << chk->violations
                  << "/" << chk->instances << " violations, worst " << chk->worst << ")\n";
      if (report.failures > 0) std::cerr << report.failures << " instances failed\n";
      return report.invariants_ok() ? 0 : 1;
    }
  } catch (const sips::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace sips {

/// Two-layer rate network. Matrix convention: rate(i, j) is the action of node j on
/// node i, so row i collects everything that can change the state of node i.
struct RateNetwork {
  int n = 0;
  Eigen::MatrixXd beta;    // infected j infects susceptible i
  Eigen::MatrixXd delta1;  // patched j patches susceptible i
  Eigen::MatrixXd delta2;  // patched j patches infected i
  Eigen::VectorXd gamma;   // reinstall (recovery) rates
  Eigen::VectorXd alpha;   // patch-failure rates

  static RateNetwork zeros(int n);

  friend bool operator==(const RateNetwork& a, const RateNetwork& b) {
    return a.n == b.n && a.beta == b.beta && a.delta1 == b.delta1 && a.delta2 == b.delta2 &&
           a.gamma == b.gamma && a.alpha == b.alpha;
  }
};

struct ValidationCheck {
  std::string name;    // e.g. "H4 gamma positive"
  bool passed = true;
  std::string detail;  // first offending entry when failed
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;

  bool ok() const;
  const ValidationCheck* first_failure() const;
  const ValidationCheck& check(const std::string& name) const;
};

/// Check names reported by validate().
namespace checks {
inline constexpr const char* kShape = "shape";
inline constexpr const char* kNonnegative = "H1-H3 nonnegative rates";
inline constexpr const char* kSupport = "H3 delta1/delta2 support consistency";
inline constexpr const char* kGamma = "H4 gamma positive";
inline constexpr const char* kAlpha = "H5 alpha positive";
inline constexpr const char* kDiagonal = "zero diagonals";
inline constexpr const char* kVirusConnected = "H6 G_v strongly connected";
inline constexpr const char* kPatchConnected = "H6 G_p strongly connected";
}  // namespace checks

struct ValidateOptions {
  /// Skip the two H6 checks (used by analytic fixtures with decoupled nodes).
  bool allow_reducible = false;
};

ValidationReport validate(const RateNetwork& net, const ValidateOptions& opts = {});

/// Throws InvariantError naming the first failed check.
void require_valid(const RateNetwork& net, const ValidateOptions& opts = {});

// ---------------------------------------------------------------------------
// Random generation

struct Range {
  double min = 0.0;
  double max = 0.0;
};

struct RateRanges {
  Range beta{0.05, 0.5};
  Range delta1{0.05, 0.5};
  Range delta2{0.05, 0.5};
  Range gamma{0.5, 1.5};
  Range alpha{0.5, 1.5};

  /// Throws std::invalid_argument on negative bounds, min > max, or a degenerate
  /// range that cannot satisfy H1-H5.
  void check() const;
};

/// Undirected simple graph as a sorted edge list (u < v).
struct Topology {
  int n = 0;
  std::vector<std::pair<int, int>> edges;

  std::vector<int> degrees() const;
};

/// Preferential attachment: a complete seed graph on attach + 1 nodes, then every
/// new node links to `attach` distinct existing nodes chosen proportionally to degree.
Topology scale_free_topology(int n, int attach, std::uint64_t seed);

/// Ring lattice with k/2 neighbours per side, each edge rewired with probability
/// rewire_p. Whole passes are retried (up to 100) until the graph is connected.
Topology small_world_topology(int n, int k, double rewire_p, std::uint64_t seed);

/// Draws every rate uniformly from its range on the given layer supports.
RateNetwork assign_rates(const Topology& virus_layer, const Topology& patch_layer,
                         const RateRanges& ranges, std::uint64_t seed);

struct GenerateOptions {
  /// Use one topology for G_v and G_p; otherwise draw the patch layer separately.
  bool shared_topology = true;
};

RateNetwork generate_scale_free(int n, int attach, const RateRanges& ranges, std::uint64_t seed,
                                const GenerateOptions& opts = {});

RateNetwork generate_small_world(int n, int k, double rewire_p, const RateRanges& ranges,
                                 std::uint64_t seed, const GenerateOptions& opts = {});

// ---------------------------------------------------------------------------
// Serialization (JSON network file)

std::string to_json_text(const RateNetwork& net);
RateNetwork from_json_text(const std::string& text, const ValidateOptions& opts = {});

void save(const RateNetwork& net, const std::filesystem::path& path);
RateNetwork load(const std::filesystem::path& path, const ValidateOptions& opts = {});

}  // namespace sips

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ftz/dcgain.hpp"
#include "ftz/errors.hpp"
#include "ftz/formation.hpp"
#include "ftz/modal.hpp"

namespace ftz {

namespace detail {

/// splitmix64 finalizer over (seed, sample index). Every sample owns its own
/// engine seed, so results do not depend on evaluation order.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Uniform double in [0, 1) from the top 53 bits; avoids the
/// implementation-defined std::uniform_real_distribution.
inline double uniform_unit(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

inline bool graph_connected(const FormationSpec& spec) {
  if (spec.nodes.empty()) return false;
  std::vector<int> ids;
  for (const auto& node : spec.nodes) ids.push_back(node.id);
  std::sort(ids.begin(), ids.end());
  auto index = [&](int id) {
    return static_cast<std::size_t>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
  };
  std::vector<std::vector<std::size_t>> adj(ids.size());
  for (const auto& [a, b] : spec.edges) {
    adj[index(a)].push_back(index(b));
    adj[index(b)].push_back(index(a));
  }
  std::vector<bool> seen(ids.size(), false);
  std::vector<std::size_t> stack = {0};
  seen[0] = true;
  std::size_t visited = 1;
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    for (std::size_t u : adj[v]) {
      if (!seen[u]) {
        seen[u] = true;
        ++visited;
        stack.push_back(u);
      }
    }
  }
  return visited == ids.size();
}

}  // namespace detail

/// Random embedding of an n-agent graph: every coordinate i.i.d. uniform on
/// [-box, box]. Identical (seed, sample_index) gives the identical
/// configuration on every platform and worker layout.
inline Eigen::VectorXd sample_configuration(int n, double box, std::uint64_t seed,
                                            std::uint64_t sample_index) {
  if (box <= 0.0) {
    throw Error(errc::invalid_argument, "sampling box half-width must be positive");
  }
  std::mt19937_64 engine(detail::mix_seed(seed, sample_index));
  Eigen::VectorXd config(2 * n);
  for (int k = 0; k < 2 * n; ++k) {
    config(k) = box * (2.0 * detail::uniform_unit(engine) - 1.0);
  }
  return config;
}

/// Decade histogram of log10 |det| over [-20, 2).
struct DetHistogram {
  double log10_lo = -20.0;
  double log10_hi = 2.0;
  std::vector<std::uint64_t> counts = std::vector<std::uint64_t>(22, 0);
  std::uint64_t underflow = 0;  // |det| below 1e-20 (zeros included)
  std::uint64_t overflow = 0;

  void add(double magnitude) {
    const double l = std::log10(magnitude);
    if (!(l >= log10_lo)) {
      ++underflow;
    } else if (l >= log10_hi) {
      ++overflow;
    } else {
      ++counts[static_cast<std::size_t>(l - log10_lo)];
    }
  }
};

/// Outcome of one Monte Carlo rarity experiment on a flexible graph.
/// det_magnitudes holds one entry per sample; degenerate samples (failed
/// build, ambiguous kernel classification, rank off the generic value, or a
/// pinned pair) carry NaN and are excluded from the zero count.
struct GenericityReport {
  std::string graph;
  int actuator = 0;
  int sensor = 0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  double box = 0.0;
  double zero_cut = 1e-12;
  std::vector<double> det_magnitudes;
  std::uint64_t near_zero_count = 0;
  std::uint64_t degenerate_count = 0;
  double min_abs_det = std::numeric_limits<double>::quiet_NaN();
  int generic_flex_count = 0;
  DetHistogram histogram;
};

namespace detail {

/// Signed DC-gain determinant at one embedding; nullopt marks a degenerate
/// sample. When expected_kernel_dim >= 0 a kernel of any other size counts as
/// degenerate (rank collapse off the generic stratum).
inline std::optional<double> sampled_det(const FormationSpec& graph,
                                         const Eigen::VectorXd& config, int actuator,
                                         int sensor, int expected_kernel_dim,
                                         int* kernel_dim_out = nullptr) {
  FormationSpec embedded = graph;
  std::vector<int> ids;
  for (const auto& node : embedded.nodes) ids.push_back(node.id);
  std::sort(ids.begin(), ids.end());
  for (auto& node : embedded.nodes) {
    const auto at = std::lower_bound(ids.begin(), ids.end(), node.id) - ids.begin();
    node.position = config.segment<2>(2 * at);
  }
  try {
    const Framework fw = build_framework(embedded);
    const ModalDecomposition md = modal_decomposition(fw);
    if (kernel_dim_out != nullptr) *kernel_dim_out = md.kernel_dim;
    if (md.threshold_ambiguous) return std::nullopt;
    if (expected_kernel_dim >= 0 && md.kernel_dim != expected_kernel_dim) return std::nullopt;
    if (any_pinned(md, actuator) || any_pinned(md, sensor)) return std::nullopt;
    return dc_gain_block(md, actuator, sensor).determinant;
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace detail

/// Samples N random embeddings of the graph and records |det([P0]_ji)| for
/// each. The graph must be connected and generically flexible; flexibility is
/// certified on the first sample (NotFlexibleGraph otherwise). Reports are
/// bit-identical for identical (graph, i, j, N, seed, box).
inline GenericityReport genericity_experiment(const FormationSpec& graph, int actuator,
                                              int sensor, std::uint64_t samples,
                                              std::uint64_t seed, double box) {
  {
    const auto violations = spec_violations(graph);
    if (!violations.empty()) {
      throw Error(violations.front().first, violations.front().second);
    }
  }
  if (!detail::graph_connected(graph)) {
    throw Error(errc::invalid_argument, "genericity experiment needs a connected graph");
  }
  for (int id : {actuator, sensor}) {
    const bool known = std::any_of(graph.nodes.begin(), graph.nodes.end(),
                                   [id](const FormationSpec::Node& node) { return node.id == id; });
    if (!known) {
      throw Error(errc::unknown_node_id, "no node with id " + std::to_string(id));
    }
  }

  const int n = static_cast<int>(graph.nodes.size());
  GenericityReport report;
  report.graph = graph.name;
  report.actuator = actuator;
  report.sensor = sensor;
  report.samples = samples;
  report.seed = seed;
  report.box = box;
  if (samples == 0) return report;

  // Generic rank check: the kernel must exceed the three rigid-body modes,
  // otherwise the rigid locus test applies instead. Certified on the first
  // sample that builds (a degenerate first draw has probability zero but
  // must not misclassify the graph).
  int generic_kernel = 0;
  for (std::uint64_t k = 0; k < std::max<std::uint64_t>(samples, 16); ++k) {
    int kernel_dim = 0;
    detail::sampled_det(graph, sample_configuration(n, box, seed, k), actuator, sensor, -1,
                        &kernel_dim);
    if (kernel_dim > 0) {
      generic_kernel = kernel_dim;
      break;
    }
  }
  if (generic_kernel - 3 <= 0) {
    throw Error(errc::not_flexible_graph,
                "generic kernel dimension is " + std::to_string(generic_kernel) +
                    "; the graph admits no internal flex");
  }
  report.generic_flex_count = generic_kernel - 3;

  report.det_magnitudes.resize(samples);
  for (std::uint64_t k = 0; k < samples; ++k) {
    const Eigen::VectorXd config = sample_configuration(n, box, seed, k);
    const auto det = detail::sampled_det(graph, config, actuator, sensor, generic_kernel);
    if (!det) {
      report.det_magnitudes[k] = std::numeric_limits<double>::quiet_NaN();
      ++report.degenerate_count;
      continue;
    }
    const double magnitude = std::abs(*det);
    report.det_magnitudes[k] = magnitude;
    if (magnitude < report.zero_cut) ++report.near_zero_count;
    if (std::isnan(report.min_abs_det) || magnitude < report.min_abs_det) {
      report.min_abs_det = magnitude;
    }
    report.histogram.add(magnitude);
  }
  return report;
}

/// Searches the zero variety directly: draws random segment endpoints until
/// the signed determinant changes sign, then bisects the segment down to
/// |det| < target. Demonstrates that the variety is non-empty yet thin.
struct BisectionResult {
  bool converged = false;
  Eigen::VectorXd configuration;
  double det = std::numeric_limits<double>::quiet_NaN();
  int segments_tried = 0;
  int iterations = 0;
};

inline BisectionResult bisect_to_zero(const FormationSpec& graph, int actuator, int sensor,
                                      std::uint64_t seed, double box, int max_segments = 64,
                                      int max_iterations = 200, double target = 1e-12) {
  for (int id : {actuator, sensor}) {
    const bool known = std::any_of(graph.nodes.begin(), graph.nodes.end(),
                                   [id](const FormationSpec::Node& node) { return node.id == id; });
    if (!known) {
      throw Error(errc::unknown_node_id, "no node with id " + std::to_string(id));
    }
  }
  const int n = static_cast<int>(graph.nodes.size());
  BisectionResult result;
  for (int seg = 0; seg < max_segments; ++seg) {
    ++result.segments_tried;
    Eigen::VectorXd a = sample_configuration(n, box, seed, 2 * static_cast<std::uint64_t>(seg));
    Eigen::VectorXd b = sample_configuration(n, box, seed, 2 * static_cast<std::uint64_t>(seg) + 1);
    auto det_a = detail::sampled_det(graph, a, actuator, sensor, -1);
    auto det_b = detail::sampled_det(graph, b, actuator, sensor, -1);
    if (!det_a || !det_b || (*det_a > 0.0) == (*det_b > 0.0)) continue;

    bool failed = false;
    for (int it = 0; it < max_iterations; ++it) {
      ++result.iterations;
      const Eigen::VectorXd mid = 0.5 * (a + b);
      const auto det_mid = detail::sampled_det(graph, mid, actuator, sensor, -1);
      if (!det_mid) {
        failed = true;  // degenerate midpoint; try another segment
        break;
      }
      if (std::abs(*det_mid) < target) {
        result.converged = true;
        result.configuration = mid;
        result.det = *det_mid;
        return result;
      }
      if ((*det_mid > 0.0) == (*det_a > 0.0)) {
        a = mid;
        det_a = det_mid;
      } else {
        b = mid;
        det_b = det_mid;
      }
    }
    if (!failed) {
      result.configuration = 0.5 * (a + b);
      result.det = detail::sampled_det(graph, result.configuration, actuator, sensor, -1)
                       .value_or(std::numeric_limits<double>::quiet_NaN());
      return result;
    }
  }
  return result;
}

}  // namespace ftz

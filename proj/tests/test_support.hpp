#pragma once

#include <Eigen/Dense>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ftz/formation.hpp"
#include "ftz/formation_io.hpp"
#include "ftz/modal.hpp"

namespace ftz::testing {

inline std::string fixture_path(const std::string& name) {
  return std::string(FTZ_FORMATIONS_DIR) + "/" + name;
}

inline FormationSpec load_fixture(const std::string& name) {
  return parse_formation_file(fixture_path(name));
}

inline Framework load_framework(const std::string& name) {
  return build_framework(load_fixture(name));
}

/// Central finite differences of the rigidity function; the independent
/// oracle for the analytic Jacobian.
inline Eigen::MatrixXd fd_jacobian(const Framework& fw, const Eigen::VectorXd& p, double h) {
  const Eigen::Index rows = static_cast<Eigen::Index>(fw.spec.edges.size());
  Eigen::MatrixXd jac(rows, p.size());
  Eigen::VectorXd probe = p;
  for (Eigen::Index c = 0; c < p.size(); ++c) {
    probe(c) = p(c) + h;
    const Eigen::VectorXd upper = rigidity_function(fw, probe);
    probe(c) = p(c) - h;
    const Eigen::VectorXd lower = rigidity_function(fw, probe);
    probe(c) = p(c);
    jac.col(c) = (upper - lower) / (2.0 * h);
  }
  return jac;
}

/// Largest principal angle (radians) between the column spans of two bases.
/// Sine-based formula sin(theta) = ||(I - Q_a Q_a^T) Q_b||_2, which keeps full
/// precision for tiny angles where acos of a Gram singular value cannot.
inline double max_principal_angle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const Eigen::HouseholderQR<Eigen::MatrixXd> qa(a), qb(b);
  const Eigen::MatrixXd qa_thin =
      qa.householderQ() * Eigen::MatrixXd::Identity(a.rows(), a.cols());
  const Eigen::MatrixXd qb_thin =
      qb.householderQ() * Eigen::MatrixXd::Identity(b.rows(), b.cols());
  const Eigen::MatrixXd residual = qb_thin - qa_thin * (qa_thin.transpose() * qb_thin);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(residual);
  return std::asin(std::min(1.0, svd.singularValues().maxCoeff()));
}

inline FormationSpec make_spec(const std::string& name,
                               const std::vector<Eigen::Vector2d>& positions,
                               const std::vector<std::pair<int, int>>& edges) {
  FormationSpec spec;
  spec.name = name;
  for (std::size_t k = 0; k < positions.size(); ++k) {
    spec.nodes.push_back({static_cast<int>(k) + 1, positions[k]});
  }
  spec.edges = edges;
  return spec;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

inline std::vector<Eigen::Vector2d> random_positions(std::mt19937_64& rng, int n,
                                                     double box = 3.0) {
  std::vector<Eigen::Vector2d> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    out.emplace_back(uniform(rng, -box, box), uniform(rng, -box, box));
  }
  return out;
}

/// Minimally rigid graph on n >= 3 nodes by Henneberg vertex additions: a
/// triangle plus one degree-2 node at a time.
inline std::vector<std::pair<int, int>> henneberg_edges(std::mt19937_64& rng, int n) {
  std::vector<std::pair<int, int>> edges = {{1, 2}, {1, 3}, {2, 3}};
  for (int v = 4; v <= n; ++v) {
    const int a = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(v - 1));
    int b = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(v - 2));
    if (b >= a) ++b;
    edges.emplace_back(a, v);
    edges.emplace_back(b, v);
  }
  return edges;
}

/// Random generically rigid framework: Henneberg graph with random positions,
/// resampled until the kernel is exactly the three rigid-body modes.
inline Framework random_rigid_framework(std::mt19937_64& rng, int n) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    const auto spec = make_spec("random-rigid", random_positions(rng, n), henneberg_edges(rng, n));
    const Framework fw = build_framework(spec);
    const ModalDecomposition md = modal_decomposition(fw);
    if (md.kernel_dim == 3 && !md.threshold_ambiguous) return fw;
  }
  throw std::runtime_error("failed to draw a rigid framework");
}

/// Random connected graph with a spare edge budget; generically flexible when
/// the edge count stays below 2n - 3.
inline std::vector<std::pair<int, int>> spanning_tree_edges(std::mt19937_64& rng, int n,
                                                            int extra) {
  std::vector<std::pair<int, int>> edges;
  for (int v = 2; v <= n; ++v) {
    const int parent = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(v - 1));
    edges.emplace_back(parent, v);
  }
  auto has_edge = [&](int a, int b) {
    const std::pair<int, int> key = std::minmax(a, b);
    for (const auto& [u, v] : edges) {
      if (std::pair<int, int>(std::minmax(u, v)) == key) return true;
    }
    return false;
  };
  int added = 0;
  int guard = 0;
  while (added < extra && ++guard < 200) {
    const int a = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n));
    const int b = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n));
    if (a == b || has_edge(a, b)) continue;
    edges.emplace_back(a, b);
    ++added;
  }
  return edges;
}

/// Random generically flexible framework (at least one internal flex).
inline Framework random_flexible_framework(std::mt19937_64& rng, int n) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    const int max_edges = 2 * n - 4;  // below the rigidity count
    const int extra = static_cast<int>(rng() % static_cast<std::uint64_t>(
                          std::max(1, max_edges - (n - 1) + 1)));
    const auto spec =
        make_spec("random-flexible", random_positions(rng, n), spanning_tree_edges(rng, n, extra));
    const Framework fw = build_framework(spec);
    const ModalDecomposition md = modal_decomposition(fw);
    if (md.kernel_dim > 3 && !md.threshold_ambiguous &&
        md.flex_count() == md.kernel_dim - 3) {
      return fw;
    }
  }
  throw std::runtime_error("failed to draw a flexible framework");
}

}  // namespace ftz::testing

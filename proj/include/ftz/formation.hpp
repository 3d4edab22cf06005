#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "ftz/errors.hpp"

namespace ftz {

/// Generator of 2D rotations: Omega * v rotates v by +90 degrees.
inline Eigen::Matrix2d rotation_generator() {
  Eigen::Matrix2d omega;
  omega << 0.0, -1.0, 1.0, 0.0;
  return omega;
}

/// Named sensing graph with target coordinates. The persistent input artifact;
/// every analysis starts from one of these.
struct FormationSpec {
  struct Node {
    int id = 0;
    Eigen::Vector2d position = Eigen::Vector2d::Zero();
  };

  std::string name;
  int dimension = 2;
  std::vector<Node> nodes;                  // order as authored
  std::vector<std::pair<int, int>> edges;   // unordered id pairs
};

/// Collects every schema violation in `spec` (empty result means valid).
/// Duplicate ids, dangling edge endpoints, self-loops, duplicate undirected
/// edges, non-finite coordinates and unsupported dimensions are all reported
/// in one pass so file-level diagnostics can list them together.
inline std::vector<std::pair<errc, std::string>> spec_violations(const FormationSpec& spec) {
  std::vector<std::pair<errc, std::string>> out;
  if (spec.dimension != 2) {
    out.emplace_back(errc::schema_violation,
                     "dimension must be 2, got " + std::to_string(spec.dimension));
  }
  if (spec.nodes.empty()) {
    out.emplace_back(errc::schema_violation, "formation has no nodes");
  }
  std::vector<int> ids;
  for (const auto& node : spec.nodes) {
    if (node.id <= 0) {
      out.emplace_back(errc::schema_violation,
                       "node id must be a positive integer, got " + std::to_string(node.id));
    }
    if (!node.position.allFinite()) {
      out.emplace_back(errc::schema_violation,
                       "node " + std::to_string(node.id) + " has a non-finite position");
    }
    ids.push_back(node.id);
  }
  std::sort(ids.begin(), ids.end());
  for (std::size_t k = 1; k < ids.size(); ++k) {
    if (ids[k] == ids[k - 1]) {
      out.emplace_back(errc::schema_violation, "duplicate node id " + std::to_string(ids[k]));
    }
  }
  auto known = [&](int id) { return std::binary_search(ids.begin(), ids.end(), id); };
  std::vector<std::pair<int, int>> seen;
  for (const auto& [a, b] : spec.edges) {
    if (a == b) {
      out.emplace_back(errc::self_loop, "self-loop at node " + std::to_string(a));
      continue;
    }
    for (int id : {a, b}) {
      if (!known(id)) {
        out.emplace_back(errc::unknown_node_id,
                         "edge references unknown node id " + std::to_string(id));
      }
    }
    const std::pair<int, int> key = std::minmax(a, b);
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
      out.emplace_back(errc::duplicate_edge,
                       "duplicate edge (" + std::to_string(key.first) + "," +
                           std::to_string(key.second) + ")");
    }
    seen.push_back(key);
  }
  return out;
}

/// Validated formation at its target configuration. Node ids sorted ascending
/// define the block order of the stacked coordinate vector.
struct Framework {
  FormationSpec spec;
  std::vector<int> ids;        // sorted ascending; ids[k] owns blocks 2k,2k+1
  Eigen::VectorXd target;      // stacked target configuration, 2n
  Eigen::Vector2d centroid;    // (1/n) sum of target positions
  double polar_inertia = 0.0;  // sum of squared distances to the centroid
  bool degenerate_span = false;  // true when the targets do not affinely span the plane

  int agent_count() const { return static_cast<int>(ids.size()); }

  int index_of(int id) const {
    auto it = std::lower_bound(ids.begin(), ids.end(), id);
    if (it == ids.end() || *it != id) {
      throw Error(errc::unknown_node_id, "no node with id " + std::to_string(id));
    }
    return static_cast<int>(it - ids.begin());
  }

  Eigen::Vector2d target_position(int id) const {
    return target.segment<2>(2 * index_of(id));
  }
};

/// Validates the spec and precomputes centroid and polar moment of inertia.
/// Collinear configurations are allowed (degenerate_span flags them); a fully
/// coincident configuration has no usable rotational mode and is rejected.
inline Framework build_framework(const FormationSpec& spec) {
  auto violations = spec_violations(spec);
  if (!violations.empty()) {
    throw Error(violations.front().first, violations.front().second);
  }

  Framework fw;
  fw.spec = spec;
  fw.ids.reserve(spec.nodes.size());
  for (const auto& node : spec.nodes) fw.ids.push_back(node.id);
  std::sort(fw.ids.begin(), fw.ids.end());

  const int n = fw.agent_count();
  fw.target.resize(2 * n);
  for (const auto& node : spec.nodes) {
    auto it = std::lower_bound(fw.ids.begin(), fw.ids.end(), node.id);
    fw.target.segment<2>(2 * static_cast<int>(it - fw.ids.begin())) = node.position;
  }

  fw.centroid.setZero();
  for (int k = 0; k < n; ++k) fw.centroid += fw.target.segment<2>(2 * k);
  fw.centroid /= static_cast<double>(n);

  Eigen::Matrix2Xd centered(2, n);
  for (int k = 0; k < n; ++k) {
    centered.col(k) = fw.target.segment<2>(2 * k) - fw.centroid;
  }
  fw.polar_inertia = centered.squaredNorm();
  if (fw.polar_inertia <= 0.0) {
    throw Error(errc::coincident_all_nodes,
                "all nodes coincide; polar moment of inertia is zero");
  }

  // Affine span check: second singular value of the centered coordinates.
  Eigen::JacobiSVD<Eigen::Matrix2Xd> svd(centered);
  const double s0 = svd.singularValues()(0);
  const double s1 = svd.singularValues().size() > 1 ? svd.singularValues()(1) : 0.0;
  fw.degenerate_span = (n < 3) || (s1 <= 1e-12 * std::max(1.0, s0));
  return fw;
}

/// Half squared inter-agent distance per edge, evaluated at configuration p.
inline Eigen::VectorXd rigidity_function(const Framework& fw, const Eigen::VectorXd& p) {
  Eigen::VectorXd value(static_cast<Eigen::Index>(fw.spec.edges.size()));
  Eigen::Index row = 0;
  for (const auto& [a, b] : fw.spec.edges) {
    const Eigen::Vector2d d = p.segment<2>(2 * fw.index_of(a)) - p.segment<2>(2 * fw.index_of(b));
    value(row++) = 0.5 * d.squaredNorm();
  }
  return value;
}

/// Jacobian of the rigidity function at p. Row (i,j) carries (p_i - p_j)^T in
/// block i and its negation in block j. A coincident edge yields a zero row;
/// the matrix is still well defined.
inline Eigen::MatrixXd rigidity_matrix(const Framework& fw, const Eigen::VectorXd& p) {
  const int n = fw.agent_count();
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(fw.spec.edges.size()), 2 * n);
  Eigen::Index row = 0;
  for (const auto& [a, b] : fw.spec.edges) {
    const int ia = fw.index_of(a);
    const int ib = fw.index_of(b);
    const Eigen::Vector2d d = p.segment<2>(2 * ia) - p.segment<2>(2 * ib);
    jac.block<1, 2>(row, 2 * ia) = d.transpose();
    jac.block<1, 2>(row, 2 * ib) = -d.transpose();
    ++row;
  }
  return jac;
}

/// Edge indices whose endpoints coincide at p (zero rows of the Jacobian).
inline std::vector<int> coincident_edges(const Framework& fw, const Eigen::VectorXd& p,
                                         double tol = 0.0) {
  std::vector<int> out;
  int row = 0;
  for (const auto& [a, b] : fw.spec.edges) {
    const Eigen::Vector2d d = p.segment<2>(2 * fw.index_of(a)) - p.segment<2>(2 * fw.index_of(b));
    if (d.norm() <= tol) out.push_back(row);
    ++row;
  }
  return out;
}

/// Orthonormal rigid-body modes as columns [v_x, v_y, v_r]: two uniform
/// translations and the global rotation about the centroid,
///   [v_x]_k = (1/sqrt(n)) e_1,  [v_y]_k = (1/sqrt(n)) e_2,
///   [v_r]_k = (1/sqrt(J_p)) Omega (p_k* - p_cm).
inline Eigen::MatrixXd rbm_basis(const Framework& fw) {
  if (fw.polar_inertia <= 0.0) {
    throw Error(errc::zero_inertia, "rotational mode undefined: polar inertia is zero");
  }
  const int n = fw.agent_count();
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(2 * n, 3);
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  const double inv_sqrt_j = 1.0 / std::sqrt(fw.polar_inertia);
  const Eigen::Matrix2d omega = rotation_generator();
  for (int k = 0; k < n; ++k) {
    basis(2 * k, 0) = inv_sqrt_n;
    basis(2 * k + 1, 1) = inv_sqrt_n;
    basis.block<2, 1>(2 * k, 2) =
        inv_sqrt_j * omega * (fw.target.segment<2>(2 * k) - fw.centroid);
  }
  return basis;
}

}  // namespace ftz

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "ftz/errors.hpp"
#include "ftz/formation.hpp"

namespace ftz {

/// One safe transmission half-plane. The boundary is the zero-transmission
/// line of actuator `node`; the safe side contains the centroid:
///   <normal, x - centroid> > offset,  normal = p_i* - p_cm,  offset = -J_p/n.
struct HalfPlane {
  int node = 0;
  Eigen::Vector2d normal = Eigen::Vector2d::Zero();
  double offset = 0.0;

  /// Signed boundary distance of x, in units of the unit-normalized constraint.
  double unit_residual(const Eigen::Vector2d& x, const Eigen::Vector2d& centroid) const {
    return (normal.dot(x - centroid) - offset) / normal.norm();
  }
};

/// Zero-transmission line of actuator i: the set of sensor positions x with
/// <p_i* - p_cm, x - p_cm> = -J_p/n. Undefined when the actuator sits at the
/// centroid (its rotational mode is pinned).
inline HalfPlane spatial_locus(const Framework& fw, int actuator) {
  HalfPlane hp;
  hp.node = actuator;
  hp.normal = fw.target_position(actuator) - fw.centroid;
  hp.offset = -fw.polar_inertia / fw.agent_count();
  if (hp.normal.norm() == 0.0) {
    throw Error(errc::centroid_actuator,
                "node " + std::to_string(actuator) +
                    " sits at the centroid; its locus line is undefined");
  }
  return hp;
}

/// Scalar rank-drop residual 1 + (n/J_p) <p_i* - p_cm, x - p_cm>.
/// Zero exactly on the locus line of actuator i, positive on the safe side.
inline double locus_residual(const Framework& fw, int actuator, const Eigen::Vector2d& x) {
  const Eigen::Vector2d rel = fw.target_position(actuator) - fw.centroid;
  return 1.0 + (fw.agent_count() / fw.polar_inertia) * rel.dot(x - fw.centroid);
}

/// Convex intersection of all safe half-planes, clipped to a square of
/// half-width clip_box around the centroid.
struct TransmissionPolygon {
  Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
  std::vector<HalfPlane> halfplanes;       // one per node, centroid nodes skipped
  std::vector<int> skipped_nodes;          // nodes at the centroid (pinned rotation)
  std::vector<Eigen::Vector2d> vertices;   // counterclockwise boundary
  bool bounded = true;
  double clip_box = 0.0;
};

enum class Region { Interior, Boundary, Exterior };

struct Membership {
  Region region = Region::Interior;
  std::vector<int> nodes;  // Boundary: binding constraints; Exterior: violated ones
};

namespace detail {

/// Clips a convex CCW polygon against <normal, x - centroid> >= offset.
inline std::vector<Eigen::Vector2d> clip_halfplane(const std::vector<Eigen::Vector2d>& poly,
                                                   const Eigen::Vector2d& centroid,
                                                   const Eigen::Vector2d& normal,
                                                   double offset) {
  std::vector<Eigen::Vector2d> out;
  const std::size_t count = poly.size();
  for (std::size_t k = 0; k < count; ++k) {
    const Eigen::Vector2d& a = poly[k];
    const Eigen::Vector2d& b = poly[(k + 1) % count];
    const double ra = normal.dot(a - centroid) - offset;
    const double rb = normal.dot(b - centroid) - offset;
    if (ra >= 0.0) out.push_back(a);
    if ((ra > 0.0 && rb < 0.0) || (ra < 0.0 && rb > 0.0)) {
      const double t = ra / (ra - rb);
      out.push_back(a + t * (b - a));
    }
  }
  return out;
}

}  // namespace detail

/// Builds the global transmission polygon by incremental half-plane clipping
/// of the square [-clip_box, clip_box]^2 centered on the centroid. Pass
/// clip_box <= 0 for the default half-width 4 * max_k ||p_k* - p_cm||.
/// The polygon is unbounded exactly when an edge of the clip square survives;
/// the intersection itself always contains the centroid.
inline TransmissionPolygon transmission_polygon(const Framework& fw, double clip_box = 0.0) {
  TransmissionPolygon poly;
  poly.centroid = fw.centroid;

  double max_radius = 0.0;
  for (int k = 0; k < fw.agent_count(); ++k) {
    max_radius = std::max(max_radius,
                          (fw.target.segment<2>(2 * k) - fw.centroid).norm());
  }
  poly.clip_box = clip_box > 0.0 ? clip_box : 4.0 * max_radius;

  for (int id : fw.ids) {
    const Eigen::Vector2d normal = fw.target_position(id) - fw.centroid;
    if (normal.norm() == 0.0) {
      poly.skipped_nodes.push_back(id);  // pinned rotation, constraint undefined
      continue;
    }
    poly.halfplanes.push_back({id, normal, -fw.polar_inertia / fw.agent_count()});
  }

  const double half = poly.clip_box;
  std::vector<Eigen::Vector2d> region = {
      fw.centroid + Eigen::Vector2d(half, -half),
      fw.centroid + Eigen::Vector2d(half, half),
      fw.centroid + Eigen::Vector2d(-half, half),
      fw.centroid + Eigen::Vector2d(-half, -half),
  };
  for (const auto& hp : poly.halfplanes) {
    region = detail::clip_halfplane(region, fw.centroid, hp.normal, hp.offset);
  }

  // Merge consecutive vertices that collapsed to the same point.
  const double merge_tol = 1e-9 * std::max(1.0, poly.clip_box);
  for (std::size_t k = 0; k < region.size();) {
    const Eigen::Vector2d& next = region[(k + 1) % region.size()];
    if (region.size() > 1 && (region[k] - next).norm() < merge_tol) {
      region.erase(region.begin() + static_cast<std::ptrdiff_t>(k));
    } else {
      ++k;
    }
  }
  poly.vertices = region;

  if (poly.vertices.empty()) {
    throw Error(errc::empty_intersection,
                "safe half-plane intersection came out empty; the centroid "
                "always belongs to it, so this is an implementation bug");
  }

  // A clip-square edge survives when two consecutive vertices lie on the same
  // side of the square.
  poly.bounded = true;
  const double side_tol = 1e-9 * std::max(1.0, half);
  auto on_side = [&](const Eigen::Vector2d& v, int axis, double sign) {
    return std::abs((v - fw.centroid)(axis) - sign * half) < side_tol;
  };
  const std::size_t count = poly.vertices.size();
  for (std::size_t k = 0; k < count && poly.bounded; ++k) {
    const Eigen::Vector2d& a = poly.vertices[k];
    const Eigen::Vector2d& b = poly.vertices[(k + 1) % count];
    for (int axis = 0; axis < 2 && poly.bounded; ++axis) {
      for (double sign : {-1.0, 1.0}) {
        if (on_side(a, axis, sign) && on_side(b, axis, sign)) {
          poly.bounded = false;
          break;
        }
      }
    }
  }
  return poly;
}

/// Classifies a sensor position against every half-plane with an absolute
/// tolerance of 1e-9 on unit-normalized residuals. Exterior lists the
/// violated actuator constraints, Boundary the binding ones.
inline Membership polygon_membership(const TransmissionPolygon& poly, const Eigen::Vector2d& x) {
  constexpr double tol = 1e-9;
  Membership result;
  std::vector<int> binding;
  for (const auto& hp : poly.halfplanes) {
    const double res = hp.unit_residual(x, poly.centroid);
    if (res < -tol) {
      result.nodes.push_back(hp.node);
    } else if (res <= tol) {
      binding.push_back(hp.node);
    }
  }
  if (!result.nodes.empty()) {
    result.region = Region::Exterior;
  } else if (!binding.empty()) {
    result.region = Region::Boundary;
    result.nodes = binding;
  } else {
    result.region = Region::Interior;
  }
  return result;
}

}  // namespace ftz

#pragma once

#include <stdexcept>
#include <string>

namespace ftz {

/// Machine-readable failure categories surfaced by the toolkit.
enum class errc {
  duplicate_edge,
  unknown_node_id,
  self_loop,
  coincident_all_nodes,
  zero_inertia,
  no_pivot_found,
  centroid_actuator,
  empty_intersection,
  divergence,
  not_flexible_graph,
  parse_error,
  schema_violation,
  invalid_argument,
};

inline const char* errc_name(errc code) {
  switch (code) {
    case errc::duplicate_edge: return "DuplicateEdge";
    case errc::unknown_node_id: return "UnknownNodeId";
    case errc::self_loop: return "SelfLoop";
    case errc::coincident_all_nodes: return "CoincidentAllNodes";
    case errc::zero_inertia: return "ZeroInertia";
    case errc::no_pivot_found: return "NoPivotFound";
    case errc::centroid_actuator: return "CentroidActuator";
    case errc::empty_intersection: return "EmptyIntersection";
    case errc::divergence: return "Divergence";
    case errc::not_flexible_graph: return "NotFlexibleGraph";
    case errc::parse_error: return "ParseError";
    case errc::schema_violation: return "SchemaViolation";
    case errc::invalid_argument: return "InvalidArgument";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  errc code() const { return code_; }

 private:
  errc code_;
};

}  // namespace ftz

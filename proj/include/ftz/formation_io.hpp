#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ftz/errors.hpp"
#include "ftz/formation.hpp"

namespace ftz {

/// Doubles rendered with 17 significant digits: round-trips exactly and keeps
/// reports byte-identical across runs.
inline std::string fmt_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

inline std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

/// Parses a formation document. Unknown keys are rejected and all schema
/// violations are reported at once.
inline FormationSpec parse_formation_json(const std::string& text,
                                          const std::string& origin = "<string>") {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    throw Error(errc::parse_error, origin + ": " + err.what());
  }

  std::vector<std::string> problems;
  auto complain = [&](const std::string& what) { problems.push_back(what); };

  if (!doc.is_object()) {
    throw Error(errc::schema_violation, origin + ": top level must be an object");
  }
  for (const auto& [key, value] : doc.items()) {
    (void)value;
    if (key != "name" && key != "dimension" && key != "nodes" && key != "edges") {
      complain("unknown key \"" + key + "\"");
    }
  }

  FormationSpec spec;
  if (!doc.contains("name") || !doc["name"].is_string()) {
    complain("\"name\" must be a string");
  } else {
    spec.name = doc["name"].get<std::string>();
  }
  if (!doc.contains("dimension") || !doc["dimension"].is_number_integer()) {
    complain("\"dimension\" must be an integer");
  } else {
    spec.dimension = doc["dimension"].get<int>();
  }
  if (!doc.contains("nodes") || !doc["nodes"].is_array()) {
    complain("\"nodes\" must be an array");
  } else {
    for (const auto& entry : doc["nodes"]) {
      if (!entry.is_object()) {
        complain("node entries must be objects");
        continue;
      }
      for (const auto& [key, value] : entry.items()) {
        (void)value;
        if (key != "id" && key != "position") complain("unknown node key \"" + key + "\"");
      }
      FormationSpec::Node node;
      if (!entry.contains("id") || !entry["id"].is_number_integer()) {
        complain("node \"id\" must be an integer");
        continue;
      }
      node.id = entry["id"].get<int>();
      if (!entry.contains("position") || !entry["position"].is_array() ||
          entry["position"].size() != 2 || !entry["position"][0].is_number() ||
          !entry["position"][1].is_number()) {
        complain("node " + std::to_string(node.id) + " \"position\" must be [x, y]");
        continue;
      }
      node.position << entry["position"][0].get<double>(), entry["position"][1].get<double>();
      spec.nodes.push_back(node);
    }
  }
  if (!doc.contains("edges") || !doc["edges"].is_array()) {
    complain("\"edges\" must be an array");
  } else {
    for (const auto& entry : doc["edges"]) {
      if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number_integer() ||
          !entry[1].is_number_integer()) {
        complain("edges must be [id, id] pairs");
        continue;
      }
      spec.edges.emplace_back(entry[0].get<int>(), entry[1].get<int>());
    }
  }

  for (const auto& [code, what] : spec_violations(spec)) {
    (void)code;
    complain(what);
  }
  if (!problems.empty()) {
    std::string joined = origin + ":";
    for (const auto& p : problems) joined += "\n  - " + p;
    throw Error(errc::schema_violation, joined);
  }
  return spec;
}

inline FormationSpec parse_formation_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(errc::parse_error, "cannot open formation file: " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_formation_json(buffer.str(), path);
}

/// Canonical emission of a formation document; parse(emit(spec)) == spec.
inline std::string emit_formation_json(const FormationSpec& spec) {
  std::ostringstream out;
  out << "{\n  \"name\": \"" << json_escape(spec.name) << "\",\n";
  out << "  \"dimension\": " << spec.dimension << ",\n";
  out << "  \"nodes\": [\n";
  for (std::size_t k = 0; k < spec.nodes.size(); ++k) {
    const auto& node = spec.nodes[k];
    out << "    {\"id\": " << node.id << ", \"position\": [" << fmt_double(node.position.x())
        << ", " << fmt_double(node.position.y()) << "]}"
        << (k + 1 < spec.nodes.size() ? "," : "") << "\n";
  }
  out << "  ],\n  \"edges\": [";
  for (std::size_t k = 0; k < spec.edges.size(); ++k) {
    out << "[" << spec.edges[k].first << ", " << spec.edges[k].second << "]"
        << (k + 1 < spec.edges.size() ? ", " : "");
  }
  out << "]\n}\n";
  return out.str();
}

}  // namespace ftz

// ftz — steady-state transmission-zero analysis for distance-based formations.
//
// Subcommands: analyze, dcgain, locus, polygon, freqresp, simulate,
// montecarlo. Every command reads a formation file, runs one analysis, and
// emits a JSON or CSV report (stdout or --out). Analytical findings such as a
// detected transmission zero are data with exit status 0; only tool failures
// exit nonzero, with a machine-readable error record on stderr.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ftz/dcgain.hpp"
#include "ftz/dynamics.hpp"
#include "ftz/errors.hpp"
#include "ftz/formation.hpp"
#include "ftz/formation_io.hpp"
#include "ftz/geometry.hpp"
#include "ftz/modal.hpp"
#include "ftz/montecarlo.hpp"

namespace {

using ftz::fmt_double;
using ftz::json_escape;

std::string num(double v) {
  if (std::isnan(v)) return "null";
  return fmt_double(v);
}

std::string vec2(const Eigen::Vector2d& v) {
  return "[" + fmt_double(v.x()) + ", " + fmt_double(v.y()) + "]";
}

std::string region_name(ftz::Region r) {
  switch (r) {
    case ftz::Region::Interior: return "Interior";
    case ftz::Region::Boundary: return "Boundary";
    case ftz::Region::Exterior: return "Exterior";
  }
  return "?";
}

/// Kernel mode labels in basis order: translations, rotation, flexes.
std::vector<std::string> mode_labels(const ftz::ModalDecomposition& md) {
  std::vector<std::string> labels = {"tx", "ty", "rot"};
  for (int k = 1; k <= md.flex_count(); ++k) labels.push_back("flex" + std::to_string(k));
  return labels;
}

struct OutputOptions {
  std::string format = "json";
  std::string out_path;
};

void add_output_flags(CLI::App* cmd, OutputOptions& opts) {
  cmd->add_option("--format", opts.format, "report format (json or csv)")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--out", opts.out_path, "write the report to this path instead of stdout");
}

/// Single atomic write: buffer the whole report, then rename into place.
void deliver(const OutputOptions& opts, const std::string& report) {
  if (opts.out_path.empty()) {
    std::cout << report;
    return;
  }
  namespace fs = std::filesystem;
  const fs::path target(opts.out_path);
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw ftz::Error(ftz::errc::invalid_argument, "cannot write to " + opts.out_path);
    }
    out << report;
  }
  fs::rename(tmp, target);
}

std::string cmd_analyze(const ftz::Framework& fw, const std::string& format) {
  const ftz::ModalDecomposition md = ftz::modal_decomposition(fw);
  const auto labels = mode_labels(md);
  const auto zero_rows = ftz::coincident_edges(fw, fw.target);

  std::vector<std::pair<int, std::vector<std::string>>> pinned;
  for (int id : fw.ids) {
    const auto flags = ftz::pinned_check(md, id);
    std::vector<std::string> modes;
    for (std::size_t k = 0; k < flags.size(); ++k) {
      if (flags[k]) modes.push_back(labels[k]);
    }
    if (!modes.empty()) pinned.emplace_back(id, modes);
  }

  std::ostringstream os;
  if (format == "json") {
    os << "{\n";
    os << "  \"formation\": \"" << json_escape(fw.spec.name) << "\",\n";
    os << "  \"agents\": " << fw.agent_count() << ",\n";
    os << "  \"edges\": " << fw.spec.edges.size() << ",\n";
    os << "  \"centroid\": " << vec2(fw.centroid) << ",\n";
    os << "  \"polar_inertia\": " << fmt_double(fw.polar_inertia) << ",\n";
    os << "  \"rigidity\": \"" << (md.flex_count() == 0 ? "rigid" : "flexible") << "\",\n";
    os << "  \"kernel_dim\": " << md.kernel_dim << ",\n";
    os << "  \"flex_count\": " << md.flex_count() << ",\n";
    os << "  \"zero_threshold\": " << fmt_double(md.zero_threshold) << ",\n";
    os << "  \"threshold_ambiguous\": " << (md.threshold_ambiguous ? "true" : "false") << ",\n";
    os << "  \"degenerate_span\": " << (fw.degenerate_span ? "true" : "false") << ",\n";
    os << "  \"coincident_edges\": [";
    for (std::size_t k = 0; k < zero_rows.size(); ++k) {
      os << zero_rows[k] << (k + 1 < zero_rows.size() ? ", " : "");
    }
    os << "],\n";
    os << "  \"eigenvalues\": [";
    for (Eigen::Index k = 0; k < md.eigenvalues.size(); ++k) {
      os << fmt_double(md.eigenvalues(k)) << (k + 1 < md.eigenvalues.size() ? ", " : "");
    }
    os << "],\n";
    os << "  \"pinned\": [";
    for (std::size_t k = 0; k < pinned.size(); ++k) {
      os << "{\"node\": " << pinned[k].first << ", \"modes\": [";
      for (std::size_t m = 0; m < pinned[k].second.size(); ++m) {
        os << "\"" << pinned[k].second[m] << "\""
           << (m + 1 < pinned[k].second.size() ? ", " : "");
      }
      os << "]}" << (k + 1 < pinned.size() ? ", " : "");
    }
    os << "]\n}\n";
  } else {
    os << "key,value\n";
    os << "formation," << fw.spec.name << "\n";
    os << "agents," << fw.agent_count() << "\n";
    os << "edges," << fw.spec.edges.size() << "\n";
    os << "centroid_x," << fmt_double(fw.centroid.x()) << "\n";
    os << "centroid_y," << fmt_double(fw.centroid.y()) << "\n";
    os << "polar_inertia," << fmt_double(fw.polar_inertia) << "\n";
    os << "rigidity," << (md.flex_count() == 0 ? "rigid" : "flexible") << "\n";
    os << "kernel_dim," << md.kernel_dim << "\n";
    os << "flex_count," << md.flex_count() << "\n";
    os << "zero_threshold," << fmt_double(md.zero_threshold) << "\n";
    os << "threshold_ambiguous," << (md.threshold_ambiguous ? "true" : "false") << "\n";
    os << "degenerate_span," << (fw.degenerate_span ? "true" : "false") << "\n";
    for (Eigen::Index k = 0; k < md.eigenvalues.size(); ++k) {
      os << "eigenvalue_" << k << "," << fmt_double(md.eigenvalues(k)) << "\n";
    }
    for (const auto& [id, modes] : pinned) {
      os << "pinned_" << id << ",";
      for (std::size_t m = 0; m < modes.size(); ++m) {
        os << modes[m] << (m + 1 < modes.size() ? ";" : "");
      }
      os << "\n";
    }
  }
  return os.str();
}

std::string cmd_dcgain(const ftz::Framework& fw, int i, int j, const std::string& format) {
  const ftz::ModalDecomposition md = ftz::modal_decomposition(fw);
  const ftz::ZeroTest zt = ftz::transmission_zero_test(md, i, j);

  std::ostringstream os;
  if (format == "json") {
    os << "{\n";
    os << "  \"formation\": \"" << json_escape(fw.spec.name) << "\",\n";
    os << "  \"actuator\": " << i << ",\n";
    os << "  \"sensor\": " << j << ",\n";
    os << "  \"verdict\": \"" << ftz::verdict_name(zt.verdict) << "\",\n";
    os << "  \"det_direct\": " << fmt_double(zt.det_direct) << ",\n";
    os << "  \"det_sylvester\": " << fmt_double(zt.det_sylvester) << ",\n";
    os << "  \"det_schur\": " << (zt.det_schur ? fmt_double(*zt.det_schur) : "null") << ",\n";
    os << "  \"schur_scalar\": "
       << (zt.coupling.schur_scalar ? fmt_double(*zt.coupling.schur_scalar) : "null") << ",\n";
    os << "  \"det_tolerance\": " << fmt_double(zt.det_tolerance) << ",\n";
    os << "  \"disagreement\": " << fmt_double(zt.disagreement) << ",\n";
    os << "  \"routes_agree\": " << (zt.routes_agree ? "true" : "false") << ",\n";
    os << "  \"rank\": " << zt.block.rank << ",\n";
    os << "  \"trace\": " << fmt_double(zt.block.trace) << ",\n";
    os << "  \"block\": [[" << fmt_double(zt.block.block(0, 0)) << ", "
       << fmt_double(zt.block.block(0, 1)) << "], [" << fmt_double(zt.block.block(1, 0)) << ", "
       << fmt_double(zt.block.block(1, 1)) << "]],\n";
    os << "  \"blocked_direction\": "
       << (zt.block.blocked_direction ? vec2(*zt.block.blocked_direction) : "null") << ",\n";
    os << "  \"actuator_pinned\": " << (zt.actuator_pinned ? "true" : "false") << ",\n";
    os << "  \"sensor_pinned\": " << (zt.sensor_pinned ? "true" : "false") << "\n";
    os << "}\n";
  } else {
    os << "actuator,sensor,det_direct,det_sylvester,schur_scalar,rank,"
          "blocked_x,blocked_y,actuator_pinned,sensor_pinned,verdict\n";
    os << i << "," << j << "," << fmt_double(zt.det_direct) << ","
       << fmt_double(zt.det_sylvester) << ","
       << (zt.coupling.schur_scalar ? fmt_double(*zt.coupling.schur_scalar) : "") << ","
       << zt.block.rank << ","
       << (zt.block.blocked_direction ? fmt_double(zt.block.blocked_direction->x()) : "") << ","
       << (zt.block.blocked_direction ? fmt_double(zt.block.blocked_direction->y()) : "") << ","
       << (zt.actuator_pinned ? "true" : "false") << ","
       << (zt.sensor_pinned ? "true" : "false") << "," << ftz::verdict_name(zt.verdict) << "\n";
  }
  return os.str();
}

std::string cmd_locus(const ftz::Framework& fw, int i, const std::string& format) {
  const ftz::HalfPlane locus = ftz::spatial_locus(fw, i);

  std::ostringstream os;
  if (format == "json") {
    os << "{\n";
    os << "  \"formation\": \"" << json_escape(fw.spec.name) << "\",\n";
    os << "  \"actuator\": " << i << ",\n";
    os << "  \"centroid\": " << vec2(fw.centroid) << ",\n";
    os << "  \"normal\": " << vec2(locus.normal) << ",\n";
    os << "  \"offset\": " << fmt_double(locus.offset) << ",\n";
    os << "  \"residuals\": [";
    bool first = true;
    for (int id : fw.ids) {
      if (!first) os << ", ";
      first = false;
      os << "{\"node\": " << id << ", \"residual\": "
         << fmt_double(ftz::locus_residual(fw, i, fw.target_position(id))) << "}";
    }
    os << "]\n}\n";
  } else {
    os << "# normal," << fmt_double(locus.normal.x()) << "," << fmt_double(locus.normal.y())
       << "\n";
    os << "# offset," << fmt_double(locus.offset) << "\n";
    os << "node,residual\n";
    for (int id : fw.ids) {
      os << id << "," << fmt_double(ftz::locus_residual(fw, i, fw.target_position(id))) << "\n";
    }
  }
  return os.str();
}

std::string cmd_polygon(const ftz::Framework& fw, double clip_box, const std::string& format) {
  const ftz::TransmissionPolygon poly = ftz::transmission_polygon(fw, clip_box);

  std::ostringstream os;
  if (format == "json") {
    os << "{\n";
    os << "  \"formation\": \"" << json_escape(fw.spec.name) << "\",\n";
    os << "  \"centroid\": " << vec2(poly.centroid) << ",\n";
    os << "  \"clip_box\": " << fmt_double(poly.clip_box) << ",\n";
    os << "  \"bounded\": " << (poly.bounded ? "true" : "false") << ",\n";
    os << "  \"halfplanes\": [";
    for (std::size_t k = 0; k < poly.halfplanes.size(); ++k) {
      const auto& hp = poly.halfplanes[k];
      os << "{\"node\": " << hp.node << ", \"normal\": " << vec2(hp.normal)
         << ", \"offset\": " << fmt_double(hp.offset) << "}"
         << (k + 1 < poly.halfplanes.size() ? ", " : "");
    }
    os << "],\n";
    os << "  \"skipped_nodes\": [";
    for (std::size_t k = 0; k < poly.skipped_nodes.size(); ++k) {
      os << poly.skipped_nodes[k] << (k + 1 < poly.skipped_nodes.size() ? ", " : "");
    }
    os << "],\n";
    os << "  \"vertices\": [";
    for (std::size_t k = 0; k < poly.vertices.size(); ++k) {
      os << vec2(poly.vertices[k]) << (k + 1 < poly.vertices.size() ? ", " : "");
    }
    os << "],\n";
    os << "  \"membership\": [";
    bool first = true;
    for (int id : fw.ids) {
      if (!first) os << ", ";
      first = false;
      const auto who = ftz::polygon_membership(poly, fw.target_position(id));
      os << "{\"node\": " << id << ", \"region\": \"" << region_name(who.region) << "\", "
         << "\"nodes\": [";
      for (std::size_t k = 0; k < who.nodes.size(); ++k) {
        os << who.nodes[k] << (k + 1 < who.nodes.size() ? ", " : "");
      }
      os << "]}";
    }
    os << "]\n}\n";
  } else {
    os << "x,y\n";
    for (const auto& v : poly.vertices) {
      os << fmt_double(v.x()) << "," << fmt_double(v.y()) << "\n";
    }
  }
  return os.str();
}

std::string cmd_freqresp(const ftz::Framework& fw, int i, int j, double wmin, double wmax,
                         int points, const std::string& format) {
  const ftz::ModalDecomposition md = ftz::modal_decomposition(fw);
  const ftz::FrequencyResponseTable table = ftz::frequency_response(md, i, j, wmin, wmax, points);

  std::ostringstream os;
  if (format == "csv") {
    os << "omega,sigma_min,sigma_max\n";
    for (std::size_t k = 0; k < table.omega.size(); ++k) {
      os << fmt_double(table.omega[k]) << "," << fmt_double(table.sigma_min[k]) << ","
         << fmt_double(table.sigma_max[k]) << "\n";
    }
  } else {
    os << "{\n  \"formation\": \"" << json_escape(fw.spec.name) << "\",\n";
    os << "  \"actuator\": " << i << ",\n  \"sensor\": " << j << ",\n";
    auto emit = [&](const char* key, const std::vector<double>& xs, bool last) {
      os << "  \"" << key << "\": [";
      for (std::size_t k = 0; k < xs.size(); ++k) {
        os << fmt_double(xs[k]) << (k + 1 < xs.size() ? ", " : "");
      }
      os << "]" << (last ? "\n" : ",\n");
    };
    emit("omega", table.omega, false);
    emit("sigma_min", table.sigma_min, false);
    emit("sigma_max", table.sigma_max, true);
    os << "}\n";
  }
  return os.str();
}

std::string cmd_simulate(const ftz::Framework& fw, int i, int j, const Eigen::Vector2d& w,
                         double t_final, double dt, bool nonlinear, const std::string& format) {
  const ftz::ModalDecomposition md = ftz::modal_decomposition(fw);

  double horizon = t_final;
  if (horizon <= 0.0) {
    // Default: long enough for every deformational transient to settle.
    double slowest = 0.0;
    for (Eigen::Index k = 0; k < md.eigenvalues.size(); ++k) {
      const double mag = std::abs(md.eigenvalues(k));
      if (mag > md.zero_threshold && (slowest == 0.0 || mag < slowest)) slowest = mag;
    }
    horizon = slowest > 0.0 ? 200.0 / slowest : 10.0;
  }

  const ftz::SimResult sim = nonlinear
                                 ? ftz::nonlinear_simulate(fw, i, j, w, horizon, dt)
                                 : ftz::lti_response(md, i, j, w, horizon, 1001);

  std::ostringstream os;
  if (format == "csv") {
    os << "t,y1,y2\n";
    for (std::size_t k = 0; k < sim.time.size(); ++k) {
      os << fmt_double(sim.time[k]) << "," << fmt_double(sim.outputs[k].x()) << ","
         << fmt_double(sim.outputs[k].y()) << "\n";
    }
    os << "# drift_estimate," << fmt_double(sim.drift_estimate.x()) << ","
       << fmt_double(sim.drift_estimate.y()) << "\n";
  } else {
    os << "{\n  \"formation\": \"" << json_escape(fw.spec.name) << "\",\n";
    os << "  \"actuator\": " << i << ",\n  \"sensor\": " << j << ",\n";
    os << "  \"model\": \"" << (nonlinear ? "nonlinear" : "lti") << "\",\n";
    os << "  \"w\": " << vec2(w) << ",\n";
    os << "  \"t\": [";
    for (std::size_t k = 0; k < sim.time.size(); ++k) {
      os << fmt_double(sim.time[k]) << (k + 1 < sim.time.size() ? ", " : "");
    }
    os << "],\n  \"y\": [";
    for (std::size_t k = 0; k < sim.outputs.size(); ++k) {
      os << vec2(sim.outputs[k]) << (k + 1 < sim.outputs.size() ? ", " : "");
    }
    os << "],\n  \"drift_estimate\": " << vec2(sim.drift_estimate) << "\n}\n";
  }
  return os.str();
}

std::string cmd_montecarlo(const ftz::FormationSpec& spec, int i, int j, std::uint64_t samples,
                           std::uint64_t seed, double box, const std::string& format) {
  const ftz::GenericityReport report = ftz::genericity_experiment(spec, i, j, samples, seed, box);

  std::ostringstream os;
  if (format == "json") {
    os << "{\n";
    os << "  \"graph\": \"" << json_escape(report.graph) << "\",\n";
    os << "  \"actuator\": " << report.actuator << ",\n";
    os << "  \"sensor\": " << report.sensor << ",\n";
    os << "  \"samples\": " << report.samples << ",\n";
    os << "  \"seed\": " << report.seed << ",\n";
    os << "  \"box\": " << fmt_double(report.box) << ",\n";
    os << "  \"zero_cut\": " << fmt_double(report.zero_cut) << ",\n";
    os << "  \"generic_flex_count\": " << report.generic_flex_count << ",\n";
    os << "  \"near_zero_count\": " << report.near_zero_count << ",\n";
    os << "  \"degenerate_count\": " << report.degenerate_count << ",\n";
    os << "  \"min_abs_det\": " << num(report.min_abs_det) << ",\n";
    os << "  \"histogram\": {\"log10_lo\": " << fmt_double(report.histogram.log10_lo)
       << ", \"log10_hi\": " << fmt_double(report.histogram.log10_hi) << ", \"underflow\": "
       << report.histogram.underflow << ", \"overflow\": " << report.histogram.overflow
       << ", \"counts\": [";
    for (std::size_t k = 0; k < report.histogram.counts.size(); ++k) {
      os << report.histogram.counts[k] << (k + 1 < report.histogram.counts.size() ? ", " : "");
    }
    os << "]},\n";
    os << "  \"det_magnitudes\": [";
    for (std::size_t k = 0; k < report.det_magnitudes.size(); ++k) {
      os << num(report.det_magnitudes[k])
         << (k + 1 < report.det_magnitudes.size() ? ", " : "");
    }
    os << "]\n}\n";
  } else {
    os << "# graph," << report.graph << "\n";
    os << "# pair," << report.actuator << "," << report.sensor << "\n";
    os << "# samples," << report.samples << "\n";
    os << "# seed," << report.seed << "\n";
    os << "# box," << fmt_double(report.box) << "\n";
    os << "# zero_cut," << fmt_double(report.zero_cut) << "\n";
    os << "# near_zero_count," << report.near_zero_count << "\n";
    os << "# degenerate_count," << report.degenerate_count << "\n";
    os << "# min_abs_det," << num(report.min_abs_det) << "\n";
    os << "log10_bin_lo,log10_bin_hi,count\n";
    os << "-inf," << fmt_double(report.histogram.log10_lo) << "," << report.histogram.underflow
       << "\n";
    for (std::size_t k = 0; k < report.histogram.counts.size(); ++k) {
      os << fmt_double(report.histogram.log10_lo + static_cast<double>(k)) << ","
         << fmt_double(report.histogram.log10_lo + static_cast<double>(k) + 1.0) << ","
         << report.histogram.counts[k] << "\n";
    }
    os << fmt_double(report.histogram.log10_hi) << ",inf," << report.histogram.overflow << "\n";
  }
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"steady-state transmission-zero analysis for planar formations"};
  app.require_subcommand(1);

  std::string formation_path;
  int actuator = 0;
  int sensor = 0;
  std::pair<double, double> w{1.0, 0.0};
  double t_final = -1.0;
  double dt = -1.0;
  bool nonlinear = false;
  double wmin = 1e-6;
  double wmax = 1e2;
  int points = 200;
  std::uint64_t samples = 10000;
  std::uint64_t seed = 42;
  double box = 3.0;
  double clip_box = -1.0;
  OutputOptions output;

  auto add_formation = [&](CLI::App* cmd) {
    cmd->add_option("formation", formation_path, "formation file (JSON)")->required();
    add_output_flags(cmd, output);
  };

  CLI::App* analyze = app.add_subcommand("analyze", "rigidity class and modal summary");
  add_formation(analyze);

  CLI::App* dcgain = app.add_subcommand("dcgain", "DC-gain block and zero verdict for a pair");
  dcgain->add_option("-i", actuator, "actuator node id")->required();
  dcgain->add_option("-j", sensor, "sensor node id")->required();
  add_formation(dcgain);

  CLI::App* locus = app.add_subcommand("locus", "zero-transmission line of an actuator");
  locus->add_option("-i", actuator, "actuator node id")->required();
  add_formation(locus);

  CLI::App* polygon = app.add_subcommand("polygon", "global transmission polygon");
  polygon->add_option("--clip-box", clip_box, "clip square half-width (default 4x max radius)");
  add_formation(polygon);

  CLI::App* freqresp = app.add_subcommand("freqresp", "singular values of s*G_ji(jw)");
  freqresp->add_option("-i", actuator, "actuator node id")->required();
  freqresp->add_option("-j", sensor, "sensor node id")->required();
  freqresp->add_option("--wmin", wmin, "lowest frequency [rad/s]")->capture_default_str();
  freqresp->add_option("--wmax", wmax, "highest frequency [rad/s]")->capture_default_str();
  freqresp->add_option("--points", points, "log-spaced grid size")->capture_default_str();
  add_formation(freqresp);

  CLI::App* simulate = app.add_subcommand("simulate", "disturbance response simulation");
  simulate->add_option("-i", actuator, "actuator node id")->required();
  simulate->add_option("-j", sensor, "sensor node id")->required();
  simulate->add_option("--w", w, "constant disturbance wx,wy")->delimiter(',');
  simulate->add_option("--tfinal", t_final, "horizon [s] (default 200/|lambda|_min)");
  simulate->add_option("--dt", dt, "RK4 step [s] (default 1e-3/|lambda|_max, nonlinear only)");
  simulate->add_flag("--nonlinear", nonlinear, "integrate the nonlinear gradient flow");
  add_formation(simulate);

  CLI::App* montecarlo = app.add_subcommand("montecarlo", "genericity experiment on a flexible graph");
  montecarlo->add_option("-i", actuator, "actuator node id")->required();
  montecarlo->add_option("-j", sensor, "sensor node id")->required();
  montecarlo->add_option("--samples", samples, "number of random embeddings")->capture_default_str();
  montecarlo->add_option("--seed", seed, "RNG seed")->capture_default_str();
  montecarlo->add_option("--box", box, "sampling box half-width")->capture_default_str();
  add_formation(montecarlo);

  CLI11_PARSE(app, argc, argv);

  // Table-shaped commands default to CSV; everything else to JSON.
  CLI::App* active = app.get_subcommands().front();
  if ((active == freqresp || active == simulate) && active->count("--format") == 0) {
    output.format = "csv";
  }

  try {
    const ftz::FormationSpec spec = ftz::parse_formation_file(formation_path);
    std::string report;
    if (analyze->parsed()) {
      report = cmd_analyze(ftz::build_framework(spec), output.format);
    } else if (dcgain->parsed()) {
      report = cmd_dcgain(ftz::build_framework(spec), actuator, sensor, output.format);
    } else if (locus->parsed()) {
      report = cmd_locus(ftz::build_framework(spec), actuator, output.format);
    } else if (polygon->parsed()) {
      report = cmd_polygon(ftz::build_framework(spec), clip_box, output.format);
    } else if (freqresp->parsed()) {
      report = cmd_freqresp(ftz::build_framework(spec), actuator, sensor, wmin, wmax, points,
                            output.format);
    } else if (simulate->parsed()) {
      report = cmd_simulate(ftz::build_framework(spec), actuator, sensor,
                            Eigen::Vector2d(w.first, w.second), t_final, dt, nonlinear,
                            output.format);
    } else if (montecarlo->parsed()) {
      report = cmd_montecarlo(spec, actuator, sensor, samples, seed, box, output.format);
    }
    deliver(output, report);
  } catch (const ftz::Error& err) {
    std::cerr << "{\"error\": {\"code\": \"" << ftz::errc_name(err.code()) << "\", \"message\": \""
              << json_escape(err.what()) << "\"}}\n";
    return 1;
  } catch (const std::exception& err) {
    std::cerr << "{\"error\": {\"code\": \"Internal\", \"message\": \"" << json_escape(err.what())
              << "\"}}\n";
    return 1;
  }
  return 0;
}

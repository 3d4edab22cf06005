#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <vector>

#include "ftz/errors.hpp"
#include "ftz/modal.hpp"

namespace ftz {

/// Orthogonal projector onto ker(R(p*)), assembled as the sum of outer
/// products of the rigid-body and flex basis vectors. Symmetric by
/// construction and idempotent up to round-off.
inline Eigen::MatrixXd kernel_projector(const ModalDecomposition& md) {
  Eigen::MatrixXd proj = md.rbm * md.rbm.transpose();
  if (md.flex_count() > 0) proj += md.flex * md.flex.transpose();
  return proj;
}

/// Steady-state map between one actuator-sensor pair: the 2x2 block of the
/// kernel projector, with its rank verdict and blocked input direction.
struct DcGainBlock {
  int actuator = 0;                 // node id i (disturbance entry)
  int sensor = 0;                   // node id j (measured output)
  Eigen::Matrix2d block;            // [P0]_ji
  double determinant = 0.0;
  double trace = 0.0;
  int rank = 2;
  std::optional<Eigen::Vector2d> blocked_direction;  // right null vector, rank 1 only
};

/// Extracts [P0]_ji from the full kernel projector and classifies its rank by
/// singular values (cutoff 1e-9 * (1 + sigma_max)).
inline DcGainBlock dc_gain_block(const ModalDecomposition& md, int actuator, int sensor) {
  const Eigen::MatrixXd proj = kernel_projector(md);
  DcGainBlock out;
  out.actuator = actuator;
  out.sensor = sensor;
  out.block = proj.block<2, 2>(2 * md.index_of(sensor), 2 * md.index_of(actuator));
  out.determinant = out.block.determinant();
  out.trace = out.block.trace();

  Eigen::JacobiSVD<Eigen::Matrix2d> svd(out.block, Eigen::ComputeFullV);
  const double s0 = svd.singularValues()(0);
  const double s1 = svd.singularValues()(1);
  const double cutoff = 1e-9 * (1.0 + s0);
  out.rank = (s0 > cutoff ? 1 : 0) + (s1 > cutoff ? 1 : 0);
  if (out.rank == 1) {
    Eigen::Vector2d dir = svd.matrixV().col(1);
    // Deterministic sign: largest-magnitude component positive.
    const int lead = std::abs(dir(0)) >= std::abs(dir(1)) ? 0 : 1;
    if (dir(lead) < 0.0) dir = -dir;
    out.blocked_direction = dir;
  }
  return out;
}

/// Modal cross-coupling between a pair of agents: the (1+n_f) x (1+n_f)
/// matrix H = I + n V^T U built from the rotational and flex mode overlaps,
///   psi_rr          = <[v_r]_i, [v_r]_j>
///   [psi_rz]_b      = <[v_r]_i, [z_b]_j>
///   [psi_zr]_a      = <[z_a]_i, [v_r]_j>
///   [psi_zz]_ab     = <[z_a]_i, [z_b]_j>.
/// det([P0]_ji) = det(H) / n^2 (Sylvester's determinant identity), and when
/// M = I + n psi_zz is invertible the Schur complement collapses det(H) to
/// det(M) * (1 + n psi_rr - n^2 psi_rz M^{-1} psi_zr).
struct CrossCoupling {
  Eigen::MatrixXd H;
  double psi_rr = 0.0;
  Eigen::RowVectorXd psi_rz;
  Eigen::VectorXd psi_zr;
  Eigen::MatrixXd psi_zz;
  std::optional<double> schur_scalar;  // absent when M is numerically singular
  double det_H = 0.0;
  double det_M = 1.0;
};

inline CrossCoupling cross_coupling(const ModalDecomposition& md, int actuator, int sensor) {
  const int n = md.agent_count();
  const int nf = md.flex_count();
  const int bi = 2 * md.index_of(actuator);
  const int bj = 2 * md.index_of(sensor);

  const Eigen::Vector2d rot_i = md.rbm.block<2, 1>(bi, 2);
  const Eigen::Vector2d rot_j = md.rbm.block<2, 1>(bj, 2);

  CrossCoupling cc;
  cc.psi_rr = rot_i.dot(rot_j);
  cc.psi_rz.resize(nf);
  cc.psi_zr.resize(nf);
  cc.psi_zz.resize(nf, nf);
  for (int a = 0; a < nf; ++a) {
    const Eigen::Vector2d flex_i = md.flex.block<2, 1>(bi, a);
    const Eigen::Vector2d flex_j = md.flex.block<2, 1>(bj, a);
    cc.psi_rz(a) = rot_i.dot(flex_j);
    cc.psi_zr(a) = flex_i.dot(rot_j);
    for (int b = 0; b < nf; ++b) {
      cc.psi_zz(a, b) = flex_i.dot(md.flex.block<2, 1>(bj, b));
    }
  }

  cc.H.resize(1 + nf, 1 + nf);
  cc.H(0, 0) = 1.0 + n * cc.psi_rr;
  if (nf > 0) {
    cc.H.block(0, 1, 1, nf) = n * cc.psi_rz;
    cc.H.block(1, 0, nf, 1) = n * cc.psi_zr;
    cc.H.block(1, 1, nf, nf) =
        Eigen::MatrixXd::Identity(nf, nf) + n * cc.psi_zz;
  }
  cc.det_H = cc.H.determinant();

  const Eigen::MatrixXd m_block =
      Eigen::MatrixXd::Identity(nf, nf) + n * cc.psi_zz;
  if (nf == 0) {
    cc.det_M = 1.0;
    cc.schur_scalar = 1.0 + n * cc.psi_rr;
  } else {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m_block);
    const double smax = svd.singularValues()(0);
    const double smin = svd.singularValues()(nf - 1);
    cc.det_M = m_block.determinant();
    if (smin > 0.0 && smax / smin < 1e12) {
      const Eigen::VectorXd solved = m_block.partialPivLu().solve(cc.psi_zr);
      cc.schur_scalar =
          1.0 + n * cc.psi_rr -
          static_cast<double>(n) * n * (cc.psi_rz * solved).value();
    }
  }
  return cc;
}

enum class Verdict { Zero, FullRank };

inline const char* verdict_name(Verdict v) {
  return v == Verdict::Zero ? "Zero" : "FullRank";
}

/// Transmission-zero verdict with three independently computed determinant
/// routes. Disagreement between routes is reported, never resolved silently.
struct ZeroTest {
  Verdict verdict = Verdict::FullRank;
  double det_direct = 0.0;               // det of the projector block
  double det_sylvester = 0.0;            // det(H) / n^2
  std::optional<double> det_schur;       // det(M) * schur_scalar / n^2
  double det_tolerance = 0.0;            // 1e-9 * (1 + ||H||_F) / n^2
  double disagreement = 0.0;             // max pairwise gap / (1 + max |det|)
  bool routes_agree = true;              // disagreement <= 1e-8
  bool actuator_pinned = false;          // some kernel mode vanishes at i
  bool sensor_pinned = false;            // some kernel mode vanishes at j
  DcGainBlock block;
  CrossCoupling coupling;
};

/// True per kernel mode (order: v_x, v_y, v_r, z_1..z_nf) when the mode's
/// local component at the node vanishes, so the mode can neither be excited
/// nor observed there.
inline std::vector<bool> pinned_check(const ModalDecomposition& md, int node) {
  const int block = 2 * md.index_of(node);
  std::vector<bool> pinned;
  for (int c = 0; c < 3; ++c) {
    pinned.push_back(md.rbm.block<2, 1>(block, c).norm() < 1e-10);
  }
  for (int c = 0; c < md.flex_count(); ++c) {
    pinned.push_back(md.flex.block<2, 1>(block, c).norm() < 1e-10);
  }
  return pinned;
}

inline bool any_pinned(const ModalDecomposition& md, int node) {
  const auto flags = pinned_check(md, node);
  for (bool f : flags) {
    if (f) return true;
  }
  return false;
}

inline ZeroTest transmission_zero_test(const ModalDecomposition& md, int actuator, int sensor) {
  const int n = md.agent_count();
  ZeroTest zt;
  zt.block = dc_gain_block(md, actuator, sensor);
  zt.coupling = cross_coupling(md, actuator, sensor);

  zt.det_direct = zt.block.determinant;
  zt.det_sylvester = zt.coupling.det_H / (static_cast<double>(n) * n);
  if (zt.coupling.schur_scalar) {
    zt.det_schur =
        zt.coupling.det_M * (*zt.coupling.schur_scalar) / (static_cast<double>(n) * n);
  }

  zt.det_tolerance =
      1e-9 * (1.0 + zt.coupling.H.norm()) / (static_cast<double>(n) * n);
  zt.verdict = std::abs(zt.det_direct) < zt.det_tolerance ? Verdict::Zero : Verdict::FullRank;

  double lo = std::min(zt.det_direct, zt.det_sylvester);
  double hi = std::max(zt.det_direct, zt.det_sylvester);
  if (zt.det_schur) {
    lo = std::min(lo, *zt.det_schur);
    hi = std::max(hi, *zt.det_schur);
  }
  zt.disagreement = (hi - lo) / (1.0 + std::max(std::abs(lo), std::abs(hi)));
  zt.routes_agree = zt.disagreement <= 1e-8;

  zt.actuator_pinned = any_pinned(md, actuator);
  zt.sensor_pinned = any_pinned(md, sensor);
  return zt;
}

}  // namespace ftz

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "ftz/errors.hpp"
#include "ftz/formation.hpp"

namespace ftz {

/// Eigenstructure of the stiffness matrix -R(p*)^T R(p*) with the kernel
/// split into rigid-body modes and internal flexes.
///
/// Eigenvalues are stored zeros-first, then increasingly negative; columns of
/// `eigenvectors` follow the same order. `rbm` holds the exact translational
/// and rotational modes, `flex` the re-orthonormalized kernel remainder.
struct ModalDecomposition {
  std::vector<int> ids;          // sorted node ids, block order
  Eigen::VectorXd eigenvalues;   // 2n, all <= zero_threshold
  Eigen::MatrixXd eigenvectors;  // orthonormal columns, 2n x 2n
  int kernel_dim = 0;            // eigenvalues with |lambda| <= zero_threshold
  Eigen::MatrixXd rbm;           // 2n x 3
  Eigen::MatrixXd flex;          // 2n x n_f
  double zero_threshold = 0.0;
  bool threshold_ambiguous = false;          // eigenvalue within 10x of the threshold
  std::vector<double> ambiguous_eigenvalues;

  int agent_count() const { return static_cast<int>(ids.size()); }
  int flex_count() const { return static_cast<int>(flex.cols()); }

  int index_of(int id) const {
    auto it = std::lower_bound(ids.begin(), ids.end(), id);
    if (it == ids.end() || *it != id) {
      throw Error(errc::unknown_node_id, "no node with id " + std::to_string(id));
    }
    return static_cast<int>(it - ids.begin());
  }

  /// Local 2-vector of eigenvector column k at the node with the given id.
  Eigen::Vector2d local_component(int column, int id) const {
    return eigenvectors.block<2, 1>(2 * index_of(id), column);
  }
};

namespace detail {

/// Modified Gram-Schmidt with greedy pivoting: repeatedly take the remaining
/// column of largest norm, normalize, and deflate the rest. Columns whose
/// remaining norm falls below drop_tol are discarded.
inline Eigen::MatrixXd orthonormalize_mgs(Eigen::MatrixXd cols, double drop_tol) {
  std::vector<Eigen::VectorXd> kept;
  std::vector<bool> used(static_cast<std::size_t>(cols.cols()), false);
  for (Eigen::Index pass = 0; pass < cols.cols(); ++pass) {
    Eigen::Index best = -1;
    double best_norm = drop_tol;
    for (Eigen::Index c = 0; c < cols.cols(); ++c) {
      if (used[static_cast<std::size_t>(c)]) continue;
      const double norm = cols.col(c).norm();
      if (norm > best_norm) {
        best_norm = norm;
        best = c;
      }
    }
    if (best < 0) break;
    used[static_cast<std::size_t>(best)] = true;
    Eigen::VectorXd q = cols.col(best) / best_norm;
    for (Eigen::Index c = 0; c < cols.cols(); ++c) {
      if (!used[static_cast<std::size_t>(c)]) {
        cols.col(c) -= q * q.dot(cols.col(c));
      }
    }
    kept.push_back(std::move(q));
  }
  Eigen::MatrixXd out(cols.rows(), static_cast<Eigen::Index>(kept.size()));
  for (Eigen::Index c = 0; c < out.cols(); ++c) out.col(c) = kept[static_cast<std::size_t>(c)];
  return out;
}

}  // namespace detail

/// Spectral decomposition of -R(p*)^T R(p*).
///
/// The kernel is classified with zero_threshold = 2n * |lambda|_max * 1e-12.
/// Any eigenvalue within a factor of 10 of the threshold is reported through
/// `threshold_ambiguous` instead of being silently trusted. Flexes are the
/// kernel eigenvectors with their rigid-body projections removed,
/// re-orthonormalized, keeping vectors of norm >= 1e-8.
inline ModalDecomposition modal_decomposition(const Framework& fw) {
  const int n = fw.agent_count();
  const Eigen::MatrixXd jac = rigidity_matrix(fw, fw.target);
  Eigen::MatrixXd stiffness = -(jac.transpose() * jac);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(stiffness);
  if (solver.info() != Eigen::Success) {
    throw Error(errc::invalid_argument, "eigendecomposition of the stiffness matrix failed");
  }

  ModalDecomposition md;
  md.ids = fw.ids;
  // Eigen orders ascending (most negative first); flip to zeros-first.
  md.eigenvalues = solver.eigenvalues().reverse();
  md.eigenvectors = solver.eigenvectors().rowwise().reverse();

  const double lambda_max = md.eigenvalues.cwiseAbs().maxCoeff();
  md.zero_threshold = 2.0 * n * lambda_max * 1e-12;

  md.kernel_dim = 0;
  for (Eigen::Index k = 0; k < md.eigenvalues.size(); ++k) {
    const double mag = std::abs(md.eigenvalues(k));
    if (mag <= md.zero_threshold) ++md.kernel_dim;
    if (md.zero_threshold > 0.0 && mag > md.zero_threshold / 10.0 &&
        mag < md.zero_threshold * 10.0) {
      md.threshold_ambiguous = true;
      md.ambiguous_eigenvalues.push_back(md.eigenvalues(k));
    }
  }

  md.rbm = rbm_basis(fw);

  // Flex extraction: project the kernel eigenvectors onto the complement of
  // the rigid-body span, then re-orthonormalize.
  Eigen::MatrixXd kernel = md.eigenvectors.leftCols(md.kernel_dim);
  Eigen::MatrixXd deflated = kernel - md.rbm * (md.rbm.transpose() * kernel);
  md.flex = detail::orthonormalize_mgs(deflated, 1e-8);

  if (md.flex_count() != md.kernel_dim - 3) {
    md.threshold_ambiguous = true;  // kernel_dim = 3 + n_f failed to certify
  }
  return md;
}

/// Kernel basis of R(p*) built from a rank-revealing factorization instead of
/// the spectral route: column-pivoted QR selects a nonsingular pivot block
/// R_piv, the free columns get the identity, and the pivot part solves
/// R_piv Z = -R_free. Columns span ker(R(p*)) but are not orthonormal.
///
/// Throws NoPivotFound when the factorization cannot certify the pivot block:
/// some |R_kk| sits within a factor of 10 of the rank cutoff.
inline Eigen::MatrixXd nullspace_via_pivot(const Framework& fw) {
  const Eigen::MatrixXd jac = rigidity_matrix(fw, fw.target);
  const int cols = static_cast<int>(jac.cols());
  if (jac.rows() == 0) {
    return Eigen::MatrixXd::Identity(cols, cols);  // edgeless graph: full kernel
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(jac);
  const Eigen::MatrixXd r_factor = qr.matrixR();
  const int diag_len = static_cast<int>(std::min(jac.rows(), jac.cols()));
  Eigen::VectorXd diag(diag_len);
  for (int k = 0; k < diag_len; ++k) diag(k) = std::abs(r_factor(k, k));

  const double cutoff = diag.maxCoeff() * cols * 1e-12;
  int rank = 0;
  for (int k = 0; k < diag_len; ++k) {
    if (diag(k) > cutoff) ++rank;
    if (cutoff > 0.0 && diag(k) > cutoff / 10.0 && diag(k) < cutoff * 10.0) {
      throw Error(errc::no_pivot_found,
                  "rank cutoff ambiguous: |R_" + std::to_string(k) + "," + std::to_string(k) +
                      "| = " + std::to_string(diag(k)) + " near cutoff");
    }
  }

  const int null_dim = cols - rank;
  Eigen::MatrixXd permuted(cols, null_dim);
  if (rank == 0) {
    permuted = Eigen::MatrixXd::Identity(cols, null_dim);
  } else {
    const auto pivot_block = r_factor.topLeftCorner(rank, rank)
                                 .triangularView<Eigen::Upper>();
    permuted.topRows(rank) = pivot_block.solve(-r_factor.topRightCorner(rank, null_dim));
    permuted.bottomRows(null_dim).setIdentity();
  }
  return qr.colsPermutation() * permuted;
}

}  // namespace ftz

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include "ftz/dcgain.hpp"
#include "ftz/errors.hpp"
#include "ftz/formation.hpp"
#include "ftz/modal.hpp"

namespace ftz {

/// Trajectory of one disturbance experiment. States are stacked 2n vectors
/// (state deviations for the LTI path, absolute positions for the nonlinear
/// path); outputs are the sensor displacement y(t). drift_estimate is the
/// least-squares slope of y over the final fifth of the samples.
struct SimResult {
  std::vector<double> time;
  std::vector<Eigen::VectorXd> states;
  std::vector<Eigen::Vector2d> outputs;
  Eigen::Vector2d drift_estimate = Eigen::Vector2d::Zero();
};

/// Per-frequency extreme singular values of j*omega * G_ji(j*omega).
struct FrequencyResponseTable {
  std::vector<double> omega;
  std::vector<double> sigma_min;
  std::vector<double> sigma_max;
};

namespace detail {

inline Eigen::Vector2d least_squares_slope(const std::vector<double>& t,
                                           const std::vector<Eigen::Vector2d>& y) {
  const std::size_t count = t.size();
  std::size_t first = count - std::max<std::size_t>(2, count / 5);
  double t_mean = 0.0;
  Eigen::Vector2d y_mean = Eigen::Vector2d::Zero();
  for (std::size_t k = first; k < count; ++k) {
    t_mean += t[k];
    y_mean += y[k];
  }
  const double m = static_cast<double>(count - first);
  t_mean /= m;
  y_mean /= m;
  double tt = 0.0;
  Eigen::Vector2d ty = Eigen::Vector2d::Zero();
  for (std::size_t k = first; k < count; ++k) {
    tt += (t[k] - t_mean) * (t[k] - t_mean);
    ty += (t[k] - t_mean) * (y[k] - y_mean);
  }
  return tt > 0.0 ? Eigen::Vector2d(ty / tt) : Eigen::Vector2d::Zero();
}

}  // namespace detail

/// Exact modal solution of the linearized loop under a constant disturbance w
/// at the actuator, sampled uniformly on [0, t_final]:
///   dp(t) = t * P0 B w
///         + sum_{lambda<0} phi ([phi]_i . w) (e^{lambda t} - 1) / lambda
///         + sum_k phi (phi . dp0) e^{lambda t}.
/// No integrator is involved; the stiffness matrix is symmetric NSD so the
/// spectral form is closed.
inline SimResult lti_response(const ModalDecomposition& md, int actuator, int sensor,
                              const Eigen::Vector2d& w, double t_final, int samples,
                              const Eigen::VectorXd* initial_state = nullptr) {
  if (t_final <= 0.0) {
    throw Error(errc::invalid_argument, "t_final must be positive");
  }
  if (samples < 2) {
    throw Error(errc::invalid_argument, "need at least two samples");
  }
  const int n = md.agent_count();
  const int dim = 2 * n;
  const int block_i = 2 * md.index_of(actuator);
  const int block_j = 2 * md.index_of(sensor);

  // Kernel forcing term P0 B w from the exact rigid-body + flex basis.
  Eigen::VectorXd kernel_rate = Eigen::VectorXd::Zero(dim);
  for (int c = 0; c < 3; ++c) {
    kernel_rate += md.rbm.col(c) * md.rbm.block<2, 1>(block_i, c).dot(w);
  }
  for (int c = 0; c < md.flex_count(); ++c) {
    kernel_rate += md.flex.col(c) * md.flex.block<2, 1>(block_i, c).dot(w);
  }

  SimResult result;
  result.time.resize(samples);
  result.states.resize(samples);
  result.outputs.resize(samples);
  for (int s = 0; s < samples; ++s) {
    const double t = t_final * s / (samples - 1);
    Eigen::VectorXd state = t * kernel_rate;
    for (Eigen::Index k = 0; k < md.eigenvalues.size(); ++k) {
      const double lambda = md.eigenvalues(k);
      if (std::abs(lambda) <= md.zero_threshold) continue;
      const Eigen::VectorXd& phi = md.eigenvectors.col(k);
      const double fwd = phi.segment<2>(block_i).dot(w);
      state += phi * (fwd * (std::expm1(lambda * t) / lambda));
    }
    if (initial_state != nullptr) {
      for (Eigen::Index k = 0; k < md.eigenvalues.size(); ++k) {
        const double lambda = md.eigenvalues(k);
        const Eigen::VectorXd& phi = md.eigenvectors.col(k);
        const double decay = std::abs(lambda) <= md.zero_threshold ? 1.0 : std::exp(lambda * t);
        state += phi * (phi.dot(*initial_state) * decay);
      }
    }
    result.time[s] = t;
    result.states[s] = state;
    result.outputs[s] = state.segment<2>(block_j);
  }
  result.drift_estimate = detail::least_squares_slope(result.time, result.outputs);
  return result;
}

/// Integrates the nonlinear gradient flow
///   p' = -R(p)^T (F(p) - F(p*)) + B w
/// with classical fixed-step RK4 from p(0) = p*, recording `samples` evenly
/// spaced states. Output is y = p_j - p_j*. Pass step <= 0 for the default
/// 1e-3 / |lambda|_max and escape_radius <= 0 for 10x the longest edge.
inline SimResult nonlinear_simulate(const Framework& fw, int actuator, int sensor,
                                    const Eigen::Vector2d& w, double t_final,
                                    double step = 0.0, int samples = 1001,
                                    double escape_radius = 0.0) {
  if (t_final <= 0.0) {
    throw Error(errc::invalid_argument, "t_final must be positive");
  }
  if (samples < 2) {
    throw Error(errc::invalid_argument, "need at least two samples");
  }
  const int n = fw.agent_count();
  const auto& edges = fw.spec.edges;
  const std::size_t edge_count = edges.size();

  std::vector<std::pair<int, int>> edge_blocks(edge_count);
  for (std::size_t l = 0; l < edge_count; ++l) {
    edge_blocks[l] = {2 * fw.index_of(edges[l].first), 2 * fw.index_of(edges[l].second)};
  }

  const Eigen::VectorXd target_lengths = rigidity_function(fw, fw.target);
  double max_edge = 0.0;
  for (std::size_t l = 0; l < edge_count; ++l) {
    max_edge = std::max(max_edge, std::sqrt(2.0 * target_lengths(static_cast<Eigen::Index>(l))));
  }
  if (escape_radius <= 0.0) escape_radius = 10.0 * std::max(max_edge, 1.0);

  if (step <= 0.0) {
    const Eigen::MatrixXd jac = rigidity_matrix(fw, fw.target);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jac.transpose() * jac);
    const double lambda_max = solver.eigenvalues().maxCoeff();
    step = lambda_max > 0.0 ? 1e-3 / lambda_max : 1e-3;
  }

  const int block_i = 2 * fw.index_of(actuator);
  const int block_j = 2 * fw.index_of(sensor);

  // Edge-wise gradient of the tension potential; avoids assembling R(p).
  auto rhs = [&](const Eigen::VectorXd& p, Eigen::VectorXd& dp) {
    dp.setZero();
    for (std::size_t l = 0; l < edge_count; ++l) {
      const auto [ba, bb] = edge_blocks[l];
      const Eigen::Vector2d d = p.segment<2>(ba) - p.segment<2>(bb);
      const double tension = 0.5 * d.squaredNorm() - target_lengths(static_cast<Eigen::Index>(l));
      dp.segment<2>(ba) -= tension * d;
      dp.segment<2>(bb) += tension * d;
    }
    dp.segment<2>(block_i) += w;
  };

  // Step count rounded up to a multiple of the sample count so that recorded
  // states land exactly on the uniform grid t_k = k * t_final / (samples - 1).
  const long long chunks = samples - 1;
  long long steps = std::max<long long>(1, static_cast<long long>(std::ceil(t_final / step)));
  steps = ((steps + chunks - 1) / chunks) * chunks;
  const long long stride = steps / chunks;
  const double h = t_final / static_cast<double>(steps);

  SimResult result;
  result.time.reserve(samples);
  result.states.reserve(samples);
  result.outputs.reserve(samples);

  Eigen::VectorXd p = fw.target;
  Eigen::VectorXd k1(2 * n), k2(2 * n), k3(2 * n), k4(2 * n), tmp(2 * n);

  for (long long s = 0; s <= steps; ++s) {
    if (s % stride == 0) {
      result.time.push_back(t_final * static_cast<double>(s / stride) /
                            static_cast<double>(chunks));
      result.states.push_back(p);
      result.outputs.push_back(p.segment<2>(block_j) - fw.target.segment<2>(block_j));
    }
    if (s == steps) break;
    rhs(p, k1);
    tmp = p + (0.5 * h) * k1;
    rhs(tmp, k2);
    tmp = p + (0.5 * h) * k2;
    rhs(tmp, k3);
    tmp = p + h * k3;
    rhs(tmp, k4);
    p += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!p.allFinite() || (p - fw.target).norm() > escape_radius) {
      throw Error(errc::divergence,
                  "trajectory left the escape radius at t = " +
                      std::to_string(h * static_cast<double>(s + 1)));
    }
  }
  result.drift_estimate = detail::least_squares_slope(result.time, result.outputs);
  return result;
}

/// j*omega * G_ji(j*omega) from the modal sum: the kernel term contributes
/// [P0]_ji exactly; each deformational mode enters as j*omega/(j*omega - lambda)
/// times its local outer product.
inline Eigen::Matrix2cd scaled_transfer(const ModalDecomposition& md, int actuator, int sensor,
                                        double omega) {
  const int block_i = 2 * md.index_of(actuator);
  const int block_j = 2 * md.index_of(sensor);
  Eigen::Matrix2d kernel_term = Eigen::Matrix2d::Zero();
  for (int c = 0; c < 3; ++c) {
    kernel_term += md.rbm.block<2, 1>(block_j, c) * md.rbm.block<2, 1>(block_i, c).transpose();
  }
  for (int c = 0; c < md.flex_count(); ++c) {
    kernel_term += md.flex.block<2, 1>(block_j, c) * md.flex.block<2, 1>(block_i, c).transpose();
  }
  const std::complex<double> s(0.0, omega);
  Eigen::Matrix2cd g = kernel_term.cast<std::complex<double>>();
  for (Eigen::Index k = 0; k < md.eigenvalues.size(); ++k) {
    const double lambda = md.eigenvalues(k);
    if (std::abs(lambda) <= md.zero_threshold) continue;
    const Eigen::Matrix2d block = md.eigenvectors.col(k).segment<2>(block_j) *
                                  md.eigenvectors.col(k).segment<2>(block_i).transpose();
    g += (s / (s - lambda)) * block.cast<std::complex<double>>();
  }
  return g;
}

/// Extreme singular values of j*omega * G_ji(j*omega) over a log-spaced grid.
inline FrequencyResponseTable frequency_response(const ModalDecomposition& md, int actuator,
                                                 int sensor, double omega_min, double omega_max,
                                                 int points) {
  if (omega_min <= 0.0 || omega_max < omega_min) {
    throw Error(errc::invalid_argument, "need 0 < omega_min <= omega_max");
  }
  if (points < 1) {
    throw Error(errc::invalid_argument, "need at least one frequency point");
  }
  FrequencyResponseTable table;
  table.omega.resize(points);
  table.sigma_min.resize(points);
  table.sigma_max.resize(points);
  for (int k = 0; k < points; ++k) {
    const double ratio = points > 1 ? static_cast<double>(k) / (points - 1) : 0.0;
    const double omega = omega_min * std::pow(omega_max / omega_min, ratio);
    Eigen::JacobiSVD<Eigen::Matrix2cd> svd(scaled_transfer(md, actuator, sensor, omega));
    table.omega[k] = omega;
    table.sigma_max[k] = svd.singularValues()(0);
    table.sigma_min[k] = svd.singularValues()(1);
  }
  return table;
}

}  // namespace ftz

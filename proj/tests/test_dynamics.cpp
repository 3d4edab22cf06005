#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "ftz/dcgain.hpp"
#include "ftz/dynamics.hpp"
#include "test_support.hpp"

using namespace ftz;
using ftz::testing::load_framework;

namespace {

double slowest_decay(const ModalDecomposition& md) {
  double slowest = 0.0;
  for (Eigen::Index k = 0; k < md.eigenvalues.size(); ++k) {
    const double mag = std::abs(md.eigenvalues(k));
    if (mag > md.zero_threshold && (slowest == 0.0 || mag < slowest)) slowest = mag;
  }
  return slowest;
}

}  // namespace

TEST_CASE("lti_response drift reproduces the DC gain block") {
  const Framework fw = load_framework("paper-4agent.json");
  const ModalDecomposition md = modal_decomposition(fw);
  const double t_final = 200.0 / slowest_decay(md);

  SECTION("blocked direction produces no steady-state drift") {
    const Eigen::Vector2d w = Eigen::Vector2d(1.0, -2.0).normalized();
    const SimResult sim = lti_response(md, 1, 2, w, t_final, 2001);
    CHECK(sim.drift_estimate.norm() < 1e-8);
  }
  SECTION("unit x disturbance drifts along the first block column") {
    const SimResult sim = lti_response(md, 1, 2, {1.0, 0.0}, t_final, 2001);
    CHECK(sim.drift_estimate.x() == Catch::Approx(0.1875).margin(1e-9));
    CHECK(sim.drift_estimate.y() == Catch::Approx(0.125).margin(1e-9));
  }
  SECTION("zero input yields the zero trajectory") {
    const SimResult sim = lti_response(md, 1, 2, {0.0, 0.0}, 5.0, 101);
    for (const auto& y : sim.outputs) CHECK(y.norm() == 0.0);
  }
}

TEST_CASE("steady-state drift equals [P0]_ji w on random frameworks") {
  std::mt19937_64 rng(4242);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 6);
    const Framework fw = (trial % 2 == 0) ? ftz::testing::random_rigid_framework(rng, n)
                                          : ftz::testing::random_flexible_framework(rng, n);
    const ModalDecomposition md = modal_decomposition(fw);
    const int i = fw.ids[rng() % fw.ids.size()];
    const int j = fw.ids[rng() % fw.ids.size()];
    const Eigen::Vector2d w(ftz::testing::uniform(rng, -1.0, 1.0),
                            ftz::testing::uniform(rng, -1.0, 1.0));
    const double t_final = 50.0 / slowest_decay(md);
    const SimResult sim = lti_response(md, i, j, w, t_final, 1001);
    const Eigen::Vector2d expected = dc_gain_block(md, i, j).block * w;
    CHECK((sim.drift_estimate - expected).norm() < 1e-6 * w.norm());
  }
}

TEST_CASE("deformational energy decays monotonically with zero input") {
  const Framework fw = load_framework("paper-4agent.json");
  const ModalDecomposition md = modal_decomposition(fw);
  // Mix of strictly stable modes only.
  Eigen::VectorXd initial = Eigen::VectorXd::Zero(8);
  for (int k = md.kernel_dim; k < 8; ++k) {
    initial += md.eigenvectors.col(k) * (1.0 / (k - md.kernel_dim + 1.0));
  }
  const SimResult sim = lti_response(md, 1, 2, {0.0, 0.0}, 3.0, 400, &initial);
  for (std::size_t k = 1; k < sim.states.size(); ++k) {
    CHECK(sim.states[k].norm() <= sim.states[k - 1].norm() + 1e-12);
  }
}

TEST_CASE("nonlinear flow stays at the target without disturbance") {
  const Framework fw = load_framework("paper-4agent.json");
  const SimResult sim = nonlinear_simulate(fw, 1, 2, {0.0, 0.0}, 1.0, 1e-3, 51);
  for (const auto& state : sim.states) CHECK((state - fw.target).norm() == 0.0);
}

TEST_CASE("nonlinear deviation from the linearization scales as epsilon^2") {
  const Framework fw = load_framework("paper-4agent.json");
  const ModalDecomposition md = modal_decomposition(fw);
  const Eigen::Vector2d dir(1.0, 0.0);
  const double t_final = 2.0;
  const int samples = 201;

  auto deviation = [&](double eps) {
    const SimResult nl = nonlinear_simulate(fw, 1, 2, eps * dir, t_final, 0.0, samples);
    const SimResult lin = lti_response(md, 1, 2, eps * dir, t_final, samples);
    double worst = 0.0;
    for (int k = 0; k < samples; ++k) {
      worst = std::max(worst, (nl.outputs[static_cast<std::size_t>(k)] -
                               lin.outputs[static_cast<std::size_t>(k)])
                                  .norm());
    }
    return worst;
  };

  const double d2 = deviation(1e-2);
  const double d3 = deviation(1e-3);
  const double d4 = deviation(1e-4);
  const double slope_23 = std::log10(d2 / d3);
  const double slope_34 = std::log10(d3 / d4);
  CHECK(slope_23 == Catch::Approx(2.0).margin(0.3));
  CHECK(slope_34 == Catch::Approx(2.0).margin(0.3));
}

TEST_CASE("nonlinear drift matches the linear prediction to second order") {
  const Framework fw = load_framework("paper-4agent.json");
  const ModalDecomposition md = modal_decomposition(fw);
  const double t_final = 200.0 / slowest_decay(md);

  SECTION("blocked direction: drift is epsilon^2-order, not first order") {
    const double eps = 1e-3;
    const Eigen::Vector2d w = eps * Eigen::Vector2d(1.0, -2.0).normalized();
    const SimResult sim = nonlinear_simulate(fw, 1, 2, w, t_final);
    CHECK(sim.drift_estimate.norm() < 2.0 * eps * eps);
    CHECK(sim.drift_estimate.norm() < 1e-2 * w.norm());  // far below first order
  }
  SECTION("generic direction: drift/eps converges to the block column") {
    const Eigen::Vector2d expected(0.1875, 0.125);
    double previous = 1e300;
    for (double eps : {1e-3, 1e-4}) {
      const SimResult sim = nonlinear_simulate(fw, 1, 2, {eps, 0.0}, t_final);
      const double error = (sim.drift_estimate / eps - expected).norm() / expected.norm();
      CHECK(error < 5.0 * eps);  // first-order-in-eps linearization bias
      CHECK(error < previous / 5.0);
      previous = error;
    }
  }
}

TEST_CASE("nonlinear simulation reports divergence") {
  const Framework fw = load_framework("triangle.json");
  CHECK_THROWS_MATCHES(nonlinear_simulate(fw, 1, 2, {500.0, 0.0}, 50.0, 1e-3, 11), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == errc::divergence;
                       }));
}

TEST_CASE("frequency response limits") {
  const ModalDecomposition rigid = modal_decomposition(load_framework("paper-4agent.json"));
  const ModalDecomposition flex = modal_decomposition(load_framework("paper-4bar.json"));

  SECTION("rigid pair (1,2): sigma_min decays linearly in omega at DC") {
    const FrequencyResponseTable t = frequency_response(rigid, 1, 2, 1e-6, 1e-3, 2);
    CHECK(t.sigma_min[0] / t.sigma_min[1] < 2e-3);
    CHECK(t.sigma_max[0] > 0.1 * t.sigma_max[1]);
  }
  SECTION("flexible pair (1,2): sigma_min stays flat at DC") {
    const FrequencyResponseTable t = frequency_response(flex, 1, 2, 1e-6, 1e-3, 2);
    CHECK(t.sigma_min[0] / t.sigma_min[1] > 0.99);
  }
  SECTION("high-frequency limit recovers the identity block structure") {
    const double omega = 1e9;
    Eigen::JacobiSVD<Eigen::Matrix2cd> cross(scaled_transfer(rigid, 1, 2, omega));
    CHECK(cross.singularValues()(0) < 1e-6);  // off-diagonal block of I
    Eigen::JacobiSVD<Eigen::Matrix2cd> self(scaled_transfer(rigid, 1, 1, omega));
    CHECK(self.singularValues()(0) == Catch::Approx(1.0).margin(1e-6));
    CHECK(self.singularValues()(1) == Catch::Approx(1.0).margin(1e-6));
  }
}

TEST_CASE("modal transfer matches the dense resolvent solve") {
  std::mt19937_64 rng(987);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 6);
    const Framework fw = (trial % 2 == 0) ? ftz::testing::random_rigid_framework(rng, n)
                                          : ftz::testing::random_flexible_framework(rng, n);
    const ModalDecomposition md = modal_decomposition(fw);
    const int i = fw.ids[rng() % fw.ids.size()];
    const int j = fw.ids[rng() % fw.ids.size()];
    const double omega = std::pow(10.0, ftz::testing::uniform(rng, -4.0, 2.0));

    const Eigen::MatrixXd jac = rigidity_matrix(fw, fw.target);
    const Eigen::MatrixXcd resolvent =
        (std::complex<double>(0.0, omega) * Eigen::MatrixXcd::Identity(2 * n, 2 * n) +
         (jac.transpose() * jac).cast<std::complex<double>>());
    Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(2 * n, 2);
    rhs.block<2, 2>(2 * fw.index_of(i), 0).setIdentity();
    const Eigen::MatrixXcd solved = resolvent.partialPivLu().solve(rhs);
    const Eigen::Matrix2cd direct =
        std::complex<double>(0.0, omega) * solved.block<2, 2>(2 * fw.index_of(j), 0);

    const Eigen::Matrix2cd modal = scaled_transfer(md, i, j, omega);
    CHECK((modal - direct).norm() < 1e-9 * (1.0 + direct.norm()));
  }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bdris/manifold.hpp"
#include "bdris/verification.hpp"

using namespace bdris;

namespace {

// Independent exponential for skew-Hermitian S: S = iH with H Hermitian, so
// exp(S) = V diag(e^{i lambda}) V^H. Used to cross-check the production
// retraction, which goes through the Pade scaling-and-squaring path.
ComplexMatrix<double> expm_skew_eig(const ComplexMatrix<double>& s) {
  const ComplexMatrix<double> h = std::complex<double>(0, -1) * s;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix<double>> es(h);
  ComplexVector<double> phases(s.rows());
  for (Eigen::Index i = 0; i < s.rows(); ++i)
    phases(i) = std::polar(1.0, es.eigenvalues()(i));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

struct Instance {
  ChannelSet<double> channels;
  PhaseShiftMatrix<double> phi;
  double p_s;
  PowerConfig<double> powers;
};

Instance random_instance(int m, RngStream& rng) {
  ChannelConfig<double> config;
  const auto [mx, my] = factor_elements(m);
  config.array.m_x = mx;
  config.array.m_y = my;
  Instance inst{draw_channel_set(config, rng), PhaseShiftMatrix<double>::Random(m, rng),
                uniform_in(rng, 0.01, 100.0), PowerConfig<double>{}};
  return inst;
}

}  // namespace

TEST_CASE("lagrangian with multiplier off equals the raw rate difference") {
  RngStream rng(101);
  const auto inst = random_instance(8, rng);
  const auto [gs, ge] = sinr_pair(inst.channels, inst.phi, inst.p_s, inst.powers);
  const double expected = std::log2(1 + gs) - std::log2(1 + ge);
  CHECK(lagrangian(inst.channels, inst.phi, inst.p_s, inst.powers, 0.0) ==
        doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("lagrangian penalty vanishes at zero slack and flips sign with it") {
  RngStream rng(102);
  const auto inst = random_instance(8, rng);
  const double g_gain = effective_gain(inst.channels.g, inst.phi);
  const double diff = lagrangian(inst.channels, inst.phi, inst.p_s, inst.powers, 0.0);

  // Active with equality: p chosen so interference == I_th exactly.
  PowerConfig<double> powers = inst.powers;
  const double p_active = powers.i_th / g_gain;
  for (const double lambda : {0.0, 1.0, 7.5}) {
    const double active_diff =
        lagrangian(inst.channels, inst.phi, p_active, powers, 0.0);
    CHECK(lagrangian(inst.channels, inst.phi, p_active, powers, lambda) ==
          doctest::Approx(active_diff).epsilon(1e-9));
  }

  // Feasible by 1e-6 mW with lambda = 1 adds exactly the slack.
  const double p_slack = (powers.i_th - 1e-6) / g_gain;
  const double base = lagrangian(inst.channels, inst.phi, p_slack, powers, 0.0);
  CHECK(lagrangian(inst.channels, inst.phi, p_slack, powers, 1.0) - base ==
        doctest::Approx(1e-6).epsilon(1e-6));
  (void)diff;
}

TEST_CASE("euclidean gradient matches central finite differences") {
  VerifyOptions opt;
  opt.grad_instances_m4 = 30;
  opt.grad_instances_m16 = 5;
  const auto report = gradient_finite_difference_check(opt);
  INFO(report.detail);
  CHECK(report.passed);
}

TEST_CASE("gradient reduces to the SU term when lambda = 0 and h_e = 0") {
  RngStream rng(103);
  auto inst = random_instance(8, rng);
  inst.channels.h_e.setZero();
  const ComplexVector<double> w = combining_vector<double>(8);
  const auto a_s = effective_amplitude(inst.channels.h_s, inst.phi.matrix(), w);
  const double den_s =
      inst.powers.sigma_s_sq + std::norm(inst.channels.f_s) * inst.powers.q_p;
  const double gamma_s = std::norm(a_s) * inst.p_s / den_s;
  const ComplexMatrix<double> su_term =
      (2.0 * inst.p_s / std::log(2.0)) / ((1.0 + gamma_s) * den_s) * a_s *
      inst.channels.h_s.conjugate() * w.adjoint();
  const ComplexMatrix<double> grad =
      euclidean_gradient(inst.channels, inst.phi, inst.p_s, inst.powers, 0.0);
  CHECK((grad - su_term).norm() < 1e-14 * su_term.norm());
}

TEST_CASE("gradient vanishes at zero transmit power") {
  RngStream rng(104);
  const auto inst = random_instance(8, rng);
  const ComplexMatrix<double> grad =
      euclidean_gradient(inst.channels, inst.phi, 0.0, inst.powers, 3.0);
  CHECK(grad.norm() == 0.0);
}

TEST_CASE("tangent projection lands in the tangent space") {
  RngStream rng(105);
  for (int k = 0; k < 50; ++k) {
    const auto phi = PhaseShiftMatrix<double>::Random(8, rng);
    const ComplexMatrix<double> g = complex_gaussian_matrix(8, 8, rng);
    for (const auto mode :
         {TangentProjection::Canonical, TangentProjection::Doubled}) {
      const ComplexMatrix<double> t = project_to_tangent(phi, g, mode);
      const ComplexMatrix<double> s = phi.matrix().adjoint() * t;
      CHECK((s + s.adjoint()).norm() < 1e-10);
    }
  }
}

TEST_CASE("projection is idempotent on tangent vectors") {
  RngStream rng(106);
  const auto phi = PhaseShiftMatrix<double>::Random(6, rng);
  const ComplexMatrix<double> t = phi.matrix() * random_skew_hermitian(6, rng);
  const ComplexMatrix<double> projected = project_to_tangent(phi, t);
  CHECK((projected - t).norm() < 1e-12 * t.norm());
}

TEST_CASE("canonical projection kills Hermitian gradients at the identity") {
  RngStream rng(107);
  ComplexMatrix<double> x = complex_gaussian_matrix(5, 5, rng);
  const ComplexMatrix<double> hermitian = 0.5 * (x + x.adjoint());
  const ComplexMatrix<double> t =
      project_to_tangent(PhaseShiftMatrix<double>::Identity(5), hermitian);
  CHECK(t.norm() < 1e-12);
}

TEST_CASE("doubled projection is exactly twice the canonical one") {
  // Square unitary case; the factor is absorbed by the line search.
  RngStream rng(108);
  const auto phi = PhaseShiftMatrix<double>::Random(7, rng);
  const ComplexMatrix<double> g = complex_gaussian_matrix(7, 7, rng);
  const ComplexMatrix<double> canonical = project_to_tangent(phi, g);
  const ComplexMatrix<double> literal =
      project_to_tangent(phi, g, TangentProjection::Doubled);
  CHECK((literal - 2.0 * canonical).norm() < 1e-12 * canonical.norm());
}

TEST_CASE("projection rejects a non-unitary base point") {
  RngStream rng(109);
  const ComplexMatrix<double> bad = 2.0 * ComplexMatrix<double>::Identity(4, 4);
  const ComplexMatrix<double> g = complex_gaussian_matrix(4, 4, rng);
  CHECK_THROWS_AS(project_to_tangent(bad, g), std::invalid_argument);
}

TEST_CASE("retraction at eta = 0 is the identity map") {
  RngStream rng(110);
  const auto phi = PhaseShiftMatrix<double>::Random(6, rng);
  const ComplexMatrix<double> t = phi.matrix() * random_skew_hermitian(6, rng);
  const auto next = retract(phi, t, 0.0);
  CHECK((next.matrix() - phi.matrix()).norm() < 1e-14);
}

TEST_CASE("retraction preserves unitarity over chained random steps") {
  RngStream rng(111);
  for (const int m : {4, 8, 16}) {
    auto phi = PhaseShiftMatrix<double>::Random(m, rng);
    for (int k = 0; k < 400; ++k) {
      const ComplexMatrix<double> t = phi.matrix() * random_skew_hermitian(m, rng);
      phi = retract(phi, t, uniform_in(rng, 0.0, 1.0));
      REQUIRE(unitarity_defect(phi.matrix()) < 1e-8);
    }
  }
}

TEST_CASE("retraction agrees with the eigendecomposition exponential") {
  RngStream rng(112);
  for (int k = 0; k < 25; ++k) {
    const int m = 4 + 3 * (k % 3);
    const auto phi = PhaseShiftMatrix<double>::Random(m, rng);
    const ComplexMatrix<double> s = random_skew_hermitian(m, rng);
    const ComplexMatrix<double> t = phi.matrix() * s;
    const double eta = uniform_in(rng, 0.0, 2.0);
    const auto production = retract(phi, t, eta);
    const ComplexMatrix<double> oracle = phi.matrix() * expm_skew_eig(eta * s);
    CHECK((production.matrix() - oracle).norm() < 1e-10);
  }
}

TEST_CASE("scalar retraction walks the unit circle") {
  const double alpha = 0.8, beta = 1.7, eta = 0.35;
  ComplexMatrix<double> m1(1, 1);
  m1(0, 0) = std::polar(1.0, alpha);
  const PhaseShiftMatrix<double> phi(m1);
  ComplexMatrix<double> t(1, 1);
  t(0, 0) = m1(0, 0) * std::complex<double>(0.0, beta);
  const auto next = retract(phi, t, eta);
  CHECK(std::abs(next.matrix()(0, 0) - std::polar(1.0, alpha + eta * beta)) < 1e-12);
}

TEST_CASE("retraction rejects non-tangent directions") {
  RngStream rng(113);
  const auto phi = PhaseShiftMatrix<double>::Random(5, rng);
  ComplexMatrix<double> x = complex_gaussian_matrix(5, 5, rng);
  const ComplexMatrix<double> hermitian_dir =
      phi.matrix() * (0.5 * (x + x.adjoint()));
  CHECK_THROWS_AS(retract(phi, hermitian_dir, 0.1), std::invalid_argument);
}

TEST_CASE("step clamp evaluates the interference bound") {
  RngStream rng(114);
  PowerConfig<double> powers;
  ChannelSet<double> set;
  set.h_s = ComplexVector<double>::Constant(1, 1.0);
  set.h_e = ComplexVector<double>::Constant(1, 0.5);
  set.g = ComplexVector<double>::Constant(1, 1.0);  // unit gain through identity
  set.f_s = set.f_e = 0.0;
  const auto phi = PhaseShiftMatrix<double>::Identity(1);

  // gain * p = I_th / 2 -> clamp at 2.
  CHECK(clamp_step(10.0, set, phi, powers.i_th / 2.0, powers) ==
        doctest::Approx(2.0));
  // p = 0 leaves the step untouched.
  CHECK(clamp_step(10.0, set, phi, 0.0, powers) == 10.0);
  (void)rng;
}

TEST_CASE("gradient bundle riemannian part is the projection of the euclidean part") {
  RngStream rng(115);
  const auto inst = random_instance(8, rng);
  const auto bundle = gradient_bundle(inst.channels, inst.phi, inst.p_s,
                                      inst.powers, 0.5, TangentProjection::Canonical);
  const ComplexMatrix<double> reproj = project_to_tangent(inst.phi, bundle.euclidean);
  CHECK((bundle.riemannian - reproj).norm() < 1e-13 * (1.0 + reproj.norm()));
  CHECK(bundle.secrecy_value >= 0.0);
}

TEST_CASE("optimizer exits immediately at a stationary point") {
  // At M = 1 the objective is constant on the circle, so the Riemannian
  // gradient is identically zero.
  RngStream rng(116);
  ChannelConfig<double> config;
  config.array.m_x = 1;
  config.array.m_y = 1;
  const auto channels = draw_channel_set(config, rng);
  const auto phi = PhaseShiftMatrix<double>::Random(1, rng);
  const ManifoldOptConfig<double> cfg;
  const auto result = optimize_phase(channels, phi, 10.0, PowerConfig<double>{}, cfg);
  CHECK(result.status == PhaseOptStatus::Converged);
  CHECK(result.accepted_steps == 0);
  CHECK((result.phi.matrix() - phi.matrix()).norm() == 0.0);
}

TEST_CASE("lagrangian is strictly nondecreasing across accepted steps") {
  RngStream rng(117);
  const PowerConfig<double> powers;
  int instances = 0;
  for (int k = 0; k < 100; ++k) {
    ChannelConfig<double> config;
    config.array.m_x = 2;
    config.array.m_y = 2;
    const auto channels = draw_channel_set(config, rng);
    const auto phi0 = PhaseShiftMatrix<double>::Random(4, rng);
    const auto decision = optimal_power(channels, phi0, powers);
    if (decision.branch == PowerBranch::Silent) continue;
    ++instances;
    const ManifoldOptConfig<double> cfg;
    const auto result =
        optimize_phase(channels, phi0, decision.p_star, powers, cfg);
    for (std::size_t i = 0; i + 1 < result.trace.size(); ++i)
      if (result.trace[i].accepted)
        CHECK(result.trace[i + 1].lagrangian > result.trace[i].lagrangian);
    // Exit iterate is feasible.
    CHECK(effective_gain(channels.g, result.phi) * decision.p_star <=
          powers.i_th * (1 + 1e-6));
    CHECK(unitarity_defect(result.phi.matrix()) <= 1e-8);
  }
  CHECK(instances > 50);
}

TEST_CASE("doubled projection drives the same monotone feasible ascent") {
  RngStream rng(119);
  const PowerConfig<double> powers;
  ChannelConfig<double> config;
  config.array.m_x = 4;
  config.array.m_y = 2;
  ManifoldOptConfig<double> cfg;
  cfg.projection = TangentProjection::Doubled;
  int ascended = 0;
  for (int k = 0; k < 20; ++k) {
    const auto channels = draw_channel_set(config, rng);
    const auto phi0 = PhaseShiftMatrix<double>::Random(8, rng);
    const auto decision = optimal_power(channels, phi0, powers);
    if (decision.branch == PowerBranch::Silent) continue;
    const auto result = optimize_phase(channels, phi0, decision.p_star, powers, cfg);
    for (std::size_t i = 0; i + 1 < result.trace.size(); ++i)
      if (result.trace[i].accepted)
        CHECK(result.trace[i + 1].lagrangian > result.trace[i].lagrangian);
    CHECK(unitarity_defect(result.phi.matrix()) <= 1e-8);
    CHECK(effective_gain(channels.g, result.phi) * decision.p_star <=
          powers.i_th * (1 + 1e-6));
    ascended += result.accepted_steps > 0;
  }
  CHECK(ascended > 0);
}

TEST_CASE("optimized phase beats the best of 200 random draws given headroom") {
  // Constraint-slack regime (I_th = -10 dBm): the ascent is not pinned to
  // the interference boundary, so the optimizer must clearly dominate a
  // random search. At the default I_th the boundary is active from the
  // first iterate and the honest guarantee is only improvement over the
  // same-seed start (checked in test_alternating).
  RngStream rng(118);
  PowerConfig<double> powers;
  powers.i_th = dbm_to_mw(-10.0);
  ChannelConfig<double> config;
  config.array.m_x = 4;
  config.array.m_y = 4;
  int wins = 0, usable = 0;
  for (int k = 0; k < 200 && usable < 40; ++k) {
    const auto channels = draw_channel_set(config, rng);
    const auto phi0 = PhaseShiftMatrix<double>::Random(16, rng);
    const auto decision = optimal_power(channels, phi0, powers);
    if (decision.branch == PowerBranch::Silent) continue;
    ++usable;
    ManifoldOptConfig<double> cfg;
    const auto result =
        optimize_phase(channels, phi0, decision.p_star, powers, cfg);
    const auto opt_metrics =
        link_metrics(channels, result.phi, decision.p_star, powers);

    double best_random = 0.0;
    for (int d = 0; d < 200; ++d) {
      const auto draw = PhaseShiftMatrix<double>::Random(16, rng);
      if (effective_gain(channels.g, draw) * decision.p_star >
          powers.i_th * (1 + 1e-12))
        continue;  // infeasible at this power, not a candidate
      best_random = std::max(
          best_random,
          link_metrics(channels, draw, decision.p_star, powers).secrecy_rate);
    }
    if (opt_metrics.secrecy_rate > best_random) ++wins;
  }
  REQUIRE(usable >= 30);
  CHECK(wins >= (usable * 95 + 99) / 100);
}

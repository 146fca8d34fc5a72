#include <gtest/gtest.h>

#include <cmath>

#include "dampwave/dynamics.hpp"
#include "dampwave/error.hpp"
#include "dampwave/galerkin.hpp"

using namespace dampwave;

namespace {

Eigen::MatrixXd diag(std::initializer_list<double> d) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(d.size()));
  Eigen::Index k = 0;
  for (double x : d) v[k++] = x;
  return v.asDiagonal();
}

}  // namespace

TEST(Galerkin, ScalarCriticallyDamped) {
  GalerkinSystem sys(diag({1}), diag({1}), GalerkinForce::zero(1));
  GalerkinConfig cfg;
  cfg.damping = DampingProfile::constant(2);
  cfg.dt = 1e-3;
  cfg.t_end = 10;
  cfg.sample_stride = 100;
  cfg.u0 = Eigen::VectorXd::Ones(1);
  cfg.v0 = Eigen::VectorXd::Zero(1);
  const auto tr = galerkin_run(sys, cfg);
  for (const auto& s : tr.samples) EXPECT_NEAR(s.u[0], (1 + s.t) * std::exp(-s.t), 1e-6) << s.t;
}

TEST(Galerkin, CoercivityConstant) {
  GalerkinSystem sys(diag({1, 2}), diag({1, 3}), GalerkinForce::zero(2));
  EXPECT_DOUBLE_EQ(sys.coercivity(), 1.0);
  EXPECT_GE(sys.check_coercivity(1000, 3), 1.0 - 1e-12);
}

TEST(Galerkin, NonsymmetricBUsesSymmetricPart) {
  Eigen::MatrixXd B(2, 2);
  B << 2, 1, -1, 2;
  GalerkinSystem sys(diag({1, 2}), B, GalerkinForce::zero(2));
  EXPECT_NEAR(sys.coercivity(), 2.0, 1e-12);
}

TEST(Galerkin, RejectsBadOperators) {
  Eigen::MatrixXd A(2, 2);
  A << 1, 2, 2, 1;
  try {
    GalerkinSystem(A, diag({1, 1}), GalerkinForce::zero(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonSpd);
  }
  try {
    GalerkinSystem(diag({1, 1}), diag({1, -1}), GalerkinForce::zero(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotCoercive);
  }
}

TEST(Galerkin, UndampedEnergyDriftSecondOrder) {
  auto drift = [](double dt) {
    GalerkinSystem sys(diag({1, 4}), diag({1, 1}), GalerkinForce::zero(2));
    GalerkinConfig cfg;
    cfg.damping = DampingProfile::constant(0);
    cfg.dt = dt;
    cfg.t_end = 20;
    cfg.u0 = Eigen::Vector2d(1.0, 0.5);
    cfg.v0 = Eigen::Vector2d(0.0, 0.3);
    const auto tr = galerkin_run(sys, cfg);
    double worst = 0.0;
    for (const auto& s : tr.samples) worst = std::max(worst, std::abs(s.E - tr.samples.front().E));
    return worst;
  };
  const double d1 = drift(0.01), d2 = drift(0.005);
  EXPECT_LT(d1, 1e-3);
  EXPECT_GT(d1 / d2, 3.5);
}

TEST(Galerkin, MatchesPdeInEigenbasis) {
  const Mesh m = build_mesh(1, {M_PI, 0.0}, {41, 1}, {BoundaryKind::Dirichlet});
  const int modes = 5;
  std::vector<Field> shapes;
  Eigen::VectorXd lam(modes), c0(modes);
  for (int k = 1; k <= modes; ++k) {
    shapes.push_back(sample(m, [&](double x, double) { return std::sin(k * x); }));
    lam[k - 1] = dirichlet_eigenvalue(m, k);
    c0[k - 1] = 1.0 / (k * k);
  }
  SimConfig pde(m, DampingProfile::constant(0.7), builtin("zero"));
  pde.dt = 0.02;
  pde.t_end = 10;
  pde.sample_stride = 25;
  pde.keep_states = true;
  pde.u0 = zeros(m);
  for (int k = 0; k < modes; ++k)
    for (std::size_t j = 0; j < m.size(); ++j) pde.u0[j] += c0[k] * shapes[k][j];
  pde.u1 = zeros(m);
  const Trajectory tr = run(pde);

  GalerkinSystem sys(lam.asDiagonal(), Eigen::MatrixXd::Identity(modes, modes), GalerkinForce::zero(modes));
  GalerkinConfig cfg;
  cfg.damping = DampingProfile::constant(0.7);
  cfg.dt = 0.02;
  cfg.t_end = 10;
  cfg.sample_stride = 25;
  cfg.u0 = c0;
  cfg.v0 = Eigen::VectorXd::Zero(modes);
  const auto gt = galerkin_run(sys, cfg);

  ASSERT_EQ(tr.states.size(), gt.samples.size());
  for (std::size_t s = 0; s < tr.states.size(); ++s) {
    for (int k = 0; k < modes; ++k) {
      const double proj = inner(tr.states[s].u.values, shapes[k].values, m) / inner(shapes[k].values, shapes[k].values, m);
      EXPECT_NEAR(proj, gt.samples[s].u[k], 1e-10) << "t=" << gt.samples[s].t << " mode " << k + 1;
    }
  }
}

TEST(Galerkin, DampedEnergyDecreases) {
  Eigen::MatrixXd B(4, 4);
  B << 2, 0.5, 0, 0, 0.5, 2, 0.5, 0, 0, 0.5, 2, 0.5, 0, 0, 0.5, 2;
  GalerkinSystem sys(diag({1, 4, 9, 16}), B, GalerkinForce::componentwise(builtin("cubic_stable")));
  GalerkinConfig cfg;
  cfg.damping = DampingProfile::constant(1);
  cfg.dt = 0.01;
  cfg.t_end = 30;
  cfg.u0 = Eigen::Vector4d(0.5, 0.25, 0.125, 0.0625);
  cfg.v0 = Eigen::Vector4d::Zero();
  const auto tr = galerkin_run(sys, cfg);
  for (std::size_t k = 1; k < tr.samples.size(); ++k) EXPECT_LE(tr.samples[k].E, tr.samples[k - 1].E + 1e-9);
  EXPECT_LT(tr.samples.back().v.norm(), 1e-6);
}

TEST(Galerkin, UnstableStepRejected) {
  GalerkinSystem sys(diag({100}), diag({1}), GalerkinForce::zero(1));
  GalerkinConfig cfg;
  cfg.dt = 0.5;
  cfg.t_end = 1;
  cfg.u0 = Eigen::VectorXd::Ones(1);
  cfg.v0 = Eigen::VectorXd::Zero(1);
  EXPECT_THROW(galerkin_run(sys, cfg), Error);
}

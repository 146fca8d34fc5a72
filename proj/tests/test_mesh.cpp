#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "dampwave/error.hpp"
#include "dampwave/mesh.hpp"

using namespace dampwave;

namespace {

Mesh interval(double L, int n, BoundaryKind k = BoundaryKind::Dirichlet) { return build_mesh(1, {L, 0.0}, {n, 1}, {k}); }

double max_interior_error(int n) {
  const Mesh m = interval(M_PI, n);
  const Field u = sample(m, [](double x, double) { return std::sin(x); });
  const Field lu = laplacian(u, m);
  double err = 0.0;
  for (int i = 1; i + 1 < n; ++i) err = std::max(err, std::abs(lu[m.index(i)] + std::sin(m.x(i))));
  return err;
}

}  // namespace

TEST(Mesh, UniformSpacing) {
  const Mesh m = interval(M_PI, 101);
  EXPECT_DOUBLE_EQ(m.dx(), M_PI / 100.0);
  EXPECT_EQ(m.size(), 101u);
}

TEST(Mesh, SquareNeumannNineNodes) {
  const Mesh m = build_mesh(2, {1.0, 1.0}, {3, 3}, {BoundaryKind::Neumann});
  EXPECT_EQ(m.size(), 9u);
  EXPECT_DOUBLE_EQ(m.dx(), 0.5);
  EXPECT_DOUBLE_EQ(m.dy(), 0.5);
}

TEST(Mesh, RejectsDynamicalIn2D) {
  try {
    build_mesh(2, {1.0, 1.0}, {3, 3}, {BoundaryKind::Dynamical});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnsupportedBcDimension);
  }
}

TEST(Mesh, RejectsBadExtentsAndCounts) {
  EXPECT_THROW(interval(0.0, 11), Error);
  EXPECT_THROW(interval(-1.0, 11), Error);
  EXPECT_THROW(interval(1.0, 2), Error);
  EXPECT_THROW(build_mesh(2, {1.0, 1.0}, {3, 2}, {}), Error);
}

TEST(Mesh, LaplacianOfSineTruncationError) {
  // |u''''| = 1, so the 3-point stencil error is below dx^2 / 12 up to round-off.
  const int n = 201;
  const double dx = M_PI / (n - 1);
  EXPECT_LE(max_interior_error(n), dx * dx / 12.0 * 1.01 + 1e-12);
  const double order = std::log2(max_interior_error(101) / max_interior_error(201));
  EXPECT_GT(order, 1.95);
}

TEST(Mesh, NeumannAnnihilatesConstants) {
  for (int dim : {1, 2}) {
    const Mesh m = build_mesh(dim, {2.0, 1.5}, {9, 7}, {BoundaryKind::Neumann});
    const Field u = sample(m, [](double, double) { return 3.25; });
    for (double v : laplacian(u, m).values) EXPECT_EQ(v, 0.0);
  }
}

TEST(Mesh, HarmonicBilinearIsAnnihilatedInside) {
  const Mesh m = build_mesh(2, {1.0, 1.0}, {11, 11}, {BoundaryKind::Neumann});
  const Field u = sample(m, [](double x, double y) { return x * y; });
  const Field lu = laplacian(u, m);
  for (int i = 1; i + 1 < m.nx(); ++i)
    for (int j = 1; j + 1 < m.ny(); ++j) EXPECT_NEAR(lu[m.index(i, j)], 0.0, 1e-11);
}

TEST(Mesh, TrapezoidQuadrature) {
  const Mesh m = interval(M_PI, 201);
  EXPECT_NEAR(integrate(sample(m, [](double, double) { return 1.0; }), m), M_PI, 1e-13);
  EXPECT_NEAR(integrate(sample(m, [](double x, double) { return std::sin(x) * std::sin(x); }), m), M_PI / 2, 1e-4);
  const Mesh sq = build_mesh(2, {1.0, 1.0}, {5, 5}, {});
  EXPECT_NEAR(integrate(sample(sq, [](double, double) { return 2.0; }), sq), 2.0, 1e-13);
}

TEST(Mesh, BoundaryIntegral) {
  const Mesh m = interval(1.0, 11, BoundaryKind::Dynamical);
  Field u = zeros(m);
  u[0] = 1.0;
  u[10] = -2.0;
  EXPECT_DOUBLE_EQ(boundary_integral(u, m), 5.0);
  EXPECT_DOUBLE_EQ(boundary_integral(zeros(m), m), 0.0);
  EXPECT_DOUBLE_EQ(boundary_integral(sample(m, [](double x, double) { return x; }), m), 1.0);
  const Mesh sq = build_mesh(2, {1.0, 1.0}, {3, 3}, {});
  EXPECT_THROW(boundary_integral(zeros(sq), sq), Error);
}

TEST(Mesh, DirichletLaplacianSymmetricNegative) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> N;
  for (int dim : {1, 2}) {
    const Mesh m = build_mesh(dim, {1.3, 0.7}, {17, 13}, {BoundaryKind::Dirichlet});
    for (int trial = 0; trial < 10; ++trial) {
      Field a = zeros(m), b = zeros(m);
      for (std::size_t k = 0; k < m.size(); ++k) {
        a[k] = N(rng);
        b[k] = N(rng);
      }
      const Field la = laplacian(a, m), lb = laplacian(b, m);
      const double ab = inner(la.values, b.values, m), ba = inner(a.values, lb.values, m);
      EXPECT_NEAR(ab, ba, 1e-10 * (std::abs(ab) + 1.0));
      EXPECT_LE(inner(la.values, a.values, m), 0.0);
    }
  }
}

TEST(Mesh, GradientEnergyMatchesLaplacianForm) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> N;
  for (auto kind : {BoundaryKind::Dirichlet, BoundaryKind::Neumann}) {
    const Mesh m = build_mesh(2, {1.0, 2.0}, {9, 15}, {kind});
    Field a = zeros(m);
    for (std::size_t k = 0; k < m.size(); ++k) a[k] = m.pinned(static_cast<int>(k) / m.ny(), static_cast<int>(k) % m.ny()) ? 0.0 : N(rng);
    const double g = gradient_sq(a.values, m);
    EXPECT_NEAR(g, -inner(laplacian(a, m).values, a.values, m), 1e-10 * g);
  }
}

TEST(Mesh, RayleighQuotientConvergesAtSecondOrder) {
  auto err = [](int n, int k) {
    const Mesh m = interval(2.0, n);
    const Field u = sample(m, [&](double x, double) { return std::sin(k * M_PI * x / 2.0); });
    const double q = -inner(laplacian(u, m).values, u.values, m) / inner(u.values, u.values, m);
    return std::abs(q - std::pow(k * M_PI / 2.0, 2));
  };
  for (int k : {1, 3}) EXPECT_GT(std::log2(err(51, k) / err(101, k)), 1.95);
}

TEST(Mesh, DirichletEigenvalueMatchesStencil) {
  const Mesh m = interval(M_PI, 41);
  const Field u = sample(m, [](double x, double) { return std::sin(2 * x); });
  const Field lu = laplacian(u, m);
  const double lam = dirichlet_eigenvalue(m, 2);
  for (int i = 1; i < 40; ++i) EXPECT_NEAR(lu[m.index(i)], -lam * u[m.index(i)], 1e-10);
}

TEST(Mesh, DynamicalGhostUsesVelocity) {
  const Mesh m = interval(1.0, 11, BoundaryKind::Dynamical);
  const Field u = sample(m, [](double, double) { return 1.0; });
  Field v = zeros(m);
  const Field l0 = laplacian(u, m);
  // Constant u: the ghost is u_1 - 2 dx (u_0 + v_0); the row becomes -2 (u_0 + v_0) / dx.
  EXPECT_NEAR(l0[0], -2.0 / m.dx(), 1e-12);
  v[0] = -1.0;
  EXPECT_NEAR(laplacian(u, m, &v)[0], 0.0, 1e-12);
}

TEST(Mesh, MismatchedFieldRejected) {
  const Mesh a = interval(1.0, 11), b = interval(2.0, 11);
  try {
    laplacian(zeros(a), b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MeshMismatch);
  }
}

TEST(Mesh, CsvRoundTripIsExact) {
  const Mesh m = build_mesh(2, {1.0, 1.0}, {4, 5}, {});
  const Field u = sample(m, [](double x, double y) { return std::exp(x) * std::cos(3 * y) / 7.0; });
  std::stringstream ss;
  write_field_csv(ss, u, m);
  const std::string first = ss.str().substr(0, ss.str().find('\n'));
  EXPECT_EQ(first, "x,y,value");
  const Field back = read_field_csv(ss, m);
  EXPECT_EQ(back.values, u.values);
}

TEST(Mesh, NodeOrderingIsXMajor) {
  const Mesh m = build_mesh(2, {1.0, 1.0}, {3, 4}, {});
  EXPECT_EQ(m.index(1, 0), 4u);
  EXPECT_EQ(m.index(2, 3), 11u);
}

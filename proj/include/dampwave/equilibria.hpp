#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dampwave/dynamics.hpp"
#include "dampwave/galerkin.hpp"
#include "dampwave/mesh.hpp"
#include "dampwave/nonlinearity.hpp"

namespace dampwave {

struct Equilibrium {
  Field phi;
  double residual = 0.0;           // |Lap phi + f(phi)|_L2
  double boundary_residual = 0.0;  // |d_nu phi + phi| on dynamical faces, one-sided differences
  int iterations = 0;
  bool converged = false;
};

// Damped Newton on -Lap phi - f(phi) = 0 with the mesh's boundary relation
// (the static Robin relation on dynamical faces). Stops at |R| <= tol or after
// max_iter iterations; a stalled line search returns the best iterate with
// converged = false. Throws SingularJacobian.
Equilibrium solve_equilibrium(const Mesh& mesh, const Nonlinearity& nl, const Field& guess,
                              double tol = 1e-12, int max_iter = 100);

// e(u) = 1/2 |grad u|^2 (+ 1/2 boundary term) - int F(u)
double reduced_energy(std::span<const double> u, const Mesh& mesh, const Nonlinearity& nl);
// |Lap u + f(u)|_L2
double equation_residual(std::span<const double> u, const Mesh& mesh, const Nonlinearity& nl);
// sqrt of the sum over dynamical faces of (d_nu u + u)^2; zero otherwise.
double robin_residual(std::span<const double> u, const Mesh& mesh);

struct Distance {
  double h1 = 0.0;        // |u - phi|_H1
  double velocity = 0.0;  // |v|_L2
};

Distance distance_to(const State& state, const Equilibrium& eq, const Mesh& mesh);

// Lowest discrete eigenmodes of -Lap under the mesh's boundary relation
// (tensor products of 1D modes in 2D), ordered by eigenvalue.
struct Mode {
  double eigenvalue = 0.0;
  Field shape;
};
std::vector<Mode> low_modes(const Mesh& mesh, int count);

struct LsSample {
  double radius = 0.0;
  double energy_gap = 0.0;  // |e_u - e_phi|
  double residual = 0.0;
};

struct LojasiewiczEstimate {
  double theta = 0.0;
  double delta = 0.0;  // largest probe radius
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  bool clamped = false;
  std::string note;
  std::vector<LsSample> samples;
};

// Fits log(residual) = slope log(gap) + c over samples with gap > 1e-14;
// theta = 1 - slope clamped to (0, 1/2]. Throws DegenerateSamples.
LojasiewiczEstimate fit_lojasiewicz(std::vector<LsSample> samples, double delta);

LojasiewiczEstimate probe_lojasiewicz(const Equilibrium& eq, const Nonlinearity& nl, const Mesh& mesh,
                                      const std::vector<double>& radii, int samples_per_radius,
                                      std::uint64_t seed);

struct LsCheck {
  bool holds = true;
  double worst_ratio = 0.0;  // min of residual / gap^(1-theta)
  double witness_radius = 0.0;
  double witness_gap = 0.0;
  int used = 0;
};

LsCheck verify_ls(const Equilibrium& eq, const Nonlinearity& nl, const Mesh& mesh, double theta,
                  double delta, int n_samples, double margin, std::uint64_t seed = 1);

// Abstract-system counterparts: A psi = f(psi), probe with |Au - f(u)|.
struct GalerkinEquilibrium {
  Eigen::VectorXd psi;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

GalerkinEquilibrium solve_galerkin_equilibrium(const GalerkinSystem& sys, const Eigen::VectorXd& guess,
                                               double tol = 1e-12, int max_iter = 100);

LojasiewiczEstimate probe_lojasiewicz(const GalerkinSystem& sys, const GalerkinEquilibrium& eq,
                                      const std::vector<double>& radii, int samples_per_radius,
                                      std::uint64_t seed);

}  // namespace dampwave

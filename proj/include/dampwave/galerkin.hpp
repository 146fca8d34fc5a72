#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "dampwave/damping.hpp"
#include "dampwave/nonlinearity.hpp"

namespace dampwave {

// Variational nonlinearity on R^n: grad is f(u), potential is F with F(0) = 0.
struct GalerkinForce {
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> grad;
  std::function<double(const Eigen::VectorXd&)> potential;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jacobian;
  bool is_zero = false;

  static GalerkinForce zero(int n);
  static GalerkinForce componentwise(const Nonlinearity& nl);
};

// u'' + h(t) B u' + A u = f(u) with A symmetric positive definite and B coercive.
class GalerkinSystem {
 public:
  // Throws NonSpd / NotCoercive.
  GalerkinSystem(Eigen::MatrixXd A, Eigen::MatrixXd B, GalerkinForce force);

  int dimension() const { return static_cast<int>(A_.rows()); }
  const Eigen::MatrixXd& A() const { return A_; }
  const Eigen::MatrixXd& B() const { return B_; }
  const GalerkinForce& force() const { return force_; }
  // Smallest eigenvalue of the symmetric part of B.
  double coercivity() const { return coercivity_; }
  double max_stiffness() const { return lambda_max_; }

  // <Bw, w> >= a |w|^2 on n_samples random directions; returns the worst ratio.
  double check_coercivity(int n_samples, unsigned seed) const;

  double energy(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const;
  double reduced_energy(const Eigen::VectorXd& u) const;  // 1/2 <Au,u> - F(u)
  Eigen::VectorXd residual(const Eigen::VectorXd& u) const;  // -Au + f(u)

 private:
  Eigen::MatrixXd A_, B_;
  GalerkinForce force_;
  double coercivity_ = 0.0;
  double lambda_max_ = 0.0;
};

struct GalerkinConfig {
  DampingProfile damping = DampingProfile::constant(0.0);
  double dt = 1e-3;
  double t_end = 0.0;
  int sample_stride = 1;
  double blowup_threshold = 1e6;
  Eigen::VectorXd u0;
  Eigen::VectorXd v0;
};

struct GalerkinSample {
  double t = 0.0;
  double kinetic = 0.0;    // 1/2 |v|^2
  double potential = 0.0;  // 1/2 <Au, u>
  double forcing = 0.0;    // -F(u)
  double E = 0.0;
  double dissipation = 0.0;  // h(t) <Bv, v>
  double residual = 0.0;     // |-Au + f(u)|
  Eigen::VectorXd u;
  Eigen::VectorXd v;
};

struct GalerkinTrajectory {
  std::vector<GalerkinSample> samples;
  bool blown_up = false;
  std::optional<double> blowup_time;
  double dt = 0.0;
};

// Same velocity-Verlet scheme as the PDE integrator; the damping half-solve is
// (I + dt/2 h B) w = v*.
GalerkinTrajectory galerkin_run(const GalerkinSystem& system, const GalerkinConfig& config);

}  // namespace dampwave

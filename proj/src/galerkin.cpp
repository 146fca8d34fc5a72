#include "dampwave/galerkin.hpp"

#include <cmath>
#include <random>

#include "dampwave/error.hpp"

namespace dampwave {

GalerkinForce GalerkinForce::zero(int n) {
  GalerkinForce f;
  f.grad = [n](const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(n).eval(); };
  f.potential = [](const Eigen::VectorXd&) { return 0.0; };
  f.jacobian = [n](const Eigen::VectorXd&) { return Eigen::MatrixXd::Zero(n, n).eval(); };
  f.is_zero = true;
  return f;
}

GalerkinForce GalerkinForce::componentwise(const Nonlinearity& nl) {
  GalerkinForce f;
  f.grad = [nl](const Eigen::VectorXd& u) { return u.unaryExpr(nl.f).eval(); };
  f.potential = [nl](const Eigen::VectorXd& u) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < u.size(); ++k) s += nl.F(u[k]);
    return s;
  };
  f.jacobian = [nl](const Eigen::VectorXd& u) {
    return Eigen::MatrixXd(u.unaryExpr(nl.df).asDiagonal());
  };
  f.is_zero = nl.is_zero;
  return f;
}

GalerkinSystem::GalerkinSystem(Eigen::MatrixXd A, Eigen::MatrixXd B, GalerkinForce force)
    : A_(std::move(A)), B_(std::move(B)), force_(std::move(force)) {
  if (A_.rows() == 0 || A_.rows() != A_.cols() || B_.rows() != A_.rows() || B_.cols() != A_.cols())
    throw Error(ErrorKind::InvalidArgument, "Galerkin matrices must be square and of equal size");
  if ((A_ - A_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, A_.cwiseAbs().maxCoeff()))
    throw Error(ErrorKind::NonSpd, "stiffness matrix A is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ea(A_, Eigen::EigenvaluesOnly);
  if (!(ea.eigenvalues().minCoeff() > 0.0))
    throw Error(ErrorKind::NonSpd, "stiffness matrix A is not positive definite");
  lambda_max_ = ea.eigenvalues().maxCoeff();
  const Eigen::MatrixXd sym = 0.5 * (B_ + B_.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eb(sym, Eigen::EigenvaluesOnly);
  coercivity_ = eb.eigenvalues().minCoeff();
  if (!(coercivity_ > 0.0)) throw Error(ErrorKind::NotCoercive, "damping operator B is not coercive");
}

double GalerkinSystem::check_coercivity(int n_samples, unsigned seed) const {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  double worst = INFINITY;
  for (int s = 0; s < n_samples; ++s) {
    Eigen::VectorXd w(dimension());
    for (Eigen::Index k = 0; k < w.size(); ++k) w[k] = normal(rng);
    const double ratio = w.dot(B_ * w) / w.squaredNorm();
    worst = std::min(worst, ratio);
  }
  if (worst < coercivity_ * (1.0 - 1e-12))
    throw Error(ErrorKind::NotCoercive, "sampled <Bw,w> fell below the coercivity constant");
  return worst;
}

double GalerkinSystem::reduced_energy(const Eigen::VectorXd& u) const {
  return 0.5 * u.dot(A_ * u) - force_.potential(u);
}

double GalerkinSystem::energy(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
  return 0.5 * v.squaredNorm() + reduced_energy(u);
}

Eigen::VectorXd GalerkinSystem::residual(const Eigen::VectorXd& u) const {
  return -A_ * u + force_.grad(u);
}

GalerkinTrajectory galerkin_run(const GalerkinSystem& sys, const GalerkinConfig& cfg) {
  const int n = sys.dimension();
  if (cfg.u0.size() != n || cfg.v0.size() != n)
    throw Error(ErrorKind::InvalidArgument, "initial data size does not match the system");
  if (cfg.sample_stride < 1 || !(cfg.t_end >= 0.0))
    throw Error(ErrorKind::InvalidArgument, "bad Galerkin run parameters");

  GalerkinTrajectory traj;
  long n_steps = 0;
  double dt = 0.0;
  if (cfg.t_end > 0.0) {
    if (!(cfg.dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "time step must be positive");
    n_steps = static_cast<long>(std::ceil(cfg.t_end / cfg.dt - 1e-9));
    dt = cfg.t_end / n_steps;
    if (dt * std::sqrt(sys.max_stiffness()) >= 2.0)
      throw Error(ErrorKind::InvalidArgument, "time step exceeds the stability limit of A");
  }
  traj.dt = dt;

  const auto& A = sys.A();
  const auto& B = sys.B();
  Eigen::VectorXd u = cfg.u0, v = cfg.v0;

  auto record = [&](double t) {
    GalerkinSample s;
    s.t = t;
    s.kinetic = 0.5 * v.squaredNorm();
    s.potential = 0.5 * u.dot(A * u);
    s.forcing = -sys.force().potential(u);
    s.E = s.kinetic + s.potential + s.forcing;
    s.dissipation = cfg.damping(t) * v.dot(B * v);
    s.residual = sys.residual(u).norm();
    s.u = u;
    s.v = v;
    traj.samples.push_back(std::move(s));
  };
  auto accel = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return -A * x + sys.force().grad(x); };

  const double k = 0.5 * dt;
  std::optional<double> cached_h;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);

  record(0.0);
  Eigen::VectorXd a = accel(u);
  for (long step = 1; step <= n_steps; ++step) {
    const double t = (step - 1) * dt;
    const double h = cfg.damping(t + k);
    if (!cached_h || *cached_h != h) {
      lu.compute(I + k * h * B);
      cached_h = h;
    }
    const Eigen::VectorXd v_star = v + k * a;
    const Eigen::VectorXd w = lu.solve(v_star);
    u += dt * w;
    a = accel(u);
    v = w - k * h * (B * w) + k * a;
    const double tn = step * dt;
    if (!u.allFinite() || u.cwiseAbs().maxCoeff() > cfg.blowup_threshold) {
      traj.blown_up = true;
      traj.blowup_time = tn;
      break;
    }
    if (step % cfg.sample_stride == 0 || step == n_steps) record(tn);
  }
  return traj;
}

}  // namespace dampwave

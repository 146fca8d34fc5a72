#include "dampwave/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "dampwave/error.hpp"

namespace dampwave {

namespace {

constexpr double kNewtonTol = 1e-12;
constexpr int kNewtonMaxIter = 50;

double sup_abs(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) {
    if (!std::isfinite(v)) return INFINITY;
    m = std::max(m, std::abs(v));
  }
  return m;
}

}  // namespace

SimConfig::SimConfig(Mesh mesh_, DampingProfile damping_, Nonlinearity nonlinearity_)
    : mesh(std::move(mesh_)),
      damping(std::move(damping_)),
      nonlinearity(std::move(nonlinearity_)),
      u0(zeros(mesh)),
      u1(zeros(mesh)) {}

Integrator::Integrator(const SimConfig& config)
    : config_(config),
      g_(config.velocity_damping ? *config.velocity_damping : VelocityDamping::identity()),
      boundary_damping_(config.mesh.size(), 0.0),
      scratch_(config.mesh.size(), 0.0) {
  const Mesh& m = config.mesh;
  if (m.dimension() == 1) {
    if (m.face(Face::Left) == BoundaryKind::Dynamical) boundary_damping_[0] = 2.0 / m.dx();
    if (m.face(Face::Right) == BoundaryKind::Dynamical) boundary_damping_[m.nx() - 1] = 2.0 / m.dx();
  }
}

void Integrator::acceleration(std::span<const double> u, std::span<double> out) const {
  const Mesh& m = config_.mesh;
  laplacian_into(u, {}, m, out);
  const auto& f = config_.nonlinearity.f;
  for (int i = 0; i < m.nx(); ++i)
    for (int j = 0; j < m.ny(); ++j) {
      const std::size_t k = m.index(i, j);
      out[k] = m.pinned(i, j) ? 0.0 : out[k] + f(u[k]);
    }
}

// Solves w + k (h g(w) + b w) = v_star.
double Integrator::solve_damped(double v_star, double k, double h, double b) const {
  if (g_.linear) return v_star / (1.0 + k * (h + b));
  double w = v_star;
  for (int it = 0; it < kNewtonMaxIter; ++it) {
    const double r = w + k * (h * g_.g(w) + b * w) - v_star;
    const double dr = 1.0 + k * (h * g_.dg(w) + b);
    const double dw = r / dr;
    w -= dw;
    if (std::abs(dw) <= kNewtonTol * std::max(1.0, std::abs(w))) return w;
  }
  throw Error(ErrorKind::NewtonNoConvergence, "velocity damping solve did not converge");
}

State Integrator::step(const State& state, double dt) const {
  if (state.blown_up) throw Error(ErrorKind::InvalidArgument, "cannot step a blown-up state");
  const Mesh& m = config_.mesh;
  const std::size_t n = m.size();
  const double k = 0.5 * dt;
  const double h = config_.damping(state.t + k);

  State next;
  next.t = state.t + dt;
  next.u = state.u;
  next.v = state.v;
  auto& u = next.u.values;
  auto& v = next.v.values;
  auto& acc = scratch_;

  acceleration(state.u.values, acc);
  std::vector<double> w(n);
  for (std::size_t q = 0; q < n; ++q) {
    const double v_star = state.v[q] + k * acc[q];
    w[q] = solve_damped(v_star, k, h, boundary_damping_[q]);
    u[q] = state.u[q] + dt * w[q];
  }
  acceleration(u, acc);
  for (std::size_t q = 0; q < n; ++q) {
    const double b = boundary_damping_[q];
    if (g_.linear)
      v[q] = w[q] - k * (h + b) * w[q] + k * acc[q];
    else
      v[q] = w[q] - k * (h * g_.g(w[q]) + b * w[q]) + k * acc[q];
  }
  for (int i = 0; i < m.nx(); ++i)
    for (int j = 0; j < m.ny(); ++j)
      if (m.pinned(i, j)) {
        u[m.index(i, j)] = 0.0;
        v[m.index(i, j)] = 0.0;
      }
  if (sup_abs(u) > config_.blowup_threshold) next.blown_up = true;
  return next;
}

EnergyReport Integrator::energy(const State& s, double epsilon) const {
  const Mesh& m = config_.mesh;
  const auto& nl = config_.nonlinearity;
  const auto& u = s.u.values;
  const auto& v = s.v.values;
  auto& r = scratch_;
  laplacian_into(u, {}, m, r);

  EnergyReport e;
  e.t = s.t;
  double kin = 0, forcing = 0, rr = 0, rv = 0, fv = 0;
  for (int i = 0; i < m.nx(); ++i)
    for (int j = 0; j < m.ny(); ++j) {
      if (m.pinned(i, j)) continue;
      const std::size_t q = m.index(i, j);
      const double w = m.weights()[q];
      r[q] += nl.f(u[q]);
      kin += w * v[q] * v[q];
      forcing -= w * nl.F(u[q]);
      rr += w * r[q] * r[q];
      rv += w * r[q] * v[q];
      fv += w * nl.df(u[q]) * v[q] * v[q];
    }
  const double gv = gradient_sq(v, m);
  e.kinetic = 0.5 * kin;
  e.potential = 0.5 * gradient_sq(u, m);
  if (m.has_dynamical()) {
    if (m.face(Face::Left) == BoundaryKind::Dynamical) e.boundary += 0.5 * u[0] * u[0];
    if (m.face(Face::Right) == BoundaryKind::Dynamical) e.boundary += 0.5 * u[m.nx() - 1] * u[m.nx() - 1];
  }
  e.forcing = forcing;
  e.E = e.kinetic + e.potential + e.boundary + e.forcing;
  e.e = e.potential + e.boundary + e.forcing;
  e.residual = std::sqrt(rr);
  e.grad_v = std::sqrt(gv);
  e.H = e.E - epsilon * epsilon * rv + epsilon * gv + epsilon * rr - epsilon * fv;
  return e;
}

double Integrator::dissipation_rate(const State& s) const {
  const Mesh& m = config_.mesh;
  const double h = config_.damping(s.t);
  double d = 0.0;
  for (int i = 0; i < m.nx(); ++i)
    for (int j = 0; j < m.ny(); ++j) {
      if (m.pinned(i, j)) continue;
      const std::size_t q = m.index(i, j);
      const double vq = s.v[q];
      d += m.weights()[q] * g_.g(vq) * vq;
    }
  d *= h;
  // Boundary nodes: weight dx/2 times 2/dx v^2.
  for (std::size_t q = 0; q < boundary_damping_.size(); ++q)
    if (boundary_damping_[q] != 0.0) d += 0.5 * m.dx() * boundary_damping_[q] * s.v[q] * s.v[q];
  return d;
}

State initial_state(const SimConfig& config) {
  require_on(config.u0, config.mesh);
  require_on(config.u1, config.mesh);
  State s;
  s.t = 0.0;
  s.u = config.u0;
  s.v = config.u1;
  const Mesh& m = config.mesh;
  for (int i = 0; i < m.nx(); ++i)
    for (int j = 0; j < m.ny(); ++j)
      if (m.pinned(i, j)) {
        s.u[m.index(i, j)] = 0.0;
        s.v[m.index(i, j)] = 0.0;
      }
  return s;
}

State step(const State& state, const SimConfig& config) {
  if (!(config.dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "time step must be positive");
  if (config.dt > config.mesh.stability_limit())
    throw Error(ErrorKind::InvalidArgument, "time step exceeds the stability limit");
  Integrator integ(config);
  return integ.step(state, config.dt);
}

double auto_epsilon(double window_mean_floor, const Nonlinearity& nl, double sup_u) {
  const double h_floor = std::max(window_mean_floor, 0.01);
  Suprema sup;
  if (sup_u > 0.0) sup = bounds_on(nl, sup_u);
  return std::min({h_floor / 4.0, 1.0 / (4.0 * (1.0 + sup.df)), 1.0 / (4.0 * (1.0 + sup.d2f)), 0.25});
}

double auto_epsilon(const SimConfig& config, double sup_u) {
  const auto cert = certify_integrally_positive(config.damping);
  return auto_epsilon(cert.min_window_mean(), config.nonlinearity, sup_u);
}

EnergyReport energy(const State& state, const SimConfig& config, double epsilon) {
  require_on(state.u, config.mesh);
  require_on(state.v, config.mesh);
  Integrator integ(config);
  return integ.energy(state, epsilon);
}

Trajectory run(const SimConfig& config) {
  if (!(config.t_end >= 0.0)) throw Error(ErrorKind::InvalidArgument, "T_end must be >= 0");
  if (!(config.blowup_threshold > 0.0))
    throw Error(ErrorKind::InvalidArgument, "blow-up threshold must be positive");
  if (config.sample_stride < 1) throw Error(ErrorKind::InvalidArgument, "sample stride must be >= 1");
  if (!config.damping.nonnegative())
    throw Error(ErrorKind::InvalidArgument, "simulations require nonnegative damping");

  Trajectory traj;
  long n_steps = 0;
  double dt = 0.0;
  if (config.t_end > 0.0) {
    if (!(config.dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "time step must be positive");
    n_steps = static_cast<long>(std::ceil(config.t_end / config.dt - 1e-9));
    dt = config.t_end / n_steps;
    if (dt > config.mesh.stability_limit() * (1.0 + 1e-12))
      throw Error(ErrorKind::InvalidArgument, "time step exceeds the stability limit");
  }
  traj.dt = dt;

  State s = initial_state(config);
  traj.epsilon = config.epsilon ? *config.epsilon : auto_epsilon(config, sup_abs(s.u.values));

  Integrator integ(config);
  auto record = [&](const State& st) {
    Sample smp;
    smp.energy = integ.energy(st, traj.epsilon);
    smp.v_l2 = l2_norm(st.v.values, config.mesh);
    smp.u_linf = sup_abs(st.u.values);
    smp.dissipation = integ.dissipation_rate(st);
    traj.samples.push_back(smp);
    if (config.keep_states) traj.states.push_back(st);
  };

  record(s);
  for (long n = 1; n <= n_steps; ++n) {
    State next = integ.step(s, dt);
    next.t = n * dt;
    s = std::move(next);
    traj.steps = n;
    if (s.blown_up) {
      traj.blown_up = true;
      traj.blowup_time = s.t;
      break;
    }
    if (n % config.sample_stride == 0 || n == n_steps) record(s);
  }
  traj.final_state = std::move(s);
  return traj;
}

std::vector<double> dissipation_residual(const Trajectory& traj) {
  std::vector<double> out;
  const auto& sm = traj.samples;
  for (std::size_t k = 0; k + 1 < sm.size(); ++k) {
    const double dt = sm[k + 1].energy.t - sm[k].energy.t;
    if (!(dt > 0.0)) continue;
    const double rate = (sm[k + 1].energy.E - sm[k].energy.E) / dt;
    const double diss = 0.5 * (sm[k].dissipation + sm[k + 1].dissipation);
    out.push_back(std::abs(rate + diss));
  }
  return out;
}

}  // namespace dampwave

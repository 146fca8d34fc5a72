#pragma once

#include <optional>
#include <vector>

#include "dampwave/damping.hpp"
#include "dampwave/mesh.hpp"
#include "dampwave/nonlinearity.hpp"

namespace dampwave {

struct State {
  double t = 0.0;
  Field u;
  Field v;
  bool blown_up = false;
};

struct SimConfig {
  SimConfig(Mesh mesh_, DampingProfile damping_, Nonlinearity nonlinearity_);

  Mesh mesh;
  DampingProfile damping;
  // Identity (the linear-damping equation) when absent.
  std::optional<VelocityDamping> velocity_damping;
  Nonlinearity nonlinearity;
  double dt = 0.0;  // upper bound; run() shortens it so T_end is a whole number of steps
  double t_end = 0.0;
  int sample_stride = 1;
  std::optional<double> epsilon;  // Lyapunov epsilon; auto when absent
  double blowup_threshold = 1e6;
  Field u0;
  Field u1;
  bool keep_states = false;
};

struct EnergyReport {
  double t = 0.0;
  double kinetic = 0.0;    // 1/2 int v^2
  double potential = 0.0;  // 1/2 int |grad u|^2
  double boundary = 0.0;   // 1/2 int_{dOmega} u^2 on dynamical faces
  double forcing = 0.0;    // -int F(u)
  double E = 0.0;
  double e = 0.0;  // E - kinetic
  double H = 0.0;  // Lyapunov functional at the run's epsilon
  double residual = 0.0;  // |Lap u + f(u)|_L2
  double grad_v = 0.0;    // |grad v|_L2
};

struct Sample {
  EnergyReport energy;
  double v_l2 = 0.0;
  double u_linf = 0.0;
  // Instantaneous dissipation rate int h g(v) v (+ boundary sum v^2).
  double dissipation = 0.0;
};

struct Trajectory {
  std::vector<Sample> samples;
  std::vector<State> states;  // filled when keep_states is set; parallel to samples
  State final_state;
  bool blown_up = false;
  std::optional<double> blowup_time;
  double epsilon = 0.0;
  double dt = 0.0;
  long steps = 0;
};

// Damping value, Lyapunov epsilon and velocity damping resolved once per run.
class Integrator {
 public:
  explicit Integrator(const SimConfig& config);

  // One velocity-Verlet step with the semi-implicit damping half-solves.
  // Throws NewtonNoConvergence; sets blown_up when sup|u| exceeds the threshold.
  State step(const State& state, double dt) const;

  EnergyReport energy(const State& state, double epsilon) const;
  double dissipation_rate(const State& state) const;

 private:
  void acceleration(std::span<const double> u, std::span<double> out) const;
  double solve_damped(double v_star, double k, double h, double b) const;

  const SimConfig& config_;
  VelocityDamping g_;
  std::vector<double> boundary_damping_;  // 2/dx on dynamical boundary nodes
  mutable std::vector<double> scratch_;
};

State initial_state(const SimConfig& config);

State step(const State& state, const SimConfig& config);

Trajectory run(const SimConfig& config);

EnergyReport energy(const State& state, const SimConfig& config, double epsilon);

// |dE/dt + D| at sample midpoints, D averaged over the two samples.
std::vector<double> dissipation_residual(const Trajectory& traj);

// min(h_floor / 4, 1 / (4 (1 + sup|f'|)), 1 / (4 (1 + sup|f''|)), 1/4), suprema over [-sup_u, sup_u].
double auto_epsilon(const SimConfig& config, double sup_u);
double auto_epsilon(double window_mean_floor, const Nonlinearity& nl, double sup_u);

}  // namespace dampwave

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "dampwave/dynamics.hpp"
#include "dampwave/error.hpp"

using namespace dampwave;

namespace {

Mesh unit_pi(int n = 201, BoundaryKind k = BoundaryKind::Dirichlet) { return build_mesh(1, {M_PI, 0.0}, {n, 1}, {k}); }

SimConfig sine_config(const Mesh& m, DampingProfile h, const std::string& nl, double t_end, double amp = 1.0) {
  SimConfig c(m, std::move(h), builtin(nl));
  c.dt = 0.5 * m.dx();
  c.t_end = t_end;
  c.u0 = sample(m, [&](double x, double) { return amp * std::sin(x); });
  c.u1 = zeros(m);
  return c;
}

double modal_error(int n, double h, double t, double (*exact)(double)) {
  const Mesh m = unit_pi(n);
  SimConfig c = sine_config(m, DampingProfile::constant(h), "zero", t);
  c.sample_stride = 1 << 20;
  const Trajectory tr = run(c);
  EXPECT_NEAR(tr.final_state.t, t, 1e-12);
  std::vector<double> e(m.size());
  for (std::size_t k = 0; k < e.size(); ++k) e[k] = tr.final_state.u[k] - exact(t) * std::sin(m.x(static_cast<int>(k)));
  return l2_norm(e, m);
}

double worst(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

}  // namespace

TEST(Dynamics, UndampedModeAtPi) {
  auto cos_t = [](double t) { return std::cos(t); };
  EXPECT_LE(modal_error(201, 0.0, M_PI, cos_t), 2e-3);
}

TEST(Dynamics, CriticallyDampedModeAtFive) {
  auto crit = [](double t) { return (1 + t) * std::exp(-t); };
  EXPECT_LE(modal_error(201, 2.0, 5.0, crit), 2e-3);
}

TEST(Dynamics, ModalConvergenceOrder) {
  auto crit = [](double t) { return (1 + t) * std::exp(-t); };
  auto cos_t = [](double t) { return std::cos(t); };
  EXPECT_GE(std::log2(modal_error(51, 2.0, 5.0, crit) / modal_error(101, 2.0, 5.0, crit)), 1.9);
  EXPECT_GE(std::log2(modal_error(51, 0.0, M_PI, cos_t) / modal_error(101, 0.0, M_PI, cos_t)), 1.9);
}

TEST(Dynamics, ZeroHorizonGivesOneSample) {
  SimConfig c = sine_config(unit_pi(), DampingProfile::constant(1), "cubic_stable", 0.0);
  const Trajectory tr = run(c);
  ASSERT_EQ(tr.samples.size(), 1u);
  EXPECT_EQ(tr.samples[0].energy.t, 0.0);
  EXPECT_EQ(tr.samples[0].energy.E, energy(initial_state(c), c, tr.epsilon).E);
}

TEST(Dynamics, EnergyOfSineMode) {
  const Mesh m = unit_pi();
  SimConfig c = sine_config(m, DampingProfile::constant(1), "zero", 1.0);
  const EnergyReport e = energy(initial_state(c), c, 0.1);
  EXPECT_NEAR(e.E, M_PI / 4, 1e-4);
  EXPECT_NEAR(e.e, M_PI / 4, 1e-4);
  EXPECT_EQ(e.kinetic, 0.0);
  EXPECT_DOUBLE_EQ(e.E, e.kinetic + e.e);
}

TEST(Dynamics, ZeroStateHasZeroEnergy) {
  const Mesh m = unit_pi(51);
  for (std::string nl : {"cubic_stable", "saturating", "linear:2"}) {
    SimConfig c = sine_config(m, DampingProfile::constant(1), nl, 1.0, 0.0);
    const EnergyReport e = energy(initial_state(c), c, 0.1);
    EXPECT_EQ(e.E, 0.0);
    EXPECT_EQ(e.H, 0.0);
    EXPECT_EQ(e.residual, 0.0);
  }
}

TEST(Dynamics, LyapunovReducesToEnergyAtZeroEpsilon) {
  const Mesh m = unit_pi(51);
  SimConfig c = sine_config(m, DampingProfile::constant(1), "cubic_stable", 1.0);
  State s = initial_state(c);
  for (std::size_t k = 0; k < s.v.size(); ++k) s.v[k] = 0.3 * std::sin(2 * m.x(static_cast<int>(k)));
  const EnergyReport e = energy(s, c, 0.0);
  EXPECT_EQ(e.H, e.E);
}

TEST(Dynamics, SignConditionMakesForcingNonnegative) {
  const Mesh m = unit_pi(51);
  SimConfig c = sine_config(m, DampingProfile::constant(1), "cubic_stable", 1.0, 1.7);
  EXPECT_GE(energy(initial_state(c), c, 0.0).forcing, 0.0);
}

TEST(Dynamics, EnergyNonIncreasingWithDamping) {
  for (std::string h : {"constant:1", "onoff:1,1", "abs_sin"}) {
    SimConfig c = sine_config(unit_pi(), parse_profile(h), "cubic_stable", 30.0);
    const Trajectory tr = run(c);
    const double slack = 10.0 * tr.dt * tr.dt;
    for (std::size_t k = 1; k < tr.samples.size(); ++k)
      EXPECT_LE(tr.samples[k].energy.E, tr.samples[k - 1].energy.E + slack) << h << " t=" << tr.samples[k].energy.t;
  }
}

TEST(Dynamics, DissipationIdentitySecondOrder) {
  auto residual = [](double factor, std::optional<VelocityDamping> g, const std::string& nl) {
    const Mesh m = unit_pi();
    SimConfig c = sine_config(m, DampingProfile::constant(1), nl, 50.0);
    c.velocity_damping = g;
    c.dt = factor * m.dx();
    return worst(dissipation_residual(run(c)));
  };
  for (auto g : {std::optional<VelocityDamping>{}, std::optional<VelocityDamping>{VelocityDamping::linear_tanh(0.5)}}) {
    for (std::string nl : {"zero", "cubic_stable"}) {
      const double r1 = residual(0.5, g, nl), r2 = residual(0.25, g, nl);
      EXPECT_LE(r1, 5e-4) << nl;
      EXPECT_GE(r1 / r2, 3.5) << nl;
    }
  }
}

TEST(Dynamics, ConservativeResidualShrinksWithDt) {
  auto residual = [](double factor) {
    const Mesh m = unit_pi();
    SimConfig c = sine_config(m, DampingProfile::constant(0), "zero", 10.0);
    c.dt = factor * m.dx();
    return worst(dissipation_residual(run(c)));
  };
  EXPECT_GE(residual(0.5) / residual(0.25), 3.5);
}

TEST(Dynamics, DynamicalBoundaryEnergyIdentity) {
  const Mesh m = unit_pi(201, BoundaryKind::Dynamical);
  auto residual = [&](double factor) {
    SimConfig c(m, DampingProfile::constant(1), builtin("cubic_stable"));
    c.dt = factor * m.dx();
    c.t_end = 20.0;
    // Satisfies d_nu u + u = 0 at both ends, so no boundary layer is excited.
    c.u0 = sample(m, [](double x, double) { return 1.0 + x * (M_PI - x) / M_PI; });
    c.u1 = zeros(m);
    const Trajectory tr = run(c);
    EXPECT_GT(tr.samples.front().energy.boundary, 0.0);
    return worst(dissipation_residual(tr));
  };
  const double r1 = residual(0.5), r2 = residual(0.25);
  EXPECT_LE(r1, 5e-3);
  EXPECT_GE(r1 / r2, 3.5);
}

TEST(Dynamics, IdentityVelocityDampingIsBitwiseLinear) {
  const Mesh m = unit_pi();
  SimConfig a = sine_config(m, parse_profile("onoff:1,1"), "cubic_stable", 20.0);
  SimConfig b = a;
  b.velocity_damping = VelocityDamping::identity();
  a.keep_states = b.keep_states = true;
  const Trajectory ta = run(a), tb = run(b);
  ASSERT_EQ(ta.states.size(), tb.states.size());
  for (std::size_t k = 0; k < ta.states.size(); ++k) {
    EXPECT_EQ(ta.states[k].u.values, tb.states[k].u.values);
    EXPECT_EQ(ta.states[k].v.values, tb.states[k].v.values);
  }
}

TEST(Dynamics, RunsAreDeterministic) {
  SimConfig c = sine_config(unit_pi(), parse_profile("abs_sin"), "saturating", 10.0);
  c.velocity_damping = VelocityDamping::linear_tanh(0.5);
  const Trajectory a = run(c), b = run(c);
  ASSERT_EQ(a.samples.size(), b.samples.size());
  EXPECT_EQ(a.final_state.u.values, b.final_state.u.values);
  for (std::size_t k = 0; k < a.samples.size(); ++k) EXPECT_EQ(a.samples[k].energy.H, b.samples[k].energy.H);
}

TEST(Dynamics, WrongSignCubicBlowsUp) {
  SimConfig c = sine_config(unit_pi(), DampingProfile::constant(1), "cubic_unstable", 5.0, 5.0);
  c.blowup_threshold = 1e6;
  const Trajectory tr = run(c);
  EXPECT_TRUE(tr.blown_up);
  ASSERT_TRUE(tr.blowup_time);
  EXPECT_LT(*tr.blowup_time, 5.0);
}

TEST(Dynamics, RightSignCubicStaysBounded) {
  SimConfig c = sine_config(unit_pi(), DampingProfile::constant(1), "cubic_stable", 200.0, 5.0);
  c.sample_stride = 50;
  const Trajectory tr = run(c);
  EXPECT_FALSE(tr.blown_up);
  for (const auto& s : tr.samples) EXPECT_LE(s.u_linf, 5.0 + 1e-9);
}

TEST(Dynamics, RejectsUnstableStep) {
  const Mesh m = unit_pi();
  SimConfig c = sine_config(m, DampingProfile::constant(1), "zero", 1.0);
  c.dt = 1.5 * m.dx();
  EXPECT_THROW(run(c), Error);
}

TEST(Dynamics, RejectsNegativeDamping) {
  SimConfig c = sine_config(unit_pi(), parse_profile("exp:-1,0"), "zero", 1.0);
  EXPECT_THROW(run(c), Error);
}

TEST(Dynamics, AutoEpsilon) {
  EXPECT_DOUBLE_EQ(auto_epsilon(1.0, builtin("zero"), 1.0), 0.25);
  // sup|f'| = 3 and sup|f''| = 6 on [-1, 1]; the f'' term is the binding one.
  EXPECT_DOUBLE_EQ(auto_epsilon(1.0, builtin("cubic_stable"), 1.0), 1.0 / 28.0);
  EXPECT_DOUBLE_EQ(auto_epsilon(0.0, builtin("zero"), 1.0), 0.0025);
  SimConfig c = sine_config(unit_pi(51), DampingProfile::constant(1), "zero", 1.0);
  EXPECT_DOUBLE_EQ(auto_epsilon(c, 1.0), 0.25);
  EXPECT_DOUBLE_EQ(auto_epsilon(sine_config(unit_pi(51), DampingProfile::power_law(1, 2), "zero", 1.0), 1.0), 0.0025);
}

TEST(Dynamics, LyapunovEventuallyNonIncreasing) {
  SimConfig c = sine_config(unit_pi(), DampingProfile::constant(1), "cubic_stable", 60.0);
  c.sample_stride = 4;
  const Trajectory tr = run(c);
  const auto& s = tr.samples;
  // Transient ends when H has decreased over 10 consecutive samples.
  std::size_t start = 0;
  for (std::size_t k = 10, run_len = 0; k < s.size(); ++k) {
    run_len = s[k].energy.H < s[k - 1].energy.H ? run_len + 1 : 0;
    if (run_len >= 10) {
      start = k;
      break;
    }
  }
  ASSERT_GT(start, 0u);
  const double slack = 10.0 * tr.dt * tr.dt;
  for (std::size_t k = start + 1; k < s.size(); ++k)
    EXPECT_LE(s[k].energy.H, s[k - 1].energy.H + slack * std::max(1.0, s[k - 1].energy.H)) << s[k].energy.t;
}

TEST(Dynamics, TwoDimensionalRunDecays) {
  const Mesh m = build_mesh(2, {M_PI, M_PI}, {41, 41}, {BoundaryKind::Dirichlet});
  SimConfig c(m, DampingProfile::constant(1), builtin("cubic_stable"));
  c.dt = 0.5 * m.dx() / std::sqrt(2.0);
  c.t_end = 40.0;
  c.sample_stride = 100;
  c.u0 = sample(m, [](double x, double y) { return std::sin(x) * std::sin(y); });
  c.u1 = zeros(m);
  const Trajectory tr = run(c);
  EXPECT_LT(tr.samples.back().energy.E, 1e-10 * tr.samples.front().energy.E + 1e-12);
}

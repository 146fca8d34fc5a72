#include "dampwave/scenario.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "dampwave/error.hpp"
#include "dampwave/io.hpp"

#ifndef DAMPWAVE_PRESET_DIR
#define DAMPWAVE_PRESET_DIR "presets"
#endif

namespace dampwave {

namespace fs = std::filesystem;

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{
      "paper-example", "constant-damping-cubic", "on-off",           "sin-damping",      "neumann",
      "dynamical-bc",  "blow-up",                "abstract-galerkin", "nonlinear-damping", "undamped-control"};
  return names;
}

std::string preset_directory() {
  if (const char* env = std::getenv("DAMPWAVE_PRESETS"); env && *env) return env;
  return DAMPWAVE_PRESET_DIR;
}

std::string preset_path(const std::string& name) {
  if (std::find(scenario_names().begin(), scenario_names().end(), name) == scenario_names().end())
    throw Error(ErrorKind::Config, "unknown scenario '" + name + "'");
  return (fs::path(preset_directory()) / (name + ".cfg")).string();
}

RunConfiguration load_scenario(const std::string& name_or_path) {
  const bool path_like = name_or_path.find('/') != std::string::npos || fs::path(name_or_path).has_extension();
  if (path_like || fs::is_regular_file(name_or_path)) return load_config(name_or_path);
  return load_config(preset_path(name_or_path));
}

std::string default_output_dir(const RunConfiguration& cfg) {
  return cfg.output_dir.empty() ? (fs::path("out") / cfg.name).string() : cfg.output_dir;
}

bool SimulationResult::blown_up() const {
  return (trajectory && trajectory->blown_up) || (galerkin && galerkin->blown_up);
}

SimulationResult simulate(const RunConfiguration& cfg, bool keep_states) {
  SimulationResult r;
  r.config = cfg;
  const auto start = std::chrono::steady_clock::now();
  if (cfg.mode == RunMode::Galerkin) {
    r.galerkin = galerkin_run(make_galerkin_system(cfg), make_galerkin_config(cfg));
  } else {
    SimConfig sim = make_sim_config(cfg);
    sim.keep_states = keep_states || !cfg.snapshots.empty();
    r.trajectory = run(sim);
  }
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

namespace {

void write_json(const std::string& path, const nlohmann::json& j) { write_text_file(path, j.dump(2) + "\n"); }

std::string snapshot_name(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "u_t%g.csv", t);
  return buf;
}

}  // namespace

void write_simulation(const SimulationResult& r, const std::string& dir) {
  fs::create_directories(dir);
  const fs::path base(dir);
  {
    std::ostringstream os;
    write_config(os, r.config);
    write_text_file((base / "resolved.cfg").string(), os.str());
  }
  std::ostringstream csv;
  if (r.trajectory) {
    write_trajectory_csv(csv, *r.trajectory);
    write_json((base / "summary.json").string(), summary_json(*r.trajectory, r.wall_seconds));
    const auto& states = r.trajectory->states;
    if (!states.empty() && !r.config.snapshots.empty()) {
      const Mesh mesh = make_mesh(r.config);
      for (double ts : r.config.snapshots) {
        const auto it = std::min_element(states.begin(), states.end(), [&](const State& a, const State& b) {
          return std::abs(a.t - ts) < std::abs(b.t - ts);
        });
        std::ostringstream fs_out;
        write_field_csv(fs_out, it->u, mesh);
        write_text_file((base / snapshot_name(ts)).string(), fs_out.str());
      }
    }
  } else if (r.galerkin) {
    write_galerkin_csv(csv, *r.galerkin);
    write_json((base / "summary.json").string(), summary_json(*r.galerkin, r.wall_seconds));
  }
  write_text_file((base / "trajectory.csv").string(), csv.str());
}

namespace {

Hypotheses base_hypotheses(const RunConfiguration& cfg, const DampingProfile& profile, const Nonlinearity& nl,
                           double sup_u, CertificateReport& cert) {
  CertifyOptions opt;
  opt.epsilons = cfg.certify_epsilons;
  opt.horizon = cfg.t_end;
  cert = certify_integrally_positive(profile, opt);
  Hypotheses h;
  h.certificate = cert.verdict;
  h.structure = classify_structure(profile);
  h.sign_beta = std::max(sup_u, 1e-12);
  h.sign = validate_sign(nl, h.sign_beta).status;
  h.suprema = bounds_on(nl, h.sign_beta);
  return h;
}

void certificate_notes(const CertificateReport& cert, Theorem1Report& rep) {
  if (cert.verdict != Verdict::Refuted) return;
  std::ostringstream os;
  os << "damping is not integrally positive: window [" << cert.witness_t << ", " << cert.witness_t + cert.epsilon
     << "] carries mass " << cert.delta;
  if (!cert.note.empty()) os << " (" << cert.note << ")";
  rep.notes.push_back(os.str());
}

// Slowest decay rate of the linearization u'' + h B u' + (A - J) u = 0.
std::optional<double> galerkin_modal_rate(const GalerkinSystem& sys, const DampingProfile& profile,
                                          const Eigen::VectorXd& psi) {
  if (profile.kind() != ProfileKind::Constant) return std::nullopt;
  const int n = sys.dimension();
  Eigen::MatrixXd K = sys.A();
  if (!sys.force().is_zero) K -= sys.force().jacobian(psi);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  M.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
  M.bottomLeftCorner(n, n) = -K;
  M.bottomRightCorner(n, n) = -profile.h0() * sys.B();
  Eigen::EigenSolver<Eigen::MatrixXd> es(M);
  const double worst = es.eigenvalues().real().maxCoeff();
  if (!(worst < 0.0)) return std::nullopt;
  return -worst;
}

}  // namespace

ScenarioOutcome run_scenario(const RunConfiguration& cfg) {
  ScenarioOutcome out;
  out.sim = simulate(cfg, cfg.mode == RunMode::Pde);
  const DampingProfile profile = parse_profile(cfg.damping);
  const Nonlinearity nl = builtin(cfg.nonlinearity);

  ConvergenceSeries series;
  Hypotheses hyp;

  if (out.sim.trajectory) {
    const Trajectory& traj = *out.sim.trajectory;
    const Mesh mesh = make_mesh(cfg);
    double sup_u = 0.0;
    for (const auto& s : traj.samples)
      if (std::isfinite(s.u_linf)) sup_u = std::max(sup_u, s.u_linf);
    if (traj.blown_up && !traj.samples.empty()) sup_u = traj.samples.front().u_linf;
    hyp = base_hypotheses(cfg, profile, nl, sup_u, out.certificate);
    hyp.blown_up = traj.blown_up;
    hyp.blowup_time = traj.blowup_time;

    if (!traj.blown_up) {
      try {
        out.equilibrium = solve_equilibrium(mesh, nl, traj.final_state.u);
        out.ls = probe_lojasiewicz(*out.equilibrium, nl, mesh, cfg.radii, cfg.samples_per_radius, cfg.seed);
      } catch (const Error& e) {
        if (!e.is_numeric() && e.kind() != ErrorKind::DegenerateSamples) throw;
      }
      if (out.equilibrium) {
        for (const auto& st : traj.states) {
          const Distance d = distance_to(st, *out.equilibrium, mesh);
          series.t.push_back(st.t);
          series.distance.push_back(d.h1);
          series.velocity.push_back(d.velocity);
        }
        const auto& phi = out.equilibrium->phi.values;
        const auto [lo, hi] = std::minmax_element(phi.begin(), phi.end());
        const bool flat = *hi - *lo <= 1e-10;
        const bool linear_g = parse_velocity_damping(cfg.velocity_damping).linear;
        if (profile.kind() == ProfileKind::Constant && linear_g && flat && !mesh.has_dynamical()) {
          const double lambda = low_modes(mesh, 1).front().eigenvalue - nl.df(*lo);
          if (lambda > 1e-6) out.modal_rate = modal_decay_rate(profile.h0(), lambda);
        }
      }
    } else {
      for (const auto& s : traj.samples) {
        series.t.push_back(s.energy.t);
        series.distance.push_back(std::numeric_limits<double>::quiet_NaN());
        series.velocity.push_back(s.v_l2);
      }
    }
  } else {
    const GalerkinTrajectory& traj = *out.sim.galerkin;
    const GalerkinSystem sys = make_galerkin_system(cfg);
    double sup_u = 0.0;
    for (const auto& s : traj.samples)
      if (s.u.allFinite()) sup_u = std::max(sup_u, s.u.cwiseAbs().maxCoeff());
    if (traj.blown_up && !traj.samples.empty()) sup_u = traj.samples.front().u.cwiseAbs().maxCoeff();
    hyp = base_hypotheses(cfg, profile, nl, sup_u, out.certificate);
    hyp.blown_up = traj.blown_up;
    hyp.blowup_time = traj.blowup_time;
    if (!traj.blown_up && !traj.samples.empty()) {
      try {
        out.galerkin_equilibrium = solve_galerkin_equilibrium(sys, traj.samples.back().u);
        out.ls = probe_lojasiewicz(sys, *out.galerkin_equilibrium, cfg.radii, cfg.samples_per_radius, cfg.seed);
      } catch (const Error& e) {
        if (!e.is_numeric() && e.kind() != ErrorKind::DegenerateSamples) throw;
      }
      if (out.galerkin_equilibrium) {
        const Eigen::VectorXd& psi = out.galerkin_equilibrium->psi;
        for (const auto& s : traj.samples) {
          const Eigen::VectorXd e = s.u - psi;
          series.t.push_back(s.t);
          series.distance.push_back(std::sqrt(e.dot(sys.A() * e)));
          series.velocity.push_back(s.v.norm());
        }
        out.modal_rate = galerkin_modal_rate(sys, profile, psi);
      }
    } else {
      for (const auto& s : traj.samples) {
        series.t.push_back(s.t);
        series.distance.push_back(std::numeric_limits<double>::quiet_NaN());
        series.velocity.push_back(s.v.norm());
      }
    }
  }

  out.report = theorem1_report(series, hyp, out.ls ? &*out.ls : nullptr, out.modal_rate, cfg.analysis);
  certificate_notes(out.certificate, out.report);
  if (out.ls && out.ls->clamped) out.report.notes.push_back("theta estimate clamped: " + out.ls->note);
  if (out.equilibrium && !out.equilibrium->converged)
    out.report.notes.push_back("equilibrium solve did not reach tolerance");
  out.exit_code = out.sim.blown_up() ? kExitBlowup : kExitOk;
  return out;
}

void write_scenario(const ScenarioOutcome& o, const std::string& dir) {
  write_simulation(o.sim, dir);
  const fs::path base(dir);
  nlohmann::json j = to_json(o.report);
  j["scenario"] = o.sim.config.name;
  j["certificate"] = to_json(o.certificate);
  j["modal_rate"] = o.modal_rate ? nlohmann::json(*o.modal_rate) : nlohmann::json(nullptr);
  if (o.ls) j["lojasiewicz"] = to_json(*o.ls);
  if (o.equilibrium) {
    const Mesh mesh = make_mesh(o.sim.config);
    j["equilibrium"] = to_json(*o.equilibrium, mesh, o.sim.config.nonlinearity);
    std::ostringstream os;
    write_field_csv(os, o.equilibrium->phi, mesh);
    write_text_file((base / "equilibrium.csv").string(), os.str());
    write_text_file((base / "equilibrium.json").string(), j["equilibrium"].dump(2) + "\n");
  }
  if (o.galerkin_equilibrium) {
    const auto& g = *o.galerkin_equilibrium;
    j["equilibrium"] = {{"psi", std::vector<double>(g.psi.data(), g.psi.data() + g.psi.size())},
                        {"residual", g.residual},
                        {"iterations", g.iterations},
                        {"converged", g.converged}};
  }
  write_text_file((base / "report.json").string(), j.dump(2) + "\n");
  write_text_file((base / "report.txt").string(), "scenario : " + o.sim.config.name + "\n" + report_text(o.report));
}

}  // namespace dampwave

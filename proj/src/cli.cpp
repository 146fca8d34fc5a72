#include "dampwave/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include "dampwave/error.hpp"
#include "dampwave/io.hpp"
#include "dampwave/scenario.hpp"

namespace dampwave {

namespace {

namespace fs = std::filesystem;

int exit_code_for(const Error& e) { return e.is_numeric() ? kExitNumeric : kExitConfig; }

template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
}

int simulate_one(const std::string& source, const std::string& dir, std::ostream& out) {
  const RunConfiguration cfg = load_scenario(source);
  const std::string target = dir.empty() ? default_output_dir(cfg) : dir;
  const SimulationResult r = simulate(cfg);
  write_simulation(r, target);
  out << cfg.name << ": wrote " << target;
  if (r.blown_up()) {
    const auto t = r.trajectory ? r.trajectory->blowup_time : r.galerkin->blowup_time;
    out << " (blow-up at t = " << t.value_or(0.0) << ")";
  }
  out << '\n';
  return r.blown_up() ? kExitBlowup : kExitOk;
}

int cmd_simulate(const std::vector<std::string>& configs, const std::string& out_dir, bool sweep,
                 std::ostream& out, std::ostream& err) {
  auto dir_for = [&](std::size_t k) -> std::string {
    if (out_dir.empty()) return {};
    if (configs.size() == 1) return out_dir;
    return (fs::path(out_dir) / fs::path(configs[k]).stem()).string();
  };
  std::vector<int> codes(configs.size(), kExitOk);
  std::vector<std::ostringstream> logs(configs.size()), errs(configs.size());
  auto job = [&](std::size_t k) { codes[k] = guarded(errs[k], [&] { return simulate_one(configs[k], dir_for(k), logs[k]); }); };
  if (sweep) {
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < configs.size(); ++k) pool.emplace_back(job, k);
    for (auto& th : pool) th.join();
  } else {
    for (std::size_t k = 0; k < configs.size(); ++k) job(k);
  }
  for (std::size_t k = 0; k < configs.size(); ++k) {
    out << logs[k].str();
    err << errs[k].str();
  }
  return *std::max_element(codes.begin(), codes.end());
}

int cmd_certify(const std::string& spec, const std::vector<double>& epsilons, double horizon, bool as_json,
                std::ostream& out) {
  const DampingProfile profile = parse_profile(spec);
  CertifyOptions opt;
  if (!epsilons.empty()) opt.epsilons = epsilons;
  opt.horizon = horizon;
  const CertificateReport cert = certify_integrally_positive(profile, opt);
  const Structure structure = classify_structure(profile);
  const Criterion11Result c11 = criterion_11(profile, horizon);
  if (as_json) {
    nlohmann::json j{{"schema_version", kSchemaVersion},
                     {"profile", profile.spec()},
                     {"certificate", to_json(cert)},
                     {"structure", to_string(structure)},
                     {"criterion_11",
                      {{"verdict", to_string(c11.verdict)},
                       {"outer_slope", c11.outer_slope},
                       {"integrand_slope", c11.integrand_slope}}}};
    out << j.dump(2) << '\n';
    return kExitOk;
  }
  out << "profile             : " << profile.spec() << '\n';
  out << "integral positivity : " << to_string(cert.verdict);
  if (cert.verdict == Verdict::Refuted)
    out << " (window [" << cert.witness_t << ", " << cert.witness_t + cert.epsilon << "] mass " << cert.delta << ")";
  else
    out << " (delta(" << cert.epsilon << ") = " << cert.delta << ")";
  out << '\n';
  out << "structure           : " << to_string(structure) << '\n';
  out << "criterion_11        : " << to_string(c11.verdict) << " (outer slope " << c11.outer_slope << ")\n";
  return kExitOk;
}

int cmd_equilibrium(const std::string& source, const std::string& dir, std::ostream& out) {
  const RunConfiguration cfg = load_scenario(source);
  if (cfg.mode == RunMode::Galerkin) {
    const GalerkinSystem sys = make_galerkin_system(cfg);
    const auto eq = solve_galerkin_equilibrium(
        sys, Eigen::Map<const Eigen::VectorXd>(cfg.galerkin_u0.data(), static_cast<Eigen::Index>(cfg.galerkin_u0.size())));
    out << "residual   : " << eq.residual << "\niterations : " << eq.iterations << "\npsi        :";
    for (Eigen::Index k = 0; k < eq.psi.size(); ++k) out << ' ' << eq.psi[k];
    out << '\n';
    return eq.converged ? kExitOk : kExitNumeric;
  }
  const Mesh mesh = make_mesh(cfg);
  const Nonlinearity nl = builtin(cfg.nonlinearity);
  const Equilibrium eq = solve_equilibrium(mesh, nl, initial_field(cfg.u0, mesh));
  out << "residual          : " << eq.residual << '\n';
  out << "boundary residual : " << eq.boundary_residual << '\n';
  out << "iterations        : " << eq.iterations << '\n';
  out << "converged         : " << (eq.converged ? "yes" : "no") << '\n';
  out << "|phi|_H1          : " << h1_norm(eq.phi.values, mesh) << '\n';
  if (!dir.empty()) {
    fs::create_directories(dir);
    std::ostringstream os;
    write_field_csv(os, eq.phi, mesh);
    write_text_file((fs::path(dir) / "equilibrium.csv").string(), os.str());
    write_text_file((fs::path(dir) / "equilibrium.json").string(), to_json(eq, mesh, cfg.nonlinearity).dump(2) + "\n");
  }
  return eq.converged ? kExitOk : kExitNumeric;
}

int cmd_probe(const std::string& source, std::vector<double> radii, int samples, std::optional<std::uint64_t> seed,
              bool as_json, std::ostream& out) {
  const RunConfiguration cfg = load_scenario(source);
  if (radii.empty()) radii = cfg.radii;
  if (samples <= 0) samples = cfg.samples_per_radius;
  const std::uint64_t s = seed.value_or(cfg.seed);
  LojasiewiczEstimate ls;
  if (cfg.mode == RunMode::Galerkin) {
    const GalerkinSystem sys = make_galerkin_system(cfg);
    const auto eq = solve_galerkin_equilibrium(sys, Eigen::VectorXd::Zero(sys.dimension()));
    ls = probe_lojasiewicz(sys, eq, radii, samples, s);
  } else {
    const Mesh mesh = make_mesh(cfg);
    const Nonlinearity nl = builtin(cfg.nonlinearity);
    const Equilibrium eq = solve_equilibrium(mesh, nl, initial_field(cfg.u0, mesh));
    ls = probe_lojasiewicz(eq, nl, mesh, radii, samples, s);
  }
  if (as_json) {
    out << to_json(ls).dump(2) << '\n';
    return kExitOk;
  }
  out << "theta     : " << ls.theta << (ls.clamped ? " (clamped)" : "") << '\n';
  out << "slope     : " << ls.slope << '\n';
  out << "r2        : " << ls.r2 << '\n';
  out << "delta     : " << ls.delta << '\n';
  out << "samples   : " << ls.samples.size() << '\n';
  if (!ls.note.empty()) out << "note      : " << ls.note << '\n';
  return kExitOk;
}

int cmd_fit(const std::string& path, const std::string& column, const std::string& time_column, double t_min,
            std::optional<double> alpha, std::optional<double> C, bool as_json, std::ostream& out) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read '" + path + "'");
  const Table table = read_table(in);
  const auto t = table.column(time_column);
  const auto y = table.column(column);
  const DecayFit fit = fit_decay(t, y, t_min);
  std::optional<OdeBoundCheck> check;
  if (alpha || C) {
    if (!(alpha && C)) throw Error(ErrorKind::Config, "--alpha and --C must be given together");
    check = lemma3_check(t, y, *alpha, *C);
  }
  if (as_json) {
    nlohmann::json j{{"schema_version", kSchemaVersion}, {"column", column}, {"fit", to_json(fit)}};
    if (check) j["differential_inequality"] = to_json(*check);
    out << j.dump(2) << '\n';
    return kExitOk;
  }
  out << "class     : " << to_string(fit.cls) << '\n';
  out << "rate      : " << std::setprecision(10) << fit.rate << '\n';
  out << "prefactor : " << fit.prefactor << '\n';
  out << "window    : [" << fit.t_a << ", " << fit.t_b << "]\n";
  out << "rms exp   : " << fit.exp_rms << "\nrms poly  : " << fit.poly_rms << '\n';
  if (check)
    out << "inequality: " << (check->valid() ? "holds" : "violated") << " (slack violations " << check->slack_violations
        << ", bound violations " << check->bound_violations << ")\n";
  return kExitOk;
}

int cmd_scenario(const std::string& source, const std::string& dir, bool as_json, std::ostream& out) {
  const RunConfiguration cfg = load_scenario(source);
  const ScenarioOutcome o = run_scenario(cfg);
  const std::string target = dir.empty() ? default_output_dir(cfg) : dir;
  write_scenario(o, target);
  if (as_json) {
    std::ifstream in(fs::path(target) / "report.json");
    out << in.rdbuf();
  } else {
    out << "scenario : " << cfg.name << '\n' << report_text(o.report) << "outputs  : " << target << '\n';
  }
  return o.exit_code;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Damped nonlinear wave simulation and convergence analysis", "dampwave"};
  app.require_subcommand(1);

  std::vector<std::string> sim_configs;
  std::string out_dir;
  bool sweep = false, as_json = false;
  auto* sim = app.add_subcommand("simulate", "Integrate one or more configurations");
  sim->add_option("config", sim_configs, "Config file or preset name")->required();
  sim->add_option("--out", out_dir, "Output directory");
  sim->add_flag("--sweep", sweep, "Run the configurations concurrently");

  std::string profile;
  std::vector<double> epsilons;
  double horizon = 200.0;
  auto* cert = app.add_subcommand("certify", "Classify a damping profile");
  cert->add_option("--profile", profile, "Damping profile, e.g. constant:1")->required();
  cert->add_option("--epsilons", epsilons, "Window lengths")->delimiter(',');
  cert->add_option("--horizon", horizon, "Scan horizon");
  cert->add_flag("--json", as_json);

  std::string source;
  auto* eq = app.add_subcommand("equilibrium", "Solve the stationary problem");
  eq->add_option("config", source, "Config file or preset name")->required();
  eq->add_option("--out", out_dir, "Directory for equilibrium.csv/json");

  std::vector<double> radii;
  int samples = 0;
  std::optional<std::uint64_t> seed;
  auto* probe = app.add_subcommand("probe-theta", "Estimate the Lojasiewicz exponent at the equilibrium");
  probe->add_option("config", source, "Config file or preset name")->required();
  probe->add_option("--radii", radii, "Probe radii")->delimiter(',');
  probe->add_option("--samples", samples, "Samples per radius");
  probe->add_option("--seed", seed, "Random seed");
  probe->add_flag("--json", as_json);

  std::string csv_path, column = "v_l2", time_column = "t";
  double t_min = 0.2;
  std::optional<double> alpha, C;
  auto* fit = app.add_subcommand("fit", "Fit exponential and polynomial decay to a trajectory column");
  fit->add_option("trajectory", csv_path, "Trajectory CSV")->required();
  fit->add_option("--column", column, "Series column");
  fit->add_option("--time-column", time_column, "Time column");
  fit->add_option("--t-min", t_min, "Fraction of the time span discarded as transient");
  fit->add_option("--alpha", alpha, "Exponent of v' <= -C v^alpha");
  fit->add_option("--C", C, "Constant of v' <= -C v^alpha");
  fit->add_flag("--json", as_json);

  auto* scen = app.add_subcommand("scenario", "Run simulate, equilibrium, probe and report");
  scen->add_option("name", source, "Preset name or config file")->required();
  scen->add_option("--out", out_dir, "Output directory");
  scen->add_flag("--json", as_json);

  auto* list = app.add_subcommand("list-scenarios", "Print the preset names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (*sim) return cmd_simulate(sim_configs, out_dir, sweep, out, err);
  return guarded(err, [&] {
    if (*cert) return cmd_certify(profile, epsilons, horizon, as_json, out);
    if (*eq) return cmd_equilibrium(source, out_dir, out);
    if (*probe) return cmd_probe(source, radii, samples, seed, as_json, out);
    if (*fit) return cmd_fit(csv_path, column, time_column, t_min, alpha, C, as_json, out);
    if (*scen) return cmd_scenario(source, out_dir, as_json, out);
    if (*list) {
      for (const auto& n : scenario_names()) out << n << '\n';
      return kExitOk;
    }
    return kExitConfig;
  });
}

}  // namespace dampwave

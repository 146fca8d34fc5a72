#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dampwave/analysis.hpp"
#include "dampwave/config.hpp"
#include "dampwave/damping.hpp"
#include "dampwave/dynamics.hpp"
#include "dampwave/equilibria.hpp"
#include "dampwave/galerkin.hpp"

namespace dampwave {

const std::vector<std::string>& scenario_names();
// $DAMPWAVE_PRESETS when set, else the in-tree presets directory.
std::string preset_directory();
std::string preset_path(const std::string& name);
// Accepts a preset name or a path to a config file.
RunConfiguration load_scenario(const std::string& name_or_path);

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNumeric = 2;
inline constexpr int kExitBlowup = 3;

struct SimulationResult {
  RunConfiguration config;
  std::optional<Trajectory> trajectory;
  std::optional<GalerkinTrajectory> galerkin;
  double wall_seconds = 0.0;
  bool blown_up() const;
};

SimulationResult simulate(const RunConfiguration& cfg, bool keep_states = false);

// Writes trajectory.csv, summary.json, resolved.cfg and any snapshot fields.
void write_simulation(const SimulationResult& r, const std::string& dir);

struct ScenarioOutcome {
  SimulationResult sim;
  CertificateReport certificate;
  std::optional<Equilibrium> equilibrium;
  std::optional<GalerkinEquilibrium> galerkin_equilibrium;
  std::optional<LojasiewiczEstimate> ls;
  std::optional<double> modal_rate;
  Theorem1Report report;
  int exit_code = kExitOk;
};

// simulate -> equilibrium -> probe -> report
ScenarioOutcome run_scenario(const RunConfiguration& cfg);

// Adds report.json, report.txt and the equilibrium files to the simulation outputs.
void write_scenario(const ScenarioOutcome& outcome, const std::string& dir);

std::string default_output_dir(const RunConfiguration& cfg);

}  // namespace dampwave

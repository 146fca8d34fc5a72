#pragma once

#include <iosfwd>
#include "json.hpp"
#include <string>
#include <vector>

#include "dampwave/analysis.hpp"
#include "dampwave/dynamics.hpp"
#include "dampwave/equilibria.hpp"
#include "dampwave/galerkin.hpp"

namespace dampwave {

inline constexpr int kSchemaVersion = 1;

// Columns t,kinetic,potential,boundary,forcing,E,e,H,residual,grad_v,v_l2,u_linf
// after a "# schema_version=N" line; every value printed with %.17g.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
void write_galerkin_csv(std::ostream& os, const GalerkinTrajectory& traj);

// Named columns of a CSV written above ('#' lines skipped).
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::vector<double> column(const std::string& name) const;
};
Table read_table(std::istream& is);

nlohmann::json summary_json(const Trajectory& traj, double wall_seconds);
nlohmann::json summary_json(const GalerkinTrajectory& traj, double wall_seconds);
nlohmann::json to_json(const CertificateReport& r);
nlohmann::json to_json(const Equilibrium& eq, const Mesh& mesh, const std::string& nonlinearity);
nlohmann::json to_json(const LojasiewiczEstimate& ls);
nlohmann::json to_json(const DecayFit& fit);
nlohmann::json to_json(const OdeBoundCheck& check);
nlohmann::json to_json(const Theorem1Report& rep);

// Aligned "key : value" lines.
std::string report_text(const Theorem1Report& rep);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace dampwave

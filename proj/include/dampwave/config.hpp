#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dampwave/analysis.hpp"
#include "dampwave/dynamics.hpp"
#include "dampwave/galerkin.hpp"

namespace dampwave {

enum class RunMode { Pde, Galerkin };

// One run, read from a sectioned INI file:
//   [run] [mesh] [damping] [nonlinearity] [velocity_damping] [initial]
//   [integrator] [analysis] [galerkin] [output]
struct RunConfiguration {
  std::string name = "custom";
  RunMode mode = RunMode::Pde;
  std::uint64_t seed = 1;
  std::string output_dir;

  int dimension = 1;
  double lx = 3.141592653589793, ly = 0.0;
  int nx = 201, ny = 1;
  std::string boundary = "dirichlet";

  std::string damping = "constant:1";
  std::string nonlinearity = "cubic_stable";
  std::string velocity_damping = "identity";

  std::string u0 = "sin:1,1";
  std::string u1 = "zero";

  // dt = dt_factor * min(dx, dy) unless dt is set.
  double dt_factor = 0.5;
  std::optional<double> dt;
  double t_end = 200.0;
  int sample_stride = 10;
  std::optional<double> epsilon;
  double blowup_threshold = 1e6;

  Theorem1Options analysis;
  std::vector<double> radii{1e-1, 1e-2, 1e-3};
  int samples_per_radius = 32;
  std::vector<double> certify_epsilons{0.1, 0.5, 1.0, 2.0};

  std::vector<double> galerkin_a{1, 4, 9, 16};
  std::vector<double> galerkin_b_diag{2, 2, 2, 2};
  std::vector<double> galerkin_b_off{0.5, 0.5, 0.5};
  std::vector<double> galerkin_u0{0.5, 0.25, 0.125, 0.0625};
  std::vector<double> galerkin_v0{0, 0, 0, 0};

  std::vector<double> snapshots;
};

// Throws Error(Config) on unknown sections or keys and malformed values, and
// Error(Io) when the file cannot be read.
RunConfiguration load_config(const std::string& path);
RunConfiguration parse_config(std::istream& is);
void write_config(std::ostream& os, const RunConfiguration& cfg);

Mesh make_mesh(const RunConfiguration& cfg);
double resolved_dt(const RunConfiguration& cfg, const Mesh& mesh);
SimConfig make_sim_config(const RunConfiguration& cfg);

// Initial shapes, summed with '+': zero | const:c | sin:k,amp | bump:center,width,amp |
// tabulated:path.csv. sin is amp sin(k pi x / Lx) (times sin(pi y / Ly) in 2D).
Field initial_field(const std::string& spec, const Mesh& mesh);

GalerkinSystem make_galerkin_system(const RunConfiguration& cfg);
GalerkinConfig make_galerkin_config(const RunConfiguration& cfg);

}  // namespace dampwave

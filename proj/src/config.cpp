#include "dampwave/config.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "dampwave/error.hpp"

namespace dampwave {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"run", {"name", "mode", "seed"}},
      {"mesh", {"dimension", "lx", "ly", "nx", "ny", "boundary"}},
      {"damping", {"profile"}},
      {"nonlinearity", {"name"}},
      {"velocity_damping", {"g"}},
      {"initial", {"u0", "u1"}},
      {"integrator", {"dt", "dt_factor", "t_end", "sample_stride", "epsilon", "blowup_threshold"}},
      {"analysis",
       {"lemma1_threshold", "lemma1_time", "exponential_theta", "rate_tolerance", "t_min_fraction", "radii",
        "samples_per_radius", "certify_epsilons"}},
      {"galerkin", {"a_diag", "b_diag", "b_off", "u0", "v0"}},
      {"output", {"dir", "snapshots"}},
  };
  return s;
}

std::string unquote(std::string s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

double to_double(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::Config, "config: '" + key + "' expects a number, got '" + s + "'");
  }
}

long to_long(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    const long v = std::stol(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::Config, "config: '" + key + "' expects an integer, got '" + s + "'");
  }
}

std::vector<double> to_list(const std::string& key, const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(to_double(key, item));
  }
  return out;
}

std::string join(const std::vector<double>& v) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (std::size_t k = 0; k < v.size(); ++k) os << (k ? "," : "") << v[k];
  return os.str();
}

}  // namespace

RunConfiguration parse_config(std::istream& is) {
  pt::ptree tree;
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorKind::Config, std::string("config: ") + e.what());
  }

  for (const auto& [section, body] : tree) {
    auto it = schema().find(section);
    if (it == schema().end()) throw Error(ErrorKind::Config, "config: unknown section [" + section + "]");
    if (!body.data().empty() && body.empty())
      throw Error(ErrorKind::Config, "config: key '" + section + "' outside a section");
    for (const auto& [key, _] : body)
      if (!it->second.count(key)) throw Error(ErrorKind::Config, "config: unknown key '" + section + "." + key + "'");
  }

  auto get = [&](const std::string& path) -> std::optional<std::string> {
    if (auto v = tree.get_optional<std::string>(path)) return unquote(*v);
    return std::nullopt;
  };

  RunConfiguration c;
  if (auto v = get("run.name")) c.name = *v;
  if (auto v = get("run.mode")) {
    if (*v == "pde")
      c.mode = RunMode::Pde;
    else if (*v == "galerkin")
      c.mode = RunMode::Galerkin;
    else
      throw Error(ErrorKind::Config, "config: run.mode must be pde or galerkin");
  }
  if (auto v = get("run.seed")) c.seed = static_cast<std::uint64_t>(to_long("run.seed", *v));

  if (auto v = get("mesh.dimension")) c.dimension = static_cast<int>(to_long("mesh.dimension", *v));
  if (auto v = get("mesh.lx")) c.lx = to_double("mesh.lx", *v);
  if (auto v = get("mesh.ly")) c.ly = to_double("mesh.ly", *v);
  if (auto v = get("mesh.nx")) c.nx = static_cast<int>(to_long("mesh.nx", *v));
  if (auto v = get("mesh.ny")) c.ny = static_cast<int>(to_long("mesh.ny", *v));
  if (auto v = get("mesh.boundary")) c.boundary = *v;
  if (c.dimension == 2 && !get("mesh.ny")) c.ny = c.nx;
  if (c.dimension == 2 && !get("mesh.ly")) c.ly = c.lx;

  if (auto v = get("damping.profile")) c.damping = *v;
  if (auto v = get("nonlinearity.name")) c.nonlinearity = *v;
  if (auto v = get("velocity_damping.g")) c.velocity_damping = *v;
  if (auto v = get("initial.u0")) c.u0 = *v;
  if (auto v = get("initial.u1")) c.u1 = *v;

  if (auto v = get("integrator.dt")) c.dt = to_double("integrator.dt", *v);
  if (auto v = get("integrator.dt_factor")) c.dt_factor = to_double("integrator.dt_factor", *v);
  if (auto v = get("integrator.t_end")) c.t_end = to_double("integrator.t_end", *v);
  if (auto v = get("integrator.sample_stride"))
    c.sample_stride = static_cast<int>(to_long("integrator.sample_stride", *v));
  if (auto v = get("integrator.epsilon")) c.epsilon = to_double("integrator.epsilon", *v);
  if (auto v = get("integrator.blowup_threshold"))
    c.blowup_threshold = to_double("integrator.blowup_threshold", *v);

  if (auto v = get("analysis.lemma1_threshold"))
    c.analysis.lemma1_threshold = to_double("analysis.lemma1_threshold", *v);
  if (auto v = get("analysis.lemma1_time")) c.analysis.lemma1_time = to_double("analysis.lemma1_time", *v);
  if (auto v = get("analysis.exponential_theta"))
    c.analysis.exponential_theta = to_double("analysis.exponential_theta", *v);
  if (auto v = get("analysis.rate_tolerance"))
    c.analysis.rate_tolerance = to_double("analysis.rate_tolerance", *v);
  if (auto v = get("analysis.t_min_fraction"))
    c.analysis.t_min_fraction = to_double("analysis.t_min_fraction", *v);
  if (auto v = get("analysis.radii")) c.radii = to_list("analysis.radii", *v);
  if (auto v = get("analysis.samples_per_radius"))
    c.samples_per_radius = static_cast<int>(to_long("analysis.samples_per_radius", *v));
  if (auto v = get("analysis.certify_epsilons")) c.certify_epsilons = to_list("analysis.certify_epsilons", *v);

  if (auto v = get("galerkin.a_diag")) c.galerkin_a = to_list("galerkin.a_diag", *v);
  if (auto v = get("galerkin.b_diag")) c.galerkin_b_diag = to_list("galerkin.b_diag", *v);
  if (auto v = get("galerkin.b_off")) c.galerkin_b_off = to_list("galerkin.b_off", *v);
  if (auto v = get("galerkin.u0")) c.galerkin_u0 = to_list("galerkin.u0", *v);
  if (auto v = get("galerkin.v0")) c.galerkin_v0 = to_list("galerkin.v0", *v);

  if (auto v = get("output.dir")) c.output_dir = *v;
  if (auto v = get("output.snapshots")) c.snapshots = to_list("output.snapshots", *v);

  if (!(c.t_end > 0.0)) throw Error(ErrorKind::Config, "config: integrator.t_end must be positive");
  if (c.sample_stride < 1) throw Error(ErrorKind::Config, "config: integrator.sample_stride must be >= 1");
  if (c.dt && !(*c.dt > 0.0)) throw Error(ErrorKind::Config, "config: integrator.dt must be positive");
  if (!(c.dt_factor > 0.0)) throw Error(ErrorKind::Config, "config: integrator.dt_factor must be positive");
  if (c.samples_per_radius < 1) throw Error(ErrorKind::Config, "config: analysis.samples_per_radius must be >= 1");
  try {
    parse_boundary_kind(c.boundary);
    parse_profile(c.damping);
    builtin(c.nonlinearity);
    parse_velocity_damping(c.velocity_damping);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Io) throw;
    throw Error(ErrorKind::Config, std::string("config: ") + e.what());
  }
  return c;
}

RunConfiguration load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read config '" + path + "'");
  return parse_config(in);
}

void write_config(std::ostream& os, const RunConfiguration& c) {
  os << std::setprecision(17);
  os << "; schema_version = 1\n";
  os << "[run]\nname = " << c.name << "\nmode = " << (c.mode == RunMode::Pde ? "pde" : "galerkin")
     << "\nseed = " << c.seed << "\n\n";
  os << "[mesh]\ndimension = " << c.dimension << "\nlx = " << c.lx << "\nly = " << c.ly << "\nnx = " << c.nx
     << "\nny = " << c.ny << "\nboundary = " << c.boundary << "\n\n";
  os << "[damping]\nprofile = " << c.damping << "\n\n";
  os << "[nonlinearity]\nname = " << c.nonlinearity << "\n\n";
  os << "[velocity_damping]\ng = " << c.velocity_damping << "\n\n";
  os << "[initial]\nu0 = " << c.u0 << "\nu1 = " << c.u1 << "\n\n";
  os << "[integrator]\n";
  if (c.dt) os << "dt = " << *c.dt << "\n";
  os << "dt_factor = " << c.dt_factor << "\nt_end = " << c.t_end << "\nsample_stride = " << c.sample_stride
     << "\n";
  if (c.epsilon) os << "epsilon = " << *c.epsilon << "\n";
  os << "blowup_threshold = " << c.blowup_threshold << "\n\n";
  os << "[analysis]\nlemma1_threshold = " << c.analysis.lemma1_threshold
     << "\nlemma1_time = " << c.analysis.lemma1_time << "\nexponential_theta = " << c.analysis.exponential_theta
     << "\nrate_tolerance = " << c.analysis.rate_tolerance << "\nt_min_fraction = " << c.analysis.t_min_fraction
     << "\nradii = " << join(c.radii) << "\nsamples_per_radius = " << c.samples_per_radius
     << "\ncertify_epsilons = " << join(c.certify_epsilons) << "\n\n";
  os << "[galerkin]\na_diag = " << join(c.galerkin_a) << "\nb_diag = " << join(c.galerkin_b_diag)
     << "\nb_off = " << join(c.galerkin_b_off) << "\nu0 = " << join(c.galerkin_u0) << "\nv0 = " << join(c.galerkin_v0)
     << "\n\n";
  os << "[output]\n";
  if (!c.output_dir.empty()) os << "dir = " << c.output_dir << "\n";
  if (!c.snapshots.empty()) os << "snapshots = " << join(c.snapshots) << "\n";
}

Mesh make_mesh(const RunConfiguration& c) {
  try {
    return build_mesh(c.dimension, {c.lx, c.ly}, {c.nx, c.dimension == 2 ? c.ny : 1},
                      BoundarySpec{parse_boundary_kind(c.boundary)});
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::UnknownName) throw Error(ErrorKind::Config, e.what());
    throw;
  }
}

double resolved_dt(const RunConfiguration& c, const Mesh& mesh) {
  if (c.dt) return *c.dt;
  const double h = mesh.dimension() == 2 ? std::min(mesh.dx(), mesh.dy()) : mesh.dx();
  return c.dt_factor * h;
}

Field initial_field(const std::string& spec, const Mesh& mesh) {
  Field total = zeros(mesh);
  std::stringstream ss(spec);
  std::string term;
  while (std::getline(ss, term, '+')) {
    term.erase(0, term.find_first_not_of(" \t"));
    term.erase(term.find_last_not_of(" \t") + 1);
    const auto colon = term.find(':');
    const std::string kind = term.substr(0, colon);
    const std::string args = colon == std::string::npos ? "" : term.substr(colon + 1);
    Field f = zeros(mesh);
    if (kind == "zero") {
    } else if (kind == "const") {
      const auto p = to_list("initial", args);
      if (p.size() != 1) throw Error(ErrorKind::Config, "initial: const:c");
      f = sample(mesh, [&](double, double) { return p[0]; });
    } else if (kind == "sin") {
      auto p = to_list("initial", args);
      if (p.empty()) p = {1.0, 1.0};
      if (p.size() != 2) throw Error(ErrorKind::Config, "initial: sin:k,amp");
      const double kx = p[0] * M_PI / mesh.lx();
      f = sample(mesh, [&](double x, double y) {
        const double sy = mesh.dimension() == 2 ? std::sin(M_PI * y / mesh.ly()) : 1.0;
        return p[1] * std::sin(kx * x) * sy;
      });
    } else if (kind == "bump") {
      const auto p = to_list("initial", args);
      if (p.size() != 3 || !(p[1] > 0)) throw Error(ErrorKind::Config, "initial: bump:center,width,amp");
      f = sample(mesh, [&](double x, double) {
        const double r = (x - p[0]) / p[1];
        return std::abs(r) < 1.0 ? p[2] * std::pow(1.0 - r * r, 3) : 0.0;
      });
    } else if (kind == "tabulated") {
      std::ifstream in(args);
      if (!in) throw Error(ErrorKind::Io, "cannot read initial field '" + args + "'");
      f = read_field_csv(in, mesh);
    } else {
      throw Error(ErrorKind::Config, "initial: unknown shape '" + kind + "'");
    }
    for (std::size_t k = 0; k < total.size(); ++k) total[k] += f[k];
  }
  return total;
}

SimConfig make_sim_config(const RunConfiguration& c) {
  Mesh mesh = make_mesh(c);
  DampingProfile damping = DampingProfile::constant(0.0);
  Nonlinearity nl;
  VelocityDamping g;
  try {
    damping = parse_profile(c.damping);
    nl = builtin(c.nonlinearity);
    g = parse_velocity_damping(c.velocity_damping);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::UnknownName || e.kind() == ErrorKind::InvalidArgument)
      throw Error(ErrorKind::Config, e.what());
    throw;
  }
  SimConfig s(mesh, damping, nl);
  if (!g.linear) s.velocity_damping = g;
  s.dt = resolved_dt(c, s.mesh);
  s.t_end = c.t_end;
  s.sample_stride = c.sample_stride;
  s.epsilon = c.epsilon;
  s.blowup_threshold = c.blowup_threshold;
  s.u0 = initial_field(c.u0, s.mesh);
  s.u1 = initial_field(c.u1, s.mesh);
  return s;
}

GalerkinSystem make_galerkin_system(const RunConfiguration& c) {
  const auto n = static_cast<Eigen::Index>(c.galerkin_a.size());
  if (n == 0 || static_cast<Eigen::Index>(c.galerkin_b_diag.size()) != n ||
      (!c.galerkin_b_off.empty() && static_cast<Eigen::Index>(c.galerkin_b_off.size()) != n - 1))
    throw Error(ErrorKind::Config, "galerkin: a_diag, b_diag and b_off sizes disagree");
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n), B = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    A(k, k) = c.galerkin_a[k];
    B(k, k) = c.galerkin_b_diag[k];
    if (k + 1 < n && !c.galerkin_b_off.empty()) B(k, k + 1) = B(k + 1, k) = c.galerkin_b_off[k];
  }
  Nonlinearity nl;
  try {
    nl = builtin(c.nonlinearity);
  } catch (const Error& e) {
    throw Error(ErrorKind::Config, e.what());
  }
  GalerkinForce force = nl.is_zero ? GalerkinForce::zero(static_cast<int>(n)) : GalerkinForce::componentwise(nl);
  return GalerkinSystem(A, B, force);
}

GalerkinConfig make_galerkin_config(const RunConfiguration& c) {
  GalerkinConfig g;
  try {
    g.damping = parse_profile(c.damping);
  } catch (const Error& e) {
    throw Error(ErrorKind::Config, e.what());
  }
  g.dt = c.dt.value_or(1e-3);
  g.t_end = c.t_end;
  g.sample_stride = c.sample_stride;
  g.blowup_threshold = c.blowup_threshold;
  const auto n = c.galerkin_a.size();
  if (c.galerkin_u0.size() != n || c.galerkin_v0.size() != n)
    throw Error(ErrorKind::Config, "galerkin: u0 and v0 must match a_diag in size");
  g.u0 = Eigen::Map<const Eigen::VectorXd>(c.galerkin_u0.data(), static_cast<Eigen::Index>(n));
  g.v0 = Eigen::Map<const Eigen::VectorXd>(c.galerkin_v0.data(), static_cast<Eigen::Index>(n));
  return g;
}

}  // namespace dampwave

#include "dampwave/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "dampwave/error.hpp"

namespace dampwave {

namespace {

using nlohmann::json;

std::string g17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void row(std::ostream& os, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) os << ',';
    os << g17(v);
    first = false;
  }
  os << '\n';
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json finite(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "# schema_version=" << kSchemaVersion << '\n';
  os << "t,kinetic,potential,boundary,forcing,E,e,H,residual,grad_v,v_l2,u_linf\n";
  for (const auto& s : traj.samples) {
    const auto& e = s.energy;
    row(os, {e.t, e.kinetic, e.potential, e.boundary, e.forcing, e.E, e.e, e.H, e.residual, e.grad_v, s.v_l2,
             s.u_linf});
  }
}

void write_galerkin_csv(std::ostream& os, const GalerkinTrajectory& traj) {
  os << "# schema_version=" << kSchemaVersion << '\n';
  os << "t,kinetic,potential,forcing,E,dissipation,residual,v_norm,u_norm\n";
  for (const auto& s : traj.samples)
    row(os, {s.t, s.kinetic, s.potential, s.forcing, s.E, s.dissipation, s.residual, s.v.norm(), s.u.norm()});
}

std::vector<double> Table::column(const std::string& name) const {
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c] != name) continue;
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[c]);
    return out;
  }
  throw Error(ErrorKind::InvalidArgument, "no column '" + name + "'");
}

Table read_table(std::istream& is) {
  Table t;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string cell;
    if (t.columns.empty()) {
      while (std::getline(ss, cell, ',')) t.columns.push_back(cell);
      continue;
    }
    std::vector<double> r;
    while (std::getline(ss, cell, ',')) {
      try {
        r.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw Error(ErrorKind::Io, "malformed CSV value '" + cell + "'");
      }
    }
    if (r.size() != t.columns.size()) throw Error(ErrorKind::Io, "CSV row width differs from header");
    t.rows.push_back(std::move(r));
  }
  if (t.columns.empty()) throw Error(ErrorKind::Io, "CSV has no header");
  return t;
}

json summary_json(const Trajectory& traj, double wall_seconds) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["steps"] = traj.steps;
  j["dt"] = traj.dt;
  j["epsilon"] = traj.epsilon;
  j["blown_up"] = traj.blown_up;
  j["blowup_time"] = opt(traj.blowup_time);
  j["wall_clock_seconds"] = wall_seconds;
  if (!traj.samples.empty()) {
    const auto& s = traj.samples.back();
    j["final"] = {{"t", s.energy.t},       {"v_l2", finite(s.v_l2)},  {"u_linf", finite(s.u_linf)},
                  {"E", finite(s.energy.E)}, {"H", finite(s.energy.H)}, {"residual", finite(s.energy.residual)}};
  }
  return j;
}

json summary_json(const GalerkinTrajectory& traj, double wall_seconds) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["dt"] = traj.dt;
  j["blown_up"] = traj.blown_up;
  j["blowup_time"] = opt(traj.blowup_time);
  j["wall_clock_seconds"] = wall_seconds;
  if (!traj.samples.empty()) {
    const auto& s = traj.samples.back();
    j["final"] = {{"t", s.t},
                  {"v_norm", finite(s.v.norm())},
                  {"u_norm", finite(s.u.norm())},
                  {"E", finite(s.E)},
                  {"residual", finite(s.residual)}};
  }
  return j;
}

json to_json(const CertificateReport& r) {
  json windows = json::array();
  for (const auto& w : r.windows)
    windows.push_back({{"epsilon", w.epsilon},
                       {"delta", w.delta},
                       {"witness_t", w.witness_t},
                       {"head_inf", w.head_inf},
                       {"tail_inf", w.tail_inf}});
  return {{"verdict", to_string(r.verdict)},
          {"epsilon", r.epsilon},
          {"delta", r.delta},
          {"witness_window", {r.witness_t, r.witness_t + r.epsilon}},
          {"horizon", r.horizon},
          {"analytic", r.analytic},
          {"note", r.note},
          {"windows", windows}};
}

json to_json(const Equilibrium& eq, const Mesh& mesh, const std::string& nonlinearity) {
  return {{"schema_version", kSchemaVersion},
          {"residual", eq.residual},
          {"boundary_residual", eq.boundary_residual},
          {"iterations", eq.iterations},
          {"converged", eq.converged},
          {"boundary", to_string(mesh.face(Face::Left))},
          {"nonlinearity", nonlinearity},
          {"h1_norm", h1_norm(eq.phi.values, mesh)}};
}

json to_json(const LojasiewiczEstimate& ls) {
  json samples = json::array();
  for (const auto& s : ls.samples)
    samples.push_back({{"radius", s.radius}, {"energy_gap", s.energy_gap}, {"residual", s.residual}});
  return {{"theta", ls.theta}, {"delta", ls.delta}, {"slope", ls.slope},   {"intercept", ls.intercept},
          {"r2", ls.r2},       {"clamped", ls.clamped}, {"note", ls.note}, {"samples", samples}};
}

json to_json(const DecayFit& f) {
  return {{"class", to_string(f.cls)},
          {"rate", f.rate},
          {"prefactor", f.prefactor},
          {"window", {f.t_a, f.t_b}},
          {"exponential", {{"rate", f.exp_rate}, {"rms", f.exp_rms}}},
          {"polynomial", {{"rate", f.poly_rate}, {"rms", f.poly_rms}}},
          {"score_gap", f.score_gap},
          {"enveloped", f.enveloped},
          {"period", f.period}};
}

json to_json(const OdeBoundCheck& c) {
  return {{"schema_version", kSchemaVersion},
          {"alpha", c.alpha},
          {"C", c.C},
          {"beta", c.beta},
          {"C_prime", c.C_prime},
          {"slack_violations", c.slack_violations},
          {"bound_violations", c.bound_violations},
          {"valid", c.valid()}};
}

json to_json(const Theorem1Report& rep) {
  const auto& h = rep.hypotheses;
  json j;
  j["schema_version"] = kSchemaVersion;
  j["hypotheses"] = {{"damping_certificate", to_string(h.certificate)},
                     {"damping_structure", to_string(h.structure)},
                     {"damping_ok", h.damping_ok()},
                     {"sign_condition", to_string(h.sign)},
                     {"sign_beta", h.sign_beta},
                     {"suprema", {{"f", h.suprema.f}, {"df", h.suprema.df}, {"d2f", h.suprema.d2f}}},
                     {"blown_up", h.blown_up},
                     {"blowup_time", opt(h.blowup_time)},
                     {"hold", h.hold()}};
  j["theta"] = opt(rep.theta);
  j["predicted"] = {{"class", to_string(rep.predicted)}, {"rate", opt(rep.predicted_rate)}};
  j["measured"] = rep.measured ? to_json(*rep.measured) : json(nullptr);
  j["converged"] = rep.converged;
  j["agreement"] = rep.agreement;
  j["lemma1"] = {{"pass", rep.lemma1.pass},
                 {"reached", rep.lemma1.reached},
                 {"value", finite(rep.lemma1.value)},
                 {"tail_max", finite(rep.lemma1.tail_max)}};
  j["verdict"] = rep.verdict;
  j["notes"] = rep.notes;
  return j;
}

std::string report_text(const Theorem1Report& rep) {
  const auto& h = rep.hypotheses;
  std::vector<std::pair<std::string, std::string>> lines;
  auto num = [](double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
  };
  lines.push_back({"damping certificate", to_string(h.certificate)});
  lines.push_back({"damping structure", to_string(h.structure)});
  lines.push_back({"sign condition", std::string(to_string(h.sign)) + " on [-" + num(h.sign_beta) + ", " +
                                         num(h.sign_beta) + "]"});
  lines.push_back({"sup |f|, |f'|, |f''|", num(h.suprema.f) + ", " + num(h.suprema.df) + ", " + num(h.suprema.d2f)});
  lines.push_back({"hypotheses hold", h.hold() ? "yes" : "no"});
  if (h.blown_up) lines.push_back({"blow-up time", h.blowup_time ? num(*h.blowup_time) : "?"});
  lines.push_back({"theta estimate", rep.theta ? num(*rep.theta) : "-"});
  lines.push_back({"predicted decay", std::string(to_string(rep.predicted)) +
                                          (rep.predicted_rate ? " rate " + num(*rep.predicted_rate) : "")});
  if (rep.measured)
    lines.push_back({"measured decay", std::string(to_string(rep.measured->cls)) + " rate " +
                                           num(rep.measured->rate) + " on [" + num(rep.measured->t_a) + ", " +
                                           num(rep.measured->t_b) + "]"});
  lines.push_back({"converged", rep.converged ? "yes" : "no"});
  lines.push_back({"agreement", rep.agreement ? "yes" : "no"});
  lines.push_back({"velocity decay", std::string(rep.lemma1.pass ? "pass" : "fail") + " (|v| = " +
                                         num(rep.lemma1.value) + ")"});
  lines.push_back({"verdict", rep.verdict});
  for (const auto& n : rep.notes) lines.push_back({"note", n});

  std::size_t width = 0;
  for (const auto& [k, _] : lines) width = std::max(width, k.size());
  std::ostringstream os;
  for (const auto& [k, v] : lines) os << std::left << std::setw(static_cast<int>(width)) << k << " : " << v << '\n';
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
  out << content;
}

}  // namespace dampwave

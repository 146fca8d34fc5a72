#include "dampwave/damping.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "dampwave/error.hpp"

namespace dampwave {

namespace {

std::string fmt_num(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

std::vector<double> parse_numbers(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidArgument, "bad number '" + item + "' in '" + text + "'");
    }
  }
  return out;
}

// Least-squares slope of y against x.
double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
  }
  return sxx > 0 ? sxy / sxx : 0.0;
}

}  // namespace

const char* to_string(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::Constant: return "constant";
    case ProfileKind::PowerLaw: return "power_law";
    case ProfileKind::OnOff: return "on_off";
    case ProfileKind::Tabulated: return "tabulated";
    case ProfileKind::Expression: return "expression";
  }
  return "?";
}

DampingProfile DampingProfile::constant(double h0) {
  if (!std::isfinite(h0)) throw Error(ErrorKind::InvalidArgument, "constant damping must be finite");
  DampingProfile p;
  p.kind_ = ProfileKind::Constant;
  p.h0_ = h0;
  p.nonnegative_ = h0 >= 0.0;
  p.spec_ = "constant:" + fmt_num(h0);
  return p;
}

DampingProfile DampingProfile::power_law(double h0, double alpha) {
  if (!(h0 > 0.0) || !std::isfinite(alpha))
    throw Error(ErrorKind::InvalidArgument, "power_law needs h0 > 0 and finite alpha");
  DampingProfile p;
  p.kind_ = ProfileKind::PowerLaw;
  p.h0_ = h0;
  p.alpha_ = alpha;
  p.spec_ = "power_law:" + fmt_num(h0) + "," + fmt_num(alpha);
  return p;
}

DampingProfile DampingProfile::on_off(std::vector<OnOffSegment> cell, bool junction_zero) {
  if (cell.empty()) throw Error(ErrorKind::InvalidArgument, "on_off cell is empty");
  DampingProfile p;
  p.kind_ = ProfileKind::OnOff;
  p.junction_zero_ = junction_zero;
  double period = 0.0;
  for (auto& seg : cell) {
    if (!(seg.duration > 0.0))
      throw Error(ErrorKind::InvalidArgument, "on_off segment durations must be positive");
    if (seg.active) {
      if (!(seg.m > 0.0) || !(seg.m <= seg.M) || !std::isfinite(seg.M))
        throw Error(ErrorKind::InvalidArgument, "on_off active segment needs 0 < m <= M < inf");
      if (seg.value) {
        constexpr int kChecks = 64;
        for (int k = 0; k < kChecks; ++k) {
          const double tau = seg.duration * (k + 0.5) / kChecks;
          const double v = seg.value(tau);
          if (v < seg.m - 1e-12 || v > seg.M + 1e-12)
            throw Error(ErrorKind::InvalidArgument, "on_off segment value leaves [m, M]");
        }
      }
    }
    period += seg.duration;
  }
  p.period_ = period;
  p.cell_ = std::move(cell);
  std::ostringstream os;
  os << "on_off[";
  for (std::size_t k = 0; k < p.cell_.size(); ++k) {
    const auto& s = p.cell_[k];
    os << (k ? ";" : "") << fmt_num(s.duration) << (s.active ? ":" + fmt_num(s.m) : ":off");
  }
  os << "]" << (junction_zero ? "/jz" : "");
  p.spec_ = os.str();
  return p;
}

DampingProfile DampingProfile::unit_on_off(double on, double off, double level) {
  std::vector<OnOffSegment> cell;
  cell.push_back(OnOffSegment{on, true, level, level, {}});
  if (off > 0.0) cell.push_back(OnOffSegment{off, false, 0.0, 0.0, {}});
  auto p = on_off(std::move(cell), off > 0.0);
  p.spec_ = "onoff:" + fmt_num(on) + "," + fmt_num(off) + (level != 1.0 ? "," + fmt_num(level) : "");
  return p;
}

DampingProfile DampingProfile::tabulated(std::vector<double> times, std::vector<double> values) {
  if (times.empty() || times.size() != values.size())
    throw Error(ErrorKind::InvalidArgument, "tabulated profile needs matching non-empty columns");
  for (std::size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1]))
      throw Error(ErrorKind::InvalidArgument, "tabulated times must be strictly increasing");
  DampingProfile p;
  p.kind_ = ProfileKind::Tabulated;
  p.nonnegative_ = std::all_of(values.begin(), values.end(), [](double v) { return v >= 0.0; });
  p.times_ = std::move(times);
  p.values_ = std::move(values);
  p.spec_ = "tabulated";
  return p;
}

DampingProfile DampingProfile::expression(std::string name, std::function<double(double)> fn,
                                          bool nonnegative) {
  if (!fn) throw Error(ErrorKind::InvalidArgument, "expression profile needs an evaluator");
  DampingProfile p;
  p.kind_ = ProfileKind::Expression;
  p.fn_ = std::move(fn);
  p.nonnegative_ = nonnegative;
  p.spec_ = std::move(name);
  return p;
}

double DampingProfile::operator()(double t) const {
  switch (kind_) {
    case ProfileKind::Constant: return h0_;
    case ProfileKind::PowerLaw: return h0_ * std::pow(1.0 + t, -alpha_);
    case ProfileKind::OnOff: {
      const double tau = std::fmod(t, period_);
      double start = 0.0;
      for (const auto& seg : cell_) {
        const double end = start + seg.duration;
        if (tau < end) {
          if (junction_zero_ && tau == start && t > 0.0) return 0.0;
          if (!seg.active) return 0.0;
          return seg.value ? seg.value(tau - start) : seg.m;
        }
        start = end;
      }
      return cell_.back().active ? cell_.back().m : 0.0;  // tau rounding onto the period end
    }
    case ProfileKind::Tabulated: {
      if (t <= times_.front()) return values_.front();
      if (t >= times_.back()) return values_.back();
      const auto it = std::upper_bound(times_.begin(), times_.end(), t);
      const std::size_t k = static_cast<std::size_t>(it - times_.begin());
      const double w = (t - times_[k - 1]) / (times_[k] - times_[k - 1]);
      return (1.0 - w) * values_[k - 1] + w * values_[k];
    }
    case ProfileKind::Expression: return fn_(t);
  }
  return 0.0;
}

std::vector<DampingInterval> DampingProfile::intervals(double horizon) const {
  std::vector<DampingInterval> out;
  if (kind_ != ProfileKind::OnOff) return out;
  double start = 0.0;
  while (start < horizon) {
    for (const auto& seg : cell_) {
      out.push_back(DampingInterval{start, start + seg.duration, seg.active ? seg.m : 0.0,
                                    seg.active ? seg.M : 0.0, seg.active});
      start += seg.duration;
      if (start >= horizon) break;
    }
  }
  return out;
}

std::optional<double> DampingProfile::exact_window_mass(double t, double eps) const {
  if (kind_ == ProfileKind::Constant) return h0_ * eps;
  if (kind_ == ProfileKind::PowerLaw) {
    const double a = 1.0 + t, b = 1.0 + t + eps;
    if (alpha_ == 1.0) return h0_ * std::log(b / a);
    return h0_ * (std::pow(a, 1.0 - alpha_) - std::pow(b, 1.0 - alpha_)) / (alpha_ - 1.0);
  }
  return std::nullopt;
}

double evaluate(const DampingProfile& profile, double t) {
  if (t < 0.0) throw Error(ErrorKind::NegativeTime, "damping evaluated at negative time");
  return profile(t);
}

DampingProfile parse_profile(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  auto nums = [&](std::size_t lo, std::size_t hi) {
    auto v = rest.empty() ? std::vector<double>{} : parse_numbers(rest);
    if (v.size() < lo || v.size() > hi)
      throw Error(ErrorKind::InvalidArgument, "wrong parameter count in profile '" + spec + "'");
    return v;
  };
  if (kind == "constant") return DampingProfile::constant(nums(1, 1)[0]);
  if (kind == "power_law") {
    auto v = nums(2, 2);
    return DampingProfile::power_law(v[0], v[1]);
  }
  if (kind == "onoff") {
    auto v = nums(2, 3);
    return DampingProfile::unit_on_off(v[0], v[1], v.size() == 3 ? v[2] : 1.0);
  }
  if (kind == "abs_sin") {
    auto v = rest.empty() ? std::vector<double>{1.0, 1.0} : nums(2, 2);
    const double a = v[0], w = v[1];
    if (!(a >= 0.0)) throw Error(ErrorKind::InvalidArgument, "abs_sin amplitude must be >= 0");
    return DampingProfile::expression(spec, [a, w](double t) { return a * std::abs(std::sin(w * t)); });
  }
  if (kind == "exp") {
    auto v = nums(2, 2);
    const double a = v[0], r = v[1];
    return DampingProfile::expression(spec, [a, r](double t) { return a * std::exp(r * t); }, a >= 0.0);
  }
  if (kind == "tabulated") {
    std::ifstream in(rest);
    if (!in) throw Error(ErrorKind::Io, "cannot open tabulated damping file '" + rest + "'");
    std::vector<double> ts, hs;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      const auto comma = line.find(',');
      if (comma == std::string::npos) continue;
      try {
        ts.push_back(std::stod(line.substr(0, comma)));
        hs.push_back(std::stod(line.substr(comma + 1)));
      } catch (const std::exception&) {
        if (ts.empty()) continue;  // header row
        throw Error(ErrorKind::Io, "malformed row in '" + rest + "': " + line);
      }
    }
    auto p = DampingProfile::tabulated(std::move(ts), std::move(hs));
    return p;
  }
  throw Error(ErrorKind::UnknownName, "unknown damping profile '" + spec + "'");
}

double window_integral(const DampingProfile& profile, double t, double eps, int n_sub) {
  // eps * mean keeps constant integrands exact.
  double sum = 0.5 * (profile(t) + profile(t + eps));
  for (int k = 1; k < n_sub; ++k) sum += profile(t + eps * k / n_sub);
  return eps * (sum / n_sub);
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::CertifiedUpToHorizon: return "certified-up-to-horizon";
    case Verdict::Refuted: return "refuted";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

double CertificateReport::min_window_mean() const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& w : windows) best = std::min(best, w.delta / w.epsilon);
  return windows.empty() ? 0.0 : best;
}

CertificateReport certify_integrally_positive(const DampingProfile& profile,
                                              const CertifyOptions& options) {
  if (options.epsilons.empty())
    throw Error(ErrorKind::EmptyEpsilons, "certification needs at least one window length");
  if (!(options.scan_step > 0.0) || !(options.horizon > 0.0))
    throw Error(ErrorKind::InvalidArgument, "scan step and horizon must be positive");

  CertificateReport rep;
  rep.horizon = options.horizon;
  bool scan_refuted = false;
  bool decaying = false;
  const WindowBound* refuting = nullptr;

  for (double eps : options.epsilons) {
    if (!(eps > 0.0)) throw Error(ErrorKind::InvalidArgument, "window lengths must be positive");
    if (eps >= options.horizon)
      throw Error(ErrorKind::InvalidArgument, "window length must be shorter than the horizon");
    const int n_sub = std::max(10, static_cast<int>(std::ceil(eps / options.scan_step - 1e-9)));
    const double t_last = options.horizon - eps;
    const long n_windows = static_cast<long>(std::floor(t_last / options.scan_step + 1e-9));
    WindowBound wb;
    wb.epsilon = eps;
    wb.delta = wb.head_inf = wb.tail_inf = std::numeric_limits<double>::infinity();
    for (long k = 0; k <= n_windows; ++k) {
      const double t = k * options.scan_step;
      const double mass = window_integral(profile, t, eps, n_sub);
      if (mass < wb.delta) {
        wb.delta = mass;
        wb.witness_t = t;
      }
      if (t < 0.5 * options.horizon) wb.head_inf = std::min(wb.head_inf, mass);
      if (t >= 0.75 * t_last) wb.tail_inf = std::min(wb.tail_inf, mass);
    }
    if (wb.tail_inf < 0.5 * wb.head_inf) decaying = true;
    rep.windows.push_back(wb);
  }

  const auto worst = std::min_element(rep.windows.begin(), rep.windows.end(),
                                      [](const WindowBound& a, const WindowBound& b) {
                                        return a.delta < b.delta;
                                      });
  for (const auto& wb : rep.windows)
    if (wb.delta < options.tolerance) {
      scan_refuted = true;
      refuting = &wb;
      break;
    }
  const WindowBound& pick = refuting ? *refuting : *worst;
  rep.epsilon = pick.epsilon;
  rep.delta = pick.delta;
  rep.witness_t = pick.witness_t;

  if (scan_refuted) {
    rep.verdict = Verdict::Refuted;
    rep.note = "window of vanishing damping mass found by the scan";
  } else if (profile.kind() == ProfileKind::PowerLaw && profile.alpha() > 0.0) {
    rep.verdict = Verdict::Refuted;
    rep.analytic = true;
    rep.note = "power-law window mass h0 int_t^{t+eps} (1+s)^-alpha ds tends to 0 as t -> inf";
  } else if (worst->delta >= options.delta_min && !decaying) {
    rep.verdict = Verdict::CertifiedUpToHorizon;
    rep.note = "every scanned window carries mass >= delta up to the horizon";
  } else {
    rep.verdict = Verdict::Inconclusive;
    rep.note = decaying ? "window masses decay toward the horizon" : "window mass below delta_min";
  }
  return rep;
}

const char* to_string(Structure s) {
  switch (s) {
    case Structure::PositiveNegative: return "positive-negative";
    case Structure::OnOff: return "on-off";
    case Structure::Neither: return "neither";
    case Structure::Unknown: return "unknown";
  }
  return "?";
}

Structure classify_structure(const DampingProfile& profile) {
  switch (profile.kind()) {
    case ProfileKind::Constant: return profile.h0() > 0.0 ? Structure::PositiveNegative : Structure::Neither;
    case ProfileKind::OnOff: {
      bool gaps = false;
      for (const auto& seg : profile.cell()) {
        if (!seg.active) {
          gaps = true;
          continue;
        }
        if (!(seg.m > 0.0)) return Structure::Neither;
      }
      if (gaps || profile.junction_zero()) return Structure::OnOff;
      return Structure::PositiveNegative;
    }
    default: return Structure::Unknown;
  }
}

const char* to_string(Criterion11Verdict v) {
  switch (v) {
    case Criterion11Verdict::Diverges: return "diverges";
    case Criterion11Verdict::Converges: return "converges";
    case Criterion11Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

Criterion11Result criterion_11(const DampingProfile& profile, double horizon, double quadrature_step,
                               double margin) {
  if (!(horizon > 0.0) || !(quadrature_step > 0.0))
    throw Error(ErrorKind::InvalidArgument, "criterion_11 needs positive horizon and step");
  const long n = static_cast<long>(std::ceil(horizon / quadrature_step - 1e-9));
  const double dt = horizon / n;

  Criterion11Result res;
  res.t.reserve(n + 1);
  res.integrand.reserve(n + 1);
  res.outer.reserve(n + 1);
  res.t.push_back(0.0);
  res.integrand.push_back(0.0);
  res.outer.push_back(0.0);

  // q(t) = int_0^t e^{H(s) - H(t)} ds, advanced with H linear on each panel
  // so no exponential of H itself is ever formed.
  double q = 0.0, outer = 0.0;
  double h_prev = profile(0.0);
  for (long k = 1; k <= n; ++k) {
    const double t = k * dt;
    const double h_next = profile(t);
    const double dH = 0.5 * dt * (h_prev + h_next);
    const double decay = std::exp(-dH);
    const double panel = dH > 1e-12 ? dt * (-std::expm1(-dH)) / dH : dt * (1.0 - 0.5 * dH);
    const double q_next = decay * q + panel;
    outer += 0.5 * dt * (q + q_next);
    q = q_next;
    h_prev = h_next;
    res.t.push_back(t);
    res.integrand.push_back(q);
    res.outer.push_back(outer);
  }

  std::vector<double> lt, lo, lq;
  for (std::size_t k = 1; k < res.t.size(); ++k) {
    if (res.t[k] < 0.1 * horizon) continue;
    if (res.outer[k] <= 0.0 || res.integrand[k] <= 0.0) continue;
    lt.push_back(std::log(res.t[k]));
    lo.push_back(std::log(res.outer[k]));
    lq.push_back(std::log(res.integrand[k]));
  }
  if (lt.size() >= 2) {
    res.outer_slope = ls_slope(lt, lo);
    res.integrand_slope = ls_slope(lt, lq);
    if (res.outer_slope >= 1.0 - margin)
      res.verdict = Criterion11Verdict::Diverges;
    else if (res.integrand_slope < -1.0 - margin)
      res.verdict = Criterion11Verdict::Converges;
  }
  return res;
}

VelocityDamping VelocityDamping::identity() {
  VelocityDamping g;
  g.name = "identity";
  g.g = [](double s) { return s; };
  g.dg = [](double) { return 1.0; };
  g.m1 = g.m2 = 1.0;
  g.linear = true;
  return g;
}

VelocityDamping VelocityDamping::linear_tanh(double c) {
  if (!(c >= 0.0)) throw Error(ErrorKind::InvalidArgument, "linear_tanh needs c >= 0");
  VelocityDamping g;
  g.name = "linear_tanh:" + fmt_num(c);
  g.g = [c](double s) { return s + c * std::tanh(s); };
  g.dg = [c](double s) {
    const double sech = 1.0 / std::cosh(s);
    return 1.0 + c * sech * sech;
  };
  g.m1 = 1.0;
  g.m2 = 1.0 + c;
  return g;
}

VelocityDamping parse_velocity_damping(const std::string& spec) {
  if (spec == "identity") return VelocityDamping::identity();
  if (spec.rfind("linear_tanh:", 0) == 0) {
    auto v = parse_numbers(spec.substr(12));
    if (v.size() != 1) throw Error(ErrorKind::InvalidArgument, "linear_tanh takes one parameter");
    return VelocityDamping::linear_tanh(v[0]);
  }
  throw Error(ErrorKind::UnknownName, "unknown velocity damping '" + spec + "'");
}

VelocityDampingReport validate_velocity_damping(const VelocityDamping& g, double range, int n_samples,
                                                double tol) {
  if (!(g.m1 > 0.0)) throw Error(ErrorKind::InvalidArgument, "velocity damping needs m1 > 0");
  if (n_samples < 2 || !(range > 0.0))
    throw Error(ErrorKind::InvalidArgument, "validation needs a positive range and >= 2 samples");
  VelocityDampingReport rep;
  rep.n_samples = n_samples;
  rep.g_at_zero = g.g(0.0);
  if (rep.g_at_zero != 0.0) rep.valid = false;
  rep.min_derivative = std::numeric_limits<double>::infinity();
  rep.max_derivative = -std::numeric_limits<double>::infinity();
  double worst_dev = 0.0, worst_sandwich = 0.0;
  for (int k = 0; k < n_samples; ++k) {
    const double s = -range + 2.0 * range * k / (n_samples - 1);
    const double d = g.dg(s);
    rep.min_derivative = std::min(rep.min_derivative, d);
    rep.max_derivative = std::max(rep.max_derivative, d);
    const double dev = std::max(g.m1 - d, d - g.m2);
    if (dev > tol && dev > worst_dev) {
      worst_dev = dev;
      rep.derivative_witness = s;
    }
    const double gs = g.g(s) * s;
    const double scale = tol * std::max(1.0, s * s);
    const double sdev = std::max(g.m1 * s * s - gs, gs - g.m2 * s * s);
    if (sdev > scale && sdev > worst_sandwich) {
      worst_sandwich = sdev;
      rep.sandwich_witness = s;
    }
  }
  if (rep.derivative_witness || rep.sandwich_witness) rep.valid = false;
  return rep;
}

}  // namespace dampwave

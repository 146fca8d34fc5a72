#include "dampwave/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dampwave/error.hpp"

namespace dampwave {

namespace {

struct LineFit {
  double slope = 0.0, intercept = 0.0, rms = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
  }
  LineFit f;
  f.slope = sxx > 0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  double ss = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double r = y[k] - (f.intercept + f.slope * x[k]);
    ss += r * r;
  }
  f.rms = std::sqrt(ss / n);
  return f;
}

// Peaks of a zig-zag in log y with hysteresis `swing`; `turning` counts peaks and troughs.
std::vector<std::size_t> zigzag_peaks(const std::vector<double>& ly, double swing, int& turning) {
  std::vector<std::size_t> peaks;
  turning = 0;
  int dir = 0;
  std::size_t hi = 0, lo = 0;
  for (std::size_t k = 1; k < ly.size(); ++k) {
    if (ly[k] > ly[hi]) hi = k;
    if (ly[k] < ly[lo]) lo = k;
    if (dir >= 0 && ly[k] < ly[hi] - swing) {
      if (dir > 0) {
        peaks.push_back(hi);
        ++turning;
      }
      dir = -1;
      lo = k;
    } else if (dir <= 0 && ly[k] > ly[lo] + swing) {
      if (dir < 0) ++turning;
      dir = 1;
      hi = k;
    }
  }
  return peaks;
}

}  // namespace

OdeBoundCheck lemma3_check(std::span<const double> t, std::span<const double> v, double alpha, double C,
                           double tol) {
  if (t.size() != v.size() || t.size() < 3)
    throw Error(ErrorKind::InvalidArgument, "lemma3_check needs >= 3 matching samples");
  if (!(alpha >= 1.0) || !(C > 0.0)) throw Error(ErrorKind::InvalidArgument, "lemma3_check needs alpha >= 1, C > 0");
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (v[k] < 0.0) throw Error(ErrorKind::NegativeSample, "lemma3_check: negative sample");
    if (k > 0 && !(t[k] > t[k - 1])) throw Error(ErrorKind::InvalidArgument, "samples must be time-sorted");
  }
  OdeBoundCheck out;
  out.alpha = alpha;
  out.C = C;
  if (alpha > 1.0) {
    out.beta = 1.0 / (alpha - 1.0);
    out.C_prime = std::pow(C * (alpha - 1.0), -out.beta);
  }
  const std::size_t n = t.size();
  out.t.assign(t.begin(), t.end());
  out.slack.assign(n, std::numeric_limits<double>::quiet_NaN());
  out.bound.assign(n, 0.0);
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double dv = (v[k + 1] - v[k - 1]) / (t[k + 1] - t[k - 1]);
    const double drive = C * std::pow(v[k], alpha);
    out.slack[k] = dv + drive;
    if (out.slack[k] > tol * (std::abs(dv) + drive) + 1e-14) ++out.slack_violations;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double tau = t[k] - t[0];
    double b;
    if (alpha == 1.0)
      b = v[0] * std::exp(-C * tau);
    else
      b = tau > 0.0 ? out.C_prime * std::pow(tau, -out.beta) : std::numeric_limits<double>::infinity();
    out.bound[k] = b;
    if (v[k] > b * (1.0 + tol) + 1e-15) ++out.bound_violations;
  }
  return out;
}

const char* to_string(DecayClass c) {
  switch (c) {
    case DecayClass::Exponential: return "exponential";
    case DecayClass::Polynomial: return "polynomial";
    case DecayClass::Inconclusive: return "inconclusive";
  }
  return "?";
}

DecayFit fit_decay(std::span<const double> t, std::span<const double> y, double t_min_fraction) {
  if (t.size() != y.size() || t.size() < 2)
    throw Error(ErrorKind::InvalidArgument, "fit_decay needs matching series");
  if (!(t_min_fraction >= 0.0 && t_min_fraction < 1.0))
    throw Error(ErrorKind::InvalidArgument, "t_min fraction must lie in [0, 1)");
  std::vector<double> yc(y.size());
  for (std::size_t k = 0; k < y.size(); ++k) {
    if (!(y[k] >= 0.0)) throw Error(ErrorKind::NonPositiveSample, "fit_decay: negative or NaN sample");
    yc[k] = std::max(y[k], 1e-300);
    if (k > 0 && !(t[k] > t[k - 1])) throw Error(ErrorKind::InvalidArgument, "samples must be time-sorted");
  }

  DecayFit fit;
  fit.t_a = t.front() + t_min_fraction * (t.back() - t.front());
  fit.t_b = t.back();
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < t.size(); ++k)
    if (t[k] >= fit.t_a && t[k] > 0.0) idx.push_back(k);
  if (idx.size() < 20) throw Error(ErrorKind::InvalidArgument, "fit_decay needs >= 20 samples in the fit window");
  fit.t_a = t[idx.front()];

  std::vector<double> ly;
  for (auto k : idx) ly.push_back(std::log(yc[k]));
  int turning = 0;
  const auto peaks = zigzag_peaks(ly, 0.1, turning);
  std::vector<double> env(idx.size());
  for (std::size_t q = 0; q < idx.size(); ++q) env[q] = yc[idx[q]];
  if (turning >= 4 && peaks.size() >= 2) {
    fit.enveloped = true;
    fit.period = (t[idx[peaks.back()]] - t[idx[peaks.front()]]) / static_cast<double>(peaks.size() - 1);
    std::size_t lo = 0;
    for (std::size_t q = 0; q < idx.size(); ++q) {
      const double tq = t[idx[q]];
      while (t[lo] < tq - fit.period) ++lo;
      double m = 0.0;
      for (std::size_t j = lo; j <= idx[q]; ++j) m = std::max(m, yc[j]);
      env[q] = m;
    }
  }

  std::vector<double> xs, logt, lys;
  for (std::size_t q = 0; q < idx.size(); ++q) {
    xs.push_back(t[idx[q]]);
    logt.push_back(std::log(t[idx[q]]));
    lys.push_back(std::log(env[q]));
  }
  const LineFit fe = fit_line(xs, lys);
  const LineFit fp = fit_line(logt, lys);
  fit.exp_rate = -fe.slope;
  fit.exp_rms = fe.rms;
  fit.poly_rate = -fp.slope;
  fit.poly_rms = fp.rms;
  const double worse = std::max(fe.rms, fp.rms);
  const double better = std::min(fe.rms, fp.rms);
  fit.score_gap = worse > 0 ? (worse - better) / worse : 0.0;
  if (fit.score_gap > 0.1) {
    if (fe.rms < fp.rms && fit.exp_rate > 0) {
      fit.cls = DecayClass::Exponential;
      fit.rate = fit.exp_rate;
      fit.prefactor = std::exp(fe.intercept);
    } else if (fp.rms < fe.rms && fit.poly_rate > 0) {
      fit.cls = DecayClass::Polynomial;
      fit.rate = fit.poly_rate;
      fit.prefactor = std::exp(fp.intercept);
    }
  }
  return fit;
}

VelocityDecayCheck velocity_decay_check(std::span<const double> t, std::span<const double> v_norm,
                                        double threshold, double t_check) {
  VelocityDecayCheck out;
  if (t.empty() || t.size() != v_norm.size()) return out;
  const double tol = 1e-9 * std::max(1.0, std::abs(t_check));
  if (t.back() < t_check - tol) {
    out.value = v_norm.back();
    return out;
  }
  out.reached = true;
  std::size_t at = 0;
  for (std::size_t k = 0; k < t.size(); ++k)
    if (std::abs(t[k] - t_check) < std::abs(t[at] - t_check)) at = k;
  out.value = v_norm[at];
  for (std::size_t k = 0; k <= at; ++k)
    if (t[k] >= 0.9 * t_check - tol) out.tail_max = std::max(out.tail_max, v_norm[k]);
  out.pass = out.value <= threshold && out.tail_max <= 2.0 * threshold;
  return out;
}

double modal_decay_rate(double h, double lambda) {
  const double disc = h * h - 4.0 * lambda;
  if (disc < 0.0) return 0.5 * h;
  return 0.5 * (h - std::sqrt(disc));
}

Theorem1Report theorem1_report(const ConvergenceSeries& series, const Hypotheses& hyp,
                               const LojasiewiczEstimate* ls, std::optional<double> modal_rate,
                               const Theorem1Options& opt) {
  Theorem1Report rep;
  rep.hypotheses = hyp;

  if (hyp.sign == SignStatus::Violated) rep.notes.push_back("sign condition s f(s) <= 0 violated");
  if (!hyp.damping_ok())
    rep.notes.push_back(std::string("damping hypothesis not met: certificate ") + to_string(hyp.certificate) +
                        ", structure " + to_string(hyp.structure));

  rep.lemma1 = velocity_decay_check(series.t, series.velocity, opt.lemma1_threshold, opt.lemma1_time);

  if (hyp.blown_up) {
    std::ostringstream os;
    os << "blow-up";
    if (hyp.blowup_time) os << " at t = " << *hyp.blowup_time;
    os << "; no rate fit";
    rep.verdict = os.str();
    return rep;
  }

  if (ls) {
    rep.theta = ls->theta;
    if (ls->theta >= opt.exponential_theta) {
      rep.predicted = DecayClass::Exponential;
      rep.predicted_rate = modal_rate;
    } else {
      rep.predicted = DecayClass::Polynomial;
      rep.predicted_rate = ls->theta / (1.0 - 2.0 * ls->theta);
    }
  }

  std::vector<double> y(series.t.size());
  double ymax = 0.0, vmax = 0.0, dmax = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    y[k] = series.distance[k] + series.velocity[k];
    ymax = std::max(ymax, y[k]);
    vmax = std::max(vmax, series.velocity[k]);
    dmax = std::max(dmax, series.distance[k]);
  }
  rep.converged = !y.empty() && series.velocity.back() * 10.0 <= vmax && series.distance.back() * 10.0 <= dmax;
  if (!rep.converged) rep.notes.push_back("not converged: final norms did not fall 10x below their maxima");

  try {
    rep.measured = fit_decay(series.t, y, opt.t_min_fraction);
  } catch (const Error& e) {
    rep.notes.push_back(std::string("decay fit unavailable: ") + e.what());
  }

  if (rep.measured && rep.measured->cls == rep.predicted && rep.predicted != DecayClass::Inconclusive) {
    rep.agreement = true;
    if (rep.predicted_rate && *rep.predicted_rate > 0.0)
      rep.agreement = std::abs(rep.measured->rate - *rep.predicted_rate) <= opt.rate_tolerance * *rep.predicted_rate;
  }

  std::ostringstream os;
  if (!rep.converged) {
    os << "not converged";
  } else if (!hyp.hold()) {
    os << "conclusion observed despite refuted hypothesis";
  } else if (rep.agreement) {
    os << "consistent with rate ";
    if (rep.predicted == DecayClass::Exponential)
      os << "e^(-zeta t), zeta = " << rep.measured->rate;
    else
      os << "t^(-" << rep.measured->rate << ")";
  } else {
    os << "measured decay differs from the predicted class or rate";
  }
  rep.verdict = os.str();
  return rep;
}

}  // namespace dampwave

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dampwave/damping.hpp"
#include "dampwave/equilibria.hpp"
#include "dampwave/nonlinearity.hpp"

namespace dampwave {

// v' <= -C v^alpha checked by centred differences, together with the bound it
// implies: C' t^-beta (alpha > 1) or v(0) e^{-C t} (alpha = 1). Time is
// measured from the first sample.
struct OdeBoundCheck {
  double alpha = 1.0;
  double C = 0.0;
  double beta = 0.0;     // 1 / (alpha - 1), alpha > 1
  double C_prime = 0.0;  // [C (alpha - 1)]^-beta, alpha > 1
  std::vector<double> t;
  std::vector<double> slack;  // v' + C v^alpha at interior samples (NaN at the ends)
  std::vector<double> bound;
  int slack_violations = 0;
  int bound_violations = 0;
  bool valid() const { return slack_violations == 0 && bound_violations == 0; }
};

OdeBoundCheck lemma3_check(std::span<const double> t, std::span<const double> v, double alpha, double C,
                           double tol = 1e-5);

enum class DecayClass { Exponential, Polynomial, Inconclusive };
const char* to_string(DecayClass c);

struct DecayFit {
  DecayClass cls = DecayClass::Inconclusive;
  double rate = 0.0;  // zeta (exponential) or beta (polynomial) of the selected model
  double prefactor = 0.0;
  double t_a = 0.0, t_b = 0.0;
  double exp_rate = 0.0, exp_rms = 0.0;
  double poly_rate = 0.0, poly_rms = 0.0;
  double score_gap = 0.0;
  bool enveloped = false;
  double period = 0.0;
};

// Least-squares fits of log y against t and against log t after dropping the
// first t_min_fraction of the time span; picks the lower-RMS model when the
// RMS gap exceeds 10%. Oscillating series are replaced by a one-period running
// maximum first.
DecayFit fit_decay(std::span<const double> t, std::span<const double> y, double t_min_fraction = 0.2);

struct VelocityDecayCheck {
  bool pass = false;
  bool reached = false;
  double value = 0.0;     // |v(T_check)|
  double tail_max = 0.0;  // max |v| over the last 10% before T_check
};

VelocityDecayCheck velocity_decay_check(std::span<const double> t, std::span<const double> v_norm,
                                        double threshold, double t_check);

// Slowest decay rate of u'' + h u' + lambda u = 0.
double modal_decay_rate(double h, double lambda);

struct Hypotheses {
  Verdict certificate = Verdict::Inconclusive;
  Structure structure = Structure::Unknown;
  SignStatus sign = SignStatus::Unchecked;
  double sign_beta = 0.0;
  Suprema suprema;
  bool blown_up = false;
  std::optional<double> blowup_time;

  bool damping_ok() const {
    return certificate == Verdict::CertifiedUpToHorizon || structure == Structure::PositiveNegative ||
           structure == Structure::OnOff;
  }
  bool hold() const { return damping_ok() && sign == SignStatus::Satisfied; }
};

// |u - phi|_H1 and |v|_L2 along the trajectory.
struct ConvergenceSeries {
  std::vector<double> t;
  std::vector<double> distance;
  std::vector<double> velocity;
};

struct Theorem1Report {
  Hypotheses hypotheses;
  std::optional<double> theta;
  DecayClass predicted = DecayClass::Inconclusive;
  std::optional<double> predicted_rate;
  std::optional<DecayFit> measured;
  bool converged = false;
  bool agreement = false;
  VelocityDecayCheck lemma1;
  std::string verdict;
  std::vector<std::string> notes;
};

struct Theorem1Options {
  double lemma1_threshold = 1e-3;
  double lemma1_time = 200.0;
  double exponential_theta = 0.45;  // theta estimates at or above this read as 1/2
  double rate_tolerance = 0.25;
  double t_min_fraction = 0.2;
};

Theorem1Report theorem1_report(const ConvergenceSeries& series, const Hypotheses& hyp,
                               const LojasiewiczEstimate* ls, std::optional<double> modal_rate,
                               const Theorem1Options& options = {});

}  // namespace dampwave

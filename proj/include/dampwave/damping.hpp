#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace dampwave {

enum class ProfileKind { Constant, PowerLaw, OnOff, Tabulated, Expression };

const char* to_string(ProfileKind kind);

// One cell segment of a periodic on/off profile. Active segments carry the
// bounds m <= h <= M; inactive segments are off periods where h vanishes.
struct OnOffSegment {
  double duration = 1.0;
  bool active = true;
  double m = 1.0;
  double M = 1.0;
  // Value at local time tau in [0, duration); constant m when empty.
  std::function<double(double)> value;
};

// Interval J_n = (a, b) with its bounds, as produced by DampingProfile::intervals.
struct DampingInterval {
  double a = 0.0, b = 0.0, m = 0.0, M = 0.0;
  bool active = true;
};

// Time-dependent damping coefficient h(t). Immutable after construction.
class DampingProfile {
 public:
  static DampingProfile constant(double h0);
  // h0 / (1 + t)^alpha
  static DampingProfile power_law(double h0, double alpha);
  // The cell repeats forever starting at t = 0. With junction_zero the value
  // at every segment end b_n is 0.
  static DampingProfile on_off(std::vector<OnOffSegment> cell, bool junction_zero);
  // level on [k P, k P + on), 0 on [k P + on, (k + 1) P) with P = on + off.
  static DampingProfile unit_on_off(double on, double off, double level = 1.0);
  // Linear interpolation, constant extrapolation on both ends.
  static DampingProfile tabulated(std::vector<double> times, std::vector<double> values);
  static DampingProfile expression(std::string name, std::function<double(double)> fn,
                                   bool nonnegative = true);

  ProfileKind kind() const { return kind_; }
  // Canonical profile string, e.g. "power_law:1,2"; parse_profile() reads it back.
  const std::string& spec() const { return spec_; }
  bool nonnegative() const { return nonnegative_; }

  double operator()(double t) const;

  double h0() const { return h0_; }
  double alpha() const { return alpha_; }
  bool junction_zero() const { return junction_zero_; }
  const std::vector<OnOffSegment>& cell() const { return cell_; }

  // On/off interval metadata up to the horizon (empty for other kinds).
  std::vector<DampingInterval> intervals(double horizon) const;

  // Closed-form window mass int_t^{t+eps} h, when the kind admits one.
  std::optional<double> exact_window_mass(double t, double eps) const;

 private:
  DampingProfile() = default;

  ProfileKind kind_ = ProfileKind::Constant;
  std::string spec_;
  bool nonnegative_ = true;
  double h0_ = 0.0;
  double alpha_ = 0.0;
  std::vector<OnOffSegment> cell_;
  double period_ = 0.0;
  bool junction_zero_ = false;
  std::vector<double> times_, values_;
  std::function<double(double)> fn_;

};

// Throws NegativeTime for t < 0.
double evaluate(const DampingProfile& profile, double t);

// Profile strings: constant:h0 | power_law:h0,alpha | onoff:on,off[,level] |
// abs_sin[:a,w] | exp:a,r | tabulated:path.csv
DampingProfile parse_profile(const std::string& spec);

// Composite trapezoid with n_sub panels.
double window_integral(const DampingProfile& profile, double t, double eps, int n_sub);

enum class Verdict { CertifiedUpToHorizon, Refuted, Inconclusive };
const char* to_string(Verdict v);

struct WindowBound {
  double epsilon = 0.0;
  double delta = 0.0;      // infimum of the window mass over the scan
  double witness_t = 0.0;  // window [witness_t, witness_t + epsilon] attains it
  double head_inf = 0.0;   // infimum over the first half of the horizon
  double tail_inf = 0.0;   // infimum over the last quarter
};

struct CertificateReport {
  Verdict verdict = Verdict::Inconclusive;
  std::vector<WindowBound> windows;
  // Worst (smallest-mass) window over all probe epsilons.
  double epsilon = 0.0;
  double delta = 0.0;
  double witness_t = 0.0;
  double horizon = 0.0;
  bool analytic = false;
  std::string note;

  // min over probe epsilons of delta / epsilon.
  double min_window_mean() const;
};

struct CertifyOptions {
  std::vector<double> epsilons{0.1, 0.5, 1.0, 2.0};
  double horizon = 200.0;
  double scan_step = 0.01;
  double tolerance = 1e-9;
  double delta_min = 1e-6;
};

CertificateReport certify_integrally_positive(const DampingProfile& profile,
                                              const CertifyOptions& options = {});

enum class Structure { PositiveNegative, OnOff, Neither, Unknown };
const char* to_string(Structure s);

Structure classify_structure(const DampingProfile& profile);

enum class Criterion11Verdict { Diverges, Converges, Inconclusive };
const char* to_string(Criterion11Verdict v);

// int_0^inf e^{-H(t)} int_0^t e^{H(s)} ds dt with H = int_0^t h.
struct Criterion11Result {
  Criterion11Verdict verdict = Criterion11Verdict::Inconclusive;
  std::vector<double> t;
  std::vector<double> integrand;  // e^{-H(t)} int_0^t e^{H(s)} ds
  std::vector<double> outer;      // I(t)
  double outer_slope = 0.0;       // log-log slope of I over the last decade
  double integrand_slope = 0.0;   // log-log slope of the integrand over the last decade
};

Criterion11Result criterion_11(const DampingProfile& profile, double horizon = 200.0,
                               double quadrature_step = 0.01, double margin = 0.2);

// Nonlinear velocity damping g with declared derivative bounds m1 <= g' <= m2.
struct VelocityDamping {
  std::string name;
  std::function<double(double)> g;
  std::function<double(double)> dg;
  double m1 = 1.0;
  double m2 = 1.0;
  // Set only by identity(); the integrator then uses the closed-form solve.
  bool linear = false;

  static VelocityDamping identity();
  // s + c tanh(s), m1 = 1, m2 = 1 + c
  static VelocityDamping linear_tanh(double c);
};

// identity | linear_tanh:c
VelocityDamping parse_velocity_damping(const std::string& spec);

struct VelocityDampingReport {
  bool valid = true;
  double g_at_zero = 0.0;
  double min_derivative = 0.0;
  double max_derivative = 0.0;
  std::optional<double> derivative_witness;
  std::optional<double> sandwich_witness;
  int n_samples = 0;
};

VelocityDampingReport validate_velocity_damping(const VelocityDamping& g, double range,
                                                int n_samples, double tol = 1e-12);

}  // namespace dampwave

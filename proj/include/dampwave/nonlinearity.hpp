#pragma once

#include <functional>
#include <optional>
#include <string>

namespace dampwave {

enum class SignStatus { Satisfied, Violated, Unchecked };
const char* to_string(SignStatus s);

// Scalar nonlinearity f with f', f'' and the primitive F(s) = int_0^s f.
struct Nonlinearity {
  std::string name;
  std::function<double(double)> f, df, d2f, F;
  SignStatus status = SignStatus::Unchecked;
  std::optional<double> witness;
  // f is identically zero (lets solvers detect the pure-Laplacian null space).
  bool is_zero = false;
};

// zero | linear:lambda | cubic_stable | cubic_unstable | saturating
Nonlinearity builtin(const std::string& name);

struct SignReport {
  SignStatus status = SignStatus::Unchecked;
  double lo = 0.0, hi = 0.0;
  double worst = 0.0;  // max of s f(s) over the samples
  double worst_at = 0.0;
  std::optional<double> witness;
};

// Samples s f(s) and F(s) on [-beta, beta]; satisfied iff both stay <= tol.
SignReport validate_sign(const Nonlinearity& nl, double beta, int n_samples = 10001, double tol = 1e-12);

// Same check, recording the verdict on the nonlinearity itself.
void apply_sign_check(Nonlinearity& nl, double beta, int n_samples = 10001);

struct Suprema {
  double f = 0.0, df = 0.0, d2f = 0.0;
};

// Sampled sup |f|, |f'|, |f''| over [-beta, beta].
Suprema bounds_on(const Nonlinearity& nl, double beta, int n_samples = 10001);

}  // namespace dampwave

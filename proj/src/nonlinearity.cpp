#include "dampwave/nonlinearity.hpp"

#include <cmath>

#include "dampwave/error.hpp"

namespace dampwave {

const char* to_string(SignStatus s) {
  switch (s) {
    case SignStatus::Satisfied: return "satisfied";
    case SignStatus::Violated: return "violated";
    case SignStatus::Unchecked: return "unchecked";
  }
  return "?";
}

Nonlinearity builtin(const std::string& name) {
  Nonlinearity nl;
  nl.name = name;
  if (name == "zero") {
    auto z = [](double) { return 0.0; };
    nl.f = nl.df = nl.d2f = nl.F = z;
    nl.status = SignStatus::Satisfied;
    nl.is_zero = true;
  } else if (name.rfind("linear", 0) == 0) {
    double lambda = 1.0;
    if (name.size() > 6) {
      if (name[6] != ':') throw Error(ErrorKind::UnknownName, "unknown nonlinearity '" + name + "'");
      try {
        lambda = std::stod(name.substr(7));
      } catch (const std::exception&) {
        throw Error(ErrorKind::InvalidArgument, "bad linear coefficient in '" + name + "'");
      }
    }
    if (!(lambda >= 0.0)) throw Error(ErrorKind::InvalidArgument, "linear nonlinearity needs lambda >= 0");
    nl.f = [lambda](double s) { return -lambda * s; };
    nl.df = [lambda](double) { return -lambda; };
    nl.d2f = [](double) { return 0.0; };
    nl.F = [lambda](double s) { return -0.5 * lambda * s * s; };
    nl.status = SignStatus::Satisfied;
    nl.is_zero = lambda == 0.0;
  } else if (name == "cubic_stable") {
    nl.f = [](double s) { return -s * s * s; };
    nl.df = [](double s) { return -3.0 * s * s; };
    nl.d2f = [](double s) { return -6.0 * s; };
    nl.F = [](double s) { return -0.25 * s * s * s * s; };
    nl.status = SignStatus::Satisfied;
  } else if (name == "cubic_unstable") {
    nl.f = [](double s) { return s * s * s; };
    nl.df = [](double s) { return 3.0 * s * s; };
    nl.d2f = [](double s) { return 6.0 * s; };
    nl.F = [](double s) { return 0.25 * s * s * s * s; };
    nl.status = SignStatus::Violated;
    nl.witness = 1.0;
  } else if (name == "saturating") {
    // f = -s^3 / (1 + s^2)
    nl.f = [](double s) { return -s * s * s / (1.0 + s * s); };
    nl.df = [](double s) {
      const double q = 1.0 + s * s;
      return -(3.0 * s * s + s * s * s * s) / (q * q);
    };
    nl.d2f = [](double s) {
      const double q = 1.0 + s * s;
      return (2.0 * s * s * s - 6.0 * s) / (q * q * q);
    };
    nl.F = [](double s) { return -0.5 * s * s + 0.5 * std::log1p(s * s); };
    nl.status = SignStatus::Satisfied;
  } else {
    throw Error(ErrorKind::UnknownName, "unknown nonlinearity '" + name + "'");
  }
  return nl;
}

SignReport validate_sign(const Nonlinearity& nl, double beta, int n_samples, double tol) {
  if (!(beta > 0.0) || n_samples < 2)
    throw Error(ErrorKind::InvalidArgument, "sign validation needs beta > 0 and >= 2 samples");
  SignReport rep;
  rep.lo = -beta;
  rep.hi = beta;
  rep.worst = -INFINITY;
  double worst_F = -INFINITY, worst_F_at = 0.0;
  for (int k = 0; k < n_samples; ++k) {
    const double s = -beta + 2.0 * beta * k / (n_samples - 1);
    const double sf = s * nl.f(s);
    if (sf > rep.worst) {
      rep.worst = sf;
      rep.worst_at = s;
    }
    const double F = nl.F(s);
    if (F > worst_F) {
      worst_F = F;
      worst_F_at = s;
    }
  }
  if (rep.worst > tol) {
    rep.status = SignStatus::Violated;
    rep.witness = rep.worst_at;
  } else if (worst_F > tol) {
    rep.status = SignStatus::Violated;
    rep.witness = worst_F_at;
  } else {
    rep.status = SignStatus::Satisfied;
  }
  return rep;
}

void apply_sign_check(Nonlinearity& nl, double beta, int n_samples) {
  const auto rep = validate_sign(nl, beta, n_samples);
  nl.status = rep.status;
  nl.witness = rep.witness;
}

Suprema bounds_on(const Nonlinearity& nl, double beta, int n_samples) {
  if (!(beta > 0.0) || n_samples < 2)
    throw Error(ErrorKind::InvalidArgument, "bounds_on needs beta > 0 and >= 2 samples");
  Suprema s;
  for (int k = 0; k < n_samples; ++k) {
    const double x = -beta + 2.0 * beta * k / (n_samples - 1);
    s.f = std::max(s.f, std::abs(nl.f(x)));
    s.df = std::max(s.df, std::abs(nl.df(x)));
    s.d2f = std::max(s.d2f, std::abs(nl.d2f(x)));
  }
  return s;
}

}  // namespace dampwave

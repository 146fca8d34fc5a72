#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "dampwave/damping.hpp"
#include "dampwave/error.hpp"

using namespace dampwave;

namespace {

// min over t of int_t^{t+eps} |sin s| ds for eps < pi, by brute force on a fine grid.
double abs_sin_window_min(double eps) {
  double best = 1e300;
  for (int k = 0; k <= 20000; ++k) {
    const double t = M_PI * k / 20000.0;
    const int n = 2000;
    const double h = eps / n;
    double acc = 0.5 * (std::abs(std::sin(t)) + std::abs(std::sin(t + eps)));
    for (int j = 1; j < n; ++j) acc += std::abs(std::sin(t + j * h));
    best = std::min(best, acc * h);
  }
  return best;
}

}  // namespace

TEST(Damping, Evaluate) {
  EXPECT_EQ(evaluate(DampingProfile::constant(2), 7), 2);
  EXPECT_DOUBLE_EQ(evaluate(DampingProfile::power_law(1, 2), 1), 0.25);
  EXPECT_EQ(evaluate(DampingProfile::unit_on_off(1, 1), 1.5), 0.0);
  EXPECT_EQ(evaluate(DampingProfile::unit_on_off(1, 1), 2.5), 1.0);
}

TEST(Damping, NegativeTimeRejected) {
  try {
    evaluate(DampingProfile::constant(1), -0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NegativeTime);
  }
}

TEST(Damping, TabulatedInterpolatesAndClamps) {
  const auto p = DampingProfile::tabulated({0, 1, 3}, {1, 3, 0});
  EXPECT_DOUBLE_EQ(p(0.5), 2.0);
  EXPECT_DOUBLE_EQ(p(2.0), 1.5);
  EXPECT_DOUBLE_EQ(p(10.0), 0.0);
  EXPECT_EQ(classify_structure(p), Structure::Unknown);
}

TEST(Damping, TabulatedFromCsv) {
  const auto path = std::filesystem::temp_directory_path() / "dampwave_tab.csv";
  {
    std::ofstream out(path);
    out << "t,h\n0,2\n2,4\n";
  }
  const auto p = parse_profile("tabulated:" + path.string());
  EXPECT_DOUBLE_EQ(p(1.0), 3.0);
  std::filesystem::remove(path);
}

TEST(Damping, ParseRoundTrip) {
  for (std::string s : {"constant:1", "power_law:1,2", "onoff:1,1"}) EXPECT_EQ(parse_profile(s).spec(), s);
  EXPECT_THROW(parse_profile("wobble:1"), Error);
  EXPECT_THROW(parse_profile("power_law:1"), Error);
}

TEST(Damping, ConstantCertifiedWithExactDelta) {
  CertifyOptions opt;
  opt.epsilons = {1.0};
  opt.horizon = 100;
  const auto r = certify_integrally_positive(DampingProfile::constant(1), opt);
  EXPECT_EQ(r.verdict, Verdict::CertifiedUpToHorizon);
  EXPECT_EQ(r.delta, 1.0);
}

TEST(Damping, AbsSinCertifiedNearClosedForm) {
  CertifyOptions opt;
  opt.epsilons = {1.0};
  opt.horizon = 50;
  const auto r = certify_integrally_positive(parse_profile("abs_sin"), opt);
  EXPECT_EQ(r.verdict, Verdict::CertifiedUpToHorizon);
  const double oracle = abs_sin_window_min(1.0);
  EXPECT_NEAR(oracle, 2 * (1 - std::cos(0.5)), 1e-6);
  EXPECT_NEAR(r.delta, oracle, 0.02 * oracle);
  // The worst window is centred on a multiple of pi.
  const double centre = r.witness_t + 0.5;
  EXPECT_NEAR(std::remainder(centre, M_PI), 0.0, 0.02);
}

TEST(Damping, PowerLawRefutedAnalytically) {
  const auto r = certify_integrally_positive(DampingProfile::power_law(1, 2));
  EXPECT_EQ(r.verdict, Verdict::Refuted);
  EXPECT_TRUE(r.analytic);
  const auto exact = DampingProfile::power_law(1, 2).exact_window_mass(r.witness_t, r.epsilon);
  ASSERT_TRUE(exact);
  EXPECT_NEAR(*exact, 1 / (1 + r.witness_t) - 1 / (1 + r.witness_t + r.epsilon), 1e-15);
}

TEST(Damping, OnOffGapRefutedInsideOffInterval) {
  CertifyOptions opt;
  opt.epsilons = {0.4};
  const auto p = DampingProfile::unit_on_off(1.0, 0.5);
  const auto r = certify_integrally_positive(p, opt);
  EXPECT_EQ(r.verdict, Verdict::Refuted);
  EXPECT_EQ(r.delta, 0.0);
  const double local = std::fmod(r.witness_t, 1.5);
  EXPECT_GE(local, 1.0 - 1e-9);
  EXPECT_LE(local + 0.4, 1.5 + 1e-9);
}

TEST(Damping, EmptyEpsilonsRejected) {
  CertifyOptions opt;
  opt.epsilons.clear();
  try {
    certify_integrally_positive(DampingProfile::constant(1), opt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyEpsilons);
  }
}

TEST(Damping, WindowInfimumMonotoneInEpsilon) {
  for (std::string s : {"abs_sin", "onoff:1,1", "power_law:1,2", "constant:0.3"}) {
    CertifyOptions opt;
    opt.epsilons = {0.1, 0.5, 1.0, 2.0};
    opt.horizon = 60;
    const auto r = certify_integrally_positive(parse_profile(s), opt);
    for (std::size_t k = 1; k < r.windows.size(); ++k) EXPECT_GE(r.windows[k].delta, r.windows[k - 1].delta - 1e-12) << s;
    for (const auto& w : r.windows) EXPECT_GE(w.delta, 0.0);
  }
}

TEST(Damping, WindowIntegralTrapezoid) {
  EXPECT_NEAR(window_integral(parse_profile("abs_sin"), 0.0, M_PI, 4000), 2.0, 1e-6);
  EXPECT_DOUBLE_EQ(window_integral(DampingProfile::constant(3), 5.0, 0.5, 10), 1.5);
}

TEST(Damping, StructureClassification) {
  std::vector<OnOffSegment> cell{{1.0, true, 1.0, 1.0, {}}, {1.0, true, 0.5, 0.5, {}}};
  EXPECT_EQ(classify_structure(DampingProfile::on_off(cell, true)), Structure::OnOff);
  EXPECT_EQ(classify_structure(DampingProfile::on_off(cell, false)), Structure::PositiveNegative);
  EXPECT_EQ(classify_structure(DampingProfile::constant(3)), Structure::PositiveNegative);
  EXPECT_EQ(classify_structure(DampingProfile::constant(0)), Structure::Neither);
  EXPECT_EQ(classify_structure(DampingProfile::tabulated({0, 1}, {1, 1})), Structure::Unknown);
  EXPECT_EQ(classify_structure(DampingProfile::unit_on_off(1, 1)), Structure::OnOff);
}

TEST(Damping, OnOffJunctionValuesVanish) {
  std::vector<OnOffSegment> cell{{1.0, true, 1.0, 1.0, {}}, {1.0, true, 0.5, 0.5, {}}};
  const auto p = DampingProfile::on_off(cell, true);
  EXPECT_EQ(p(1.0), 0.0);
  EXPECT_EQ(p(2.0), 0.0);
  EXPECT_EQ(p(1.5), 0.5);
  const auto iv = p.intervals(4.0);
  ASSERT_EQ(iv.size(), 4u);
  EXPECT_EQ(iv[0].a, 0.0);
  for (std::size_t k = 1; k < iv.size(); ++k) EXPECT_EQ(iv[k].a, iv[k - 1].b);
}

TEST(Damping, OnOffRejectsBoundsViolation) {
  std::vector<OnOffSegment> cell{{1.0, true, 1.0, 2.0, [](double t) { return 3.0 * t; }}};
  EXPECT_THROW(DampingProfile::on_off(cell, false), Error);
}

TEST(Damping, Criterion11) {
  EXPECT_EQ(criterion_11(DampingProfile::constant(1)).verdict, Criterion11Verdict::Diverges);
  EXPECT_EQ(criterion_11(DampingProfile::power_law(1, 2)).verdict, Criterion11Verdict::Diverges);
  EXPECT_EQ(criterion_11(parse_profile("exp:1,1")).verdict, Criterion11Verdict::Converges);
}

TEST(Damping, Criterion11ConstantIntegrandOracle) {
  // h = c: integrand (1 - e^{-c t}) / c.
  for (double c : {0.5, 1.0, 3.0}) {
    const auto r = criterion_11(DampingProfile::constant(c), 50.0, 0.01);
    EXPECT_EQ(r.verdict, Criterion11Verdict::Diverges) << c;
    for (std::size_t k = 0; k < r.t.size(); k += 97)
      EXPECT_NEAR(r.integrand[k], (1 - std::exp(-c * r.t[k])) / c, 1e-4) << c;
  }
}

TEST(Damping, VelocityDampingValidation) {
  auto r = validate_velocity_damping(VelocityDamping::identity(), 10.0, 10001);
  EXPECT_TRUE(r.valid);

  const auto tanh_g = VelocityDamping::linear_tanh(0.5);
  EXPECT_DOUBLE_EQ(tanh_g.m2, 1.5);
  r = validate_velocity_damping(tanh_g, 10.0, 10001);
  EXPECT_TRUE(r.valid);
  EXPECT_NEAR(r.max_derivative, 1.5, 1e-6);
  EXPECT_GE(r.min_derivative, 1.0);

  VelocityDamping sq{"square", [](double s) { return s * s; }, [](double s) { return 2 * s; }, 0.1, 10.0, false};
  r = validate_velocity_damping(sq, 1.0, 1001);
  EXPECT_FALSE(r.valid);
  ASSERT_TRUE(r.derivative_witness);
  EXPECT_LT(sq.dg(*r.derivative_witness), sq.m1);
  EXPECT_TRUE(r.sandwich_witness);
}

TEST(Damping, VelocityDampingParse) {
  EXPECT_TRUE(parse_velocity_damping("identity").linear);
  const auto g = parse_velocity_damping("linear_tanh:0.5");
  EXPECT_FALSE(g.linear);
  EXPECT_DOUBLE_EQ(g.g(1.0), 1.0 + 0.5 * std::tanh(1.0));
  EXPECT_THROW(parse_velocity_damping("cubic"), Error);
}

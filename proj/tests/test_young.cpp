#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "matbump/random.hpp"
#include "matbump/serialize.hpp"
#include "matbump/young.hpp"

using namespace matbump;

namespace {

std::vector<YoungFn> families() {
  return {YoungFn::power(2.0), YoungFn::power(1.5), YoungFn::power(3.0, 2.0), YoungFn::power_log(2.0, 1.0),
          YoungFn::power_log(1.0, 1.0), YoungFn::power_log(3.0, -1.0),
          YoungFn::tabulated({{0.0, 0.0}, {0.5, 0.2}, {1.0, 1.0}, {2.0, 5.0}, {10.0, 200.0}})};
}

// Root of λ = log(e + 1/λ) by plain bisection.
double luxemburg_root_oracle() {
  double lo = 1.0, hi = 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid - std::log(std::numbers::e + 1.0 / mid) > 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST(Young, EvaluationAnchors) {
  EXPECT_DOUBLE_EQ(eval_young(YoungFn::power(2.0), 3.0), 9.0);
  for (const auto& f : families()) EXPECT_EQ(f(0.0), 0.0) << f.label();
  EXPECT_NEAR(YoungFn::power_log(2.0, 1.0)(1.0), std::log(std::numbers::e + 1.0), 1e-14);
  EXPECT_NEAR(YoungFn::power_log(2.0, 1.0)(1.0), 1.31326, 1e-5);
}

TEST(Young, RejectsInvalidParameters) {
  EXPECT_THROW(YoungFn::power(0.5), std::domain_error);
  EXPECT_THROW(YoungFn::power(2.0, -1.0), std::domain_error);
  EXPECT_THROW(YoungFn::power_log(1.0, -1.0), std::domain_error);
  EXPECT_THROW(YoungFn::tabulated({{1.0, 2.0}, {2.0, 1.0}}), std::exception);
}

TEST(Young, ConvexIncreasingSuperlinear) {
  for (const auto& f : families()) {
    std::vector<double> t, v;
    for (double x = 1e-3; x < 1e4; x *= 1.1) {
      t.push_back(x);
      v.push_back(f(x));
    }
    for (std::size_t i = 1; i < t.size(); ++i) EXPECT_GE(v[i], v[i - 1]) << f.label();
    for (std::size_t i = 1; i + 1 < t.size(); ++i) {
      // divided second difference on a non-uniform grid
      const double s1 = (v[i] - v[i - 1]) / (t[i] - t[i - 1]);
      const double s2 = (v[i + 1] - v[i]) / (t[i + 1] - t[i]);
      EXPECT_GE(s2 - s1, -1e-12 * std::max(1.0, std::abs(s2))) << f.label() << " at t=" << t[i];
    }
    for (double x = 100.0; x < 1e4; x *= 2.0) EXPECT_GE(f(2 * x) / (2 * x), f(x) / x * (1 - 1e-12)) << f.label();
  }
}

TEST(Young, AssociateAnchors) {
  const YoungFn a = associate(YoungFn::power(2.0));
  EXPECT_NEAR(a(2.0), 1.0, 1e-6);
  EXPECT_EQ(a(0.0), 0.0);
}

TEST(Young, AssociateMatchesBruteForce) {
  const YoungFn phi = YoungFn::power_log(2.0, 1.0);
  const YoungFn a = associate(phi);
  // independent dense sup of st − Φ(s) on a geometric grid
  const double t = 4.0;
  double best = 0.0;
  for (double s = 1e-6; s <= 1e6; s *= 1.0 + 1e-5) best = std::max(best, s * t - phi(s));
  EXPECT_NEAR(a(t), best, 1e-6 * best);
  EXPECT_NEAR(associate_brute(phi, t), best, 1e-6 * best);
}

TEST(Young, ClassifyB) {
  EXPECT_EQ(classify_b(YoungFn::power(2.0), 2.0, 2.0).verdict, BVerdict::nonmember);
  const BClass c = classify_b(YoungFn::power(1.5), 2.0, 2.0);
  EXPECT_TRUE(c.member());
  EXPECT_NEAR(c.tail_integral, 2.0, 1e-6);
  EXPECT_TRUE(classify_b(YoungFn::power_log(2.0, -2.0), 2.0, 2.0).member());
  EXPECT_THROW(classify_b(YoungFn::power(2.0), 1.0, 2.0), std::domain_error);
  EXPECT_THROW(classify_b(YoungFn::power(2.0), 3.0, 2.0), std::domain_error);
}

TEST(Young, LuxemburgAnchors) {
  const std::vector<double> c(5, 3.7);
  EXPECT_NEAR(luxemburg_norm(c, YoungFn::power(2.0)), 3.7, 3.7e-10);
  EXPECT_NEAR(LuxemburgContext({1.0, 3.0}).norm(YoungFn::power(2.0)), std::sqrt(5.0), 1e-9);
  const double root = luxemburg_root_oracle();
  EXPECT_NEAR(LuxemburgContext({1.0}).norm(YoungFn::power_log(1.0, 1.0)), root, 1e-9 * root);
}

TEST(Young, LuxemburgHomogeneityMonotonicityPower) {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> f(8), g(8);
    for (std::size_t i = 0; i < f.size(); ++i) {
      f[i] = std::exp(3.0 * (rng.uniform() - 0.5));
      g[i] = f[i] * (1.0 + rng.uniform());
    }
    for (const auto& phi : families()) {
      const double nf = luxemburg_norm(f, phi);
      std::vector<double> cf(f);
      for (double& x : cf) x *= 7.5;
      EXPECT_NEAR(luxemburg_norm(cf, phi), 7.5 * nf, 1e-9 * 7.5 * nf) << phi.label();
      EXPECT_LE(nf, luxemburg_norm(g, phi) * (1 + 1e-9)) << phi.label();
    }
    for (double r : {1.0, 1.5, 2.0, 3.0}) {
      double s = 0.0;
      for (double x : f) s += std::pow(x, r) / static_cast<double>(f.size());
      const double expect = std::pow(s, 1.0 / r);
      EXPECT_NEAR(luxemburg_norm(f, YoungFn::power(r)), expect, 1e-9 * expect);
    }
  }
}

TEST(Young, GeneralizedHolderExact) {
  Rng rng(5);
  const auto fams = families();
  for (int trial = 0; trial < 200; ++trial) {
    const YoungFn& phi = fams[static_cast<std::size_t>(trial) % fams.size()];
    const YoungFn psi = associate(phi);
    std::vector<double> f(6), g(6);
    double avg = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      f[i] = std::exp(4.0 * (rng.uniform() - 0.5));
      g[i] = std::exp(4.0 * (rng.uniform() - 0.5));
      avg += f[i] * g[i] / static_cast<double>(f.size());
    }
    EXPECT_LE(avg, 2.0 * luxemburg_norm(f, phi) * luxemburg_norm(g, psi)) << phi.label();
  }
}

TEST(Young, BClassBumpDominatesPower) {
  // Ψ = t^q log(e+t)^{2q} has associate in B_{q'} and t^q ≤ Ψ(t) for t ≥ 1
  for (double q : {1.5, 2.0, 3.0}) {
    const YoungFn psi = YoungFn::power_log(q, 2 * q);
    const double qq = q / (q - 1.0);
    EXPECT_TRUE(classify_b(associate(psi), qq, qq).member()) << q;
    for (double t = 1.0; t < 1e6; t *= 1.7) EXPECT_LE(std::pow(t, q), psi(t));
  }
}

TEST(Young, TabulatedTailIsInconclusiveNearBorderline) {
  std::vector<std::pair<double, double>> pts;
  for (double t = 1e-3; t <= 1e9; t *= 10.0) pts.emplace_back(t, t * t);
  const YoungFn tab = YoungFn::tabulated(pts);
  EXPECT_EQ(classify_b(tab, 2.0, 2.0).verdict, BVerdict::inconclusive);
}

TEST(Young, JsonRoundTrip) {
  for (const auto& f : families()) {
    const YoungFn g = young_from_json(young_to_json(f));
    for (double t : {0.0, 0.3, 1.0, 2.5, 40.0}) EXPECT_DOUBLE_EQ(f(t), g(t)) << f.label();
  }
  EXPECT_DOUBLE_EQ(young_from_json(json::parse(R"({"family":"power","r":2.0})"))(3.0), 9.0);
  EXPECT_DOUBLE_EQ(young_from_json(json("power_log(2;1)"))(1.0), YoungFn::power_log(2, 1)(1.0));
  EXPECT_THROW(young_from_json(json::parse(R"({"family":"power","r":2.0,"extra":1})")), std::invalid_argument);
  EXPECT_THROW(young_from_json(json::parse(R"({"family":"exp"})")), std::invalid_argument);
}

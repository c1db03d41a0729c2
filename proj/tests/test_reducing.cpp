#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "matbump/dyadic.hpp"
#include "matbump/random.hpp"
#include "matbump/reducing.hpp"
#include "matbump/serialize.hpp"
#include "matbump/weights.hpp"

using namespace matbump;

namespace {

SmallMat diag(std::vector<double> v) {
  SmallVec d(static_cast<int>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) d[static_cast<int>(i)] = v[i];
  return SmallMat::diagonal(d);
}

SmallVec random_unit(Rng& rng, int n) {
  SmallVec e(n);
  for (int i = 0; i < n; ++i) e[i] = rng.normal();
  return (1.0 / e.norm()) * e;
}

std::vector<double> uniform_weights(std::size_t m) { return std::vector<double>(m, 1.0 / static_cast<double>(m)); }

ReducingOptions fast_mvee() {
  ReducingOptions o;
  o.epsilon = 1e-4;
  o.allow_exact = false;
  return o;
}

}  // namespace

TEST(Reducing, ExactP2Anchors) {
  const SmallMat c = SmallMat::identity(2) + diag({1.0, 0.5});
  const std::vector<SmallMat> constant(4, c);
  const ReducingOp r = reducing_exact_p2(constant, uniform_weights(4));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) EXPECT_NEAR(r.matrix(i, j), c(i, j), 1e-14);

  const std::vector<SmallMat> halves{diag({1.0, 2.0}), diag({3.0, 1.0})};
  const ReducingOp h = reducing_exact_p2(halves, uniform_weights(2));
  EXPECT_NEAR(h.matrix(0, 0), std::sqrt(5.0), 1e-14);
  EXPECT_NEAR(h.matrix(1, 1), std::sqrt(2.5), 1e-14);
  EXPECT_NEAR(h.matrix(0, 1), 0.0, 1e-14);

  const std::vector<SmallMat> scalar{diag({1.0}), diag({3.0})};
  EXPECT_NEAR(reducing_exact_p2(scalar, uniform_weights(2)).matrix(0, 0), std::sqrt(5.0), 1e-14);
  EXPECT_EQ(reducing_op(scalar, uniform_weights(2), YoungFn::power(2.0)).provenance, ReducingProvenance::scalar);
  EXPECT_EQ(reducing_op(halves, uniform_weights(2), YoungFn::power(2.0)).provenance, ReducingProvenance::exact_p2);
}

TEST(Reducing, ScalarCaseIsTheLuxemburgNorm) {
  const std::vector<SmallMat> a{diag({1.0}), diag({3.0}), diag({0.5})};
  for (const YoungFn& psi : {YoungFn::power(1.5), YoungFn::power_log(2.0, 1.0), YoungFn::power(3.0)}) {
    const ReducingOp r = reducing_op(a, uniform_weights(3), psi);
    const double expect = luxemburg_norm(std::vector<double>{1.0, 3.0, 0.5}, psi);
    EXPECT_NEAR(r.matrix(0, 0), expect, 1e-9 * expect) << psi.label();
  }
}

TEST(Reducing, IdentityFieldGivesIdentity) {
  for (int n = 2; n <= 3; ++n) {
    const std::vector<SmallMat> a(4, SmallMat::identity(n));
    for (const YoungFn& psi : {YoungFn::power(3.0), YoungFn::power(1.5)}) {
      const ReducingOp r = reducing_op(a, uniform_weights(4), psi);
      EXPECT_EQ(r.provenance, ReducingProvenance::mvee);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) EXPECT_NEAR(r.matrix(i, j), i == j ? 1.0 : 0.0, 1e-6) << n << " " << psi.label();
    }
  }
}

TEST(Reducing, MveeAgainstExactP2Oracle) {
  Rng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + trial % 2;
    const WeightField w = gen_random_field(Grid(1, 3), n, 40 + static_cast<std::uint64_t>(trial), 8.0, 1.0);
    const auto wts = uniform_weights(w.size());
    const ReducingOp exact = reducing_exact_p2(w.cells, wts);
    const ReducingOp mvee = reducing_mvee(w.cells, wts, YoungFn::power(2.0), fast_mvee());
    for (int k = 0; k < 1000; ++k) {
      const SmallVec e = random_unit(rng, n);
      const double ratio = (mvee.matrix * e).norm() / (exact.matrix * e).norm();
      EXPECT_GE(ratio, 1.0 / 1.05);
      EXPECT_LE(ratio, std::sqrt(double(n)) * 1.05);
    }
  }
}

TEST(Reducing, TwoSidedDirectionBand) {
  Rng rng(22);
  const std::vector<YoungFn> psis{YoungFn::power(3.0), YoungFn::power_log(2.0, 1.0), YoungFn::power(1.5)};
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 2 + trial % 2;
    const WeightField w = gen_random_field(Grid(2, 2), n, 60 + static_cast<std::uint64_t>(trial), 6.0, 1.0);
    const auto wts = uniform_weights(w.size());
    const YoungFn& psi = psis[static_cast<std::size_t>(trial) % psis.size()];
    const ReducingOp r = reducing_op(w.cells, wts, psi, fast_mvee());
    for (int k = 0; k < 1000; ++k) {
      const SmallVec e = random_unit(rng, n);
      const double ratio = directional_norm(w.cells, wts, psi, e) / (r.matrix * e).norm();
      EXPECT_GE(ratio, 1.0 / (std::sqrt(double(n)) * 1.1)) << psi.label();
      EXPECT_LE(ratio, 1.1) << psi.label();
    }
  }
}

TEST(Reducing, OperatorNormBand) {
  // |R|_op against the Luxemburg norm of the cellwise operator norms
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 2 + trial % 2;
    const WeightField w = gen_random_field(Grid(1, 4), n, 80 + static_cast<std::uint64_t>(trial), 6.0, 1.0);
    const auto wts = uniform_weights(w.size());
    const YoungFn psi = YoungFn::power(trial % 2 ? 3.0 : 1.5);
    const ReducingOp r = reducing_op(w.cells, wts, psi, fast_mvee());
    std::vector<double> ops;
    for (const SmallMat& m : w.cells) ops.push_back(op_norm(m));
    const double ratio = op_norm(r.matrix) / luxemburg_norm_weighted(ops, wts, psi);
    EXPECT_GE(ratio, 1.0 / (2 * n));
    EXPECT_LE(ratio, 2.0 * n);
  }
}

TEST(Reducing, OpnormPair) {
  ReducingOp a, b;
  a.matrix = SmallMat::identity(2);
  b.matrix = SmallMat::identity(2);
  EXPECT_NEAR(reducing_opnorm_pair(a, b), 1.0, 1e-14);
  a.matrix = diag({2.0, 1.0});
  b.matrix = diag({1.0, 3.0});
  EXPECT_NEAR(reducing_opnorm_pair(a, b), 3.0, 1e-13);

  Rng rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    SmallMat x(3), y(3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        x(i, j) = rng.normal();
        y(i, j) = rng.normal();
      }
    a.matrix = symmetrized(x * x.transposed()) + 0.1 * SmallMat::identity(3);
    b.matrix = symmetrized(y * y.transposed()) + 0.1 * SmallMat::identity(3);
    double brute = 0.0;
    for (int k = 0; k < 10000; ++k) brute = std::max(brute, (a.matrix * (b.matrix * random_unit(rng, 3))).norm());
    const double exact = reducing_opnorm_pair(a, b);
    EXPECT_GE(exact, brute * (1 - 1e-12));
    EXPECT_LE(exact, brute * (1 + 1e-3));
  }
}

TEST(Reducing, DirectionSetsAreDeterministic) {
  const auto a = half_directions(3, 512);
  const auto b = half_directions(3, 512);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (int j = 0; j < 3; ++j) EXPECT_EQ(a[i][j], b[i][j]);
  for (const SmallVec& v : a) EXPECT_NEAR(v.norm(), 1.0, 1e-14);
}

TEST(Reducing, ProvenanceSerialized) {
  const std::vector<SmallMat> a{diag({1.0, 2.0}), diag({2.0, 1.0})};
  const ReducingOp r = reducing_op(a, uniform_weights(2), YoungFn::power(3.0), fast_mvee());
  const json j = reducing_to_json(r);
  EXPECT_EQ(j.at("provenance").at("method"), "mvee");
  EXPECT_EQ(j.at("provenance").at("psi"), "power(3)");
  EXPECT_GT(j.at("provenance").at("directions").get<int>(), 0);
  EXPECT_EQ(j.at("matrix").size(), 2u);
}

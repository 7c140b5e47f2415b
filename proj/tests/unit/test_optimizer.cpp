#include "prunadag/baselines.hpp"
#include "prunadag/optimizer.hpp"
#include "prunadag/problems.hpp"

#include <gtest/gtest.h>

#include <bit>
#include <cmath>

namespace prunadag {
namespace {

FunctionProblem half_square(Index n) {
  return FunctionProblem(
      n, [](const Vector& x) { return x; }, [](const Vector& x) { return 0.5 * x.squaredNorm(); }, 1.0, 0.0);
}

TEST(SelectRelevant, Examples) {
  EXPECT_EQ(select_relevant(Vector{{3.0, -5.0, 1.0}}, 1), IndexSet({1}));
  EXPECT_EQ(select_relevant(Vector{{2.0, 2.0, 0.0}}, 1), IndexSet({0}));
  EXPECT_EQ(select_relevant(Vector{{0.0, 0.0}}, 2), IndexSet({0, 1}));
}

TEST(SelectRelevant, TieBreakPrefersLowIndexAmongMany) {
  EXPECT_EQ(select_relevant(Vector{{1.0, -4.0, 4.0, 1.0, -4.0}}, 2), IndexSet({1, 2}));
}

TEST(SelectRelevant, RejectsBadT) {
  EXPECT_THROW(select_relevant(Vector::Ones(3), 0), ContractViolation);
  EXPECT_THROW(select_relevant(Vector::Ones(3), 4), ContractViolation);
}

TEST(PrunAdagState, Preconditions) {
  EXPECT_THROW(PrunAdagState(Vector(), 1), ContractViolation);
  EXPECT_THROW(PrunAdagState(Vector::Ones(3), 0), ContractViolation);
  EXPECT_THROW(PrunAdagState(Vector::Ones(3), 4), ContractViolation);
  EXPECT_THROW(PrunAdagState(Vector::Ones(3), 1, 0.0), ContractViolation);
  EXPECT_THROW(PrunAdagState(Vector::Ones(3), 1, 1.0), ContractViolation);
  Vector bad = Vector::Ones(2);
  bad[1] = std::nan("");
  EXPECT_THROW(PrunAdagState(bad, 1), ContractViolation);
}

TEST(PrunAdagState, WeightsStartAtSqrtVarsigma) {
  const PrunAdagState s(Vector::Ones(4), 2, 0.04);
  EXPECT_TRUE(s.w_opt.isApprox(Vector::Constant(4, 0.2)));
  EXPECT_TRUE(s.w_dec.isApprox(Vector::Constant(4, 0.2)));
}

TEST(TentativeWeights, Examples) {
  PrunAdagState s(Vector::Zero(3), 1, 0.01);
  s.w_opt[2] = 1.0;
  const Vector w = tentative_opt_weights(s, Vector{{0.3, 0.0, -2.0}});
  EXPECT_NEAR(w[0], 0.316228, 1e-6);
  EXPECT_EQ(w[1], 0.1);
  EXPECT_NEAR(w[2], 2.236068, 1e-6);
}

TEST(TentativeWeights, ZeroGradientKeepsWeights) {
  PrunAdagState s(Vector::Ones(3), 1, 0.01);
  s.w_opt = Vector{{0.5, 0.7, 0.9}};
  EXPECT_EQ(tentative_opt_weights(s, Vector::Zero(3)), s.w_opt);
}

TEST(BoundingSequences, V2AtFirstIteration) {
  PrunAdagState s(Vector{{0.0, 0.8}}, 1, 0.01, {Version::V2});
  const Bounds b = bounding_sequences(s, Vector{{1.0, 0.1}}, {0}, {});
  EXPECT_DOUBLE_EQ(b.lower[1], 0.8);
  EXPECT_EQ(b.upper[1], kInfinity);
  EXPECT_EQ(b.lower[0], 0.0);
  EXPECT_EQ(b.upper[0], kInfinity);
}

TEST(BoundingSequences, V3Rescaled) {
  PrunAdagState s(Vector{{0.0, 0.6, 4.0}}, 1, 0.01, {Version::V3});
  s.k = 1;
  const Bounds b = bounding_sequences(s, Vector{{2.0, 0.1, 0.1}}, {0}, {2});
  EXPECT_DOUBLE_EQ(b.lower[1], 0.15);
  EXPECT_DOUBLE_EQ(b.upper[1], 0.6);
}

TEST(BoundingSequences, V1FallsBackWhenProxySetIsEmpty) {
  PrunAdagState s(Vector{{0.0, 0.5}}, 1, 0.01, {Version::V1});
  const Bounds b = bounding_sequences(s, Vector{{3.0, 0.1}}, {0}, {});
  EXPECT_DOUBLE_EQ(b.lower[1], 0.5);
  EXPECT_EQ(b.upper[1], kInfinity);
}

TEST(BoundingSequences, V4CapsAtMagnitude) {
  PrunAdagState s(Vector{{0.0, -0.3}}, 1, 0.01, {Version::V4});
  s.k = 2;
  const Bounds b = bounding_sequences(s, Vector{{3.0, 0.1}}, {0}, {});
  EXPECT_DOUBLE_EQ(b.lower[1], 0.1);
  EXPECT_DOUBLE_EQ(b.upper[1], 0.3);
}

class ClassifyExample : public ::testing::Test {
 protected:
  Vector g{{5.0, 0.2, -0.1}};
  Vector x{{1.0, 0.4, 0.3}};
  Vector w{{std::sqrt(25.01), std::sqrt(0.05), std::sqrt(0.02)}};
};

TEST_F(ClassifyExample, V2) {
  const PrunAdagState s(x, 1, 0.01, {Version::V2});
  const Classification c = classify(s, g, w);
  EXPECT_EQ(c.relevant, IndexSet({0}));
  EXPECT_EQ(c.acceptable, IndexSet({1}));
  EXPECT_EQ(c.optimisable, IndexSet({0, 1}));
  EXPECT_EQ(c.decreasable, IndexSet({2}));
  EXPECT_TRUE(c.shrinking.empty());
}

TEST_F(ClassifyExample, RelevantOnly) {
  const PrunAdagState s(x, 1, 0.01, VersionPolicy::relevant_only_with(Version::V2));
  const Classification c = classify(s, g, w);
  EXPECT_EQ(c.optimisable, IndexSet({0}));
  EXPECT_TRUE(c.acceptable.empty());
  EXPECT_EQ(c.decreasable, IndexSet({1, 2}));
  EXPECT_EQ(c.shrinking, IndexSet({1}));
}

TEST_F(ClassifyExample, V4UpperBoundExcludesLargeSteps) {
  // |g_1/w_1| = 0.894 > b_1 = |x_1| = 0.4.
  const PrunAdagState s(x, 1, 0.01, {Version::V4});
  const Classification c = classify(s, g, w);
  EXPECT_TRUE(c.acceptable.empty());
  EXPECT_EQ(c.shrinking, IndexSet({1}));
}

TEST(Classify, ZeroComponentIsAlwaysDecreasable) {
  for (Version v : {Version::V1, Version::V2, Version::V3, Version::V4}) {
    const PrunAdagState s(Vector{{1.0, 0.0}}, 1, 0.01, {v});
    const Vector g{{5.0, 1.0}};
    const Classification c = classify(s, g, tentative_opt_weights(s, g));
    EXPECT_TRUE(c.decreasable.contains(1));
    EXPECT_FALSE(c.shrinking.contains(1));
  }
}

TEST(OptimisableStep, Examples) {
  const Vector s = optimisable_step(Vector{{0.3, 0.0, -1.0, 7.0}}, Vector{{0.316228, 0.1, 2.0, 1.0}}, {0, 1, 2});
  EXPECT_NEAR(s[0], -0.948683, 1e-6);
  EXPECT_EQ(s[1], 0.0);
  EXPECT_DOUBLE_EQ(s[2], 0.5);
  EXPECT_EQ(s[3], 0.0);
}

TEST(OptimisableStep, RejectsOutOfRange) {
  EXPECT_THROW(optimisable_step(Vector::Ones(2), Vector::Ones(2), {2}), ContractViolation);
  EXPECT_THROW(optimisable_step(Vector::Ones(2), Vector::Ones(3), {0}), ContractViolation);
}

Classification manual(IndexSet r, IndexSet d, IndexSet s) {
  Classification c;
  c.relevant = r;
  c.optimisable = r;
  c.decreasable = d;
  c.shrinking = s;
  return c;
}

TEST(DecreasableStep, CapsAtLowerBound) {
  PrunAdagState s(Vector{{0.0, 0.5}}, 1, 0.01, {Version::V2});
  s.w_dec[1] = std::sqrt(0.26);
  Vector limit;
  const Vector step = decreasable_step(s, Vector{{1.0, 0.2}}, manual({0}, {1}, {1}), Vector{{0.0, 0.5}}, &limit);
  EXPECT_NEAR(limit[1], -0.980581, 1e-6);
  EXPECT_DOUBLE_EQ(step[1], -0.5);
  EXPECT_DOUBLE_EQ(0.2 * step[1], -0.1);
  EXPECT_EQ(step[0], 0.0);
}

TEST(DecreasableStep, NegativeComponentMovesUp) {
  PrunAdagState s(Vector{{0.0, -0.2}}, 1, 0.01, {Version::V2});
  s.w_dec[1] = std::sqrt(0.05);
  Vector limit;
  const Vector step = decreasable_step(s, Vector{{3.0, -1.0}}, manual({0}, {1}, {1}), Vector{{0.0, 0.2}}, &limit);
  EXPECT_NEAR(limit[1], 0.894427, 1e-6);
  EXPECT_DOUBLE_EQ(step[1], 0.2);
}

TEST(DecreasableStep, UsesTrustRegionLimitWhenSmaller) {
  PrunAdagState s(Vector{{0.0, 0.5}}, 1, 0.01, {Version::V2});
  s.w_dec[1] = 2.0;
  const Vector step = decreasable_step(s, Vector{{1.0, 0.2}}, manual({0}, {1}, {1}), Vector{{0.0, 0.5}});
  EXPECT_DOUBLE_EQ(step[1], -0.25);
}

TEST(DecreasableStep, SignMismatchGivesZero) {
  PrunAdagState s(Vector{{0.0, 0.5}}, 1, 0.01, {Version::V2});
  const Vector step = decreasable_step(s, Vector{{1.0, -0.2}}, manual({0}, {1}, {}), Vector{{0.0, 0.5}});
  EXPECT_EQ(step[1], 0.0);
}

TEST(CommitWeights, OptimisableTakesTentativeDecreasableGrows) {
  PrunAdagState s(Vector{{0.7, 0.3}}, 1, 0.01);
  const Vector w_tilde{{0.9, 0.8}};
  commit_weights(s, w_tilde, manual({0}, {1}, {1}));
  EXPECT_EQ(s.w_opt[0], 0.9);
  EXPECT_EQ(s.w_dec[0], 0.1);
  EXPECT_EQ(s.w_opt[1], 0.1);
  EXPECT_NEAR(s.w_dec[1], 0.316228, 1e-6);
}

TEST(CommitWeights, AllOptimisableLeavesDecreasableWeights) {
  const auto problem = gen_least_squares(LsKind::A1, 5, 8, 1);
  PrunAdagState s(Vector::Ones(8), 8, 0.01);
  for (int k = 0; k < 50; ++k) prunadag_iterate(s, problem);
  EXPECT_EQ(s.w_dec, Vector::Constant(8, 0.1));
}

TEST(PrunAdagIterate, OneIterationOracle) {
  const FunctionProblem p(
      2, [](const Vector& x) { return Vector(Vector{{2.0 * x[0], 0.5 * x[1]}}); },
      [](const Vector& x) { return x[0] * x[0] + 0.25 * x[1] * x[1]; }, 2.0, 0.0);
  PrunAdagState s(Vector{{1.0, 1.0}}, 1, 0.01, {Version::V2});
  const IterationDetail d = prunadag_iterate(s, p);
  EXPECT_EQ(d.cls.relevant, IndexSet({0}));
  EXPECT_TRUE(d.cls.acceptable.empty());
  EXPECT_EQ(d.cls.shrinking, IndexSet({1}));
  EXPECT_NEAR(s.x[0], 0.001247661122155325, 1e-15);
  EXPECT_NEAR(s.x[1], 0.004962809790010864, 1e-15);
  EXPECT_NEAR(s.w_opt[0], 2.002498439450079, 1e-15);
  EXPECT_EQ(s.w_opt[1], 0.1);
  EXPECT_EQ(s.w_dec[0], 0.1);
  EXPECT_NEAR(s.w_dec[1], 1.004987562112089, 1e-15);
  EXPECT_EQ(s.k, 1u);
  EXPECT_EQ(d.record.card_relevant, 1u);
  EXPECT_EQ(d.record.card_acceptable, 0u);
  EXPECT_EQ(d.record.card_decreasable, 1u);
  EXPECT_NEAR(d.record.opt_linear, 4.0 / std::sqrt(4.01), 1e-12);
  EXPECT_NEAR(d.record.opt_quadratic, 4.0 / 4.01, 1e-12);
  EXPECT_NEAR(d.record.dec_quadratic, 1.0 / 1.01, 1e-12);
}

TEST(PrunAdagIterate, FullSupportMatchesAdagradBitwise) {
  const auto problem = gen_least_squares(LsKind::A1, 1, 2, 4);
  const Vector x0{{0.3, -0.7}};
  PrunAdagState s(x0, 2, 0.01, {Version::V1});
  AdagradState a(x0, 0.01);
  for (int k = 0; k < 20; ++k) {
    const Vector g = problem.gradient(s.x);
    const IterationDetail d = prunadag_step(s, g);
    EXPECT_TRUE(d.cls.decreasable.empty());
    auto [x, w] = adagrad_step(a.x, g, a.w);
    a.x = x;
    a.w = w;
    for (int i = 0; i < 2; ++i) ASSERT_EQ(std::bit_cast<std::uint64_t>(s.x[i]), std::bit_cast<std::uint64_t>(a.x[i]));
  }
}

TEST(PrunAdagIterate, StationaryPointIsFixed) {
  const auto p = half_square(3);
  PrunAdagState s(Vector::Zero(3), 1, 0.01, {Version::V3});
  const IterationDetail d = prunadag_iterate(s, p);
  EXPECT_EQ(s.x, Vector::Zero(3));
  EXPECT_EQ(d.cls.relevant, IndexSet({0}));
  EXPECT_EQ(d.step, Vector::Zero(3));
}

TEST(PrunAdagIterate, NonFiniteGradientDiverges) {
  const FunctionProblem p(
      2, [](const Vector&) { return Vector(Vector{{1.0, std::nan("")}}); }, [](const Vector&) { return 0.0; });
  PrunAdagState s(Vector::Ones(2), 1);
  EXPECT_THROW(prunadag_iterate(s, p), DivergedError);
}

TEST(PrunAdagIterate, DimensionMismatch) {
  const auto p = half_square(3);
  PrunAdagState s(Vector::Ones(2), 1);
  EXPECT_THROW(prunadag_iterate(s, p), ContractViolation);
}

TEST(Run, TerminatesOnGradientTolerance) {
  const auto p = half_square(5);
  PrunAdagState s(Vector::Constant(5, 1e-2), 2, 0.01, {Version::V3});
  const RunRecord rec = run(s, p, {1e-9, 10000});
  EXPECT_EQ(rec.termination, Termination::GradientTolerance);
  EXPECT_LE(rec.final_grad_norm, 1e-9);
  EXPECT_LT(rec.size(), 10000u);
  EXPECT_NO_THROW(rec.check_shape());
}

TEST(Run, RejectsZeroIterations) {
  const auto p = half_square(2);
  PrunAdagState s(Vector::Ones(2), 1);
  EXPECT_THROW(run(s, p, {1e-9, 0}), ContractViolation);
}

TEST(Run, StopsAtIterationLimit) {
  const auto problem = gen_least_squares(LsKind::A1, 10, 40, 2);
  PrunAdagState s(random_sparse_start(40, 4, 3), 4, 0.01, {Version::V2});
  const RunRecord rec = run(s, problem, {1e-300, 25});
  EXPECT_EQ(rec.termination, Termination::MaxIterations);
  EXPECT_EQ(rec.size(), 25u);
  EXPECT_EQ(rec.final_x, s.x);
}

TEST(Run, DivergenceCarriesPartialTrace) {
  int calls = 0;
  const FunctionProblem p(
      2,
      [&calls](const Vector& x) {
        return ++calls > 3 ? Vector(Vector::Constant(2, kInfinity)) : Vector(x);
      },
      [](const Vector& x) { return 0.5 * x.squaredNorm(); });
  PrunAdagState s(Vector::Ones(2), 1);
  try {
    run(s, p, {1e-12, 100});
    FAIL() << "expected divergence";
  } catch (const DivergedError& e) {
    ASSERT_NE(e.partial(), nullptr);
    EXPECT_EQ(e.partial()->size(), 3u);
    EXPECT_EQ(e.partial()->termination, Termination::Diverged);
  }
}

TEST(Version, ParseAndPrint) {
  EXPECT_EQ(parse_version("V3"), Version::V3);
  EXPECT_EQ(to_string(Version::V1), "V1");
  EXPECT_THROW(parse_version("V5"), ContractViolation);
}

}  // namespace
}  // namespace prunadag

#include "prunadag/problems.hpp"
#include "prunadag/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

namespace prunadag {
namespace {

Vector random_vector(Rng& rng, Index n) {
  Vector v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.normal();
  return v;
}

class LeastSquaresKinds : public ::testing::TestWithParam<LsKind> {};

TEST_P(LeastSquaresKinds, PlantedSolutionIsStationary) {
  const auto p = gen_least_squares(GetParam(), 20, 60, 11);
  ASSERT_TRUE(p.solution().has_value());
  EXPECT_LT(p.objective(*p.solution()), 1e-20);
  EXPECT_LT(p.gradient(*p.solution()).norm(), 1e-10);
}

TEST_P(LeastSquaresKinds, BitReproducible) {
  const auto a = gen_least_squares(GetParam(), 10, 30, 5);
  const auto b = gen_least_squares(GetParam(), 10, 30, 5);
  EXPECT_EQ(a.matrix(), b.matrix());
  EXPECT_EQ(a.rhs(), b.rhs());
  const auto c = gen_least_squares(GetParam(), 10, 30, 6);
  EXPECT_NE(a.matrix(), c.matrix());
}

TEST_P(LeastSquaresKinds, LipschitzHoldsOnRandomPairs) {
  const auto p = gen_least_squares(GetParam(), 20, 60, 2);
  Rng rng(17);
  for (int t = 0; t < 100; ++t) {
    const Vector x = random_vector(rng, 60);
    const Vector y = random_vector(rng, 60);
    ASSERT_LE((p.gradient(x) - p.gradient(y)).norm(), *p.lipschitz() * (x - y).norm() * (1 + 1e-12));
  }
}

INSTANTIATE_TEST_SUITE_P(All, LeastSquaresKinds,
                         ::testing::Values(LsKind::A1, LsKind::A2, LsKind::A3, LsKind::A4, LsKind::A5, LsKind::A6),
                         [](const auto& info) { return to_string(info.param); });

TEST(LeastSquares, OrthonormalRows) {
  for (LsKind k : {LsKind::A2, LsKind::A4}) {
    const auto p = gen_least_squares(k, 20, 200, 3);
    const Matrix gram = p.matrix() * p.matrix().transpose();
    EXPECT_LT((gram - Matrix::Identity(20, 20)).norm(), 1e-12);
    EXPECT_NEAR(*p.lipschitz(), 1.0, 1e-12);
  }
}

TEST(LeastSquares, A2AndA4AreIndependent) {
  EXPECT_NE(gen_least_squares(LsKind::A2, 5, 10, 1).matrix(), gen_least_squares(LsKind::A4, 5, 10, 1).matrix());
}

TEST(LeastSquares, A6RowsAreDctRows) {
  const Index n = 64;
  const auto p = gen_least_squares(LsKind::A6, 8, n, 9);
  const Matrix& A = p.matrix();
  for (Eigen::Index r = 0; r < A.rows(); ++r) {
    // Recover the frequency from the second entry ratio, then compare every entry.
    bool found = false;
    for (Index k = 0; k < n && !found; ++k) {
      const double ck = k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
      double err = 0.0;
      for (Index j = 0; j < n; ++j) {
        err = std::max(err, std::abs(A(r, static_cast<Eigen::Index>(j)) -
                                     ck * std::cos(std::numbers::pi * static_cast<double>((2 * j + 1) * k) / (2.0 * n))));
      }
      found = err < 1e-14;
    }
    EXPECT_TRUE(found) << "row " << r;
  }
}

TEST(LeastSquares, A5IsBinary) {
  const auto p = gen_least_squares(LsKind::A5, 10, 40, 4);
  EXPECT_TRUE((p.matrix().array() == 0.0 || p.matrix().array() == 1.0).all());
}

TEST(LeastSquares, RejectsBadShapes) {
  EXPECT_THROW(gen_least_squares(LsKind::A1, 0, 10, 1), ContractViolation);
  EXPECT_THROW(gen_least_squares(LsKind::A1, 10, 10, 1), ContractViolation);
  EXPECT_THROW(LeastSquaresProblem(Matrix::Ones(2, 3), Vector::Ones(3)), ContractViolation);
  EXPECT_THROW(LeastSquaresProblem(Matrix(), Vector()), ContractViolation);
}

TEST(LeastSquares, KindNames) {
  EXPECT_EQ(parse_ls_kind("A6"), LsKind::A6);
  EXPECT_EQ(to_string(LsKind::A3), "A3");
  EXPECT_THROW(parse_ls_kind("A7"), ContractViolation);
}

TEST(Dct, IsOrthonormal) {
  const Matrix C = dct2_matrix(32);
  EXPECT_LT((C * C.transpose() - Matrix::Identity(32, 32)).norm(), 1e-12);
}

TEST(SparseRecovery, PlantedSupport) {
  const auto p = gen_sparse_recovery(30, 120, 6, 0.0, 2);
  EXPECT_EQ((p.solution()->array() != 0.0).count(), 6);
  EXPECT_LT(p.gradient(*p.solution()).norm(), 1e-12);
  const auto noisy = gen_sparse_recovery(30, 120, 6, 0.1, 2);
  EXPECT_GT(noisy.objective(*noisy.solution()), 0.0);
  EXPECT_THROW(gen_sparse_recovery(30, 120, 0, 0.0, 2), ContractViolation);
  EXPECT_THROW(gen_sparse_recovery(30, 120, 3, -1.0, 2), ContractViolation);
}

TEST(Logistic, RejectsBadLabels) {
  EXPECT_THROW(LogisticProblem(Matrix::Ones(2, 2), Vector{{1.0, 0.0}}), ContractViolation);
  EXPECT_THROW(LogisticProblem(Matrix::Ones(2, 2), Vector{{1.0}}), ContractViolation);
}

TEST(Logistic, ObjectiveAtZeroIsLog2) {
  const LogisticProblem p(Matrix::Ones(3, 2), Vector{{1.0, -1.0, 1.0}});
  EXPECT_NEAR(p.objective(Vector::Zero(2)), std::log(2.0), 1e-15);
}

TEST(Logistic, StableForLargeMargins) {
  const LogisticProblem p(Matrix::Ones(2, 1), Vector{{1.0, -1.0}});
  const Vector x{{1e4}};
  EXPECT_TRUE(std::isfinite(p.objective(x)));
  EXPECT_TRUE(p.gradient(x).allFinite());
  EXPECT_NEAR(p.objective(x), 5e3, 1e-9);
}

TEST(Logistic, LipschitzBoundHolds) {
  Rng rng(4);
  Matrix a(40, 5);
  Vector y(40);
  for (Eigen::Index i = 0; i < 40; ++i) {
    for (Eigen::Index j = 0; j < 5; ++j) a(i, j) = rng.normal();
    y[i] = rng.uniform() < 0.5 ? 1.0 : -1.0;
  }
  const LogisticProblem p(a, y);
  for (int t = 0; t < 100; ++t) {
    const Vector u = random_vector(rng, 5);
    const Vector v = random_vector(rng, 5);
    ASSERT_LE((p.gradient(u) - p.gradient(v)).norm(), *p.lipschitz() * (u - v).norm());
  }
}

TEST(ClassifyAccuracy, SeparatingVector) {
  const LogisticProblem p(Matrix{{1.0, 0.0}, {-2.0, 1.0}, {3.0, 5.0}}, Vector{{1.0, -1.0, 1.0}});
  EXPECT_EQ(classify_accuracy(Vector{{1.0, 0.0}}, p), 1.0);
}

TEST(ClassifyAccuracy, ZeroPredictsPositive) {
  const LogisticProblem p(Matrix::Ones(4, 2), Vector{{1.0, -1.0, 1.0, 1.0}});
  EXPECT_EQ(classify_accuracy(Vector::Zero(2), p), 0.75);
}

TEST(ClassifyAccuracy, RandomLabelsNearHalf) {
  Rng rng(8);
  const Eigen::Index N = 20000;
  Matrix a(N, 3);
  Vector y(N);
  for (Eigen::Index i = 0; i < N; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) a(i, j) = rng.normal();
    y[i] = rng.uniform() < 0.5 ? 1.0 : -1.0;
  }
  EXPECT_NEAR(classify_accuracy(random_vector(rng, 3), LogisticProblem(a, y)), 0.5, 0.02);
}

TEST(ClassifyAccuracy, DimensionMismatch) {
  const LogisticProblem p(Matrix::Ones(2, 2), Vector{{1.0, -1.0}});
  EXPECT_THROW(classify_accuracy(Vector::Zero(3), p), ContractViolation);
}

TEST(SparseCoding, GradientAndLipschitz) {
  const Matrix D = dct2_matrix(16).leftCols(10);
  const Vector y = Vector::LinSpaced(16, -1.0, 1.0);
  const SparseCodingProblem p(D, y);
  EXPECT_NEAR(*p.lipschitz(), 2.0, 1e-12);
  const Vector x = Vector::Ones(10);
  EXPECT_TRUE(p.gradient(x).isApprox(2.0 * D.transpose() * (D * x - y)));
  EXPECT_THROW(SparseCodingProblem(D, Vector::Ones(3)), ContractViolation);
}

TEST(RandomSparseStart, ExactSupportAndUnitNorm) {
  const Vector x = random_sparse_start(100, 10, 3);
  EXPECT_EQ((x.array() != 0.0).count(), 10);
  EXPECT_NEAR(x.norm(), 1.0, 1e-15);
  EXPECT_EQ(x, random_sparse_start(100, 10, 3));
  EXPECT_THROW(random_sparse_start(5, 0, 1), ContractViolation);
  EXPECT_THROW(random_sparse_start(5, 6, 1), ContractViolation);
}

}  // namespace
}  // namespace prunadag

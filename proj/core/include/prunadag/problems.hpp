#pragma once

#include "prunadag/core.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace prunadag {

/// Random under-determined least-squares families.
///
///   A1  i.i.d. standard normal entries
///   A2  orthonormal rows: transposed Q factor of a Gaussian n x m matrix
///   A3  Q G, with Q an m x m orthogonal factor and G Gaussian m x n
///   A4  orthonormal rows, drawn from a stream independent of A2's
///   A5  i.i.d. Bernoulli(1/2) entries in {0, 1}
///   A6  m distinct rows of the orthonormal n x n DCT-II matrix
enum class LsKind { A1, A2, A3, A4, A5, A6 };

LsKind parse_ls_kind(std::string_view text);
std::string to_string(LsKind kind);

/// f(x) = 1/2 ||Ax - b||^2, g(x) = A^T (Ax - b), L = lambda_max(A^T A).
class LeastSquaresProblem final : public Problem {
 public:
  LeastSquaresProblem(Matrix A, Vector b, std::optional<Vector> solution = std::nullopt);

  [[nodiscard]] Index dim() const override { return static_cast<Index>(A_.cols()); }
  [[nodiscard]] Vector gradient(const Vector& x) const override;
  [[nodiscard]] double objective(const Vector& x) const override;
  [[nodiscard]] std::optional<double> lipschitz() const override { return lipschitz_; }
  [[nodiscard]] std::optional<double> lower_bound() const override { return 0.0; }

  [[nodiscard]] const Matrix& matrix() const noexcept { return A_; }
  [[nodiscard]] const Vector& rhs() const noexcept { return b_; }
  /// The planted x* when the instance was generated with b = A x*.
  [[nodiscard]] const std::optional<Vector>& solution() const noexcept { return solution_; }

 private:
  Matrix A_;
  Vector b_;
  double lipschitz_;
  std::optional<Vector> solution_;
};

/// Draw order: the matrix (row-major), then x* ~ N(0, I_n); b = A x*.
/// Requires 1 <= m < n.
LeastSquaresProblem gen_least_squares(LsKind kind, Index m, Index n, std::uint64_t seed);

/// Synthetic sparse-recovery stand-in for a dictionary test set: A holds m
/// random rows of the orthonormal DCT-II matrix, x* has `nonzeros` Gaussian
/// entries at random positions, and b = A x* + noise * N(0, I_m).
LeastSquaresProblem gen_sparse_recovery(Index m, Index n, Index nonzeros, double noise,
                                        std::uint64_t seed);

/// Orthonormal DCT-II matrix: C(k, j) = c_k cos(pi (2j + 1) k / (2n)),
/// c_0 = sqrt(1/n), c_k = sqrt(2/n).
Matrix dct2_matrix(Index n);

/// Largest eigenvalue of M^T M, computed on the smaller Gram matrix.
double largest_gram_eigenvalue(const Matrix& M);

/// Averaged logistic loss f(x) = (1/N) sum log(1 + exp(-y_i a_i^T x)) with
/// labels in {-1, +1}. Rows of `samples` are the a_i.
class LogisticProblem final : public Problem {
 public:
  LogisticProblem(Matrix samples, Vector labels);

  [[nodiscard]] Index dim() const override { return static_cast<Index>(samples_.cols()); }
  [[nodiscard]] Vector gradient(const Vector& x) const override;
  [[nodiscard]] double objective(const Vector& x) const override;
  /// Upper bound (1/(4N)) sum ||a_i||^2.
  [[nodiscard]] std::optional<double> lipschitz() const override { return lipschitz_; }
  [[nodiscard]] std::optional<double> lower_bound() const override { return 0.0; }

  [[nodiscard]] const Matrix& samples() const noexcept { return samples_; }
  [[nodiscard]] const Vector& labels() const noexcept { return labels_; }
  [[nodiscard]] Index sample_count() const noexcept { return static_cast<Index>(samples_.rows()); }

 private:
  Matrix samples_;
  Vector labels_;
  double lipschitz_;
};

/// Fraction of samples with sign(a_i^T x) == y_i, where a score of exactly 0
/// predicts +1.
double classify_accuracy(const Vector& x, const LogisticProblem& problem);

/// Sparse-coding step without the l0 constraint:
/// f(x) = ||y - D x||^2, g(x) = 2 D^T (D x - y), L = 2 lambda_max(D^T D).
class SparseCodingProblem final : public Problem {
 public:
  SparseCodingProblem(Matrix dictionary, Vector signal);

  [[nodiscard]] Index dim() const override { return static_cast<Index>(D_.cols()); }
  [[nodiscard]] Vector gradient(const Vector& x) const override;
  [[nodiscard]] double objective(const Vector& x) const override;
  [[nodiscard]] std::optional<double> lipschitz() const override { return lipschitz_; }
  [[nodiscard]] std::optional<double> lower_bound() const override { return 0.0; }

  [[nodiscard]] const Matrix& dictionary() const noexcept { return D_; }
  [[nodiscard]] const Vector& signal() const noexcept { return y_; }

 private:
  Matrix D_;
  Vector y_;
  double lipschitz_;
};

/// Normalized random starting point with exactly T nonzeros: the first T
/// entries of a seeded permutation receive N(0,1) draws, then the vector is
/// scaled to unit Euclidean norm.
Vector random_sparse_start(Index n, Index T, std::uint64_t seed);

}  // namespace prunadag

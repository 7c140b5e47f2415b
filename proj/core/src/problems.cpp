#include "prunadag/problems.hpp"

#include "prunadag/rng.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <numbers>

namespace prunadag {
namespace {

Matrix gaussian(Index rows, Index cols, Rng& rng) {
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = rng.normal();
  }
  return m;
}

// Thin Q factor (rows x cols, cols <= rows) with sign fixed so diag(R) > 0.
Matrix orthonormal_columns(const Matrix& G) {
  Eigen::HouseholderQR<Matrix> qr(G);
  Matrix Q = qr.householderQ() * Matrix::Identity(G.rows(), G.cols());
  const Matrix R = qr.matrixQR().topRows(G.cols()).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < G.cols(); ++j) {
    if (R(j, j) < 0.0) Q.col(j) *= -1.0;
  }
  return Q;
}

std::vector<Index> sorted_sample(Index n, Index count, Rng& rng) {
  std::vector<std::size_t> perm = rng.permutation(n);
  std::vector<Index> rows(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(count));
  std::sort(rows.begin(), rows.end());
  return rows;
}

Matrix dct_rows(Index n, const std::vector<Index>& rows) {
  const Matrix C = dct2_matrix(n);
  Matrix A(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    A.row(static_cast<Eigen::Index>(r)) = C.row(static_cast<Eigen::Index>(rows[r]));
  }
  return A;
}

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

// 1 / (1 + exp(-z)) without overflow.
double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

LsKind parse_ls_kind(std::string_view text) {
  if (text == "A1") return LsKind::A1;
  if (text == "A2") return LsKind::A2;
  if (text == "A3") return LsKind::A3;
  if (text == "A4") return LsKind::A4;
  if (text == "A5") return LsKind::A5;
  if (text == "A6") return LsKind::A6;
  throw ContractViolation("unknown least-squares kind '" + std::string(text) + "'");
}

std::string to_string(LsKind kind) {
  return "A" + std::to_string(static_cast<int>(kind) + 1);
}

double largest_gram_eigenvalue(const Matrix& M) {
  const Matrix gram = M.rows() <= M.cols() ? Matrix(M * M.transpose()) : Matrix(M.transpose() * M);
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
  return std::max(0.0, es.eigenvalues().maxCoeff());
}

Matrix dct2_matrix(Index n) {
  const auto N = static_cast<Eigen::Index>(n);
  Matrix C(N, N);
  const double c0 = std::sqrt(1.0 / static_cast<double>(n));
  const double ck = std::sqrt(2.0 / static_cast<double>(n));
  for (Eigen::Index k = 0; k < N; ++k) {
    for (Eigen::Index j = 0; j < N; ++j) {
      C(k, j) = (k == 0 ? c0 : ck) *
                std::cos(std::numbers::pi * static_cast<double>((2 * j + 1) * k) /
                         (2.0 * static_cast<double>(n)));
    }
  }
  return C;
}

LeastSquaresProblem::LeastSquaresProblem(Matrix A, Vector b, std::optional<Vector> solution)
    : A_(std::move(A)), b_(std::move(b)), solution_(std::move(solution)) {
  if (A_.rows() == 0 || A_.cols() == 0) throw ContractViolation("LeastSquaresProblem: empty matrix");
  if (b_.size() != A_.rows()) throw ContractViolation("LeastSquaresProblem: b has wrong length");
  if (solution_ && solution_->size() != A_.cols()) {
    throw ContractViolation("LeastSquaresProblem: solution has wrong length");
  }
  lipschitz_ = largest_gram_eigenvalue(A_);
}

Vector LeastSquaresProblem::gradient(const Vector& x) const {
  return A_.transpose() * (A_ * x - b_);
}

double LeastSquaresProblem::objective(const Vector& x) const {
  return 0.5 * (A_ * x - b_).squaredNorm();
}

LeastSquaresProblem gen_least_squares(LsKind kind, Index m, Index n, std::uint64_t seed) {
  if (m < 1 || m >= n) throw ContractViolation("gen_least_squares: requires 1 <= m < n");
  // A2 and A4 share a construction; a per-kind stream keeps them independent.
  Rng rng(derive_seed(seed, 0x4c53, static_cast<std::uint64_t>(kind)));
  Matrix A;
  switch (kind) {
    case LsKind::A1:
      A = gaussian(m, n, rng);
      break;
    case LsKind::A2:
    case LsKind::A4:
      A = orthonormal_columns(gaussian(n, m, rng)).transpose();
      break;
    case LsKind::A3: {
      const Matrix Q = orthonormal_columns(gaussian(m, m, rng));
      A = Q * gaussian(m, n, rng);
      break;
    }
    case LsKind::A5: {
      A.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
      for (Eigen::Index r = 0; r < A.rows(); ++r) {
        for (Eigen::Index c = 0; c < A.cols(); ++c) A(r, c) = (rng.next_u64() >> 63) ? 1.0 : 0.0;
      }
      break;
    }
    case LsKind::A6:
      A = dct_rows(n, sorted_sample(n, m, rng));
      break;
  }
  Vector xstar(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < xstar.size(); ++i) xstar[i] = rng.normal();
  Vector b = A * xstar;
  return LeastSquaresProblem(std::move(A), std::move(b), std::move(xstar));
}

LeastSquaresProblem gen_sparse_recovery(Index m, Index n, Index nonzeros, double noise,
                                        std::uint64_t seed) {
  if (m < 1 || m >= n) throw ContractViolation("gen_sparse_recovery: requires 1 <= m < n");
  if (nonzeros < 1 || nonzeros > n) throw ContractViolation("gen_sparse_recovery: bad nonzeros");
  if (!(noise >= 0.0)) throw ContractViolation("gen_sparse_recovery: noise must be >= 0");
  Rng rng(derive_seed(seed, 0x5350, 0));
  Matrix A = dct_rows(n, sorted_sample(n, m, rng));
  Vector xstar = Vector::Zero(static_cast<Eigen::Index>(n));
  for (Index i : sorted_sample(n, nonzeros, rng)) xstar[static_cast<Eigen::Index>(i)] = rng.normal();
  Vector b = A * xstar;
  if (noise > 0.0) {
    for (Eigen::Index i = 0; i < b.size(); ++i) b[i] += noise * rng.normal();
  }
  return LeastSquaresProblem(std::move(A), std::move(b), std::move(xstar));
}

LogisticProblem::LogisticProblem(Matrix samples, Vector labels)
    : samples_(std::move(samples)), labels_(std::move(labels)) {
  if (samples_.rows() == 0 || samples_.cols() == 0) {
    throw ContractViolation("LogisticProblem: empty sample matrix");
  }
  if (labels_.size() != samples_.rows()) {
    throw ContractViolation("LogisticProblem: label count differs from sample count");
  }
  for (Eigen::Index i = 0; i < labels_.size(); ++i) {
    if (labels_[i] != 1.0 && labels_[i] != -1.0) {
      throw ContractViolation("LogisticProblem: labels must be -1 or +1");
    }
  }
  lipschitz_ = samples_.squaredNorm() / (4.0 * static_cast<double>(samples_.rows()));
}

Vector LogisticProblem::gradient(const Vector& x) const {
  const Vector margins = (samples_ * x).cwiseProduct(labels_);
  Vector weights(margins.size());
  for (Eigen::Index i = 0; i < margins.size(); ++i) {
    weights[i] = -labels_[i] * logistic(-margins[i]);
  }
  return samples_.transpose() * weights / static_cast<double>(samples_.rows());
}

double LogisticProblem::objective(const Vector& x) const {
  const Vector margins = (samples_ * x).cwiseProduct(labels_);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < margins.size(); ++i) sum += softplus(-margins[i]);
  return sum / static_cast<double>(samples_.rows());
}

double classify_accuracy(const Vector& x, const LogisticProblem& problem) {
  if (static_cast<Index>(x.size()) != problem.dim()) {
    throw ContractViolation("classify_accuracy: dimension mismatch");
  }
  const Vector scores = problem.samples() * x;
  std::size_t hits = 0;
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    const double predicted = scores[i] >= 0.0 ? 1.0 : -1.0;
    if (predicted == problem.labels()[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(scores.size());
}

SparseCodingProblem::SparseCodingProblem(Matrix dictionary, Vector signal)
    : D_(std::move(dictionary)), y_(std::move(signal)) {
  if (D_.rows() == 0 || D_.cols() == 0) throw ContractViolation("SparseCodingProblem: empty dictionary");
  if (y_.size() != D_.rows()) throw ContractViolation("SparseCodingProblem: signal has wrong length");
  lipschitz_ = 2.0 * largest_gram_eigenvalue(D_);
}

Vector SparseCodingProblem::gradient(const Vector& x) const {
  return 2.0 * (D_.transpose() * (D_ * x - y_));
}

double SparseCodingProblem::objective(const Vector& x) const { return (y_ - D_ * x).squaredNorm(); }

Vector random_sparse_start(Index n, Index T, std::uint64_t seed) {
  if (T < 1 || T > n) throw ContractViolation("random_sparse_start: requires 1 <= T <= n");
  Rng rng(seed);
  const std::vector<std::size_t> perm = rng.permutation(n);
  Vector x = Vector::Zero(static_cast<Eigen::Index>(n));
  for (Index j = 0; j < T; ++j) x[static_cast<Eigen::Index>(perm[j])] = rng.normal();
  const double norm = x.norm();
  if (norm > 0.0) x /= norm;
  return x;
}

}  // namespace prunadag

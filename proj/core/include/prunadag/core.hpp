#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace prunadag {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = std::size_t;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// A caller broke an operation's precondition.
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An argument lies outside the mathematical domain of a function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Sorted set of distinct indices into a vector of length n.
class IndexSet {
 public:
  IndexSet() = default;
  /// Takes ownership of `indices`; throws ContractViolation unless strictly
  /// increasing.
  explicit IndexSet(std::vector<Index> indices);
  IndexSet(std::initializer_list<Index> indices);

  static IndexSet all(Index n);
  /// Sorts and deduplicates.
  static IndexSet from_unsorted(std::vector<Index> indices);

  [[nodiscard]] std::size_t size() const noexcept { return indices_.size(); }
  [[nodiscard]] bool empty() const noexcept { return indices_.empty(); }
  [[nodiscard]] bool contains(Index i) const noexcept;
  [[nodiscard]] Index operator[](std::size_t pos) const { return indices_[pos]; }
  [[nodiscard]] auto begin() const noexcept { return indices_.begin(); }
  [[nodiscard]] auto end() const noexcept { return indices_.end(); }
  [[nodiscard]] const std::vector<Index>& indices() const noexcept { return indices_; }

  /// Largest index + 1, or 0 when empty.
  [[nodiscard]] Index bound() const noexcept {
    return indices_.empty() ? 0 : indices_.back() + 1;
  }

  [[nodiscard]] IndexSet complement(Index n) const;
  [[nodiscard]] IndexSet unite(const IndexSet& other) const;
  [[nodiscard]] IndexSet intersect(const IndexSet& other) const;
  [[nodiscard]] bool is_subset_of(const IndexSet& other) const;
  [[nodiscard]] bool is_disjoint_from(const IndexSet& other) const;

  friend bool operator==(const IndexSet&, const IndexSet&) = default;

 private:
  std::vector<Index> indices_;
};

/// Euclidean norm of v restricted to the entries in s (0 for an empty set).
double masked_norm(const Vector& v, const IndexSet& s);

/// sign(0) == 0, so zero never matches a nonzero sign.
inline int sign(double v) noexcept { return (v > 0.0) - (v < 0.0); }

inline bool all_finite(const Vector& v) { return v.allFinite(); }

/// Black-box smooth objective. Implementations must be safe to call
/// concurrently from several threads (all methods are const and stateless).
class Problem {
 public:
  virtual ~Problem() = default;

  [[nodiscard]] virtual Index dim() const = 0;
  [[nodiscard]] virtual Vector gradient(const Vector& x) const = 0;
  /// Used for metrics and verification only, never inside an optimizer step.
  [[nodiscard]] virtual double objective(const Vector& x) const = 0;
  /// Lipschitz constant of the gradient, when known.
  [[nodiscard]] virtual std::optional<double> lipschitz() const { return std::nullopt; }
  /// A known lower bound on the objective.
  [[nodiscard]] virtual std::optional<double> lower_bound() const { return std::nullopt; }
};

/// Problem assembled from callables; convenient for toy objectives.
class FunctionProblem final : public Problem {
 public:
  using GradientFn = std::function<Vector(const Vector&)>;
  using ObjectiveFn = std::function<double(const Vector&)>;

  FunctionProblem(Index dim, GradientFn gradient, ObjectiveFn objective,
                  std::optional<double> lipschitz = std::nullopt,
                  std::optional<double> lower_bound = std::nullopt);

  [[nodiscard]] Index dim() const override { return dim_; }
  [[nodiscard]] Vector gradient(const Vector& x) const override;
  [[nodiscard]] double objective(const Vector& x) const override { return objective_(x); }
  [[nodiscard]] std::optional<double> lipschitz() const override { return lipschitz_; }
  [[nodiscard]] std::optional<double> lower_bound() const override { return lower_bound_; }

 private:
  Index dim_;
  GradientFn gradient_;
  ObjectiveFn objective_;
  std::optional<double> lipschitz_;
  std::optional<double> lower_bound_;
};

enum class Termination { GradientTolerance, MaxIterations, Diverged };

std::string to_string(Termination t);

/// One row of a run trace. Everything refers to the iterate x_k at which the
/// gradient g_k was evaluated, before the step is applied.
struct IterationRecord {
  double grad_norm = 0.0;
  double grad_norm_opt = 0.0;  // ||g_k||_{O_k}
  double objective = std::numeric_limits<double>::quiet_NaN();
  std::size_t below_count = 0;
  std::size_t card_relevant = 0;
  std::size_t card_acceptable = 0;
  std::size_t card_decreasable = 0;
  // Right-hand-side pieces of the per-iteration descent inequality:
  //   sum_O g^2/w^O, sum_O g^2/(w^O)^2, sum_D x^2/(w^D)^2.
  double opt_linear = 0.0;
  double opt_quadratic = 0.0;
  double dec_quadratic = 0.0;
  double max_abs_x = 0.0;
};

/// Per-iteration trace of one optimizer run, stored column-wise.
struct RunRecord {
  std::vector<double> grad_norm;
  std::vector<double> grad_norm_opt;
  std::vector<double> objective;
  std::vector<std::size_t> below_count;
  std::vector<std::size_t> card_relevant;
  std::vector<std::size_t> card_acceptable;
  std::vector<std::size_t> card_decreasable;
  std::vector<double> opt_linear;
  std::vector<double> opt_quadratic;
  std::vector<double> dec_quadratic;
  std::vector<double> max_abs_x;

  Vector final_x;
  double final_grad_norm = std::numeric_limits<double>::quiet_NaN();
  double final_objective = std::numeric_limits<double>::quiet_NaN();
  Termination termination = Termination::MaxIterations;
  std::string message;

  [[nodiscard]] std::size_t size() const noexcept { return grad_norm.size(); }
  void push(const IterationRecord& r);
  [[nodiscard]] IterationRecord at(std::size_t k) const;
  /// Throws std::logic_error if column lengths disagree.
  void check_shape() const;
};

/// The gradient or iterate became non-finite. Carries the trace up to the
/// failing iteration.
class DivergedError : public std::runtime_error {
 public:
  DivergedError(const std::string& what, std::shared_ptr<const RunRecord> partial = nullptr)
      : std::runtime_error(what), partial_(std::move(partial)) {}

  [[nodiscard]] const std::shared_ptr<const RunRecord>& partial() const noexcept { return partial_; }

 private:
  std::shared_ptr<const RunRecord> partial_;
};

struct StopCriteria {
  double grad_tol = 1e-9;
  std::size_t max_iters = 10000;

  void validate() const;
};

struct TraceOptions {
  double below_delta = 1e-3;
  bool record_objective = true;
};

std::size_t count_below(const Vector& x, double delta);

namespace detail {

// Shared outer loop. `Stepper` exposes `const Vector& x() const` and
// `void step(const Problem&, const Vector& g, IterationRecord&)`; the latter
// fills the optimizer-specific fields and advances the iterate.
template <class Stepper>
RunRecord drive(Stepper& stepper, const Problem& problem, const StopCriteria& stop,
                const TraceOptions& trace) {
  stop.validate();
  RunRecord record;
  const auto fail = [&](const std::string& why) {
    record.termination = Termination::Diverged;
    record.message = why;
    record.final_x = stepper.x();
    throw DivergedError(why, std::make_shared<const RunRecord>(record));
  };

  for (std::size_t k = 0; k < stop.max_iters; ++k) {
    const Vector& x = stepper.x();
    if (!all_finite(x)) fail("non-finite iterate at k=" + std::to_string(k));
    Vector g = problem.gradient(x);
    if (!all_finite(g)) fail("non-finite gradient at k=" + std::to_string(k));
    const double gnorm = g.norm();
    if (gnorm <= stop.grad_tol) {
      record.termination = Termination::GradientTolerance;
      record.final_grad_norm = gnorm;
      break;
    }
    IterationRecord row;
    row.grad_norm = gnorm;
    row.objective = trace.record_objective ? problem.objective(x)
                                           : std::numeric_limits<double>::quiet_NaN();
    row.below_count = count_below(x, trace.below_delta);
    row.max_abs_x = x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff();
    stepper.step(problem, g, row);
    record.push(row);
  }

  record.final_x = stepper.x();
  if (!all_finite(record.final_x)) fail("non-finite final iterate");
  if (record.termination != Termination::GradientTolerance) {
    const Vector g = problem.gradient(record.final_x);
    if (!all_finite(g)) fail("non-finite gradient at final iterate");
    record.final_grad_norm = g.norm();
    if (record.final_grad_norm <= stop.grad_tol) record.termination = Termination::GradientTolerance;
  }
  if (trace.record_objective) record.final_objective = problem.objective(record.final_x);
  return record;
}

}  // namespace detail
}  // namespace prunadag

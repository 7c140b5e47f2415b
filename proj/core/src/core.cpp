#include "prunadag/core.hpp"

#include <algorithm>
#include <iterator>

namespace prunadag {

IndexSet::IndexSet(std::vector<Index> indices) : indices_(std::move(indices)) {
  for (std::size_t i = 1; i < indices_.size(); ++i) {
    if (indices_[i - 1] >= indices_[i]) {
      throw ContractViolation("IndexSet: indices must be strictly increasing");
    }
  }
}

IndexSet::IndexSet(std::initializer_list<Index> indices)
    : IndexSet(std::vector<Index>(indices)) {}

IndexSet IndexSet::all(Index n) {
  std::vector<Index> v(n);
  for (Index i = 0; i < n; ++i) v[i] = i;
  return IndexSet(std::move(v));
}

IndexSet IndexSet::from_unsorted(std::vector<Index> indices) {
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  return IndexSet(std::move(indices));
}

bool IndexSet::contains(Index i) const noexcept {
  return std::binary_search(indices_.begin(), indices_.end(), i);
}

IndexSet IndexSet::complement(Index n) const {
  if (bound() > n) throw ContractViolation("IndexSet::complement: index out of range");
  std::vector<Index> out;
  out.reserve(n - indices_.size());
  auto it = indices_.begin();
  for (Index i = 0; i < n; ++i) {
    if (it != indices_.end() && *it == i) {
      ++it;
    } else {
      out.push_back(i);
    }
  }
  return IndexSet(std::move(out));
}

IndexSet IndexSet::unite(const IndexSet& other) const {
  std::vector<Index> out;
  out.reserve(indices_.size() + other.indices_.size());
  std::set_union(indices_.begin(), indices_.end(), other.indices_.begin(), other.indices_.end(),
                 std::back_inserter(out));
  return IndexSet(std::move(out));
}

IndexSet IndexSet::intersect(const IndexSet& other) const {
  std::vector<Index> out;
  std::set_intersection(indices_.begin(), indices_.end(), other.indices_.begin(),
                        other.indices_.end(), std::back_inserter(out));
  return IndexSet(std::move(out));
}

bool IndexSet::is_subset_of(const IndexSet& other) const {
  return std::includes(other.indices_.begin(), other.indices_.end(), indices_.begin(),
                       indices_.end());
}

bool IndexSet::is_disjoint_from(const IndexSet& other) const { return intersect(other).empty(); }

double masked_norm(const Vector& v, const IndexSet& s) {
  if (s.bound() > static_cast<Index>(v.size())) {
    throw ContractViolation("masked_norm: index out of range");
  }
  double sum = 0.0;
  for (Index i : s) sum += v[static_cast<Eigen::Index>(i)] * v[static_cast<Eigen::Index>(i)];
  return std::sqrt(sum);
}

FunctionProblem::FunctionProblem(Index dim, GradientFn gradient, ObjectiveFn objective,
                                 std::optional<double> lipschitz,
                                 std::optional<double> lower_bound)
    : dim_(dim),
      gradient_(std::move(gradient)),
      objective_(std::move(objective)),
      lipschitz_(lipschitz),
      lower_bound_(lower_bound) {
  if (dim_ == 0) throw ContractViolation("FunctionProblem: dim must be positive");
  if (lipschitz_ && !(*lipschitz_ >= 0.0)) {
    throw ContractViolation("FunctionProblem: Lipschitz constant must be nonnegative");
  }
}

Vector FunctionProblem::gradient(const Vector& x) const {
  Vector g = gradient_(x);
  if (static_cast<Index>(g.size()) != dim_) {
    throw std::logic_error("FunctionProblem: gradient oracle returned wrong length");
  }
  return g;
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::GradientTolerance:
      return "grad_tol";
    case Termination::MaxIterations:
      return "max_iters";
    case Termination::Diverged:
      return "diverged";
  }
  return "unknown";
}

void RunRecord::push(const IterationRecord& r) {
  grad_norm.push_back(r.grad_norm);
  grad_norm_opt.push_back(r.grad_norm_opt);
  objective.push_back(r.objective);
  below_count.push_back(r.below_count);
  card_relevant.push_back(r.card_relevant);
  card_acceptable.push_back(r.card_acceptable);
  card_decreasable.push_back(r.card_decreasable);
  opt_linear.push_back(r.opt_linear);
  opt_quadratic.push_back(r.opt_quadratic);
  dec_quadratic.push_back(r.dec_quadratic);
  max_abs_x.push_back(r.max_abs_x);
}

IterationRecord RunRecord::at(std::size_t k) const {
  IterationRecord r;
  r.grad_norm = grad_norm.at(k);
  r.grad_norm_opt = grad_norm_opt.at(k);
  r.objective = objective.at(k);
  r.below_count = below_count.at(k);
  r.card_relevant = card_relevant.at(k);
  r.card_acceptable = card_acceptable.at(k);
  r.card_decreasable = card_decreasable.at(k);
  r.opt_linear = opt_linear.at(k);
  r.opt_quadratic = opt_quadratic.at(k);
  r.dec_quadratic = dec_quadratic.at(k);
  r.max_abs_x = max_abs_x.at(k);
  return r;
}

void RunRecord::check_shape() const {
  const std::size_t n = grad_norm.size();
  const bool ok = grad_norm_opt.size() == n && objective.size() == n && below_count.size() == n &&
                  card_relevant.size() == n && card_acceptable.size() == n &&
                  card_decreasable.size() == n && opt_linear.size() == n &&
                  opt_quadratic.size() == n && dec_quadratic.size() == n &&
                  max_abs_x.size() == n;
  if (!ok) throw std::logic_error("RunRecord: column lengths differ");
}

void StopCriteria::validate() const {
  if (!(grad_tol > 0.0)) throw ContractViolation("StopCriteria: grad_tol must be positive");
  if (max_iters < 1) throw ContractViolation("StopCriteria: max_iters must be at least 1");
}

std::size_t count_below(const Vector& x, double delta) {
  return static_cast<std::size_t>((x.array().abs() < delta).count());
}

}  // namespace prunadag

#include "prunadag/pruning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace prunadag {

Vector prune_threshold(const Vector& x, double delta) {
  if (!(delta >= 0.0)) throw ContractViolation("prune_threshold: delta must be >= 0");
  Vector out = x;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    if (std::abs(out[i]) < delta) out[i] = 0.0;
  }
  return out;
}

SparsityPrune prune_to_sparsity(const Vector& x, double sigma) {
  if (!(sigma >= 0.0 && sigma <= 1.0)) throw ContractViolation("prune_to_sparsity: sigma must lie in [0, 1]");
  const auto n = static_cast<std::size_t>(x.size());
  const auto count = std::min(n, static_cast<std::size_t>(std::floor(sigma * static_cast<double>(n))));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(x[static_cast<Eigen::Index>(a)]) < std::abs(x[static_cast<Eigen::Index>(b)]);
  });
  SparsityPrune out{x, 0.0};
  for (std::size_t j = 0; j < count; ++j) {
    const auto i = static_cast<Eigen::Index>(order[j]);
    out.implied_delta = std::max(out.implied_delta, std::abs(x[i]));
    out.pruned[i] = 0.0;
  }
  return out;
}

Robustness robustness(const Vector& x, const Vector& x_bar, const Problem& problem) {
  if (x.size() != x_bar.size() || static_cast<Index>(x.size()) != problem.dim()) {
    throw ContractViolation("robustness: dimension mismatch");
  }
  const Vector g = problem.gradient(x_bar);
  const double f_bar = problem.objective(x_bar);
  const double f = problem.objective(x);
  if (!all_finite(g) || !std::isfinite(f_bar) || !std::isfinite(f)) {
    throw DivergedError("robustness: non-finite oracle output");
  }
  return {g.norm(), std::sqrt(std::abs(f_bar - f))};
}

double sparsity_of(const Vector& x) {
  if (x.size() == 0) return 0.0;
  const auto zeros = (x.array() == 0.0).count();
  return static_cast<double>(zeros) / static_cast<double>(x.size());
}

std::string to_string(PruneTarget t) { return t == PruneTarget::Threshold ? "delta" : "sigma"; }

PruneReport prune_report(const Vector& x, const Problem& problem, const std::vector<double>& sigmas,
                         const std::vector<double>& deltas) {
  PruneReport report;
  report.reserve(sigmas.size() + deltas.size());
  const auto add = [&](PruneTarget target, double value, Vector pruned) {
    const Robustness r = robustness(x, pruned, problem);
    report.push_back({target, value, sparsity_of(pruned), r.rho, r.omega, std::move(pruned)});
  };
  for (double s : sigmas) add(PruneTarget::Sparsity, s, prune_to_sparsity(x, s).pruned);
  for (double d : deltas) add(PruneTarget::Threshold, d, prune_threshold(x, d));
  return report;
}

}  // namespace prunadag

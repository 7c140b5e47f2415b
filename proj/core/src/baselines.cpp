#include "prunadag/baselines.hpp"

#include "prunadag/optimizer.hpp"

#include <algorithm>

namespace prunadag {

AdagradState::AdagradState(Vector x0, double varsigma_)
    : x(std::move(x0)), w(Vector::Constant(x.size(), std::sqrt(varsigma_))), varsigma(varsigma_) {
  if (x.size() == 0) throw ContractViolation("AdagradState: empty iterate");
  if (!(varsigma > 0.0 && varsigma < 1.0)) {
    throw ContractViolation("AdagradState: varsigma must lie in (0, 1)");
  }
}

std::pair<Vector, Vector> adagrad_step(const Vector& x, const Vector& g, const Vector& w_prev) {
  if (x.size() != g.size() || x.size() != w_prev.size()) {
    throw ContractViolation("adagrad_step: dimension mismatch");
  }
  Vector w(x.size());
  Vector next(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    w[i] = std::sqrt(w_prev[i] * w_prev[i] + g[i] * g[i]);
    next[i] = x[i] - g[i] / w[i];
  }
  return {std::move(next), std::move(w)};
}

namespace {

struct AdagradStepper {
  AdagradState& state;

  [[nodiscard]] const Vector& x() const { return state.x; }

  void step(const Problem&, const Vector& g, IterationRecord& row) {
    auto [next, w] = adagrad_step(state.x, g, state.w);
    row.grad_norm_opt = row.grad_norm;
    row.card_relevant = static_cast<std::size_t>(g.size());
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      row.opt_linear += g[i] * g[i] / w[i];
      row.opt_quadratic += g[i] * g[i] / (w[i] * w[i]);
    }
    state.x = std::move(next);
    state.w = std::move(w);
    ++state.k;
  }
};

struct FwStepper {
  FwState& state;

  [[nodiscard]] const Vector& x() const { return state.x; }

  void step(const Problem&, const Vector& g, IterationRecord& row) {
    const IndexSet relevant = select_relevant(g, state.cfg.T);
    row.grad_norm_opt = masked_norm(g, relevant);
    row.card_relevant = relevant.size();
    row.card_decreasable = static_cast<std::size_t>(g.size()) - relevant.size();
    state.x = fw_step(state.x, g, state.k, state.cfg);
    ++state.k;
  }
};

}  // namespace

RunRecord run(AdagradState& state, const Problem& problem, const StopCriteria& stop,
              const TraceOptions& trace) {
  if (problem.dim() != static_cast<Index>(state.x.size())) {
    throw ContractViolation("run: dimension mismatch");
  }
  AdagradStepper stepper{state};
  return detail::drive(stepper, problem, stop, trace);
}

void FwConfig::validate(Index n) const {
  if (!(tau > 0.0)) throw ContractViolation("FwConfig: tau must be positive");
  if (rate == FwRate::Rescaled && !(beta > 0.0 && beta < 1.0)) {
    throw ContractViolation("FwConfig: beta must lie in (0, 1)");
  }
  if (T < 1 || T > n) throw ContractViolation("FwConfig: T must satisfy 1 <= T <= n");
}

Vector fw_lmo(const Vector& g, const FwConfig& cfg) {
  cfg.validate(static_cast<Index>(g.size()));
  const IndexSet relevant = select_relevant(g, cfg.T);
  const double gr = masked_norm(g, relevant);
  Vector v = Vector::Zero(g.size());
  if (gr == 0.0) return v;
  for (Index i : relevant) {
    const auto j = static_cast<Eigen::Index>(i);
    v[j] = -cfg.tau * g[j] / gr;
  }
  return v;
}

double fw_rate(const Vector& x, const Vector& g, const Vector& v, std::size_t k,
               const FwConfig& cfg) {
  if (cfg.rate == FwRate::Linear) return 1.0 / static_cast<double>(k + 1);
  const double dist = (v - x).norm();
  if (dist == 0.0) return 1.0;
  const double gr = masked_norm(g, select_relevant(g, cfg.T));
  return std::min(cfg.beta * gr / dist, 1.0);
}

Vector fw_step(const Vector& x, const Vector& g, std::size_t k, const FwConfig& cfg) {
  if (x.size() != g.size()) throw ContractViolation("fw_step: dimension mismatch");
  const Vector v = fw_lmo(g, cfg);
  const double eta = fw_rate(x, g, v, k, cfg);
  return x + eta * (v - x);
}

FwState::FwState(Vector x0, FwConfig cfg_) : x(std::move(x0)), cfg(cfg_) {
  if (x.size() == 0) throw ContractViolation("FwState: empty iterate");
  cfg.validate(static_cast<Index>(x.size()));
}

RunRecord run(FwState& state, const Problem& problem, const StopCriteria& stop,
              const TraceOptions& trace) {
  if (problem.dim() != static_cast<Index>(state.x.size())) {
    throw ContractViolation("run: dimension mismatch");
  }
  FwStepper stepper{state};
  return detail::drive(stepper, problem, stop, trace);
}

}  // namespace prunadag

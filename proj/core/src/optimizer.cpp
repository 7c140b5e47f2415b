#include "prunadag/optimizer.hpp"

#include <algorithm>
#include <numeric>

namespace prunadag {
namespace {

inline Eigen::Index at(Index i) { return static_cast<Eigen::Index>(i); }

void require_same_dim(const PrunAdagState& state, const Vector& v, const char* what) {
  if (v.size() != state.x.size()) throw ContractViolation(std::string(what) + ": dimension mismatch");
}

}  // namespace

std::string to_string(Version v) {
  switch (v) {
    case Version::V1:
      return "V1";
    case Version::V2:
      return "V2";
    case Version::V3:
      return "V3";
    case Version::V4:
      return "V4";
  }
  return "?";
}

Version parse_version(std::string_view text) {
  if (text == "V1" || text == "v1" || text == "1") return Version::V1;
  if (text == "V2" || text == "v2" || text == "2") return Version::V2;
  if (text == "V3" || text == "v3" || text == "3") return Version::V3;
  if (text == "V4" || text == "v4" || text == "4") return Version::V4;
  throw ContractViolation("unknown prunAdag version '" + std::string(text) + "'");
}

std::string VersionPolicy::name() const {
  return relevant_only ? "relevant_only(" + to_string(version) + ")" : to_string(version);
}

PrunAdagState::PrunAdagState(Vector x0, Index T_, double varsigma_, VersionPolicy policy_)
    : x(std::move(x0)), k(0), T(T_), varsigma(varsigma_), policy(policy_) {
  const Index n = dim();
  if (n == 0) throw ContractViolation("PrunAdagState: empty iterate");
  if (T < 1 || T > n) throw ContractViolation("PrunAdagState: T must satisfy 1 <= T <= n");
  if (!(varsigma > 0.0 && varsigma < 1.0)) {
    throw ContractViolation("PrunAdagState: varsigma must lie in (0, 1)");
  }
  if (!all_finite(x)) throw ContractViolation("PrunAdagState: non-finite starting point");
  w_opt = Vector::Constant(x.size(), std::sqrt(varsigma));
  w_dec = w_opt;
}

IndexSet select_relevant(const Vector& g, Index T) {
  const Index n = static_cast<Index>(g.size());
  if (T < 1 || T > n) throw ContractViolation("select_relevant: T must satisfy 1 <= T <= n");
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  const auto before = [&g](Index a, Index b) {
    const double ga = std::abs(g[at(a)]);
    const double gb = std::abs(g[at(b)]);
    return ga > gb || (ga == gb && a < b);
  };
  if (T < n) {
    std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(T - 1),
                     order.end(), before);
  }
  order.resize(T);
  std::sort(order.begin(), order.end());
  return IndexSet(std::move(order));
}

Vector tentative_opt_weights(const PrunAdagState& state, const Vector& g) {
  require_same_dim(state, g, "tentative_opt_weights");
  Vector w(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    w[i] = std::sqrt(state.w_opt[i] * state.w_opt[i] + g[i] * g[i]);
  }
  return w;
}

IndexSet sign_matched_outside(const Vector& x, const Vector& g, const IndexSet& relevant) {
  std::vector<Index> out;
  auto r = relevant.begin();
  for (Index i = 0; i < static_cast<Index>(x.size()); ++i) {
    if (r != relevant.end() && *r == i) {
      ++r;
      continue;
    }
    const int sx = sign(x[at(i)]);
    if (sx != 0 && sx == sign(g[at(i)])) out.push_back(i);
  }
  return IndexSet(std::move(out));
}

Bounds bounding_sequences(const PrunAdagState& state, const Vector& g, const IndexSet& relevant,
                          const IndexSet& sign_matched) {
  require_same_dim(state, g, "bounding_sequences");
  const Eigen::Index n = state.x.size();
  double scale = 1.0;
  if (state.policy.rescaled()) {
    const double xs = masked_norm(state.x, sign_matched);
    if (xs > 0.0) scale = masked_norm(g, relevant) / xs;
  }
  const double kk = static_cast<double>(state.k + 1);

  Bounds b{Vector::Zero(n), Vector::Constant(n, kInfinity)};
  for (Eigen::Index i = 0; i < n; ++i) {
    if (relevant.contains(static_cast<Index>(i))) continue;
    const double ax = std::abs(state.x[i]);
    b.lower[i] = state.policy.rescaled() ? (ax / kk) * scale : ax / kk;
    if (state.policy.capped()) b.upper[i] = ax;
  }
  return b;
}

Classification classify(const PrunAdagState& state, const Vector& g, const Vector& w_tilde,
                        const IndexSet& relevant, const Bounds& bounds) {
  require_same_dim(state, g, "classify");
  require_same_dim(state, w_tilde, "classify");
  const Index n = state.dim();

  std::vector<Index> acceptable;
  std::vector<Index> shrinking;
  auto r = relevant.begin();
  for (Index i = 0; i < n; ++i) {
    if (r != relevant.end() && *r == i) {
      ++r;
      continue;
    }
    const int sx = sign(state.x[at(i)]);
    const bool matched = sx != 0 && sx == sign(g[at(i)]);
    if (matched && !state.policy.relevant_only) {
      const double ratio = std::abs(g[at(i)] / w_tilde[at(i)]);
      if (bounds.lower[at(i)] <= ratio && ratio <= bounds.upper[at(i)]) {
        acceptable.push_back(i);
        continue;
      }
    }
    if (matched) shrinking.push_back(i);
  }

  Classification cls;
  cls.relevant = relevant;
  cls.acceptable = IndexSet(std::move(acceptable));
  cls.optimisable = cls.relevant.unite(cls.acceptable);
  cls.decreasable = cls.optimisable.complement(n);
  cls.shrinking = IndexSet(std::move(shrinking));
  return cls;
}

Classification classify(const PrunAdagState& state, const Vector& g, const Vector& w_tilde) {
  const IndexSet relevant = select_relevant(g, state.T);
  const IndexSet matched = sign_matched_outside(state.x, g, relevant);
  return classify(state, g, w_tilde, relevant, bounding_sequences(state, g, relevant, matched));
}

Vector optimisable_step(const Vector& g, const Vector& w, const IndexSet& optimisable) {
  if (g.size() != w.size()) throw ContractViolation("optimisable_step: dimension mismatch");
  if (optimisable.bound() > static_cast<Index>(g.size())) {
    throw ContractViolation("optimisable_step: index out of range");
  }
  Vector s = Vector::Zero(g.size());
  for (Index i : optimisable) s[at(i)] = -g[at(i)] / w[at(i)];
  return s;
}

Vector decreasable_step(const PrunAdagState& state, const Vector& g, const Classification& cls,
                        const Vector& lower, Vector* step_limit) {
  require_same_dim(state, g, "decreasable_step");
  require_same_dim(state, lower, "decreasable_step");
  Vector s = Vector::Zero(g.size());
  Vector limit = Vector::Zero(g.size());
  double inner = 0.0;
  for (Index i : cls.decreasable) {
    const double xi = state.x[at(i)];
    limit[at(i)] = -xi / state.w_dec[at(i)];
    if (cls.shrinking.contains(i)) {
      s[at(i)] = -static_cast<double>(sign(xi)) * std::min(lower[at(i)], std::abs(limit[at(i)]));
    }
    if (std::abs(s[at(i)]) > std::abs(limit[at(i)])) {
      throw std::logic_error("decreasable_step: |s_i| exceeds |s^L_i|");
    }
    inner += g[at(i)] * s[at(i)];
  }
  if (inner > 0.0) throw std::logic_error("decreasable_step: sum_D g_i s_i > 0");
  if (step_limit != nullptr) *step_limit = std::move(limit);
  return s;
}

void commit_weights(PrunAdagState& state, const Vector& w_tilde, const Classification& cls) {
  require_same_dim(state, w_tilde, "commit_weights");
  for (Index i : cls.optimisable) state.w_opt[at(i)] = w_tilde[at(i)];
  for (Index i : cls.decreasable) {
    const double xi = state.x[at(i)];
    state.w_dec[at(i)] = std::sqrt(state.w_dec[at(i)] * state.w_dec[at(i)] + xi * xi);
  }
}

IterationDetail prunadag_step(PrunAdagState& state, const Vector& g) {
  require_same_dim(state, g, "prunadag_step");
  IterationDetail d;
  d.x = state.x;
  d.g = g;

  const IndexSet relevant = select_relevant(g, state.T);
  d.w_tilde = tentative_opt_weights(state, g);
  d.sign_matched = sign_matched_outside(state.x, g, relevant);
  d.bounds = bounding_sequences(state, g, relevant, d.sign_matched);
  d.cls = classify(state, g, d.w_tilde, relevant, d.bounds);

  d.step = optimisable_step(g, d.w_tilde, d.cls.optimisable);
  commit_weights(state, d.w_tilde, d.cls);
  d.step += decreasable_step(state, g, d.cls, d.bounds.lower, &d.step_limit);

  IterationRecord& rec = d.record;
  rec.grad_norm = g.norm();
  rec.grad_norm_opt = masked_norm(g, d.cls.optimisable);
  rec.card_relevant = d.cls.relevant.size();
  rec.card_acceptable = d.cls.acceptable.size();
  rec.card_decreasable = d.cls.decreasable.size();
  for (Index i : d.cls.optimisable) {
    const double gi2 = g[at(i)] * g[at(i)];
    const double w = state.w_opt[at(i)];
    rec.opt_linear += gi2 / w;
    rec.opt_quadratic += gi2 / (w * w);
  }
  for (Index i : d.cls.decreasable) {
    const double xi = d.x[at(i)];
    const double w = state.w_dec[at(i)];
    rec.dec_quadratic += (xi * xi) / (w * w);
  }

  state.x += d.step;
  ++state.k;
  return d;
}

IterationDetail prunadag_iterate(PrunAdagState& state, const Problem& problem) {
  if (problem.dim() != state.dim()) throw ContractViolation("prunadag_iterate: dimension mismatch");
  const Vector g = problem.gradient(state.x);
  if (!all_finite(g)) {
    throw DivergedError("non-finite gradient at k=" + std::to_string(state.k));
  }
  return prunadag_step(state, g);
}

namespace {

struct PrunAdagStepper {
  PrunAdagState& state;

  [[nodiscard]] const Vector& x() const { return state.x; }

  void step(const Problem&, const Vector& g, IterationRecord& row) {
    const IterationDetail d = prunadag_step(state, g);
    row.grad_norm_opt = d.record.grad_norm_opt;
    row.card_relevant = d.record.card_relevant;
    row.card_acceptable = d.record.card_acceptable;
    row.card_decreasable = d.record.card_decreasable;
    row.opt_linear = d.record.opt_linear;
    row.opt_quadratic = d.record.opt_quadratic;
    row.dec_quadratic = d.record.dec_quadratic;
  }
};

}  // namespace

RunRecord run(PrunAdagState& state, const Problem& problem, const StopCriteria& stop,
              const TraceOptions& trace) {
  if (problem.dim() != state.dim()) throw ContractViolation("run: dimension mismatch");
  PrunAdagStepper stepper{state};
  return detail::drive(stepper, problem, stop, trace);
}

}  // namespace prunadag

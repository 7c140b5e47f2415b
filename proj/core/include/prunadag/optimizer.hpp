#pragma once

// Pruning-aware Adagrad. Each iteration splits the parameters into an
// optimisable set O_k (the T largest gradient magnitudes plus "acceptable"
// ones whose Adagrad step already shrinks them) and a decreasable set D_k,
// whose magnitudes are reduced by a step bounded by -x_i / w^D_i.

#include "prunadag/core.hpp"

#include <string>
#include <string_view>

namespace prunadag {

/// Choice of the bounding sequences a_{i,k}, b_{i,k} used to decide which
/// irrelevant components are acceptable.
///
///   V1: a = |x_i|/(k+1) * ||g||_R / ||x||_S,  b = +inf
///   V2: a = |x_i|/(k+1),                      b = +inf
///   V3: a = |x_i|/(k+1) * ||g||_R / ||x||_S,  b = |x_i|
///   V4: a = |x_i|/(k+1),                      b = |x_i|
enum class Version { V1, V2, V3, V4 };

struct VersionPolicy {
  Version version = Version::V3;
  /// Ablation: O_k = R_k. The bounds of `version` still drive the
  /// decreasable step.
  bool relevant_only = false;

  static VersionPolicy relevant_only_with(Version base = Version::V3) { return {base, true}; }

  [[nodiscard]] bool rescaled() const noexcept {
    return version == Version::V1 || version == Version::V3;
  }
  [[nodiscard]] bool capped() const noexcept {
    return version == Version::V3 || version == Version::V4;
  }
  [[nodiscard]] std::string name() const;
};

Version parse_version(std::string_view text);
std::string to_string(Version v);

/// Mutable optimizer state; single-owner.
struct PrunAdagState {
  /// Weights start at sqrt(varsigma) so that (w_{i,k})^2 = varsigma + sum of
  /// squares holds exactly. Requires 1 <= T <= n and 0 < varsigma < 1.
  PrunAdagState(Vector x0, Index T, double varsigma = 0.01, VersionPolicy policy = {});

  Vector x;
  Vector w_opt;  // w^O
  Vector w_dec;  // w^D
  std::size_t k = 0;
  Index T;
  double varsigma;
  VersionPolicy policy;

  [[nodiscard]] Index dim() const noexcept { return static_cast<Index>(x.size()); }
};

struct Bounds {
  Vector lower;  // a_{i,k}; 0 on R_k
  Vector upper;  // b_{i,k}; +inf on R_k and for V1/V2
};

struct Classification {
  IndexSet relevant;     // R_k
  IndexSet acceptable;   // A_k
  IndexSet optimisable;  // O_k = R_k u A_k
  IndexSet decreasable;  // D_k = complement of O_k
  IndexSet shrinking;    // S_k = sign-matched part of D_k
};

/// Everything computed during one iteration, kept for tracing and testing.
struct IterationDetail {
  Vector x;        // x_k
  Vector g;        // g_k
  Vector w_tilde;  // tentative optimisation weights
  IndexSet sign_matched;  // S~_k, proxy used inside the V1/V3 rescaling
  Bounds bounds;
  Classification cls;
  Vector step_limit;  // s^L on D_k, 0 elsewhere
  Vector step;        // s_k
  IterationRecord record;
};

/// The T indices of largest |g_i|; ties go to the lowest index.
IndexSet select_relevant(const Vector& g, Index T);

/// sqrt((w^O_{i,k-1})^2 + g_i^2) for every i.
Vector tentative_opt_weights(const PrunAdagState& state, const Vector& g);

/// {i not in R : sign(x_i) = sign(g_i) != 0}.
IndexSet sign_matched_outside(const Vector& x, const Vector& g, const IndexSet& relevant);

/// V1/V3 fall back to the unscaled bound when ||x||_{S~} = 0.
Bounds bounding_sequences(const PrunAdagState& state, const Vector& g, const IndexSet& relevant,
                          const IndexSet& sign_matched);

Classification classify(const PrunAdagState& state, const Vector& g, const Vector& w_tilde,
                        const IndexSet& relevant, const Bounds& bounds);
/// Convenience overload computing R_k and the bounds itself.
Classification classify(const PrunAdagState& state, const Vector& g, const Vector& w_tilde);

/// -g_i / w_i on O, zero elsewhere.
Vector optimisable_step(const Vector& g, const Vector& w, const IndexSet& optimisable);

/// Shrinking step on D_k: -sign(x_i) min(a_i, |s^L_i|) on S_k, 0 on D_k \ S_k.
/// Expects state.w_dec already committed for this iteration. Throws
/// std::logic_error if |s_i| <= |s^L_i| or sum_D g_i s_i <= 0 fails.
Vector decreasable_step(const PrunAdagState& state, const Vector& g, const Classification& cls,
                        const Vector& lower, Vector* step_limit = nullptr);

/// O keeps the tentative weights; D reverts w^O and grows w^D by x_i^2.
void commit_weights(PrunAdagState& state, const Vector& w_tilde, const Classification& cls);

/// One full iteration given the gradient at state.x.
IterationDetail prunadag_step(PrunAdagState& state, const Vector& g);

/// One full iteration; throws DivergedError on a non-finite gradient.
IterationDetail prunadag_iterate(PrunAdagState& state, const Problem& problem);

/// Iterates until ||g_k|| <= grad_tol or max_iters steps were taken.
RunRecord run(PrunAdagState& state, const Problem& problem, const StopCriteria& stop = {},
              const TraceOptions& trace = {});

}  // namespace prunadag

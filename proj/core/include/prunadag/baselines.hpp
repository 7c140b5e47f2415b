#pragma once

#include "prunadag/core.hpp"

#include <string>
#include <utility>

namespace prunadag {

// ---------------------------------------------------------------- Adagrad

struct AdagradState {
  AdagradState(Vector x0, double varsigma = 0.01);

  Vector x;
  Vector w;  // starts at sqrt(varsigma)
  std::size_t k = 0;
  double varsigma;
};

/// w_i = sqrt(w_prev_i^2 + g_i^2); x_next_i = x_i - g_i / w_i.
std::pair<Vector, Vector> adagrad_step(const Vector& x, const Vector& g, const Vector& w_prev);

RunRecord run(AdagradState& state, const Problem& problem, const StopCriteria& stop = {},
              const TraceOptions& trace = {});

// ------------------------------------------------------------ Frank-Wolfe

enum class FwRate {
  Linear,    // eta_k = 1/(k+1)
  Rescaled,  // eta_k = min(beta ||g_k||_R / ||v_k - x_k||, 1)
};

struct FwConfig {
  Index T = 1;
  double tau = 1.0;
  FwRate rate = FwRate::Linear;
  double beta = 0.5;

  /// Throws ContractViolation on tau <= 0, beta outside (0,1) for the
  /// rescaled rate, or T outside [1, n].
  void validate(Index n) const;
};

/// Minimiser of <v, g> over the T-support-norm ball of radius tau:
/// v_i = -tau g_i / ||g||_R on the T largest |g_i|, 0 elsewhere.
/// Returns 0 when ||g||_R = 0.
Vector fw_lmo(const Vector& g, const FwConfig& cfg);

/// Step size for iteration k. Rescaled uses eta = 1 when v = x.
double fw_rate(const Vector& x, const Vector& g, const Vector& v, std::size_t k,
               const FwConfig& cfg);

/// x + eta_k (v_k - x).
Vector fw_step(const Vector& x, const Vector& g, std::size_t k, const FwConfig& cfg);

struct FwState {
  FwState(Vector x0, FwConfig cfg);

  Vector x;
  std::size_t k = 0;
  FwConfig cfg;
};

RunRecord run(FwState& state, const Problem& problem, const StopCriteria& stop = {},
              const TraceOptions& trace = {});

}  // namespace prunadag

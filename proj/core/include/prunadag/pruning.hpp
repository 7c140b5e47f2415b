#pragma once

#include "prunadag/core.hpp"

#include <string>
#include <utility>
#include <vector>

namespace prunadag {

/// Zeroes every component with |x_i| < delta. Components exactly at delta
/// survive. Requires delta >= 0 (NaN rejected).
Vector prune_threshold(const Vector& x, double delta);

struct SparsityPrune {
  Vector pruned;
  double implied_delta = 0.0;  // largest zeroed magnitude, 0 if nothing was zeroed
};

/// Zeroes exactly floor(sigma * n) components of smallest magnitude, lowest
/// index first among equal magnitudes. Requires 0 <= sigma <= 1.
SparsityPrune prune_to_sparsity(const Vector& x, double sigma);

struct Robustness {
  double rho = 0.0;    // ||g(x_bar)||
  double omega = 0.0;  // sqrt(|f(x_bar) - f(x)|)
};

/// Throws DivergedError if an oracle returns a non-finite value.
Robustness robustness(const Vector& x, const Vector& x_bar, const Problem& problem);

/// Fraction of exactly-zero components.
double sparsity_of(const Vector& x);

enum class PruneTarget { Threshold, Sparsity };

std::string to_string(PruneTarget t);

struct PruneRow {
  PruneTarget target = PruneTarget::Sparsity;
  double value = 0.0;  // delta or sigma
  double achieved_sparsity = 0.0;
  double rho = 0.0;
  double omega = 0.0;
  Vector pruned;
};

using PruneReport = std::vector<PruneRow>;

/// One row per sigma, then one row per delta.
PruneReport prune_report(const Vector& x, const Problem& problem, const std::vector<double>& sigmas,
                         const std::vector<double>& deltas);

}  // namespace prunadag

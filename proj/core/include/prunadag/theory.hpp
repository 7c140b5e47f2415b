#pragma once

// Executable forms of the per-iteration descent inequality, the series bound
// sum a_j/(xi + b_j) <= log((xi + b_k)/xi), and the O(1/k) envelope on the
// averaged squared gradient norm.

#include "prunadag/core.hpp"

#include <optional>
#include <string>
#include <vector>

namespace prunadag {

/// Lower branch W_{-1}: the solution w <= -1 of w e^w = y for
/// -1/e <= y < 0. Throws DomainError outside that interval.
double lambert_w_minus1(double y);

struct BoundInputs {
  Index n = 1;
  Index T = 1;
  double varsigma = 0.01;
  double L = 1.0;
  double gamma0 = 0.0;   // f(x_0) - f_low
  double kappa_x = 0.0;  // bound on |x_{i,j}| for j <= k
  std::size_t k = 0;
};

/// theta(k) = max{ varsigma,
///                 (varsigma/2) exp(gamma0/(n L)),
///                 32 n^2 L^2 |W_{-1}(-sqrt(varsigma)/(8 n L))|^2,
///                 2 (gamma0 + n L log(1 + (k+1) kappa^2/varsigma))^2 }.
double theta_bound(const BoundInputs& in);

/// The four candidates of theta_bound, in the order listed there.
std::vector<double> theta_branches(const BoundInputs& in);

/// The bound only applies when varsigma <= (8 n L / 3)^2 and L > 0.
bool bound_applicable(const BoundInputs& in, std::string* reason = nullptr);

struct CheckReport {
  bool skipped = false;
  std::string reason;              // why the check was skipped
  std::size_t checked = 0;         // iterations examined
  std::vector<std::size_t> violations;
  double worst_margin = 0.0;       // max over k of lhs - rhs (negative when all pass)

  [[nodiscard]] bool passed() const noexcept { return violations.empty(); }
};

/// For every k in the trace:
///   (1/(k+1)) sum_{j<=k} ||g_j||^2 <= ceil(n/T) theta(k) / (k+1),
/// with kappa_x the running max of max_abs_x and gamma0 = f(x_0) - f_low.
/// `inputs.k`, `inputs.kappa_x` and `inputs.gamma0` are overwritten per k;
/// gamma0 is taken from the trace unless the trace has no objective values.
CheckReport check_gradient_bound(const RunRecord& trace, BoundInputs inputs, double f_low = 0.0);

/// f(x_{j+1}) <= f(x_j) - opt_linear_j + (L/2)(opt_quadratic_j + dec_quadratic_j)
/// within 1e-8 (1 + |f(x_j)|). The last step is compared against
/// trace.final_objective. Requires recorded objective values.
CheckReport check_descent_lemma(const RunRecord& trace, double L, double rel_tol = 1e-8);

/// Checks the series bound at every prefix of `a`. Requires a_j >= 0, xi > 0.
CheckReport check_series_lemma(const std::vector<double>& a, double xi);

}  // namespace prunadag

#include "prunadag/theory.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace prunadag {
namespace {

constexpr double kInvE = 1.0 / std::numbers::e;

double initial_guess(double y) {
  if (y < -0.25) {
    // Expansion about the branch point in p = -sqrt(2 (1 + e y)).
    const double p = -std::sqrt(std::max(0.0, 2.0 * (1.0 + std::numbers::e * y)));
    return -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
  }
  const double l1 = std::log(-y);
  const double l2 = std::log(-l1);
  return l1 - l2 + l2 / l1;
}

void note(CheckReport& r, std::size_t k, double margin) {
  ++r.checked;
  if (r.checked == 1 || margin > r.worst_margin) r.worst_margin = margin;
  if (margin > 0.0) r.violations.push_back(k);
}

}  // namespace

double lambert_w_minus1(double y) {
  if (!(y < 0.0) || y < -kInvE * (1.0 + 4.0 * std::numeric_limits<double>::epsilon())) {
    throw DomainError(fmt::format("lambert_w_minus1: {} outside [-1/e, 0)", y));
  }
  if (y <= -kInvE) return -1.0;

  // h(w) = w e^w decreases from 0 to -1/e on (-inf, -1]; keep h(lo) > y > h(hi).
  const auto h = [](double w) { return w * std::exp(w); };
  double hi = -1.0;
  double lo = std::min(-2.0, 2.0 * initial_guess(y));
  while (h(lo) <= y) lo *= 2.0;

  double w = std::clamp(initial_guess(y), lo, hi);
  for (int it = 0; it < 200; ++it) {
    const double r = h(w) - y;
    if (std::abs(r) <= 1e-16 * std::abs(y)) break;
    if (r > 0.0) {
      lo = w;
    } else {
      hi = w;
    }
    const double slope = std::exp(w) * (1.0 + w);
    double next = slope != 0.0 ? w - r / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == w || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(w)) {
      w = next;
      break;
    }
    w = next;
  }
  return std::min(w, -1.0);
}

std::vector<double> theta_branches(const BoundInputs& in) {
  const double n = static_cast<double>(in.n);
  const double nL = n * in.L;
  const double w = lambert_w_minus1(-std::sqrt(in.varsigma) / (8.0 * nL));
  const double growth =
      in.gamma0 + nL * std::log1p(static_cast<double>(in.k + 1) * in.kappa_x * in.kappa_x / in.varsigma);
  return {
      in.varsigma,
      0.5 * in.varsigma * std::exp(in.gamma0 / nL),
      32.0 * nL * nL * w * w,
      2.0 * growth * growth,
  };
}

double theta_bound(const BoundInputs& in) {
  std::string why;
  if (!bound_applicable(in, &why)) throw ContractViolation("theta_bound: " + why);
  const auto b = theta_branches(in);
  return *std::max_element(b.begin(), b.end());
}

bool bound_applicable(const BoundInputs& in, std::string* reason) {
  const auto fail = [&](std::string why) {
    if (reason) *reason = std::move(why);
    return false;
  };
  if (in.n == 0 || in.T == 0 || in.T > in.n) return fail("requires 1 <= T <= n");
  if (!(in.varsigma > 0.0)) return fail("requires varsigma > 0");
  if (!(in.L > 0.0) || !std::isfinite(in.L)) return fail("requires a finite Lipschitz constant L > 0");
  if (!(in.gamma0 >= 0.0) || !(in.kappa_x >= 0.0)) return fail("requires gamma0 >= 0 and kappa_x >= 0");
  const double cap = 8.0 * static_cast<double>(in.n) * in.L / 3.0;
  if (in.varsigma > cap * cap) return fail(fmt::format("varsigma {} exceeds (8nL/3)^2 = {}", in.varsigma, cap * cap));
  return true;
}

CheckReport check_gradient_bound(const RunRecord& trace, BoundInputs inputs, double f_low) {
  trace.check_shape();
  CheckReport report;
  if (!trace.objective.empty() && std::isfinite(trace.objective.front())) {
    inputs.gamma0 = std::max(0.0, trace.objective.front() - f_low);
  }
  inputs.kappa_x = 0.0;
  inputs.k = 0;
  if (!bound_applicable(inputs, &report.reason)) {
    report.skipped = true;
    return report;
  }
  const double blocks = std::ceil(static_cast<double>(inputs.n) / static_cast<double>(inputs.T));
  double sum = 0.0;
  for (std::size_t k = 0; k < trace.size(); ++k) {
    sum += trace.grad_norm[k] * trace.grad_norm[k];
    inputs.k = k;
    inputs.kappa_x = std::max(inputs.kappa_x, trace.max_abs_x[k]);
    const double denom = static_cast<double>(k + 1);
    note(report, k, sum / denom - blocks * theta_bound(inputs) / denom);
  }
  return report;
}

CheckReport check_descent_lemma(const RunRecord& trace, double L, double rel_tol) {
  trace.check_shape();
  if (!(L >= 0.0)) throw ContractViolation("check_descent_lemma: L must be >= 0");
  CheckReport report;
  for (std::size_t j = 0; j < trace.size(); ++j) {
    const double f = trace.objective[j];
    const double f_next = j + 1 < trace.size() ? trace.objective[j + 1] : trace.final_objective;
    if (!std::isfinite(f) || !std::isfinite(f_next)) {
      throw ContractViolation("check_descent_lemma: trace lacks objective values");
    }
    const double rhs = f - trace.opt_linear[j] + 0.5 * L * (trace.opt_quadratic[j] + trace.dec_quadratic[j]);
    note(report, j, f_next - rhs - rel_tol * (1.0 + std::abs(f)));
  }
  return report;
}

CheckReport check_series_lemma(const std::vector<double>& a, double xi) {
  if (!(xi > 0.0)) throw ContractViolation("check_series_lemma: xi must be > 0");
  CheckReport report;
  double b = 0.0;
  double lhs = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (!(a[k] >= 0.0)) throw ContractViolation("check_series_lemma: sequence must be nonnegative");
    b += a[k];
    lhs += a[k] / (xi + b);
    const double rhs = std::log1p(b / xi);
    note(report, k, lhs - rhs - 1e-12 * (1.0 + rhs));
  }
  return report;
}

}  // namespace prunadag

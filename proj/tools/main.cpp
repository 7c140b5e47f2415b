// prunadag: batch driver.
//
//   prunadag run CONFIG         run every optimizer on every seed
//   prunadag ablation CONFIG    same, with V1-V4 and RelevantOnly side by side
//   prunadag verify DIR         re-check the theory bounds on stored traces
//   prunadag prune FILE --sigma 0.1,0.5 | --delta 1e-3
//
// Global options: --jobs N, --out DIR, --master-seed S.

#include "prunadag/config.hpp"
#include "prunadag/harness.hpp"
#include "prunadag/matrix_io.hpp"
#include "prunadag/pruning.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdio>
#include <iostream>
#include <optional>

namespace {

using namespace prunadag;

struct Globals {
  std::optional<std::size_t> jobs;
  std::optional<std::string> out;
  std::optional<std::uint64_t> master_seed;
};

ExperimentConfig load_with_overrides(const std::string& path, const Globals& g) {
  ExperimentConfig cfg = load_config(path);
  if (g.jobs) cfg.jobs = *g.jobs;
  if (g.out) cfg.output = *g.out;
  if (g.master_seed) cfg.master_seed = *g.master_seed;
  cfg.validate();
  return cfg;
}

void report_progress(const RunResult& r, const ExperimentConfig& cfg) {
  const auto& rec = r.record;
  std::fprintf(stderr, "%-14s seed %-3zu %-9s k=%-6zu |g|=%.3e%s\n", cfg.optimizers[r.optimizer].name.c_str(),
               r.seed, to_string(rec.termination).c_str(), rec.size(), rec.final_grad_norm,
               r.diverged ? "  (diverged)" : "");
}

int summarize(const ExperimentResult& result) {
  std::size_t diverged = 0;
  std::size_t failed_checks = 0;
  for (const auto& r : result.runs) {
    diverged += r.diverged ? 1 : 0;
    for (const auto& c : r.theory) failed_checks += c.report.passed() ? 0 : 1;
  }
  fmt::print("{} runs written to {}; {} diverged; {} failed theory checks\n", result.runs.size(),
             result.config.output.string(), diverged, failed_checks);
  return 0;
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string tok = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw CLI::ValidationError(what, "expected a comma-separated list of numbers, got '" + text + "'");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pruning-aware optimization experiments"};
  app.require_subcommand(1);
  Globals globals;
  app.add_option("--jobs", globals.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", globals.out, "Output directory (overrides [run] output)");
  app.add_option("--master-seed", globals.master_seed, "Master seed (overrides [run] master_seed)");

  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "Run an experiment configuration");
  run_cmd->add_option("config", config_path, "Configuration file")->required()->check(CLI::ExistingFile);
  run_cmd->fallthrough();

  auto* ablation_cmd = app.add_subcommand("ablation", "Run with V1-V4 and RelevantOnly side by side");
  ablation_cmd->add_option("config", config_path, "Configuration file")->required()->check(CLI::ExistingFile);
  ablation_cmd->fallthrough();

  std::string trace_dir;
  auto* verify_cmd = app.add_subcommand("verify", "Re-check descent and complexity bounds on stored traces");
  verify_cmd->add_option("trace-dir", trace_dir, "Result directory")->required()->check(CLI::ExistingDirectory);

  std::string solution;
  std::string sigma_text;
  std::string delta_text;
  std::string prune_config;
  std::size_t seed_index = 0;
  std::string save_dir;
  auto* prune_cmd = app.add_subcommand("prune", "Prune a stored solution vector");
  prune_cmd->add_option("solution", solution, "Solution file (PADM, one column)")->required()->check(CLI::ExistingFile);
  auto* sigma_opt = prune_cmd->add_option("--sigma", sigma_text, "Sparsity fractions, comma-separated");
  auto* delta_opt = prune_cmd->add_option("--delta", delta_text, "Thresholds, comma-separated");
  prune_cmd->add_option("--config", prune_config, "Configuration that produced the solution (enables rho/omega)")
      ->check(CLI::ExistingFile);
  prune_cmd->add_option("--seed-index", seed_index, "Seed index of the instance within --config");
  prune_cmd->add_option("--save-dir", save_dir, "Write each pruned vector here");
  prune_cmd->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version requests exit 0; every usage error exits 2.
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*run_cmd) {
      return summarize(run_experiment(load_with_overrides(config_path, globals), report_progress));
    }
    if (*ablation_cmd) {
      return summarize(ablation_relevant_only(load_with_overrides(config_path, globals), report_progress));
    }
    if (*verify_cmd) {
      const auto rows = verify_directory(trace_dir);
      std::size_t failures = 0;
      fmt::print("optimizer,seed,check,status,checked,violations,worst_margin\n");
      for (const auto& row : rows) {
        const char* status = row.report.skipped ? "skipped" : (row.report.passed() ? "pass" : "fail");
        failures += (!row.report.skipped && !row.report.passed()) ? 1 : 0;
        fmt::print("{},{},{},{},{},{},{:.6g}\n", row.optimizer, row.seed, row.check, status, row.report.checked,
                   row.report.violations.size(), row.report.worst_margin);
      }
      std::fprintf(stderr, "%zu checks, %zu failed\n", rows.size(), failures);
      return failures == 0 ? 0 : 1;
    }
    if (*prune_cmd) {
      if (sigma_opt->count() == 0 && delta_opt->count() == 0) {
        std::fprintf(stderr, "prune: give --sigma and/or --delta\n");
        return 2;
      }
      const Vector x = read_vector(solution);
      const std::vector<double> sigmas = sigma_opt->count() ? parse_list(sigma_text, "--sigma") : std::vector<double>{};
      const std::vector<double> deltas = delta_opt->count() ? parse_list(delta_text, "--delta") : std::vector<double>{};

      std::optional<Instance> instance;
      if (!prune_config.empty()) {
        ExperimentConfig cfg = load_with_overrides(prune_config, globals);
        if (seed_index >= cfg.problem.seeds) {
          std::fprintf(stderr, "prune: --seed-index %zu out of range (config has %zu seeds)\n", seed_index,
                       cfg.problem.seeds);
          return 2;
        }
        instance = make_instances(cfg)[seed_index];
        if (instance->problem->dim() != static_cast<Index>(x.size())) {
          std::fprintf(stderr, "prune: solution has %td entries, problem has %zu\n", x.size(),
                       instance->problem->dim());
          return 2;
        }
      }

      fmt::print("target_kind,target_value,implied_delta,achieved_sparsity,rho,omega,accuracy\n");
      const auto emit = [&](PruneTarget kind, double value, double implied, const Vector& pruned) {
        std::string rho, omega, acc;
        if (instance) {
          const Robustness r = robustness(x, pruned, *instance->problem);
          rho = fmt::format("{:.17g}", r.rho);
          omega = fmt::format("{:.17g}", r.omega);
          if (instance->evaluation) acc = fmt::format("{:.17g}", classify_accuracy(pruned, *instance->evaluation));
        }
        fmt::print("{},{:.17g},{:.17g},{:.17g},{},{},{}\n", to_string(kind), value, implied, sparsity_of(pruned), rho,
                   omega, acc);
        if (!save_dir.empty()) {
          std::filesystem::create_directories(save_dir);
          write_vector(std::filesystem::path(save_dir) / fmt::format("{}_{:g}.padm", to_string(kind), value), pruned);
        }
      };
      for (double s : sigmas) {
        const SparsityPrune p = prune_to_sparsity(x, s);
        emit(PruneTarget::Sparsity, s, p.implied_delta, p.pruned);
      }
      for (double d : deltas) emit(PruneTarget::Threshold, d, d, prune_threshold(x, d));
      return 0;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

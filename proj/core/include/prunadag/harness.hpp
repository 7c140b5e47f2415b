#pragma once

// Batch driver: every (optimizer, seed) pair of a configuration is run on a
// worker pool, the final iterates are pruned, and the results are written as
// CSV. All optimizers see the same problem instance and starting point for a
// given seed index:
//
//   instance seed = derive_seed(master, seed_index, 1)
//   start seed    = derive_seed(master, seed_index, 2)
//   split seed    = derive_seed(master, seed_index, 3)
//
// Output files (all comma-separated, header row first):
//   trace.csv         optimizer,seed,k,grad_norm,grad_norm_O,f,below_delta_count,card_R,card_A,card_D
//   trace_detail.csv  optimizer,seed,k,f,grad_norm,opt_linear,opt_quadratic,dec_quadratic,max_abs_x
//   runs.csv          one row per run: sizes, constants, termination, final values
//   prune.csv         optimizer,seed,target_kind,target_value,achieved_sparsity,rho,omega,accuracy_if_classification
//   aggregate.csv     means over the non-diverged seeds per optimizer and pruning target
//   theory.csv        complexity-bound and descent checks per run
//   plot_grad_norm.csv, plot_below_delta.csv   optimizer,k,mean,runs
//   plot_rho.csv, plot_omega.csv               optimizer,sigma,mean,runs
//   solutions/NAME_seedS.padm                  final iterates

#include "prunadag/config.hpp"
#include "prunadag/core.hpp"
#include "prunadag/pruning.hpp"
#include "prunadag/theory.hpp"

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace prunadag {

struct Instance {
  std::shared_ptr<const Problem> problem;
  /// Classification only: the set accuracy is measured on (the test split,
  /// or the training set when there is none).
  std::shared_ptr<const LogisticProblem> evaluation;
  Vector x0;
};

/// Builds the instance for every seed index; data files are read once.
std::vector<Instance> make_instances(const ExperimentConfig& cfg);

struct TheoryCheck {
  std::string name;  // "gradient_bound" or "descent_lemma"
  CheckReport report;
};

struct RunResult {
  std::size_t optimizer = 0;
  std::size_t seed = 0;
  RunRecord record;
  bool diverged = false;
  Index n = 0;
  Index T = 0;
  double varsigma = 0.0;
  std::optional<double> lipschitz;
  std::optional<double> f_low;
  PruneReport prune;
  std::optional<double> accuracy;                    // unpruned
  std::vector<std::optional<double>> prune_accuracy;  // per prune row
  std::vector<TheoryCheck> theory;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<RunResult> runs;  // optimizer-major, then seed

  [[nodiscard]] const RunResult& at(std::size_t optimizer, std::size_t seed) const;
  [[nodiscard]] std::size_t diverged_count(std::size_t optimizer) const;
};

using ProgressFn = std::function<void(const RunResult&, const ExperimentConfig&)>;

/// Runs one optimizer from the instance's starting point; a divergence is
/// captured in the result rather than thrown.
RunResult run_single(const ExperimentConfig& cfg, std::size_t optimizer, std::size_t seed,
                     const Instance& instance);

/// Runs everything in memory on cfg.jobs threads. Output is independent of
/// the thread count.
ExperimentResult execute(const ExperimentConfig& cfg, const ProgressFn& progress = nullptr);

void write_outputs(const ExperimentResult& result, const std::filesystem::path& dir);

/// execute + write_outputs into cfg.output.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const ProgressFn& progress = nullptr);

/// Adds any missing prunAdag V1-V4 entries and a "RelevantOnly" entry
/// (V3 bounds, acceptable set forced empty). Existing optimizers are kept;
/// added ones inherit T and varsigma from the first prunAdag entry.
ExperimentConfig with_relevant_only_ablation(ExperimentConfig cfg);

ExperimentResult ablation_relevant_only(const ExperimentConfig& cfg, const ProgressFn& progress = nullptr);

struct VerifyRow {
  std::string optimizer;
  std::size_t seed = 0;
  std::string check;
  CheckReport report;
};

/// Re-runs the theory checks on the traces stored in a result directory.
std::vector<VerifyRow> verify_directory(const std::filesystem::path& dir);

}  // namespace prunadag

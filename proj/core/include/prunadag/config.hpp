#pragma once

// Experiment configuration, read from an INI-style file:
//
//   [problem]
//   kind = least_squares        # least_squares | sparse_recovery | logistic |
//                               # synthetic_classification | sparse_coding
//   matrix = A3                 # least_squares only
//   m = 20
//   n = 200
//   seeds = 20
//
//   [optimizer V3]              # one section per optimizer; NAME labels CSV rows
//   type = prunadag             # prunadag | adagrad | fw
//   version = V3
//
//   [stop]      grad_tol, max_iters
//   [pruning]   sigma = 0.1, 0.2   delta = 1e-3
//   [trace]     delta, objective
//   [run]       master_seed, jobs, output
//
// '#' and ';' start comments. Unknown sections or keys, duplicate keys and
// malformed values raise ConfigError naming the key path (e.g.
// "optimizer.V3.T").

#include "prunadag/baselines.hpp"
#include "prunadag/core.hpp"
#include "prunadag/optimizer.hpp"
#include "prunadag/problems.hpp"

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace prunadag {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key_path, const std::string& what)
      : std::runtime_error(key_path.empty() ? what : key_path + ": " + what), key_path_(key_path) {}

  [[nodiscard]] const std::string& key_path() const noexcept { return key_path_; }

 private:
  std::string key_path_;
};

enum class ProblemKind { LeastSquares, SparseRecovery, Logistic, SyntheticClassification, SparseCoding };

ProblemKind parse_problem_kind(std::string_view text);
std::string to_string(ProblemKind kind);

struct ProblemSpec {
  ProblemKind kind = ProblemKind::LeastSquares;
  LsKind matrix = LsKind::A1;
  Index m = 100;
  Index n = 1000;
  // sparse_recovery
  Index nonzeros = 10;
  double noise = 0.0;
  // logistic
  std::filesystem::path path;
  bool normalize = true;
  double train_fraction = 0.7;
  // synthetic_classification
  Index samples = 1000;
  Index informative = 50;
  double replica_noise = 0.3;
  double weight_decay = 0.8;
  // sparse_coding: dictionary p x n, data p x N (one signal per column)
  std::filesystem::path dictionary;
  std::filesystem::path data;

  std::size_t seeds = 20;
  /// Nonzeros of the random starting point; defaults to ceil(n/10).
  std::optional<Index> start_nonzeros;
  /// Lower bound on f used by the complexity check; defaults to the problem's own.
  std::optional<double> f_low;

  [[nodiscard]] bool is_classification() const noexcept {
    return kind == ProblemKind::Logistic || kind == ProblemKind::SyntheticClassification;
  }
};

enum class OptimizerType { PrunAdag, Adagrad, FrankWolfe };

std::string to_string(OptimizerType type);

struct OptimizerSpec {
  std::string name;
  OptimizerType type = OptimizerType::PrunAdag;
  VersionPolicy policy;
  std::optional<Index> T;  // defaults to ceil(n/10)
  double varsigma = 0.01;
  double tau = 1.0;
  FwRate rate = FwRate::Linear;
  double beta = 0.5;

  [[nodiscard]] Index support(Index n) const;
};

struct ExperimentConfig {
  ProblemSpec problem;
  std::vector<OptimizerSpec> optimizers;
  StopCriteria stop;
  std::vector<double> sigmas;
  std::vector<double> deltas;
  TraceOptions trace;
  std::uint64_t master_seed = 0;
  std::size_t jobs = 1;
  std::filesystem::path output = "results";

  /// Throws ConfigError on inconsistent settings.
  void validate() const;
};

/// ceil(n/10), at least 1.
Index default_support(Index n);

/// Relative paths in the configuration are resolved against `base_dir`.
ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace prunadag

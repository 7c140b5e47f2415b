#pragma once

#include "prunadag/core.hpp"
#include "prunadag/problems.hpp"

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>

namespace prunadag {

/// Dense labelled samples; labels are already mapped to {-1, +1}.
struct Dataset {
  Matrix features;  // one row per sample
  Vector labels;

  [[nodiscard]] Index size() const noexcept { return static_cast<Index>(features.rows()); }
  [[nodiscard]] Index dim() const noexcept { return static_cast<Index>(features.cols()); }
};

/// LIBSVM sparse text: `label idx:value idx:value ...` with 1-based indices.
/// Labels > 0 map to +1, all others (0 or -1) to -1. The feature count is
/// the largest index seen. Throws ParseError (with line number) on malformed
/// lines and on an input without samples.
Dataset parse_libsvm(std::istream& in);
Dataset read_libsvm(const std::filesystem::path& path);

struct SplitOptions {
  double train_fraction = 0.7;  // 1.0 keeps every sample for training
  bool normalize = true;
  std::uint64_t seed = 0;
};

struct DataSplit {
  LogisticProblem train;
  std::optional<LogisticProblem> test;
};

/// Random split into round(train_fraction * N) training samples (original
/// order preserved inside each part). Min-max scaling uses training-set
/// statistics only; test features are clipped to [0, 1] afterwards and
/// constant training features map to 0.
DataSplit split_dataset(const Dataset& data, const SplitOptions& options);

DataSplit load_libsvm(const std::filesystem::path& path, bool normalize, std::uint64_t split_seed,
                      double train_fraction = 0.7);

struct SeparableOptions {
  Index samples = 1000;
  Index features = 200;
  Index informative = 50;
  double replica_noise = 0.3;  // std of the noise added to each replica
  double weight_decay = 0.8;   // magnitude ratio between consecutive weight pairs
};

/// Linearly separable binary data with informative and redundant features.
///
/// `informative` features (at seeded random positions) are uniform on [0, 1).
/// Each remaining feature is a noisy replica of an informative one: replica r
/// copies informative feature r mod informative and adds
/// N(0, replica_noise^2). Labels are sign(w^T a) for a hyperplane through the
/// origin whose weights live on the informative features only, in +/- pairs
/// with magnitudes 1, d, d^2, ... (d = weight_decay). A score of 0 is +1.
Dataset gen_separable_dataset(const SeparableOptions& options, std::uint64_t seed);

}  // namespace prunadag

#include "prunadag/dataset.hpp"

#include "prunadag/matrix_io.hpp"
#include "prunadag/rng.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

namespace prunadag {
namespace {

struct SparseRow {
  double label = 0.0;
  std::vector<std::pair<Index, double>> entries;
};

template <class T>
T parse_number(std::string_view tok, std::size_t line, const char* what) {
  T v{};
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (tok.empty() || ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw ParseError(fmt::format("bad {} '{}'", what, tok), line);
  }
  return v;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

LogisticProblem make_problem(const Matrix& features, const Vector& labels,
                             const std::vector<Index>& rows) {
  Matrix a(static_cast<Eigen::Index>(rows.size()), features.cols());
  Vector y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    a.row(static_cast<Eigen::Index>(r)) = features.row(static_cast<Eigen::Index>(rows[r]));
    y[static_cast<Eigen::Index>(r)] = labels[static_cast<Eigen::Index>(rows[r])];
  }
  return LogisticProblem(std::move(a), std::move(y));
}

}  // namespace

Dataset parse_libsvm(std::istream& in) {
  std::vector<SparseRow> rows;
  Index width = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    SparseRow row;
    std::string_view label = tokens.front();
    if (label.size() > 1 && label.front() == '+') label.remove_prefix(1);
    row.label = parse_number<double>(label, lineno, "label");
    Index last = 0;
    for (std::size_t t = 1; t < tokens.size(); ++t) {
      const auto colon = tokens[t].find(':');
      if (colon == std::string_view::npos) {
        throw ParseError(fmt::format("expected index:value, got '{}'", tokens[t]), lineno);
      }
      const auto idx = parse_number<Index>(tokens[t].substr(0, colon), lineno, "feature index");
      if (idx == 0) throw ParseError("feature indices are 1-based", lineno);
      if (idx <= last) throw ParseError("feature indices must be increasing", lineno);
      last = idx;
      const auto val = parse_number<double>(tokens[t].substr(colon + 1), lineno, "feature value");
      row.entries.emplace_back(idx - 1, val);
      width = std::max(width, idx);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("no samples in LIBSVM input", 0);
  if (width == 0) throw ParseError("no features in LIBSVM input", 0);

  Dataset data;
  data.features = Matrix::Zero(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  data.labels.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto ri = static_cast<Eigen::Index>(r);
    data.labels[ri] = rows[r].label > 0.0 ? 1.0 : -1.0;
    for (const auto& [j, v] : rows[r].entries) data.features(ri, static_cast<Eigen::Index>(j)) = v;
  }
  return data;
}

Dataset read_libsvm(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_libsvm(in);
}

DataSplit split_dataset(const Dataset& data, const SplitOptions& options) {
  if (!(options.train_fraction > 0.0 && options.train_fraction <= 1.0)) {
    throw ContractViolation("split_dataset: train_fraction must lie in (0, 1]");
  }
  const Index N = data.size();
  if (N == 0) throw ContractViolation("split_dataset: empty dataset");
  auto n_train = static_cast<Index>(std::llround(options.train_fraction * static_cast<double>(N)));
  n_train = std::clamp<Index>(n_train, 1, N);

  std::vector<Index> train;
  std::vector<Index> test;
  if (n_train == N) {
    train.resize(N);
    for (Index i = 0; i < N; ++i) train[i] = i;
  } else {
    Rng rng(options.seed);
    const std::vector<std::size_t> perm = rng.permutation(N);
    train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
    test.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
  }

  Matrix features = data.features;
  if (options.normalize) {
    for (Eigen::Index j = 0; j < features.cols(); ++j) {
      double lo = kInfinity;
      double hi = -kInfinity;
      for (Index i : train) {
        lo = std::min(lo, features(static_cast<Eigen::Index>(i), j));
        hi = std::max(hi, features(static_cast<Eigen::Index>(i), j));
      }
      const double span = hi - lo;
      for (Eigen::Index i = 0; i < features.rows(); ++i) {
        features(i, j) = span > 0.0 ? std::clamp((features(i, j) - lo) / span, 0.0, 1.0) : 0.0;
      }
    }
  }

  DataSplit split{make_problem(features, data.labels, train), std::nullopt};
  if (!test.empty()) split.test = make_problem(features, data.labels, test);
  return split;
}

DataSplit load_libsvm(const std::filesystem::path& path, bool normalize, std::uint64_t split_seed,
                      double train_fraction) {
  return split_dataset(read_libsvm(path), SplitOptions{train_fraction, normalize, split_seed});
}

Dataset gen_separable_dataset(const SeparableOptions& o, std::uint64_t seed) {
  if (o.samples < 1 || o.features < 1) throw ContractViolation("gen_separable_dataset: empty shape");
  if (o.informative < 1 || o.informative > o.features) {
    throw ContractViolation("gen_separable_dataset: informative must lie in [1, features]");
  }
  if (!(o.replica_noise >= 0.0)) throw ContractViolation("gen_separable_dataset: replica_noise must be >= 0");
  if (!(o.weight_decay > 0.0 && o.weight_decay <= 1.0)) {
    throw ContractViolation("gen_separable_dataset: weight_decay must lie in (0, 1]");
  }
  Rng rng(derive_seed(seed, 0x4453, 0));
  const std::vector<std::size_t> perm = rng.permutation(o.features);
  const auto col = [&](Index j) { return static_cast<Eigen::Index>(perm[j]); };

  Vector w = Vector::Zero(static_cast<Eigen::Index>(o.features));
  for (Index j = 0; j < o.informative; ++j) {
    const double magnitude = std::pow(o.weight_decay, static_cast<double>(j / 2));
    w[col(j)] = (j % 2 == 0) ? magnitude : -magnitude;
  }

  Dataset data;
  data.features = Matrix::Zero(static_cast<Eigen::Index>(o.samples), static_cast<Eigen::Index>(o.features));
  for (Eigen::Index i = 0; i < data.features.rows(); ++i) {
    for (Index j = 0; j < o.informative; ++j) data.features(i, col(j)) = rng.uniform();
  }
  for (Index r = 0; r + o.informative < o.features; ++r) {
    const auto source = col(r % o.informative);
    const auto target = col(o.informative + r);
    for (Eigen::Index i = 0; i < data.features.rows(); ++i) {
      data.features(i, target) = data.features(i, source) + o.replica_noise * rng.normal();
    }
  }
  const Vector scores = data.features * w;
  data.labels.resize(scores.size());
  for (Eigen::Index i = 0; i < scores.size(); ++i) data.labels[i] = scores[i] >= 0.0 ? 1.0 : -1.0;
  return data;
}

}  // namespace prunadag

#include "prunadag/config.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

namespace prunadag {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

struct Entry {
  std::string value;
  std::size_t line = 0;
};

class Section {
 public:
  Section(std::string path, std::size_t line) : path_(std::move(path)), line_(line) {}

  void set(const std::string& key, std::string value, std::size_t line) {
    if (entries_.count(key)) {
      throw ConfigError(key_path(key), fmt::format("duplicate key (line {})", line));
    }
    entries_[key] = {std::move(value), line};
  }

  [[nodiscard]] const std::string& path() const noexcept { return path_; }
  [[nodiscard]] std::size_t line() const noexcept { return line_; }
  [[nodiscard]] std::string key_path(const std::string& key) const { return path_ + "." + key; }

  const Entry* find(const std::string& key) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return nullptr;
    used_.insert(key);
    return &it->second;
  }

  std::optional<std::string> text(const std::string& key) {
    const Entry* e = find(key);
    if (!e) return std::nullopt;
    return e->value;
  }

  std::optional<double> real(const std::string& key) {
    const Entry* e = find(key);
    if (!e) return std::nullopt;
    double v = 0.0;
    const auto& s = e->value;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
      throw ConfigError(key_path(key), fmt::format("expected a number, got '{}'", s));
    }
    return v;
  }

  std::optional<std::uint64_t> integer(const std::string& key) {
    const Entry* e = find(key);
    if (!e) return std::nullopt;
    std::uint64_t v = 0;
    const auto& s = e->value;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (!s.empty() && ec == std::errc{} && ptr == s.data() + s.size()) return v;
    // Accept integral reals such as 1e4.
    double d = 0.0;
    const auto [p2, e2] = std::from_chars(s.data(), s.data() + s.size(), d);
    if (!s.empty() && e2 == std::errc{} && p2 == s.data() + s.size() && d >= 0.0 && d < 1.8e19 &&
        std::floor(d) == d) {
      return static_cast<std::uint64_t>(d);
    }
    throw ConfigError(key_path(key), fmt::format("expected a nonnegative integer, got '{}'", s));
  }

  std::optional<bool> boolean(const std::string& key) {
    const Entry* e = find(key);
    if (!e) return std::nullopt;
    const std::string v = lower(e->value);
    if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
    if (v == "false" || v == "no" || v == "off" || v == "0") return false;
    throw ConfigError(key_path(key), fmt::format("expected a boolean, got '{}'", e->value));
  }

  std::optional<std::vector<double>> reals(const std::string& key) {
    const Entry* e = find(key);
    if (!e) return std::nullopt;
    std::vector<double> out;
    std::string_view rest(e->value);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const auto tok = trim(rest.substr(0, comma));
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (tok.empty() || ec != std::errc{} || ptr != tok.data() + tok.size()) {
        throw ConfigError(key_path(key), fmt::format("expected a list of numbers, got '{}'", e->value));
      }
      out.push_back(v);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    return out;
  }

  template <class Parse>
  auto parsed(const std::string& key, Parse parse) -> std::optional<decltype(parse(std::string_view{}))> {
    const Entry* e = find(key);
    if (!e) return std::nullopt;
    try {
      return parse(e->value);
    } catch (const std::invalid_argument& err) {
      throw ConfigError(key_path(key), err.what());
    }
  }

  void reject_unused() const {
    for (const auto& [key, entry] : entries_) {
      if (!used_.count(key)) throw ConfigError(key_path(key), fmt::format("unknown key (line {})", entry.line));
    }
  }

 private:
  std::string path_;
  std::size_t line_;
  std::map<std::string, Entry> entries_;
  std::set<std::string> used_;
};

Index to_index(std::uint64_t v) { return static_cast<Index>(v); }

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_relative() && !base.empty() ? base / path : path;
}

FwRate parse_rate(std::string_view text) {
  const std::string t = lower(text);
  if (t == "linear" || t == "fw1") return FwRate::Linear;
  if (t == "rescaled" || t == "fw2") return FwRate::Rescaled;
  throw ContractViolation(fmt::format("unknown Frank-Wolfe rate '{}' (linear | rescaled)", text));
}

OptimizerType parse_type(std::string_view text) {
  const std::string t = lower(text);
  if (t == "prunadag") return OptimizerType::PrunAdag;
  if (t == "adagrad") return OptimizerType::Adagrad;
  if (t == "fw" || t == "frank_wolfe") return OptimizerType::FrankWolfe;
  throw ContractViolation(fmt::format("unknown optimizer type '{}' (prunadag | adagrad | fw)", text));
}

void read_problem(Section& s, ProblemSpec& p, const std::filesystem::path& base) {
  const auto kind = s.parsed("kind", parse_problem_kind);
  if (!kind) throw ConfigError(s.key_path("kind"), "missing required key");
  p.kind = *kind;
  if (auto v = s.parsed("matrix", parse_ls_kind)) p.matrix = *v;
  if (auto v = s.integer("m")) p.m = to_index(*v);
  if (auto v = s.integer("n")) p.n = to_index(*v);
  if (auto v = s.integer("nonzeros")) p.nonzeros = to_index(*v);
  if (auto v = s.real("noise")) p.noise = *v;
  if (auto v = s.text("path")) p.path = resolve(base, *v);
  if (auto v = s.boolean("normalize")) p.normalize = *v;
  if (auto v = s.real("train_fraction")) p.train_fraction = *v;
  if (auto v = s.integer("samples")) p.samples = to_index(*v);
  if (auto v = s.integer("features")) p.n = to_index(*v);
  if (auto v = s.integer("informative")) p.informative = to_index(*v);
  if (auto v = s.real("replica_noise")) p.replica_noise = *v;
  if (auto v = s.real("weight_decay")) p.weight_decay = *v;
  if (auto v = s.text("dictionary")) p.dictionary = resolve(base, *v);
  if (auto v = s.text("data")) p.data = resolve(base, *v);
  if (auto v = s.integer("seeds")) p.seeds = static_cast<std::size_t>(*v);
  if (auto v = s.integer("start_nonzeros")) p.start_nonzeros = to_index(*v);
  if (auto v = s.real("f_low")) p.f_low = *v;
  s.reject_unused();

  if (p.seeds < 1) throw ConfigError(s.key_path("seeds"), "at least one seed is required");
  switch (p.kind) {
    case ProblemKind::LeastSquares:
    case ProblemKind::SparseRecovery:
      if (p.m < 1 || p.m >= p.n) throw ConfigError(s.key_path("m"), "requires 1 <= m < n");
      if (p.kind == ProblemKind::SparseRecovery && (p.nonzeros < 1 || p.nonzeros > p.n)) {
        throw ConfigError(s.key_path("nonzeros"), "requires 1 <= nonzeros <= n");
      }
      if (!(p.noise >= 0.0)) throw ConfigError(s.key_path("noise"), "must be >= 0");
      break;
    case ProblemKind::Logistic:
      if (p.path.empty()) throw ConfigError(s.key_path("path"), "missing required key");
      if (!std::filesystem::exists(p.path)) {
        throw ConfigError(s.key_path("path"), fmt::format("file not found: {}", p.path.string()));
      }
      break;
    case ProblemKind::SyntheticClassification:
      if (p.samples < 2) throw ConfigError(s.key_path("samples"), "requires at least 2 samples");
      if (p.informative < 1 || p.informative > p.n) {
        throw ConfigError(s.key_path("informative"), "requires 1 <= informative <= features");
      }
      if (!(p.replica_noise >= 0.0)) throw ConfigError(s.key_path("replica_noise"), "must be >= 0");
      if (!(p.weight_decay > 0.0 && p.weight_decay <= 1.0)) {
        throw ConfigError(s.key_path("weight_decay"), "must lie in (0, 1]");
      }
      break;
    case ProblemKind::SparseCoding:
      for (const auto* key : {"dictionary", "data"}) {
        const auto& file = std::string(key) == "dictionary" ? p.dictionary : p.data;
        if (file.empty()) throw ConfigError(s.key_path(key), "missing required key");
        if (!std::filesystem::exists(file)) {
          throw ConfigError(s.key_path(key), fmt::format("file not found: {}", file.string()));
        }
      }
      break;
  }
  if (p.is_classification() && !(p.train_fraction > 0.0 && p.train_fraction <= 1.0)) {
    throw ConfigError(s.key_path("train_fraction"), "must lie in (0, 1]");
  }
}

OptimizerSpec read_optimizer(Section& s, const std::string& name) {
  OptimizerSpec o;
  o.name = name;
  const auto type = s.parsed("type", parse_type);
  if (!type) throw ConfigError(s.key_path("type"), "missing required key");
  o.type = *type;
  if (auto v = s.parsed("version", parse_version)) o.policy.version = *v;
  if (auto v = s.boolean("relevant_only")) o.policy.relevant_only = *v;
  if (auto v = s.integer("T")) o.T = to_index(*v);
  if (auto v = s.real("varsigma")) o.varsigma = *v;
  if (auto v = s.real("tau")) o.tau = *v;
  if (auto v = s.parsed("rate", parse_rate)) o.rate = *v;
  if (auto v = s.real("beta")) o.beta = *v;
  s.reject_unused();

  if (o.type != OptimizerType::FrankWolfe && !(o.varsigma > 0.0 && o.varsigma < 1.0)) {
    throw ConfigError(s.key_path("varsigma"), "must lie in (0, 1)");
  }
  if (o.type == OptimizerType::FrankWolfe) {
    if (!(o.tau > 0.0)) throw ConfigError(s.key_path("tau"), "must be > 0");
    if (o.rate == FwRate::Rescaled && !(o.beta > 0.0 && o.beta < 1.0)) {
      throw ConfigError(s.key_path("beta"), "must lie in (0, 1)");
    }
  }
  if (o.T && *o.T < 1) throw ConfigError(s.key_path("T"), "must be >= 1");
  return o;
}

}  // namespace

ProblemKind parse_problem_kind(std::string_view text) {
  const std::string t = lower(text);
  if (t == "least_squares") return ProblemKind::LeastSquares;
  if (t == "sparse_recovery") return ProblemKind::SparseRecovery;
  if (t == "logistic") return ProblemKind::Logistic;
  if (t == "synthetic_classification") return ProblemKind::SyntheticClassification;
  if (t == "sparse_coding") return ProblemKind::SparseCoding;
  throw ContractViolation(fmt::format("unknown problem kind '{}'", text));
}

std::string to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::LeastSquares: return "least_squares";
    case ProblemKind::SparseRecovery: return "sparse_recovery";
    case ProblemKind::Logistic: return "logistic";
    case ProblemKind::SyntheticClassification: return "synthetic_classification";
    case ProblemKind::SparseCoding: return "sparse_coding";
  }
  return "unknown";
}

std::string to_string(OptimizerType type) {
  switch (type) {
    case OptimizerType::PrunAdag: return "prunadag";
    case OptimizerType::Adagrad: return "adagrad";
    case OptimizerType::FrankWolfe: return "fw";
  }
  return "unknown";
}

Index default_support(Index n) { return std::max<Index>(1, (n + 9) / 10); }

Index OptimizerSpec::support(Index n) const {
  if (type == OptimizerType::Adagrad) return n;
  return T.value_or(default_support(n));
}

void ExperimentConfig::validate() const {
  if (optimizers.empty()) throw ConfigError("optimizer", "at least one [optimizer NAME] section is required");
  if (problem.seeds < 1) throw ConfigError("problem.seeds", "at least one seed is required");
  std::set<std::string> names;
  for (const auto& o : optimizers) {
    if (!names.insert(o.name).second) throw ConfigError("optimizer." + o.name, "duplicate optimizer name");
  }
  if (!(stop.grad_tol > 0.0)) throw ConfigError("stop.grad_tol", "must be > 0");
  if (stop.max_iters < 1) throw ConfigError("stop.max_iters", "must be >= 1");
  for (double s : sigmas) {
    if (!(s >= 0.0 && s <= 1.0)) throw ConfigError("pruning.sigma", fmt::format("{} outside [0, 1]", s));
  }
  for (double d : deltas) {
    if (!(d >= 0.0)) throw ConfigError("pruning.delta", fmt::format("{} is negative", d));
  }
  if (!(trace.below_delta >= 0.0)) throw ConfigError("trace.delta", "must be >= 0");
  if (jobs < 1) throw ConfigError("run.jobs", "must be >= 1");
}

ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  std::vector<Section> sections;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view body(line);
    if (const auto c = body.find_first_of("#;"); c != std::string_view::npos) body = body.substr(0, c);
    body = trim(body);
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') throw ConfigError("", fmt::format("line {}: unterminated section header", lineno));
      const auto header = trim(body.substr(1, body.size() - 2));
      const auto space = header.find_first_of(" \t");
      const std::string kind(header.substr(0, space));
      const std::string name = space == std::string_view::npos ? "" : std::string(trim(header.substr(space)));
      if (kind == "optimizer") {
        if (name.empty()) throw ConfigError("optimizer", fmt::format("line {}: optimizer section needs a name", lineno));
        if (name.find_first_of(",\"") != std::string::npos) {
          throw ConfigError("optimizer." + name, "name must not contain ',' or '\"'");
        }
        sections.emplace_back("optimizer." + name, lineno);
      } else if (kind == "problem" || kind == "stop" || kind == "pruning" || kind == "trace" || kind == "run") {
        if (!name.empty()) throw ConfigError(kind, fmt::format("line {}: unexpected section name", lineno));
        sections.emplace_back(kind, lineno);
      } else {
        throw ConfigError(std::string(header), fmt::format("line {}: unknown section", lineno));
      }
      for (std::size_t i = 0; i + 1 < sections.size(); ++i) {
        if (sections[i].path() == sections.back().path()) {
          throw ConfigError(sections.back().path(), fmt::format("line {}: duplicate section", lineno));
        }
      }
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ConfigError("", fmt::format("line {}: expected key = value", lineno));
    const std::string key(trim(body.substr(0, eq)));
    if (sections.empty()) throw ConfigError(key, fmt::format("line {}: key outside any section", lineno));
    if (key.empty()) throw ConfigError(sections.back().path(), fmt::format("line {}: empty key", lineno));
    sections.back().set(key, std::string(trim(body.substr(eq + 1))), lineno);
  }

  ExperimentConfig cfg;
  bool have_problem = false;
  for (auto& s : sections) {
    const std::string& path = s.path();
    if (path == "problem") {
      read_problem(s, cfg.problem, base_dir);
      have_problem = true;
    } else if (path.rfind("optimizer.", 0) == 0) {
      cfg.optimizers.push_back(read_optimizer(s, path.substr(10)));
    } else if (path == "stop") {
      if (auto v = s.real("grad_tol")) cfg.stop.grad_tol = *v;
      if (auto v = s.integer("max_iters")) cfg.stop.max_iters = static_cast<std::size_t>(*v);
      s.reject_unused();
    } else if (path == "pruning") {
      if (auto v = s.reals("sigma")) cfg.sigmas = *v;
      if (auto v = s.reals("delta")) cfg.deltas = *v;
      s.reject_unused();
    } else if (path == "trace") {
      if (auto v = s.real("delta")) cfg.trace.below_delta = *v;
      if (auto v = s.boolean("objective")) cfg.trace.record_objective = *v;
      s.reject_unused();
    } else if (path == "run") {
      if (auto v = s.integer("master_seed")) cfg.master_seed = *v;
      if (auto v = s.integer("jobs")) cfg.jobs = static_cast<std::size_t>(*v);
      if (auto v = s.text("output")) cfg.output = resolve(base_dir, *v);
      s.reject_unused();
    }
  }
  if (!have_problem) throw ConfigError("problem", "missing required section");
  for (const auto& o : cfg.optimizers) {
    if (o.T && *o.T > cfg.problem.n && cfg.problem.kind != ProblemKind::SparseCoding) {
      throw ConfigError("optimizer." + o.name + ".T", fmt::format("exceeds n = {}", cfg.problem.n));
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open " + path.string());
  return parse_config(in, path.parent_path());
}

}  // namespace prunadag

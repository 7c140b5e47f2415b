#include "prunadag/harness.hpp"

#include "prunadag/baselines.hpp"
#include "prunadag/dataset.hpp"
#include "prunadag/matrix_io.hpp"
#include "prunadag/optimizer.hpp"
#include "prunadag/rng.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace prunadag {
namespace {

constexpr std::uint64_t kInstanceStream = 1;
constexpr std::uint64_t kStartStream = 2;
constexpr std::uint64_t kSplitStream = 3;

std::string num(double v) { return fmt::format("{:.17g}", v); }
std::string num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::ofstream open_csv(const std::filesystem::path& path, std::string_view header) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << header << '\n';
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool in_quotes = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_quotes) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        in_quotes = false;
      } else {
        cell += c;
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else if (c != '\r') {
      cell += c;
    }
  }
  cells.push_back(std::move(cell));
  return cells;
}

struct CsvTable {
  std::map<std::string, std::size_t> columns;
  std::vector<std::vector<std::string>> rows;

  [[nodiscard]] const std::string& cell(std::size_t row, const std::string& name) const {
    const auto it = columns.find(name);
    if (it == columns.end()) throw ParseError("missing column '" + name + "'", 0);
    if (it->second >= rows[row].size()) throw ParseError("short row", row + 2);
    return rows[row][it->second];
  }
};

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + " is empty", 0);
  const auto header = split_csv(line);
  for (std::size_t i = 0; i < header.size(); ++i) t.columns[header[i]] = i;
  while (std::getline(in, line)) {
    if (!line.empty()) t.rows.push_back(split_csv(line));
  }
  return t;
}

double parse_cell(const std::string& s) {
  if (s.empty() || s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return kInfinity;
  if (s == "-inf") return -kInfinity;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw ParseError("bad number '" + s + "'", 0);
  return v;
}

std::size_t parse_count(const std::string& s) { return static_cast<std::size_t>(parse_cell(s)); }

Index start_support(const ExperimentConfig& cfg, Index n) {
  return std::min(n, cfg.problem.start_nonzeros.value_or(default_support(n)));
}

std::vector<TheoryCheck> theory_checks(const RunRecord& record, const BoundInputs& inputs,
                                       const std::optional<double>& L, double f_low) {
  std::vector<TheoryCheck> out;
  if (!L || record.size() == 0 || !std::isfinite(record.final_objective)) return out;
  BoundInputs in = inputs;
  in.L = *L;
  out.push_back({"gradient_bound", check_gradient_bound(record, in, f_low)});
  out.push_back({"descent_lemma", check_descent_lemma(record, *L)});
  return out;
}

std::string status(const CheckReport& r) {
  if (r.skipped) return "skipped";
  return r.passed() ? "pass" : "fail";
}

}  // namespace

std::vector<Instance> make_instances(const ExperimentConfig& cfg) {
  const ProblemSpec& p = cfg.problem;
  std::vector<Instance> out(p.seeds);
  std::optional<Dataset> libsvm;
  Matrix dictionary;
  Matrix signals;
  if (p.kind == ProblemKind::Logistic) libsvm = read_libsvm(p.path);
  if (p.kind == ProblemKind::SparseCoding) {
    dictionary = read_matrix(p.dictionary);
    signals = read_matrix(p.data);
    if (signals.rows() != dictionary.rows()) {
      throw ConfigError("problem.data", fmt::format("signals have {} rows, dictionary has {}",
                                                    signals.rows(), dictionary.rows()));
    }
  }

  for (std::size_t s = 0; s < p.seeds; ++s) {
    Instance& inst = out[s];
    const std::uint64_t seed = derive_seed(cfg.master_seed, s, kInstanceStream);
    const std::uint64_t split_seed = derive_seed(cfg.master_seed, s, kSplitStream);
    switch (p.kind) {
      case ProblemKind::LeastSquares:
        inst.problem = std::make_shared<LeastSquaresProblem>(gen_least_squares(p.matrix, p.m, p.n, seed));
        break;
      case ProblemKind::SparseRecovery:
        inst.problem = std::make_shared<LeastSquaresProblem>(
            gen_sparse_recovery(p.m, p.n, p.nonzeros, p.noise, seed));
        break;
      case ProblemKind::Logistic:
      case ProblemKind::SyntheticClassification: {
        const Dataset data = p.kind == ProblemKind::Logistic
                                 ? *libsvm
                                 : gen_separable_dataset({p.samples, p.n, p.informative, p.replica_noise, p.weight_decay}, seed);
        DataSplit split = split_dataset(data, SplitOptions{p.train_fraction, p.normalize, split_seed});
        auto train = std::make_shared<LogisticProblem>(std::move(split.train));
        inst.evaluation = split.test ? std::make_shared<LogisticProblem>(std::move(*split.test)) : train;
        inst.problem = train;
        break;
      }
      case ProblemKind::SparseCoding: {
        const auto col = static_cast<Eigen::Index>(s % static_cast<std::size_t>(signals.cols()));
        inst.problem = std::make_shared<SparseCodingProblem>(dictionary, signals.col(col));
        break;
      }
    }
    const Index n = inst.problem->dim();
    inst.x0 = random_sparse_start(n, start_support(cfg, n), derive_seed(cfg.master_seed, s, kStartStream));
  }
  return out;
}

RunResult run_single(const ExperimentConfig& cfg, std::size_t optimizer, std::size_t seed,
                     const Instance& instance) {
  const OptimizerSpec& spec = cfg.optimizers.at(optimizer);
  const Problem& problem = *instance.problem;
  RunResult r;
  r.optimizer = optimizer;
  r.seed = seed;
  r.n = problem.dim();
  r.T = spec.support(r.n);
  if (r.T > r.n) {
    throw ConfigError("optimizer." + spec.name + ".T", fmt::format("exceeds the problem dimension {}", r.n));
  }
  r.varsigma = spec.varsigma;
  r.lipschitz = problem.lipschitz();
  r.f_low = cfg.problem.f_low ? cfg.problem.f_low : problem.lower_bound();

  try {
    switch (spec.type) {
      case OptimizerType::PrunAdag: {
        PrunAdagState state(instance.x0, r.T, spec.varsigma, spec.policy);
        r.record = run(state, problem, cfg.stop, cfg.trace);
        break;
      }
      case OptimizerType::Adagrad: {
        AdagradState state(instance.x0, spec.varsigma);
        r.record = run(state, problem, cfg.stop, cfg.trace);
        break;
      }
      case OptimizerType::FrankWolfe: {
        FwState state(instance.x0, FwConfig{r.T, spec.tau, spec.rate, spec.beta});
        r.record = run(state, problem, cfg.stop, cfg.trace);
        break;
      }
    }
  } catch (const DivergedError& e) {
    r.diverged = true;
    if (e.partial()) r.record = *e.partial();
    r.record.termination = Termination::Diverged;
    r.record.message = e.what();
    return r;
  }

  try {
    r.prune = prune_report(r.record.final_x, problem, cfg.sigmas, cfg.deltas);
  } catch (const DivergedError& e) {
    r.diverged = true;
    r.record.message = e.what();
    r.prune.clear();
    return r;
  }
  if (instance.evaluation) {
    r.accuracy = classify_accuracy(r.record.final_x, *instance.evaluation);
    for (const auto& row : r.prune) r.prune_accuracy.push_back(classify_accuracy(row.pruned, *instance.evaluation));
  } else {
    r.prune_accuracy.assign(r.prune.size(), std::nullopt);
  }
  if (spec.type != OptimizerType::FrankWolfe && cfg.trace.record_objective) {
    BoundInputs in;
    in.n = r.n;
    in.T = r.T;
    in.varsigma = r.varsigma;
    r.theory = theory_checks(r.record, in, r.lipschitz, r.f_low.value_or(0.0));
  }
  return r;
}

const RunResult& ExperimentResult::at(std::size_t optimizer, std::size_t seed) const {
  return runs.at(optimizer * config.problem.seeds + seed);
}

std::size_t ExperimentResult::diverged_count(std::size_t optimizer) const {
  std::size_t count = 0;
  for (std::size_t s = 0; s < config.problem.seeds; ++s) count += at(optimizer, s).diverged ? 1 : 0;
  return count;
}

ExperimentResult execute(const ExperimentConfig& cfg, const ProgressFn& progress) {
  cfg.validate();
  const std::vector<Instance> instances = make_instances(cfg);
  const std::size_t seeds = cfg.problem.seeds;
  const std::size_t tasks = cfg.optimizers.size() * seeds;

  ExperimentResult result{cfg, std::vector<RunResult>(tasks)};
  std::atomic<std::size_t> next{0};
  std::mutex mutex;
  std::exception_ptr failure;
  const auto worker = [&] {
    for (std::size_t t = next++; t < tasks; t = next++) {
      try {
        RunResult r = run_single(cfg, t / seeds, t % seeds, instances[t % seeds]);
        const std::lock_guard lock(mutex);
        result.runs[t] = std::move(r);
        if (progress) progress(result.runs[t], cfg);
      } catch (...) {
        const std::lock_guard lock(mutex);
        if (!failure) failure = std::current_exception();
        next = tasks;
      }
    }
  };
  const std::size_t threads = std::min<std::size_t>(cfg.jobs, std::max<std::size_t>(tasks, 1));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return result;
}

void write_outputs(const ExperimentResult& result, const std::filesystem::path& dir) {
  const ExperimentConfig& cfg = result.config;
  const std::size_t seeds = cfg.problem.seeds;
  std::filesystem::create_directories(dir / "solutions");

  auto trace = open_csv(dir / "trace.csv",
                        "optimizer,seed,k,grad_norm,grad_norm_O,f,below_delta_count,card_R,card_A,card_D");
  auto detail = open_csv(dir / "trace_detail.csv",
                         "optimizer,seed,k,f,grad_norm,opt_linear,opt_quadratic,dec_quadratic,max_abs_x");
  auto runs = open_csv(dir / "runs.csv",
                       "optimizer,seed,type,n,T,varsigma,L,f_low,iterations,termination,final_grad_norm,"
                       "final_objective,final_below_delta_count,accuracy,message");
  auto prune = open_csv(dir / "prune.csv",
                        "optimizer,seed,target_kind,target_value,achieved_sparsity,rho,omega,"
                        "accuracy_if_classification");
  auto theory = open_csv(dir / "theory.csv", "optimizer,seed,check,status,checked,violations,worst_margin,note");

  for (const RunResult& r : result.runs) {
    const OptimizerSpec& spec = cfg.optimizers[r.optimizer];
    const std::string& name = spec.name;
    const RunRecord& rec = r.record;
    for (std::size_t k = 0; k < rec.size(); ++k) {
      trace << fmt::format("{},{},{},{},{},{},{},{},{},{}\n", name, r.seed, k, num(rec.grad_norm[k]),
                           num(rec.grad_norm_opt[k]), num(rec.objective[k]), rec.below_count[k],
                           rec.card_relevant[k], rec.card_acceptable[k], rec.card_decreasable[k]);
      detail << fmt::format("{},{},{},{},{},{},{},{},{}\n", name, r.seed, k, num(rec.objective[k]),
                            num(rec.grad_norm[k]), num(rec.opt_linear[k]), num(rec.opt_quadratic[k]),
                            num(rec.dec_quadratic[k]), num(rec.max_abs_x[k]));
    }
    const std::string below = rec.final_x.size() > 0 ? std::to_string(count_below(rec.final_x, cfg.trace.below_delta)) : "";
    runs << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", name, r.seed, to_string(spec.type),
                        r.n, r.T, num(r.varsigma), num(r.lipschitz), num(r.f_low), rec.size(),
                        to_string(rec.termination), num(rec.final_grad_norm), num(rec.final_objective), below,
                        num(r.accuracy), quoted(rec.message));
    for (std::size_t i = 0; i < r.prune.size(); ++i) {
      const PruneRow& row = r.prune[i];
      prune << fmt::format("{},{},{},{},{},{},{},{}\n", name, r.seed, to_string(row.target), num(row.value),
                           num(row.achieved_sparsity), num(row.rho), num(row.omega), num(r.prune_accuracy[i]));
    }
    for (const TheoryCheck& c : r.theory) {
      theory << fmt::format("{},{},{},{},{},{},{},{}\n", name, r.seed, c.name, status(c.report), c.report.checked,
                            c.report.violations.size(), num(c.report.worst_margin), quoted(c.report.reason));
    }
    if (!r.diverged) write_vector(dir / "solutions" / fmt::format("{}_seed{}.padm", name, r.seed), rec.final_x);
  }

  auto aggregate = open_csv(dir / "aggregate.csv",
                            "optimizer,target_kind,target_value,runs,diverged,mean_achieved_sparsity,mean_rho,"
                            "mean_omega,mean_accuracy");
  auto rho_plot = open_csv(dir / "plot_rho.csv", "optimizer,sigma,mean,runs");
  auto omega_plot = open_csv(dir / "plot_omega.csv", "optimizer,sigma,mean,runs");
  auto grad_plot = open_csv(dir / "plot_grad_norm.csv", "optimizer,k,mean,runs");
  auto below_plot = open_csv(dir / "plot_below_delta.csv", "optimizer,k,mean,runs");

  for (std::size_t o = 0; o < cfg.optimizers.size(); ++o) {
    const std::string& name = cfg.optimizers[o].name;
    const std::size_t diverged = result.diverged_count(o);
    const std::size_t ok = seeds - diverged;
    const std::size_t targets = cfg.sigmas.size() + cfg.deltas.size();
    {
      // Unpruned row (target_kind "none") first.
      double acc = 0.0;
      std::size_t acc_n = 0;
      for (std::size_t s = 0; s < seeds; ++s) {
        const RunResult& r = result.at(o, s);
        if (!r.diverged && r.accuracy) {
          acc += *r.accuracy;
          ++acc_n;
        }
      }
      aggregate << fmt::format("{},none,0,{},{},,,,{}\n", name, ok, diverged,
                               acc_n ? num(acc / static_cast<double>(acc_n)) : std::string());
    }
    for (std::size_t i = 0; i < targets; ++i) {
      double sp = 0.0, rho = 0.0, omega = 0.0, acc = 0.0;
      std::size_t acc_n = 0;
      PruneTarget kind = i < cfg.sigmas.size() ? PruneTarget::Sparsity : PruneTarget::Threshold;
      const double value = i < cfg.sigmas.size() ? cfg.sigmas[i] : cfg.deltas[i - cfg.sigmas.size()];
      for (std::size_t s = 0; s < seeds; ++s) {
        const RunResult& r = result.at(o, s);
        if (r.diverged) continue;
        sp += r.prune[i].achieved_sparsity;
        rho += r.prune[i].rho;
        omega += r.prune[i].omega;
        if (r.prune_accuracy[i]) {
          acc += *r.prune_accuracy[i];
          ++acc_n;
        }
      }
      const auto mean = [&](double total) { return ok ? num(total / static_cast<double>(ok)) : std::string(); };
      aggregate << fmt::format("{},{},{},{},{},{},{},{},{}\n", name, to_string(kind), num(value), ok, diverged,
                               mean(sp), mean(rho), mean(omega),
                               acc_n ? num(acc / static_cast<double>(acc_n)) : std::string());
      if (kind == PruneTarget::Sparsity) {
        rho_plot << fmt::format("{},{},{},{}\n", name, num(value), mean(rho), ok);
        omega_plot << fmt::format("{},{},{},{}\n", name, num(value), mean(omega), ok);
      }
    }

    // Runs that stopped early keep contributing their last value.
    std::size_t longest = 0;
    for (std::size_t s = 0; s < seeds; ++s) {
      const RunResult& r = result.at(o, s);
      if (!r.diverged) longest = std::max(longest, r.record.size());
    }
    for (std::size_t k = 0; k < longest; ++k) {
      double g = 0.0, below = 0.0;
      for (std::size_t s = 0; s < seeds; ++s) {
        const RunResult& r = result.at(o, s);
        if (r.diverged || r.record.size() == 0) continue;
        const std::size_t j = std::min(k, r.record.size() - 1);
        g += r.record.grad_norm[j];
        below += 100.0 * static_cast<double>(r.record.below_count[j]) / static_cast<double>(r.n);
      }
      grad_plot << fmt::format("{},{},{},{}\n", name, k, num(g / static_cast<double>(ok)), ok);
      below_plot << fmt::format("{},{},{},{}\n", name, k, num(below / static_cast<double>(ok)), ok);
    }
  }
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const ProgressFn& progress) {
  ExperimentResult result = execute(cfg, progress);
  write_outputs(result, cfg.output);
  return result;
}

ExperimentConfig with_relevant_only_ablation(ExperimentConfig cfg) {
  OptimizerSpec base;
  base.type = OptimizerType::PrunAdag;
  for (const auto& o : cfg.optimizers) {
    if (o.type == OptimizerType::PrunAdag) {
      base = o;
      break;
    }
  }
  const auto has = [&](const VersionPolicy& p) {
    return std::any_of(cfg.optimizers.begin(), cfg.optimizers.end(), [&](const OptimizerSpec& o) {
      return o.type == OptimizerType::PrunAdag && o.policy.version == p.version &&
             o.policy.relevant_only == p.relevant_only;
    });
  };
  const auto name_taken = [&](const std::string& name) {
    return std::any_of(cfg.optimizers.begin(), cfg.optimizers.end(),
                       [&](const OptimizerSpec& o) { return o.name == name; });
  };
  std::vector<VersionPolicy> wanted;
  for (Version v : {Version::V1, Version::V2, Version::V3, Version::V4}) wanted.push_back({v, false});
  wanted.push_back(VersionPolicy::relevant_only_with(Version::V3));
  for (const VersionPolicy& p : wanted) {
    if (has(p)) continue;
    OptimizerSpec o = base;
    o.policy = p;
    o.name = p.relevant_only ? "RelevantOnly" : to_string(p.version);
    while (name_taken(o.name)) o.name += "_";
    cfg.optimizers.push_back(o);
  }
  return cfg;
}

ExperimentResult ablation_relevant_only(const ExperimentConfig& cfg, const ProgressFn& progress) {
  return run_experiment(with_relevant_only_ablation(cfg), progress);
}

std::vector<VerifyRow> verify_directory(const std::filesystem::path& dir) {
  const CsvTable runs = read_csv(dir / "runs.csv");
  const CsvTable detail = read_csv(dir / "trace_detail.csv");

  std::map<std::pair<std::string, std::size_t>, RunRecord> traces;
  for (std::size_t i = 0; i < detail.rows.size(); ++i) {
    RunRecord& rec = traces[{detail.cell(i, "optimizer"), parse_count(detail.cell(i, "seed"))}];
    IterationRecord row;
    row.objective = parse_cell(detail.cell(i, "f"));
    row.grad_norm = parse_cell(detail.cell(i, "grad_norm"));
    row.opt_linear = parse_cell(detail.cell(i, "opt_linear"));
    row.opt_quadratic = parse_cell(detail.cell(i, "opt_quadratic"));
    row.dec_quadratic = parse_cell(detail.cell(i, "dec_quadratic"));
    row.max_abs_x = parse_cell(detail.cell(i, "max_abs_x"));
    rec.push(row);
  }

  std::vector<VerifyRow> out;
  for (std::size_t i = 0; i < runs.rows.size(); ++i) {
    const std::string name = runs.cell(i, "optimizer");
    const std::size_t seed = parse_count(runs.cell(i, "seed"));
    const std::string type = runs.cell(i, "type");
    if (type == "fw") continue;
    const auto it = traces.find({name, seed});
    RunRecord rec = it == traces.end() ? RunRecord{} : it->second;
    rec.final_objective = parse_cell(runs.cell(i, "final_objective"));
    const double L = parse_cell(runs.cell(i, "L"));
    const double f_low = parse_cell(runs.cell(i, "f_low"));

    BoundInputs in;
    in.n = parse_count(runs.cell(i, "n"));
    in.T = parse_count(runs.cell(i, "T"));
    in.varsigma = parse_cell(runs.cell(i, "varsigma"));
    const bool usable = std::isfinite(L) && rec.size() > 0 && std::isfinite(rec.final_objective) &&
                        runs.cell(i, "termination") != "diverged";
    if (!usable) {
      CheckReport skipped;
      skipped.skipped = true;
      skipped.reason = "no usable trace (diverged, unknown L, or objective not recorded)";
      out.push_back({name, seed, "gradient_bound", skipped});
      out.push_back({name, seed, "descent_lemma", skipped});
      continue;
    }
    for (TheoryCheck& c : theory_checks(rec, in, L, std::isfinite(f_low) ? f_low : 0.0)) {
      out.push_back({name, seed, c.name, std::move(c.report)});
    }
  }
  return out;
}

}  // namespace prunadag

#include "prunadag/config.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace prunadag {
namespace {

ExperimentConfig parse(const std::string& text, const std::filesystem::path& base = {}) {
  std::istringstream in(text);
  return parse_config(in, base);
}

std::string expect_error(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.key_path();
  }
  ADD_FAILURE() << "no ConfigError for:\n" << text;
  return {};
}

const std::string kMinimal = R"(
[problem]
kind = least_squares
matrix = A3
m = 20
n = 200

[optimizer V3]
type = prunadag
version = V3
)";

TEST(Config, Defaults) {
  const ExperimentConfig cfg = parse(kMinimal);
  EXPECT_EQ(cfg.problem.matrix, LsKind::A3);
  EXPECT_EQ(cfg.problem.seeds, 20u);
  ASSERT_EQ(cfg.optimizers.size(), 1u);
  EXPECT_EQ(cfg.optimizers[0].name, "V3");
  EXPECT_EQ(cfg.optimizers[0].policy.version, Version::V3);
  EXPECT_FALSE(cfg.optimizers[0].T.has_value());
  EXPECT_EQ(cfg.optimizers[0].support(200), 20u);
  EXPECT_EQ(cfg.optimizers[0].varsigma, 0.01);
  EXPECT_EQ(cfg.stop.grad_tol, 1e-9);
  EXPECT_EQ(cfg.stop.max_iters, 10000u);
  EXPECT_EQ(cfg.jobs, 1u);
  EXPECT_EQ(cfg.master_seed, 0u);
}

TEST(Config, DefaultSupportRoundsUp) {
  EXPECT_EQ(default_support(200), 20u);
  EXPECT_EQ(default_support(201), 21u);
  EXPECT_EQ(default_support(3), 1u);
}

TEST(Config, FullFile) {
  const ExperimentConfig cfg = parse(R"(
# comment
[problem]
kind = sparse_recovery   ; trailing comment
m = 30
features = 120
nonzeros = 5
noise = 0.01
seeds = 3
start_nonzeros = 7
f_low = -1

[optimizer FW]
type = fw
T = 12
tau = 100
rate = fw2
beta = 0.001

[optimizer Ada]
type = adagrad
varsigma = 0.02

[optimizer RO]
type = prunadag
version = V1
relevant_only = yes

[stop]
grad_tol = 1e-6
max_iters = 1e4

[pruning]
sigma = 0.1, 0.5,0.9
delta = 1e-3

[trace]
delta = 1e-2
objective = off

[run]
master_seed = 42
jobs = 2
output = out/dir
)", "/base");
  EXPECT_EQ(cfg.problem.kind, ProblemKind::SparseRecovery);
  EXPECT_EQ(cfg.problem.n, 120u);
  EXPECT_EQ(cfg.problem.nonzeros, 5u);
  EXPECT_EQ(cfg.problem.start_nonzeros, 7u);
  EXPECT_EQ(cfg.problem.f_low, -1.0);
  ASSERT_EQ(cfg.optimizers.size(), 3u);
  EXPECT_EQ(cfg.optimizers[0].type, OptimizerType::FrankWolfe);
  EXPECT_EQ(cfg.optimizers[0].rate, FwRate::Rescaled);
  EXPECT_EQ(cfg.optimizers[0].support(120), 12u);
  EXPECT_EQ(cfg.optimizers[1].support(120), 120u);
  EXPECT_EQ(cfg.optimizers[1].varsigma, 0.02);
  EXPECT_TRUE(cfg.optimizers[2].policy.relevant_only);
  EXPECT_EQ(cfg.stop.max_iters, 10000u);
  EXPECT_EQ(cfg.sigmas, (std::vector<double>{0.1, 0.5, 0.9}));
  EXPECT_EQ(cfg.deltas, (std::vector<double>{1e-3}));
  EXPECT_EQ(cfg.trace.below_delta, 1e-2);
  EXPECT_FALSE(cfg.trace.record_objective);
  EXPECT_EQ(cfg.master_seed, 42u);
  EXPECT_EQ(cfg.jobs, 2u);
  EXPECT_EQ(cfg.output, std::filesystem::path("/base/out/dir"));
}

TEST(Config, EmptyOptimizerList) {
  EXPECT_EQ(expect_error("[problem]\nkind = least_squares\nm = 2\nn = 4\n"), "optimizer");
}

TEST(Config, ErrorsNameTheKeyPath) {
  EXPECT_EQ(expect_error(kMinimal + "T = 1.5\n"), "optimizer.V3.T");
  EXPECT_EQ(expect_error(kMinimal + "T = 500\n"), "optimizer.V3.T");
  EXPECT_EQ(expect_error(kMinimal + "colour = red\n"), "optimizer.V3.colour");
  EXPECT_EQ(expect_error(kMinimal + "version = V1\n"), "optimizer.V3.version");
  EXPECT_EQ(expect_error(kMinimal + "version2 = V9\n"), "optimizer.V3.version2");
  EXPECT_EQ(expect_error(kMinimal + "varsigma = 1\n"), "optimizer.V3.varsigma");
  EXPECT_EQ(expect_error(kMinimal + "[stop]\nmax_iters = 0\n"), "stop.max_iters");
  EXPECT_EQ(expect_error(kMinimal + "[stop]\ngrad_tol = fast\n"), "stop.grad_tol");
  EXPECT_EQ(expect_error(kMinimal + "[pruning]\nsigma = 0.5, 1.5\n"), "pruning.sigma");
  EXPECT_EQ(expect_error(kMinimal + "[pruning]\nsigma = 0.5,,\n"), "pruning.sigma");
  EXPECT_EQ(expect_error(kMinimal + "[run]\njobs = 0\n"), "run.jobs");
  EXPECT_EQ(expect_error(kMinimal + "[trace]\nobjective = maybe\n"), "trace.objective");
  EXPECT_EQ(expect_error(kMinimal + "[optimizer V3]\ntype = adagrad\n"), "optimizer.V3");
  EXPECT_EQ(expect_error(kMinimal + "[optimizer]\ntype = adagrad\n"), "optimizer");
  EXPECT_EQ(expect_error(kMinimal + "[optimizer a,b]\ntype = adagrad\n"), "optimizer.a,b");
  EXPECT_EQ(expect_error(kMinimal + "[optimizer X]\n"), "optimizer.X.type");
  EXPECT_EQ(expect_error(kMinimal + "[optimizer X]\ntype = sgd\n"), "optimizer.X.type");
  EXPECT_EQ(expect_error(kMinimal + "[optimizer X]\ntype = fw\nrate = cubic\n"), "optimizer.X.rate");
  EXPECT_EQ(expect_error(kMinimal + "[extras]\n"), "extras");
  EXPECT_EQ(expect_error("[optimizer A]\ntype = adagrad\n"), "problem");
  EXPECT_EQ(expect_error("[problem]\nm = 1\n[optimizer A]\ntype = adagrad\n"), "problem.kind");
  EXPECT_EQ(expect_error("[problem]\nkind = least_squares\nm = 5\nn = 5\n[optimizer A]\ntype = adagrad\n"),
            "problem.m");
  EXPECT_EQ(expect_error("[problem]\nkind = least_squares\nmatrix = A9\n[optimizer A]\ntype = adagrad\n"),
            "problem.matrix");
  EXPECT_EQ(expect_error("[problem]\nkind = least_squares\nseeds = 0\n[optimizer A]\ntype = adagrad\n"),
            "problem.seeds");
  EXPECT_EQ(expect_error("[problem]\nkind = least_squares\nkind = logistic\n[optimizer A]\ntype = adagrad\n"),
            "problem.kind");
  EXPECT_EQ(expect_error("[problem]\nkind = logistic\n[optimizer A]\ntype = adagrad\n"), "problem.path");
  EXPECT_EQ(expect_error("[problem]\nkind = logistic\npath = /nonexistent.svm\n[optimizer A]\ntype = adagrad\n"),
            "problem.path");
  EXPECT_EQ(expect_error("[problem]\nkind = sparse_coding\n[optimizer A]\ntype = adagrad\n"), "problem.dictionary");
  EXPECT_EQ(expect_error("[problem]\nkind = synthetic_classification\ninformative = 2000\n[optimizer A]\ntype = adagrad\n"),
            "problem.informative");
}

TEST(Config, SyntaxErrors) {
  EXPECT_EQ(expect_error("kind = x\n"), "kind");
  EXPECT_EQ(expect_error("[problem\n"), "");
  EXPECT_EQ(expect_error("[problem]\njust words\n"), "");
  EXPECT_EQ(expect_error("[problem]\n= 3\n"), "problem");
}

TEST(Config, RelativePathsResolveAgainstBaseDirectory) {
  const auto dir = std::filesystem::temp_directory_path() / "prunadag_config_paths";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "d.svm") << "1 1:1\n-1 1:0\n";
  std::ofstream(dir / "run.ini") << "[problem]\nkind = logistic\npath = d.svm\n[optimizer A]\ntype = adagrad\n";
  const ExperimentConfig cfg = load_config(dir / "run.ini");
  EXPECT_EQ(cfg.problem.path, dir / "d.svm");
  EXPECT_TRUE(cfg.problem.is_classification());
  std::filesystem::remove_all(dir);
  EXPECT_THROW(load_config(dir / "run.ini"), ConfigError);
}

TEST(Config, ValidateCatchesProgrammaticMistakes) {
  ExperimentConfig cfg = parse(kMinimal);
  cfg.optimizers.push_back(cfg.optimizers[0]);
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.optimizers.pop_back();
  cfg.sigmas = {-0.1};
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.sigmas.clear();
  EXPECT_NO_THROW(cfg.validate());
}

TEST(Config, Names) {
  EXPECT_EQ(parse_problem_kind("synthetic_classification"), ProblemKind::SyntheticClassification);
  EXPECT_EQ(to_string(ProblemKind::SparseCoding), "sparse_coding");
  EXPECT_EQ(to_string(OptimizerType::Adagrad), "adagrad");
}

TEST(Config, ShippedExamplesLoad) {
  std::size_t loaded = 0;
  for (const auto& entry : std::filesystem::directory_iterator(PRUNADAG_CONFIG_DIR)) {
    if (entry.path().extension() != ".ini") continue;
    SCOPED_TRACE(entry.path().string());
    const ExperimentConfig cfg = load_config(entry.path());
    EXPECT_FALSE(cfg.optimizers.empty());
    ++loaded;
  }
  EXPECT_GE(loaded, 9u);
}

}  // namespace
}  // namespace prunadag

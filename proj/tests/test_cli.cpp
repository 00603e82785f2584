#include <gtest/gtest.h>

#include <algorithm>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "bdscreen/cli/commands.hpp"
#include "bdscreen/trained_model.hpp"
#include "test_support.hpp"

using namespace bdscreen;
using namespace bdscreen::cli;
using bdscreen::testing::TempDir;

namespace {

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "bdscreen");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST(RunConfigTest, Defaults) {
  const RunConfig cfg;
  EXPECT_EQ(cfg.k, 3);
  EXPECT_DOUBLE_EQ(cfg.C, 1.0);
  EXPECT_DOUBLE_EQ(cfg.tol, 1e-3);
  EXPECT_EQ(cfg.folds, 10);
  EXPECT_DOUBLE_EQ(cfg.test_fraction, 0.2);
  EXPECT_EQ(cfg.seed, 42u);
}

TEST(RunConfigTest, PrecedenceConfigFlagsEnv) {
  TempDir dir;
  const auto path = dir.file("cfg.json");
  {
    std::ofstream out(path);
    out << R"({"seed": 1, "k": 5, "folds": 4, "C": 2.0})";
  }
  FlagValues flags;
  flags.k = 7;
  flags.folds = 6;
  auto env = [](const std::string& name) -> std::optional<std::string> {
    if (name == "BDSCREEN_FOLDS") return "8";
    return std::nullopt;
  };
  const RunConfig cfg = resolve(path, flags, env);
  EXPECT_EQ(cfg.seed, 1u);
  EXPECT_DOUBLE_EQ(cfg.C, 2.0);
  EXPECT_EQ(cfg.k, 7);
  EXPECT_EQ(cfg.folds, 8);
}

TEST(RunConfigTest, BadValues) {
  RunConfig cfg;
  cfg.folds = 1;
  EXPECT_THROW(validate(cfg), UsageError);
  cfg = {};
  cfg.kind = "forest";
  EXPECT_THROW(validate(cfg), UsageError);
  cfg = {};
  cfg.test_fraction = 1.0;
  EXPECT_THROW(validate(cfg), UsageError);
  auto env = [](const std::string& name) -> std::optional<std::string> {
    if (name == "BDSCREEN_SEED") return "abc";
    return std::nullopt;
  };
  EXPECT_THROW(resolve("", {}, env), ConfigError);
}

TEST(Cli, GenerateIsDeterministic) {
  TempDir dir;
  const auto a = dir.file("a.csv"), b = dir.file("b.csv");
  ASSERT_EQ(run_cli({"generate", "--n", "1000", "--seed", "7", "--out", a}).code, 0);
  ASSERT_EQ(run_cli({"generate", "--n", "1000", "--seed", "7", "--out", b}).code, 0);
  const std::string text = slurp(a);
  EXPECT_EQ(text, slurp(b));
  EXPECT_EQ(count_lines(text), 1001u);
}

TEST(Cli, GenerateTooSmallIsError) {
  const auto r = run_cli({"generate", "--n", "5"});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("30"), std::string::npos);
  EXPECT_TRUE(r.out.empty());
}

TEST(Cli, TrainWritesModelFiles) {
  TempDir dir;
  const auto data = dir.file("d.csv");
  ASSERT_EQ(run_cli({"generate", "--n", "200", "--out", data}).code, 0);
  auto r = run_cli({"train", "--kind", "knn", "--data", data, "--out", dir.file("k.model")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("seed: 42"), std::string::npos);
  EXPECT_EQ(nlohmann::json::parse(slurp(dir.file("k.model"))).at("model_kind"), "knn");

  r = run_cli({"train", "--kind", "svm", "--data", data, "--out", dir.file("s.model")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(slurp(dir.file("s.model"))).at("svm").at("classes").size(), 3u);
}

TEST(Cli, TrainUnknownKindIsUsageError) {
  TempDir dir;
  EXPECT_EQ(run_cli({"train", "--kind", "forest", "--data", "x.csv", "--out", dir.file("m")}).code, kExitUsage);
}

TEST(Cli, TrainRejectsUnlabeledData) {
  TempDir dir;
  const auto data = dir.file("u.csv");
  {
    std::ofstream out(data);
    out << "id";
    for (const auto& f : builtin_schema().features()) out << ',' << f.name;
    out << "\nu1,22,1,1,1,0,0,3,0,0,0,2,5,3000,6.5,1,0,1,2\n";
  }
  const auto r = run_cli({"train", "--kind", "knn", "--data", data, "--out", dir.file("m")});
  EXPECT_EQ(r.code, kExitFailure);
  EXPECT_NE(r.err.find("label"), std::string::npos);
}

TEST(Cli, EvaluateBothPrintsSelection) {
  TempDir dir;
  const auto data = dir.file("d.csv");
  ASSERT_EQ(run_cli({"generate", "--n", "300", "--seed", "3", "--out", data}).code, 0);
  const auto r = run_cli({"evaluate", "--kind", "both", "--folds", "10", "--data", data, "--json", dir.file("r.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* needle : {"seed: 42", "Accuracy", "Macro avg", "Weighted avg", "knn 10-fold cv", "svm holdout"}) {
    EXPECT_NE(r.out.find(needle), std::string::npos) << needle;
  }
  const bool selected = r.out.find("selected: knn") != std::string::npos || r.out.find("selected: svm") != std::string::npos;
  EXPECT_TRUE(selected);
  const auto j = nlohmann::json::parse(slurp(dir.file("r.json")));
  EXPECT_TRUE(j.at("results").contains("knn"));
  EXPECT_EQ(j["results"]["svm"]["cv"]["fold_reports"].size(), 10u);
  EXPECT_EQ(r.out, run_cli({"evaluate", "--kind", "both", "--folds", "10", "--data", data}).out);
}

TEST(Cli, EvaluateFoldsOneIsUsageError) {
  EXPECT_EQ(run_cli({"evaluate", "--folds", "1", "--data", "x.csv"}).code, kExitUsage);
}

TEST(Cli, AssessPrintsCodeAndDisclaimer) {
  TempDir dir;
  const auto data = dir.file("d.csv"), model = dir.file("m.model"), answers = dir.file("a.json");
  ASSERT_EQ(run_cli({"generate", "--n", "200", "--out", data}).code, 0);
  ASSERT_EQ(run_cli({"train", "--kind", "svm", "--data", data, "--out", model}).code, 0);
  {
    std::ofstream out(answers);
    out << bdscreen::testing::valid_answers().dump();
  }
  auto r = run_cli({"assess", "--model", model, "--answers", answers});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("code=", 0), 0u);
  EXPECT_NE(r.out.find("not an exact diagnosis"), std::string::npos);

  r = run_cli({"assess", "--model", model, "--answers", answers, "--set", "sleeping_hour=30"});
  EXPECT_EQ(r.code, kExitFailure);
  EXPECT_NE(r.err.find("sleeping_hour"), std::string::npos);

  r = run_cli({"assess", "--model", dir.file("missing.model"), "--answers", answers});
  EXPECT_EQ(r.code, kExitFailure);
}

TEST(Cli, ServeWithoutModelFails) {
  TempDir dir;
  EXPECT_NE(run_cli({"serve", "--model", dir.file("missing.model"), "--port", "0"}).code, 0);
}

TEST(Cli, HelpDocumentsPrecedence) {
  const auto r = run_cli({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("precedence"), std::string::npos);
}

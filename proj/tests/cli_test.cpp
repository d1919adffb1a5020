#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>
#include <sys/wait.h>

#include "support.hpp"

#ifndef ZSSLR_CLI
#error "ZSSLR_CLI must name the command-line binary"
#endif

namespace zsslr {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Result {
  int code = -1;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  testing::TempDir dir_{"cli"};

  fs::path at(const std::string& rel) const { return dir_.path() / rel; }

  Result run(const std::string& args) const {
    const std::string cmd = std::string("\"") + ZSSLR_CLI + "\" " + args + " >\"" + at("stdout.txt").string() +
                            "\" 2>\"" + at("stderr.txt").string() + "\"";
    const int status = std::system(cmd.c_str());
    Result r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(at("stdout.txt"));
    r.err = slurp(at("stderr.txt"));
    return r;
  }

  void synth(const std::string& name, const std::string& extra = "") const {
    const Result r = run("synth --out \"" + at(name).string() + "\" --n-classes 16 --n-seen 8 --n-unseen 5 "
                      "--attributes 12 --text-dim 8 --samples-per-class 6 --feature-dim 16 " + extra);
    ASSERT_EQ(r.code, 0) << r.err;
  }

  std::string data(const std::string& name) const { return "--dataset \"" + at(name + "/manifest.json").string() + "\""; }
  std::string out(const std::string& name) const { return "--out \"" + at(name).string() + "\""; }
};

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = slurp(e.path());
  return files;
}

std::vector<std::string> csv_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);)
    if (!l.empty()) lines.push_back(l);
  return lines;
}

TEST_F(Cli, TrainOnSynthReducesLoss) {
  synth("d");
  const Result r = run("train " + data("d") + " " + out("t") + " --repeats 1 --epochs 100");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(at("t/model.json")));
  const auto lines = csv_lines(slurp(at("t/train_log.csv")));
  ASSERT_GT(lines.size(), 2u);
  EXPECT_EQ(lines[0], "epoch,loss");
  const double first = std::stod(lines[1].substr(lines[1].find(',') + 1));
  const double last = std::stod(lines.back().substr(lines.back().find(',') + 1));
  EXPECT_LT(last, first);
  EXPECT_TRUE(fs::exists(at("t/effective_config.json")));
}

TEST_F(Cli, MissingManifest) {
  const Result r = run("train --dataset \"" + at("nowhere/manifest.json").string() + "\" " + out("t"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("MissingFile"), std::string::npos) << r.err;
}

TEST_F(Cli, FiveRepeatsWriteFiveModelsAndSummary) {
  synth("d");
  const Result r = run("train " + data("d") + " " + out("t") + " --epochs 20");
  ASSERT_EQ(r.code, 0) << r.err;
  for (int i = 0; i < 5; ++i) EXPECT_TRUE(fs::exists(at("t/model_r" + std::to_string(i) + ".json")));
  const json summary = json::parse(slurp(at("t/train_summary.json")));
  EXPECT_EQ(summary["repeats"], 5);
  EXPECT_EQ(summary["runs"].size(), 5u);
  EXPECT_TRUE(summary["test_overall"]["top1"].contains("mean"));
  EXPECT_TRUE(summary["test_overall"]["top1"].contains("stddev"));
  std::set<std::uint64_t> seeds;
  for (const auto& run : summary["runs"]) seeds.insert(run["seed"].get<std::uint64_t>());
  EXPECT_EQ(seeds.size(), 5u);
}

TEST_F(Cli, ZslEvalUsesUnseenCandidatesOnly) {
  synth("d");
  ASSERT_EQ(run("train " + data("d") + " " + out("t") + " --repeats 1 --epochs 50").code, 0);
  const Dataset ds = load_dataset(at("d/manifest.json"));
  const Result e = run("eval " + data("d") + " --model \"" + at("t/model.json").string() + "\" " + out("e"));
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_NE(e.out.find("top-1"), std::string::npos);
  EXPECT_NE(e.out.find("top-5"), std::string::npos);
  const json report = json::parse(slurp(at("e/eval_report.json")));
  EXPECT_EQ(report["candidates"].get<std::set<std::string>>(), ds.split.unseen);
  EXPECT_FALSE(report.contains("harmonic_per_k"));

  ASSERT_EQ(run("predict " + data("d") + " --model \"" + at("t/model.json").string() + "\" " + out("p")).code, 0);
  const auto lines = csv_lines(slurp(at("p/predictions.csv")));
  EXPECT_EQ(lines.size(), 1u + 5u * 6u);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::istringstream row(lines[i]);
    std::string id, truth, predicted;
    std::getline(row, id, ',');
    std::getline(row, truth, ',');
    std::getline(row, predicted, ',');
    EXPECT_TRUE(ds.split.unseen.count(predicted)) << lines[i];
  }
}

TEST_F(Cli, GzslEvalReportsSeenUnseenHarmonic) {
  synth("g", "--mode gzsl");
  ASSERT_EQ(run("train " + data("g") + " " + out("t") + " --repeats 1 --epochs 50").code, 0);
  const Result e = run("eval " + data("g") + " --model \"" + at("t/model.json").string() + "\" " + out("e"));
  ASSERT_EQ(e.code, 0) << e.err;
  const json report = json::parse(slurp(at("e/eval_report.json")));
  EXPECT_TRUE(report["seen_per_k"].is_object());
  EXPECT_TRUE(report["unseen_per_k"].is_object());
  EXPECT_TRUE(report["harmonic_per_k"].is_object());
  EXPECT_EQ(report["candidates"].size(), 13u);
  EXPECT_NE(e.out.find("Harmonic"), std::string::npos) << e.out;
}

TEST_F(Cli, RandomBaselineRowMatchesExpectation) {
  synth("d");
  ASSERT_EQ(run("train " + data("d") + " " + out("t") + " --repeats 1 --epochs 10").code, 0);
  const Result e = run("eval " + data("d") + " --model \"" + at("t/model.json").string() + "\" " + out("e") +
                    " --random-baseline");
  ASSERT_EQ(e.code, 0) << e.err;
  const json report = json::parse(slurp(at("e/eval_report.json")));
  EXPECT_NEAR(report["random_baseline"]["top1"].get<double>(), 100.0 / 5.0, 0.5);
  EXPECT_NEAR(report["random_baseline"]["top2"].get<double>(), 200.0 / 5.0, 0.5);
  EXPECT_NEAR(report["random_baseline"]["top5"].get<double>(), 100.0, 1e-12);
  EXPECT_NE(e.out.find("Random"), std::string::npos);
}

TEST_F(Cli, BaselineForClassCount) {
  const Result r = run("baseline --n-classes 50 " + out("b"));
  ASSERT_EQ(r.code, 0) << r.err;
  const json doc = json::parse(slurp(at("b/baseline.json")));
  EXPECT_NEAR(doc["accuracy"]["top1"].get<double>(), 2.0, 0.5);
  EXPECT_NEAR(doc["accuracy"]["top5"].get<double>(), 10.0, 0.7);
}

TEST_F(Cli, AnalyzeCorrectCoversEveryUnseenClass) {
  // enough seen classes to span the attribute space, so every unseen class gets a correct hit
  synth("d", "--n-classes 24 --n-seen 16");
  ASSERT_EQ(run("train " + data("d") + " " + out("t") + " --repeats 1").code, 0);
  const Result a = run("analyze " + data("d") + " --model \"" + at("t/model.json").string() + "\" " + out("a") +
                    " --correct --min-affiliation 1");
  ASSERT_EQ(a.code, 0) << a.err;
  const json doc = json::parse(slurp(at("a/influence_correct.json")));
  EXPECT_EQ(doc["rows"].size(), 5u);
  EXPECT_TRUE(doc["omitted"].empty());
  EXPECT_EQ(doc["attribute_names"].size(), 12u);
  EXPECT_EQ(csv_lines(slurp(at("a/influence_correct.csv"))).size(), 6u);
  EXPECT_EQ(csv_lines(slurp(at("a/affiliation_correct.csv"))).size(), 6u);
}

TEST_F(Cli, AnalyzeConfusionsGivesFourRows) {
  synth("n", "--noise 3.0 --n-unseen 6 --seed 4");
  ASSERT_EQ(run("train " + data("n") + " " + out("t") + " --repeats 1 --epochs 30").code, 0);
  const Result a = run("analyze " + data("n") + " --model \"" + at("t/model.json").string() + "\" " + out("a") +
                    " --confusions 4");
  ASSERT_EQ(a.code, 0) << a.err;
  const json doc = json::parse(slurp(at("a/influence_confusions.json")));
  ASSERT_EQ(doc["rows"].size(), 4u);
  for (const auto& row : doc["rows"]) EXPECT_EQ(row["scores"].size(), 12u);
  EXPECT_EQ(csv_lines(slurp(at("a/affiliation_predicted.csv"))).size(), 5u);
}

TEST_F(Cli, AnalyzeTextModelIsModeError) {
  synth("d");
  ASSERT_EQ(run("train " + data("d") + " " + out("t") + " --repeats 1 --epochs 5 --embedding text --d-t 4").code, 0);
  const Result a = run("analyze " + data("d") + " --model \"" + at("t/model.json").string() + "\" " + out("a") +
                    " --correct");
  EXPECT_EQ(a.code, 4);
  EXPECT_NE(a.err.find("ModeWithoutAttributes"), std::string::npos);
}

TEST_F(Cli, DimensionMismatchIsExitThree) {
  synth("d");
  synth("w", "--feature-dim 9");
  ASSERT_EQ(run("train " + data("d") + " " + out("t") + " --repeats 1 --epochs 5").code, 0);
  const Result e = run("eval " + data("w") + " --model \"" + at("t/model.json").string() + "\" " + out("e"));
  EXPECT_EQ(e.code, 3);
  EXPECT_NE(e.err.find("DimensionMismatch"), std::string::npos);
}

TEST_F(Cli, BadConfigIsInputError) {
  std::ofstream(at("bad.json")) << R"({"dataset": "x", "learning_rat": 1})";
  const Result r = run("train --config \"" + at("bad.json").string() + "\"");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("InvalidConfig"), std::string::npos);
}

TEST_F(Cli, ConfigFileWithRelativeDatasetAndOverrides) {
  synth("d");
  std::ofstream(at("run.json")) << R"({"dataset": "d/manifest.json", "epochs": 7, "repeats": 1, "ks": [1, 3]})";
  const Result r = run("train --config \"" + at("run.json").string() + "\" " + out("t") + " --seed 11");
  ASSERT_EQ(r.code, 0) << r.err;
  const json eff = json::parse(slurp(at("t/effective_config.json")));
  EXPECT_EQ(eff["epochs"], 7);
  EXPECT_EQ(eff["seed"], 11);
  EXPECT_EQ(eff["ks"], json({1, 3}));
  EXPECT_EQ(json::parse(slurp(at("t/model.json")))["seed"], 11);
}

TEST_F(Cli, RelativeOutputDirFollowsConfigFile) {
  synth("d");
  std::ofstream(at("run.json")) << R"({"dataset": "d/manifest.json", "output_dir": "runs/x", "epochs": 3, "repeats": 1})";
  ASSERT_EQ(run("train --config \"" + at("run.json").string() + "\"").code, 0);
  EXPECT_TRUE(fs::exists(at("runs/x/model.json")));
}

TEST_F(Cli, RerunsAreByteIdentical) {
  synth("d");
  const std::string model = " --model \"" + at("t/model.json").string() + "\"";
  const auto pass = [&] {
    EXPECT_EQ(run("train " + data("d") + " " + out("t") + " --repeats 2 --epochs 40 --embedding combined --d-t 4").code, 0);
    EXPECT_EQ(run("eval " + data("d") + model + " " + out("e") + " --random-baseline --trials 500").code, 0);
    EXPECT_EQ(run("predict " + data("d") + model + " " + out("p")).code, 0);
    EXPECT_EQ(run("analyze " + data("d") + model + " " + out("a") + " --correct").code, 0);
    std::map<std::string, std::string> all;
    for (const char* sub : {"t", "e", "p", "a"})
      for (auto& [name, text] : snapshot(at(sub))) all[std::string(sub) + "/" + name] = text;
    for (const char* sub : {"t", "e", "p", "a"}) fs::remove_all(at(sub));
    return all;
  };
  const auto first = pass();
  const auto second = pass();
  EXPECT_GE(first.size(), 10u);
  EXPECT_EQ(first, second);
}

TEST_F(Cli, SweepSingleValueAndIdentityBypass) {
  synth("d");
  const Result one = run("sweep " + data("d") + " " + out("s") + " --param lambda --values 0.001 --repeats 1 --epochs 30");
  ASSERT_EQ(one.code, 0) << one.err;
  EXPECT_EQ(csv_lines(slurp(at("s/sweep.csv"))).size(), 2u);

  // d_t equal to the raw text width bypasses the reduction matrix
  const std::string common = data("d") + " --embedding text --repeats 1 --epochs 60";
  ASSERT_EQ(run("sweep " + common + " " + out("s8") + " --param d_t --values 8").code, 0);
  ASSERT_EQ(run("train " + common + " " + out("t8") + " --d-t 8").code, 0);
  const json model = json::parse(slurp(at("t8/model.json")));
  EXPECT_TRUE(model["M"].is_null());
  const CompatModel m = load_model(at("t8/model.json"));
  const Dataset ds = load_dataset(at("d/manifest.json"));
  const auto val = ds.samples_in(ds.split.validation);
  const auto cands = m.embed(ds.descriptors(ds.split.validation));
  std::vector<Ranking> rankings;
  std::vector<std::string> truths;
  for (const Sample* s : val) {
    rankings.push_back(ranking_ids(predict(average_pool(s->body), m, cands)));
    truths.push_back(s->class_id);
  }
  const std::vector<int> k1{1};
  const double direct = topk_accuracy(rankings, truths, k1).per_k.at(1);
  const auto lines = csv_lines(slurp(at("s8/sweep.csv")));
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[1], "8," + format_real(direct) + ",0");
}

TEST_F(Cli, SweepOverTextWidthsBeatsChance) {
  synth("d", "--n-classes 20 --n-unseen 4");
  const Result r = run("sweep " + data("d") + " " + out("s") +
                    " --embedding combined --param d_t --values 2,4,8 --repeats 2 --epochs 150");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = csv_lines(slurp(at("s/sweep.csv")));
  ASSERT_EQ(lines.size(), 4u);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto a = lines[i].find(','), b = lines[i].find(',', a + 1);
    EXPECT_GT(std::stod(lines[i].substr(a + 1, b - a - 1)), 100.0 / 8.0) << lines[i];
  }
}

TEST_F(Cli, SweepTextWidthNeedsTextMode) {
  synth("d");
  EXPECT_EQ(run("sweep " + data("d") + " " + out("s") + " --param d_t --values 4").code, 4);
}

TEST_F(Cli, UnknownSubcommandIsInputError) { EXPECT_EQ(run("frobnicate").code, 2); }

}  // namespace
}  // namespace zsslr

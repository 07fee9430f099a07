#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "rgnn/data.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun rgnn_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "rgnn");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = rgnn::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("rgnn_test_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path write_config(const fs::path& dir, const json& doc) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << doc.dump(2);
  return p;
}

json small_config() {
  return json{{"synth",
               {{"subjects", 2},
                {"trials_per_class", 2},
                {"samples_per_trial", 4},
                {"channels", 6},
                {"bands", 5},
                {"subject_shift_scale", 0.3},
                {"label_noise_rate", 0.1},
                {"seed", 4}}},
              {"train", {{"epochs", 2}, {"hidden", 3}, {"lr", 0.01}, {"grl_weight", 0.2}}},
              {"protocol", "loso"},
              {"train_trials", 4}};
}

}  // namespace

TEST(CliSynth, SameConfigTwiceIsByteIdentical) {
  const fs::path dir = scratch("synth");
  const auto cfg = write_config(dir, small_config()).string();
  ASSERT_EQ(rgnn_cli({"synth", "--config", cfg, "--out", (dir / "a").string()}).code, 0);
  ASSERT_EQ(rgnn_cli({"synth", "--config", cfg, "--out", (dir / "b").string()}).code, 0);
  for (const char* f : {"manifest.json", "features.f32", "labels.i64"})
    EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
  EXPECT_NO_THROW(rgnn::load_dataset(dir / "a").validate());
}

TEST(CliSynth, MissingRequiredFieldNamesIt) {
  const fs::path dir = scratch("missing");
  json doc = small_config();
  doc["synth"].erase("seed");
  const CliRun r = rgnn_cli({"synth", "--config", write_config(dir, doc).string(), "--out", (dir / "x").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("synth.seed"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(dir / "x"));
}

TEST(CliConfig, UnknownKeysAndBadTypesRejected) {
  const fs::path dir = scratch("unknown");
  json doc = small_config();
  doc["train"]["learning_rate"] = 0.1;
  CliRun r = rgnn_cli({"synth", "--config", write_config(dir, doc).string(), "--out", (dir / "x").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("train.learning_rate"), std::string::npos) << r.err;

  doc = small_config();
  doc["extra"] = 1;
  r = rgnn_cli({"synth", "--config", write_config(dir, doc).string(), "--out", (dir / "x").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("'extra'"), std::string::npos);

  doc = small_config();
  doc["train"]["epochs"] = "two";
  r = rgnn_cli({"synth", "--config", write_config(dir, doc).string(), "--out", (dir / "x").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("train.epochs"), std::string::npos);
}

TEST(CliConfig, UsageErrorsExitOne) {
  EXPECT_EQ(rgnn_cli({}).code, 1);
  EXPECT_EQ(rgnn_cli({"train", "--data", "x"}).code, 1);
  EXPECT_EQ(rgnn_cli({"bogus"}).code, 1);
}

TEST(CliTrain, LosoWritesOneCheckpointPerFoldAndIsReproducible) {
  const fs::path dir = scratch("train");
  const auto cfg = write_config(dir, small_config()).string();
  ASSERT_EQ(rgnn_cli({"synth", "--config", cfg, "--out", (dir / "data").string()}).code, 0);
  const std::string manifest_before = slurp(dir / "data" / "manifest.json");
  const std::string features_before = slurp(dir / "data" / "features.f32");
  const CliRun a = rgnn_cli({"train", "--data", (dir / "data").string(), "--config", cfg, "--out", (dir / "a").string()});
  ASSERT_EQ(a.code, 0) << a.err;
  const CliRun b = rgnn_cli({"train", "--data", (dir / "data").string(), "--config", cfg, "--out", (dir / "b").string()});
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(slurp(dir / "a" / "report.json"), slurp(dir / "b" / "report.json"));
  for (const char* fold : {"fold_0", "fold_1"}) {
    EXPECT_TRUE(fs::exists(dir / "a" / fold / "checkpoint.rgnn")) << fold;
    EXPECT_TRUE(fs::exists(dir / "a" / fold / "history.json")) << fold;
    EXPECT_EQ(slurp(dir / "a" / fold / "checkpoint.rgnn"), slurp(dir / "b" / fold / "checkpoint.rgnn"));
  }
  EXPECT_EQ(json::parse(a.out).at("folds").size(), 2u);
  EXPECT_EQ(slurp(dir / "data" / "manifest.json"), manifest_before);
  EXPECT_EQ(slurp(dir / "data" / "features.f32"), features_before);
}

TEST(CliTrain, BandsFlagRestrictsFeatures) {
  const fs::path dir = scratch("bands");
  const auto cfg = write_config(dir, small_config()).string();
  ASSERT_EQ(rgnn_cli({"synth", "--config", cfg, "--out", (dir / "data").string()}).code, 0);
  const CliRun r = rgnn_cli({"train", "--data", (dir / "data").string(), "--config", cfg, "--out",
                          (dir / "run").string(), "--bands", "gamma", "--protocol", "subject_dependent"});
  ASSERT_EQ(r.code, 0) << r.err;
  const CliRun inspect = rgnn_cli({"inspect", "--checkpoint", (dir / "run" / "fold_0" / "checkpoint.rgnn").string()});
  ASSERT_EQ(inspect.code, 0);
  EXPECT_EQ(json::parse(r.out).at("config").at("bands"), json::array({"gamma"}));
  EXPECT_EQ(json::parse(r.out).at("config").at("protocol"), "subject_dependent");
  const CliRun bad = rgnn_cli({"train", "--data", (dir / "data").string(), "--config", cfg, "--out",
                            (dir / "run2").string(), "--bands", "kappa"});
  EXPECT_EQ(bad.code, 1);
}

TEST(CliTrain, MissingBundleIsRuntimeError) {
  const fs::path dir = scratch("nobundle");
  const auto cfg = write_config(dir, small_config()).string();
  const CliRun r = rgnn_cli({"train", "--data", (dir / "nothing").string(), "--config", cfg, "--out", (dir / "o").string()});
  EXPECT_EQ(r.code, 2);
}

TEST(CliInspect, FreshCheckpointAndTopK) {
  const fs::path dir = scratch("inspect");
  json doc = small_config();
  doc["train"]["epochs"] = 1;
  doc["train"]["lr"] = 1e-12;
  doc["synth"]["channels"] = 62;
  const auto cfg = write_config(dir, doc).string();
  ASSERT_EQ(rgnn_cli({"synth", "--config", cfg, "--out", (dir / "data").string()}).code, 0);
  ASSERT_EQ(rgnn_cli({"train", "--data", (dir / "data").string(), "--config", cfg, "--out", (dir / "run").string()}).code, 0);
  const std::string ckpt = (dir / "run" / "fold_0" / "checkpoint.rgnn").string();

  const json plain = json::parse(rgnn_cli({"inspect", "--checkpoint", ckpt, "--top-k", "10"}).out);
  ASSERT_EQ(plain.at("activation_map").size(), 62u);
  for (const auto& a : plain.at("activation_map")) EXPECT_NEAR(a.at("value").get<double>(), 0.0, 1e-6);
  EXPECT_EQ(plain.at("top_k").size(), 10u);

  const json all = json::parse(rgnn_cli({"inspect", "--checkpoint", ckpt, "--top-k", "1891"}).out);
  const json filtered = json::parse(rgnn_cli({"inspect", "--checkpoint", ckpt, "--top-k", "1882", "--exclude-global"}).out);
  EXPECT_EQ(all.at("top_k").size(), 1891u);
  EXPECT_EQ(filtered.at("top_k").size(), 1882u);
  bool saw_global = false;
  for (const auto& c : all.at("top_k")) saw_global |= c.at("a") == "O1" && c.at("b") == "O2";
  EXPECT_TRUE(saw_global);
  for (const auto& c : filtered.at("top_k")) EXPECT_FALSE(c.at("a") == "O1" && c.at("b") == "O2");
}

TEST(CliInspect, CorruptCheckpointIsRuntimeError) {
  const fs::path dir = scratch("corrupt");
  std::ofstream(dir / "bad.rgnn") << "RGNNCKPT garbage";
  const CliRun r = rgnn_cli({"inspect", "--checkpoint", (dir / "bad.rgnn").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("error"), std::string::npos);
}

TEST(CliGradcheck, PassesFailsOnCorruptionAndRepeats) {
  const CliRun a = rgnn_cli({"gradcheck", "--seed", "3"});
  ASSERT_EQ(a.code, 0) << a.out;
  EXPECT_LT(json::parse(a.out).at("max_relative_error").get<double>(), 1e-4);
  EXPECT_EQ(rgnn_cli({"gradcheck", "--seed", "3"}).out, a.out);
  EXPECT_EQ(rgnn_cli({"gradcheck", "--size", "default"}).code, 0);
  EXPECT_NE(rgnn_cli({"gradcheck", "--seed", "3", "--corrupt-adjoint"}).code, 0);
  EXPECT_EQ(rgnn_cli({"gradcheck", "--size", "huge"}).code, 1);
}

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "smokegest/cli.hpp"

namespace fs = std::filesystem;
namespace sg = smokegest;
namespace cli = smokegest::cli;

namespace {

const fs::path kRoot = SMOKEGEST_TEST_TMP;

int run(const std::string& args) {
  const std::string cmd = std::string("\"") + SMOKEGEST_TOOL + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path fresh(const std::string& name) {
  const auto dir = kRoot / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::size_t count_files(const fs::path& dir, const std::string& suffix) {
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    n += name.size() >= suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0;
  }
  return n;
}

std::size_t line_count(const fs::path& file) {
  std::ifstream in(file);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

/// 1000-sample session written by the library so detect tests need no synthesis.
fs::path write_flat_session(const fs::path& dir) {
  std::vector<sg::SensorSample> s;
  for (int i = 0; i < 1000; ++i) s.push_back({0.02 * i, -0.9 + 0.001 * (i % 7), 0.1, 0.35});
  const auto path = dir / "smoking__watch-a__000.csv";
  cli::write_file_atomic(path, cli::recording_csv(sg::SensorRecording(s, sg::GestureClass::Smoking, "watch-a")));
  return path;
}

/// A small labeled gesture set: 8 smoking, 2 of each confounder.
fs::path small_dataset(const std::string& name) {
  const auto dir = fresh(name);
  EXPECT_EQ(run("synth --gestures smoking=8,drinking=2,nose_scratch=2,yawn=2,cough=2,hair_brush=2,stomach_rub=2 "
                "--seed 3 --out " + dir.string()),
            0);
  return dir / "gestures";
}

}  // namespace

TEST(CliSynth, Table1Layout) {
  const auto out = fresh("table1");
  ASSERT_EQ(run("synth --corpus table1 --seed 7 --out " + out.string()), 0);
  EXPECT_EQ(count_files(out / "train", ".csv"), 140u);
  EXPECT_EQ(count_files(out / "test", ".csv"), 40u);
  EXPECT_EQ(count_files(out / "sessions", ".csv"), 10u);
  EXPECT_EQ(count_files(out / "sessions", ".ranges.json"), 10u);
  EXPECT_TRUE(fs::exists(out / "manifest_synth.json"));

  const auto recs = cli::load_dataset_dir(out / "train", nullptr);
  std::size_t smoking = 0;
  for (const auto& r : recs) smoking += sg::is_smoking(r.label());
  EXPECT_EQ(smoking, 20u);
}

TEST(CliSynth, RerunIsByteIdentical) {
  const auto a = fresh("sessions_a");
  const auto b = fresh("sessions_b");
  ASSERT_EQ(run("synth --sessions smoking=1 --seed 1 --out " + a.string()), 0);
  ASSERT_EQ(run("synth --sessions smoking=1 --seed 1 --out " + b.string()), 0);
  for (const auto& e : fs::directory_iterator(a / "sessions")) {
    const auto other = b / "sessions" / e.path().filename();
    ASSERT_TRUE(fs::exists(other));
    EXPECT_EQ(cli::read_file(e.path()), cli::read_file(other)) << e.path();
  }
}

TEST(CliSynth, InvalidClassIsUsageError) {
  const auto out = fresh("bad_class");
  EXPECT_EQ(run("synth --gestures vaping=3 --out " + out.string()), 2);
  EXPECT_EQ(run("synth --sessions jogging=1 --out " + out.string()), 2);
  EXPECT_EQ(run("synth --frobnicate"), 2);
  EXPECT_EQ(run("train --modes X"), 2);  // --data is required
}

TEST(CliSynth, DumpConfigIsLoadable) {
  const auto out = fresh("dump");
  const auto file = out / "cfg.json";
  ASSERT_EQ(std::system(("\"" + std::string(SMOKEGEST_TOOL) + "\" synth --dump-config > \"" + file.string() + "\"").c_str()), 0);
  const auto cfg = sg::synth_config_from_json(cli::read_json(file));
  EXPECT_EQ(sg::to_json(cfg).dump(), sg::to_json(sg::default_synth_config()).dump());
}

TEST(CliTrain, FiveModesFiveModels) {
  const auto data = small_dataset("train_data5");
  const auto out = fresh("models5");
  ASSERT_EQ(run("train --data " + data.string() + " --restarts 1 --width 50 --seed 2 --out " + out.string()), 0);
  for (auto m : sg::kAllModes) {
    const auto model = cli::load_model(out / ("model_" + std::string(sg::to_string(m)) + ".json"));
    EXPECT_EQ(model.mode, m);
    EXPECT_EQ(model.input_size(), m == sg::ChannelMode::XYZ ? 150u : 50u);
    EXPECT_TRUE(fs::exists(out / ("train_report_" + std::string(sg::to_string(m)) + ".json")));
  }
  EXPECT_EQ(count_files(out, ".json"), 11u);  // 5 models, 5 reports, 1 manifest
}

TEST(CliTrain, XyzModelHas600Inputs) {
  const auto data = small_dataset("train_data_xyz");
  const auto out = fresh("models_xyz");
  ASSERT_EQ(run("train --data " + data.string() + " --modes XYZ --restarts 1 --seed 2 --out " + out.string()), 0);
  const auto model = cli::load_model(out / "model_XYZ.json");
  EXPECT_EQ(model.input_size(), 600u);
  const auto report = cli::read_json(out / "train_report_XYZ.json");
  EXPECT_EQ(report["restarts"].size(), 1u);
  EXPECT_EQ(report["split"]["train"].get<int>() + report["split"]["val"].get<int>() +
                report["split"]["test"].get<int>(),
            20);
}

TEST(CliTrain, DefaultRestartCountIsTen) {
  EXPECT_EQ(cli::TrainOptions{}.restarts, 10u);
  EXPECT_EQ(cli::TrainOptions{}.modes, "X,Y,Z,XYZ,AVG");
}

TEST(CliTrain, RerunIsByteIdentical) {
  const auto data = small_dataset("train_data_det");
  const auto a = fresh("det_a");
  const auto b = fresh("det_b");
  const std::string common = "train --data " + data.string() + " --modes X,AVG --restarts 2 --width 40 --seed 5 --out ";
  ASSERT_EQ(run(common + a.string()), 0);
  ASSERT_EQ(run(common + b.string()), 0);
  for (const char* f : {"model_X.json", "model_AVG.json", "train_report_X.json", "train_report_AVG.json"})
    EXPECT_EQ(cli::read_file(a / f), cli::read_file(b / f)) << f;
}

TEST(CliEval, ConstantModelAndAttributionKeys) {
  const auto data = small_dataset("eval_data");
  const auto out = fresh("eval");
  auto net = sg::Network::zeros(200, 2);
  cli::write_json(out / "half.json", sg::to_json(net));
  ASSERT_EQ(run("eval --model " + (out / "half.json").string() + " --data " + data.string() + " --out " + out.string()), 0);
  const auto doc = cli::read_json(out / "eval_X.json");
  EXPECT_EQ(doc["metrics"]["sensitivity"].get<double>(), 1.0);
  EXPECT_EQ(doc["metrics"]["specificity"].get<double>(), 0.0);
  for (auto cls : sg::kIsolatedConfounders) {
    ASSERT_TRUE(doc["fp_attribution"].contains(std::string(sg::to_string(cls))));
    EXPECT_EQ(doc["fp_attribution"][std::string(sg::to_string(cls))].get<int>(), 2);
  }
  EXPECT_EQ(run("eval --model " + (out / "half.json").string() + " --data " + data.string() + " --threshold 0.8 --out " +
                out.string()),
            0);
  EXPECT_EQ(cli::read_json(out / "eval_X.json")["metrics"]["threshold"].get<double>(), 0.8);
  EXPECT_EQ(run("eval --model " + (out / "half.json").string() + " --data " + data.string() + " --threshold 1.5"), 2);
}

TEST(CliEval, CorruptModelIsRuntimeError) {
  const auto data = small_dataset("eval_data_bad");
  const auto out = fresh("eval_bad");
  cli::write_json(out / "odd.json", sg::to_json(sg::Network::zeros(7, 2)));
  // a 7-input model resamples to 7 points, so it runs; a corrupt file does not
  EXPECT_EQ(run("eval --model " + (out / "odd.json").string() + " --data " + data.string() + " --out " + out.string()), 0);
  cli::write_file_atomic(out / "broken.json", "{\"version\": 1}");
  EXPECT_EQ(run("eval --model " + (out / "broken.json").string() + " --data " + data.string() + " --out " + out.string()),
            1);
}

TEST(CliDetect, TraceRowsFollowStride) {
  const auto out = fresh("detect");
  const auto session = write_flat_session(out);
  cli::write_json(out / "model.json", sg::to_json(sg::Network::zeros(200, 3)));
  const std::string base = "detect --model " + (out / "model.json").string() + " --session " + session.string();

  ASSERT_EQ(run(base + " --out " + (out / "s1").string()), 0);
  EXPECT_EQ(line_count(out / "s1" / "smoking__watch-a__000.trace.csv"), 802u);  // header + 801
  EXPECT_FALSE(fs::exists(out / "s1" / "smoking__watch-a__000.metrics.json"));
  EXPECT_FALSE(fs::exists(out / "s1" / "smoking__watch-a__000.plot.csv"));

  ASSERT_EQ(run(base + " --stride 10 --out " + (out / "s10").string()), 0);
  EXPECT_EQ(line_count(out / "s10" / "smoking__watch-a__000.trace.csv"), 82u);
}

TEST(CliDetect, RangesAndPlot) {
  const auto out = fresh("detect_ranges");
  const auto session = write_flat_session(out);
  cli::write_json(out / "model.json", sg::to_json(sg::Network::zeros(200, 3)));
  cli::write_json(out / "r.json", sg::to_json(sg::GestureRanges({{100, 300}, {500, 650}})));
  ASSERT_EQ(run("detect --model " + (out / "model.json").string() + " --session " + session.string() + " --ranges " +
                (out / "r.json").string() + " --plot --out " + out.string()),
            0);
  const auto metrics = cli::read_json(out / "smoking__watch-a__000.metrics.json");
  EXPECT_EQ(metrics["score"]["per_range"]["detected"].get<int>(), 2);
  EXPECT_EQ(metrics["score"]["per_window"]["specificity"].get<double>(), 0.0);
  std::ifstream plot(out / "smoking__watch-a__000.plot.csv");
  const auto rows = sg::read_plot_csv(plot);
  EXPECT_EQ(rows.size(), 1000u);
}

TEST(CliDetect, ShortSessionAndModeMismatchFail) {
  const auto out = fresh("detect_bad");
  const auto session = write_flat_session(out);
  cli::write_json(out / "wide.json", sg::to_json(sg::Network::zeros(1200, 2)));
  EXPECT_EQ(run("detect --model " + (out / "wide.json").string() + " --session " + session.string() +
                " --width 1200 --out " + out.string()),
            1);
  cli::write_json(out / "model.json", sg::to_json(sg::Network::zeros(200, 2)));
  EXPECT_EQ(run("detect --model " + (out / "model.json").string() + " --session " + session.string() +
                " --width 150 --out " + out.string()),
            1);
  EXPECT_EQ(run("detect --model " + (out / "model.json").string() + " --session " + session.string() +
                " --stride 0 --out " + out.string()),
            2);
}

TEST(CliFiles, RecordingFilenames) {
  EXPECT_EQ(cli::recording_filename("nose_scratch", "watch-b", 7), "nose_scratch__watch-b__007.csv");
  const auto meta = cli::parse_recording_filename("hair_brush__watch-a__012.csv");
  EXPECT_EQ(meta.label, sg::GestureClass::HairBrush);
  EXPECT_EQ(meta.device, "watch-a");
  EXPECT_THROW(cli::parse_recording_filename("hairbrush.csv"), sg::Error);
  EXPECT_THROW(cli::parse_recording_filename("vaping__watch-a__1.csv"), sg::Error);
}

TEST(CliFiles, ParseCounts) {
  const auto c = cli::parse_counts("smoking=3,cough=0");
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].first, "smoking");
  EXPECT_EQ(c[0].second, 3u);
  EXPECT_THROW(cli::parse_counts("smoking"), cli::UsageError);
  EXPECT_THROW(cli::parse_counts("smoking=-1"), cli::UsageError);
  EXPECT_THROW(cli::parse_modes("X,Q"), cli::UsageError);
}

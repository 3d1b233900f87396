#pragma once

// File-level commands behind the `smokegest` tool. Each command writes its
// outputs atomically (temp file + rename) plus a manifest describing the run.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "smokegest/smokegest.hpp"

namespace smokegest::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

inline constexpr std::string_view kToolVersion = "1.0.0";

/// Bad flags or values; the tool exits with status 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// I/O helpers

inline void write_file_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw Error(ErrorKind::Io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot rename " + tmp.string() + ": " + ec.message());
}

inline void write_json(const fs::path& path, const Json& doc) { write_file_atomic(path, doc.dump(2) + "\n"); }

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Json read_json(const fs::path& path) {
  try {
    return Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::Format, path.string() + ": " + e.what());
  }
}

inline std::string recording_csv(const SensorRecording& rec) {
  std::ostringstream ss;
  write_recording_csv(ss, rec);
  return ss.str();
}

/// `<class>__<device>__<id>.csv`, id zero-padded to three digits.
inline std::string recording_filename(std::string_view cls, std::string_view device, std::size_t id) {
  std::string num = std::to_string(id);
  if (num.size() < 3) num.insert(0, 3 - num.size(), '0');
  return std::string(cls) + "__" + std::string(device) + "__" + num + ".csv";
}

struct FileLabel {
  GestureClass label = GestureClass::Unknown;
  std::string device;
};

/// Label and device from a `<class>__<device>__<id>.csv` name. Session files use
/// their session kind as the class (smoking, eating, drinking, chapstick).
inline FileLabel parse_recording_filename(const fs::path& path) {
  const auto stem = path.stem().string();
  const auto first = stem.find("__");
  const auto second = first == std::string::npos ? std::string::npos : stem.find("__", first + 2);
  if (second == std::string::npos)
    throw Error(ErrorKind::Format, "file name '" + path.filename().string() + "' is not <class>__<device>__<id>.csv");
  const auto cls = parse_gesture_class(stem.substr(0, first));
  if (!cls) throw Error(ErrorKind::Format, "unknown gesture class in file name '" + path.filename().string() + "'");
  return {*cls, stem.substr(first + 2, second - first - 2)};
}

inline SensorRecording load_recording_file(const fs::path& path, std::ostream* warnings = &std::cerr) {
  const auto meta = parse_recording_filename(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  try {
    auto rec = load_recording_csv(in, meta.label, meta.device);
    if (warnings)
      if (auto w = sample_rate_warning(rec)) *warnings << "warning: " << path.string() << ": " << *w << '\n';
    return rec;
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

/// Every `*.csv` in `dir`, sorted by file name.
inline std::vector<SensorRecording> load_dataset_dir(const fs::path& dir, std::ostream* warnings = &std::cerr) {
  if (!fs::is_directory(dir)) throw Error(ErrorKind::Io, dir.string() + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Error(ErrorKind::EmptyDataset, "no .csv recordings in " + dir.string());
  std::vector<SensorRecording> out;
  out.reserve(files.size());
  for (const auto& f : files) out.push_back(load_recording_file(f, warnings));
  return out;
}

// ---------------------------------------------------------------------------
// Manifest

struct RunManifest {
  std::string command;
  Json options = Json::object();
  std::uint64_t seed = 0;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
};

inline Json to_json(const RunManifest& m) {
  Json j;
  j["tool"] = "smokegest";
  j["version"] = std::string(kToolVersion);
  j["command"] = m.command;
  j["seed"] = m.seed;
  j["options"] = m.options;
  j["inputs"] = m.inputs;
  j["outputs"] = m.outputs;
  return j;
}

inline void write_manifest(const fs::path& out_dir, const RunManifest& m) {
  write_json(out_dir / ("manifest_" + m.command + ".json"), to_json(m));
}

// ---------------------------------------------------------------------------
// Option parsing shared by the tool and tests

/// `a=1,b=2` into ordered pairs.
inline std::vector<std::pair<std::string, std::size_t>> parse_counts(std::string_view spec) {
  std::vector<std::pair<std::string, std::size_t>> out;
  if (spec.empty()) return out;
  for (auto item : text::split(spec, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw UsageError("expected name=count, got '" + std::string(item) + "'");
    const auto n = text::parse_int(item.substr(eq + 1));
    if (!n || *n < 0) throw UsageError("bad count in '" + std::string(item) + "'");
    out.emplace_back(std::string(item.substr(0, eq)), static_cast<std::size_t>(*n));
  }
  return out;
}

inline std::vector<ChannelMode> parse_modes(std::string_view spec) {
  std::vector<ChannelMode> out;
  for (auto item : text::split(spec, ',')) {
    const auto m = parse_channel_mode(item);
    if (!m) throw UsageError("unknown mode '" + std::string(item) + "' (expected X, Y, Z, XYZ or AVG)");
    if (std::find(out.begin(), out.end(), *m) == out.end()) out.push_back(*m);
  }
  if (out.empty()) throw UsageError("no modes given");
  return out;
}

inline std::string join_modes(const std::vector<ChannelMode>& modes) {
  std::string s;
  for (auto m : modes) {
    if (!s.empty()) s += ',';
    s += to_string(m);
  }
  return s;
}

inline void check_threshold_option(double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw UsageError("--threshold must lie in (0, 1)");
}

// ---------------------------------------------------------------------------
// synth

struct SynthOptions {
  std::string corpus;    // "" or "table1"
  std::string gestures;  // class=count,...
  std::string sessions;  // kind=count,...
  std::string device = "watch-a";
  std::string config;    // optional JSON overlay
  std::uint64_t seed = 1;
  fs::path out = "synth";
};

namespace detail {

inline void write_session(const fs::path& dir, const Session& s, std::size_t id, std::vector<std::string>& outputs) {
  const auto csv = dir / recording_filename(to_string(s.kind), s.recording.device(), id);
  auto ranges = csv;
  ranges.replace_extension(".ranges.json");
  write_file_atomic(csv, recording_csv(s.recording));
  write_json(ranges, to_json(s.ranges));
  outputs.push_back(csv.string());
  outputs.push_back(ranges.string());
}

inline void write_recordings(const fs::path& dir, const std::vector<SensorRecording>& recs,
                             std::vector<std::string>& outputs) {
  std::map<GestureClass, std::size_t> next_id;
  for (const auto& r : recs) {
    const auto path = dir / recording_filename(to_string(r.label()), r.device(), next_id[r.label()]++);
    write_file_atomic(path, recording_csv(r));
    outputs.push_back(path.string());
  }
}

}  // namespace detail

inline SynthConfig load_synth_config(const std::string& path) {
  return path.empty() ? default_synth_config() : synth_config_from_json(read_json(path));
}

inline int cmd_synth(const SynthOptions& opt) {
  if (opt.corpus.empty() && opt.gestures.empty() && opt.sessions.empty())
    throw UsageError("nothing to generate: pass --corpus, --gestures or --sessions");
  if (!opt.corpus.empty() && opt.corpus != "table1") throw UsageError("unknown corpus '" + opt.corpus + "'");

  const auto cfg = load_synth_config(opt.config);
  if (!cfg.profiles.contains(opt.device)) throw UsageError("unknown device profile '" + opt.device + "'");
  const auto& profile = cfg.profile(opt.device);

  std::vector<std::pair<GestureClass, std::size_t>> gesture_counts;
  for (const auto& [name, n] : parse_counts(opt.gestures)) {
    const auto cls = parse_gesture_class(name);
    if (!cls || *cls == GestureClass::Unknown) throw UsageError("unknown gesture class '" + name + "'");
    gesture_counts.emplace_back(*cls, n);
  }
  std::vector<std::pair<SessionKind, std::size_t>> session_counts;
  for (const auto& [name, n] : parse_counts(opt.sessions)) {
    const auto kind = parse_session_kind(name);
    if (!kind) throw UsageError("unknown session kind '" + name + "' (smoking, eating, drinking, chapstick)");
    session_counts.emplace_back(*kind, n);
  }

  RunManifest m;
  m.command = "synth";
  m.seed = opt.seed;
  m.options = {{"corpus", opt.corpus}, {"gestures", opt.gestures}, {"sessions", opt.sessions},
               {"device", opt.device}, {"config", opt.config},     {"out", opt.out.string()}};
  if (!opt.config.empty()) m.inputs.push_back(opt.config);

  if (opt.corpus == "table1") {
    const auto corpus = make_table1_corpus(opt.seed, profile, cfg);
    detail::write_recordings(opt.out / "train", corpus.train, m.outputs);
    detail::write_recordings(opt.out / "test", corpus.test, m.outputs);
    for (std::size_t k = 0; k < corpus.smoking_sessions.size(); ++k)
      detail::write_session(opt.out / "sessions", corpus.smoking_sessions[k], k, m.outputs);
    for (std::size_t k = 0; k < corpus.non_smoking_sessions.size(); ++k)
      detail::write_session(opt.out / "sessions", corpus.non_smoking_sessions[k], corpus.smoking_sessions.size() + k,
                            m.outputs);
  }
  if (!gesture_counts.empty())
    detail::write_recordings(opt.out / "gestures", generate_gestures(gesture_counts, profile, child_seed(opt.seed, 10), cfg),
                             m.outputs);
  std::size_t session_id = 0;
  for (const auto& [kind, n] : session_counts)
    for (std::size_t k = 0; k < n; ++k, ++session_id) {
      const auto s = generate_session_seeded(kind, profile, child_seed(opt.seed, 1000 + session_id), cfg);
      detail::write_session(opt.out / "sessions", s, session_id, m.outputs);
    }
  write_manifest(opt.out, m);
  return 0;
}

// ---------------------------------------------------------------------------
// train

struct TrainOptions {
  fs::path data;
  std::string modes = "X,Y,Z,XYZ,AVG";
  std::size_t restarts = kDefaultRestarts;
  std::uint64_t seed = 1;
  std::size_t width = kFeatureLength;  // resampled points per axis
  std::size_t hidden = kDefaultHidden;
  std::size_t max_epochs = 200;
  double threshold = kDefaultThreshold;
  fs::path out = "models";
};

inline Json split_metrics(const Network& net, const LabeledDataset& ds, double threshold) {
  if (ds.empty()) return Json();
  return to_json(evaluate(net, ds, threshold).metrics);
}

inline int cmd_train(const TrainOptions& opt) {
  const auto modes = parse_modes(opt.modes);
  if (opt.restarts < 1) throw UsageError("--restarts must be >= 1");
  if (opt.width < 2) throw UsageError("--width must be >= 2");
  if (opt.hidden < 1) throw UsageError("--hidden must be >= 1");
  if (opt.max_epochs < 1) throw UsageError("--max-epochs must be >= 1");
  check_threshold_option(opt.threshold);

  const auto recordings = load_dataset_dir(opt.data);
  TrainConfig cfg;
  cfg.hidden_size = opt.hidden;
  cfg.max_epochs = opt.max_epochs;
  const SplitRatios ratios;

  RunManifest m;
  m.command = "train";
  m.seed = opt.seed;
  m.options = {{"data", opt.data.string()}, {"modes", join_modes(modes)}, {"restarts", opt.restarts},
               {"width", opt.width},        {"hidden", opt.hidden},      {"max_epochs", opt.max_epochs},
               {"threshold", opt.threshold}, {"out", opt.out.string()}};
  m.inputs.push_back(opt.data.string());

  for (auto mode : modes) {
    const auto ds = make_dataset(recordings, mode, opt.width);
    auto res = train_best_of(ds, ratios, cfg, opt.restarts, opt.seed);
    res.network.threshold = opt.threshold;

    Json report;
    report["mode"] = std::string(to_string(mode));
    report["input_size"] = res.network.input_size();
    report["config"] = to_json(cfg);
    report["split"] = {{"train", res.split.train.size()}, {"val", res.split.val.size()}, {"test", res.split.test.size()}};
    report["selected_restart"] = res.selected;
    report["training"] = to_json(res.report);
    Json restarts = Json::array();
    for (const auto& r : res.restarts)
      restarts.push_back({{"index", r.index},
                          {"seed", r.seed},
                          {"train_accuracy", r.train_accuracy},
                          {"epochs_run", r.report.epochs_run},
                          {"final_train_sse", r.report.final_train_sse},
                          {"final_val_sse", r.report.final_val_sse},
                          {"stop_reason", std::string(to_string(r.report.stop_reason))}});
    report["restarts"] = std::move(restarts);
    report["metrics"] = {{"train", split_metrics(res.network, select(ds, res.split.train), opt.threshold)},
                         {"val", split_metrics(res.network, select(ds, res.split.val), opt.threshold)},
                         {"test", split_metrics(res.network, select(ds, res.split.test), opt.threshold)}};

    const auto model_path = opt.out / ("model_" + std::string(to_string(mode)) + ".json");
    const auto report_path = opt.out / ("train_report_" + std::string(to_string(mode)) + ".json");
    write_json(model_path, smokegest::to_json(res.network));
    write_json(report_path, report);
    m.outputs.push_back(model_path.string());
    m.outputs.push_back(report_path.string());
  }
  write_manifest(opt.out, m);
  return 0;
}

// ---------------------------------------------------------------------------
// eval

struct EvalOptions {
  fs::path model;
  fs::path data;
  double threshold = kDefaultThreshold;
  fs::path out = "eval";
};

inline Network load_model(const fs::path& path) {
  try {
    return network_from_json(read_json(path));
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

inline int cmd_eval(const EvalOptions& opt) {
  check_threshold_option(opt.threshold);
  const auto net = load_model(opt.model);
  const auto recordings = load_dataset_dir(opt.data);
  const auto series_len = net.window_width();
  const auto ds = make_dataset(recordings, net.mode, series_len);
  const auto result = evaluate(net, ds, opt.threshold);

  Json doc;
  doc["mode"] = std::string(to_string(net.mode));
  doc["items"] = ds.size();
  doc["metrics"] = to_json(result.metrics);
  doc["fp_attribution"] = to_json(result.false_positives);
  const auto path = opt.out / ("eval_" + std::string(to_string(net.mode)) + ".json");
  write_json(path, doc);

  RunManifest m;
  m.command = "eval";
  m.options = {{"model", opt.model.string()}, {"data", opt.data.string()}, {"threshold", opt.threshold},
               {"out", opt.out.string()}};
  m.inputs = {opt.model.string(), opt.data.string()};
  m.outputs = {path.string()};
  write_manifest(opt.out, m);
  return 0;
}

// ---------------------------------------------------------------------------
// detect

struct DetectOptions {
  fs::path model;
  fs::path session;
  fs::path ranges;  // optional
  std::size_t width = kFeatureLength;
  std::size_t stride = 1;
  double threshold = kDefaultThreshold;
  bool plot = false;
  fs::path out = "detect";
};

inline int cmd_detect(const DetectOptions& opt) {
  check_threshold_option(opt.threshold);
  if (opt.stride < 1) throw UsageError("--stride must be >= 1");
  if (opt.width < 2) throw UsageError("--width must be >= 2");
  const auto net = load_model(opt.model);

  std::ifstream in(opt.session, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + opt.session.string());
  const auto session = load_recording_csv(in, GestureClass::Unknown, "");
  if (auto w = sample_rate_warning(session)) std::cerr << "warning: " << opt.session.string() << ": " << *w << '\n';

  const auto trace = detect_session(net, session, opt.width, opt.stride, opt.threshold);
  const auto stem = opt.session.stem().string();

  RunManifest m;
  m.command = "detect";
  m.options = {{"model", opt.model.string()}, {"session", opt.session.string()}, {"ranges", opt.ranges.string()},
               {"width", opt.width},          {"stride", opt.stride},             {"threshold", opt.threshold},
               {"plot", opt.plot},            {"out", opt.out.string()}};
  m.inputs = {opt.model.string(), opt.session.string()};

  std::ostringstream trace_csv;
  write_trace_csv(trace_csv, trace);
  const auto trace_path = opt.out / (stem + ".trace.csv");
  write_file_atomic(trace_path, trace_csv.str());
  m.outputs.push_back(trace_path.string());

  if (!opt.ranges.empty()) {
    m.inputs.push_back(opt.ranges.string());
    const auto truth = ranges_from_json(read_json(opt.ranges));
    Json doc;
    doc["mode"] = std::string(to_string(net.mode));
    doc["windows"] = trace.entries.size();
    doc["width"] = trace.width;
    doc["stride"] = trace.stride;
    doc["score"] = to_json(score_trace(trace, truth));
    const auto path = opt.out / (stem + ".metrics.json");
    write_json(path, doc);
    m.outputs.push_back(path.string());
  }
  if (opt.plot) {
    std::ostringstream plot_csv;
    write_plot_csv(plot_csv, trace_to_plot_series(trace, session));
    const auto path = opt.out / (stem + ".plot.csv");
    write_file_atomic(path, plot_csv.str());
    m.outputs.push_back(path.string());
  }
  write_manifest(opt.out, m);
  return 0;
}

}  // namespace smokegest::cli

#pragma once

// Continuous-session detection: slide the network over raw windows, anchor
// each output at its window's first sample, and score against ground truth.

#include <algorithm>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "smokegest/error.hpp"
#include "smokegest/eval.hpp"
#include "smokegest/mlp.hpp"
#include "smokegest/ranges.hpp"
#include "smokegest/signal.hpp"
#include "smokegest/text.hpp"

namespace smokegest {

struct TraceEntry {
  std::size_t start = 0;
  double raw_output = 0.0;
  Decision decision = Decision::NonSmoking;

  friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

struct DetectionTrace {
  std::vector<TraceEntry> entries;
  std::size_t width = kFeatureLength;
  std::size_t stride = 1;
  double threshold = kDefaultThreshold;
};

inline DetectionTrace detect_session(const Network& net, const SensorRecording& session, std::size_t width,
                                     std::size_t stride, double threshold) {
  check_threshold(threshold);
  if (stride < 1) throw Error(ErrorKind::InvalidSize, "stride must be >= 1");
  if (width != net.window_width())
    throw Error(ErrorKind::ModeMismatch, "window width " + std::to_string(width) + " does not match the " +
                                             std::string(to_string(net.mode)) + " network's " +
                                             std::to_string(net.window_width()) + "-sample input");
  if (session.size() < width)
    throw Error(ErrorKind::SessionTooShort, "session has " + std::to_string(session.size()) +
                                                " samples, fewer than one window of " + std::to_string(width));

  const auto windows = rolling_windows(session, width, stride);
  DetectionTrace trace{{}, width, stride, threshold};
  trace.entries.reserve(windows.size());

  constexpr std::size_t kChunk = 512;
  for (std::size_t begin = 0; begin < windows.size(); begin += kChunk) {
    const std::size_t end = std::min(windows.size(), begin + kChunk);
    MatrixXd rows(static_cast<Index>(end - begin), static_cast<Index>(net.input_size()));
    for (std::size_t k = begin; k < end; ++k) {
      const auto fv = extract_features(windows[k].series, net.mode);
      rows.row(static_cast<Index>(k - begin)) = net.norm.apply(fv.values).transpose();
    }
    const VectorXd out = forward_rows(net, rows);
    for (std::size_t k = begin; k < end; ++k) {
      const double o = out[static_cast<Index>(k - begin)];
      trace.entries.push_back({windows[k].start, o, classify(o, threshold)});
    }
  }
  return trace;
}

/// Re-thresholds an existing trace.
inline DetectionTrace rethreshold(DetectionTrace trace, double threshold) {
  check_threshold(threshold);
  trace.threshold = threshold;
  for (auto& e : trace.entries) e.decision = classify(e.raw_output, threshold);
  return trace;
}

struct TraceScore {
  MetricsReport per_window;            // windows labelled by whether their start lies in a range
  std::vector<bool> range_detected;    // one flag per ground-truth range
  std::optional<double> range_detection_rate;  // fraction of ranges detected; nullopt without ranges
};

inline std::size_t detected_count(const TraceScore& s) {
  return static_cast<std::size_t>(std::count(s.range_detected.begin(), s.range_detected.end(), true));
}

/// A window is truth-Smoking iff its start index lies in a range; a range is
/// detected iff some window starting inside it decided Smoking.
inline TraceScore score_trace(const DetectionTrace& trace, const GestureRanges& truth) {
  if (trace.entries.empty()) throw Error(ErrorKind::EmptyTrace, "cannot score an empty trace");
  TraceScore score;
  score.range_detected.assign(truth.size(), false);
  ConfusionCounts c;
  for (const auto& e : trace.entries) {
    const auto r = truth.find(e.start);
    const bool in_range = r != truth.size();
    c.add(e.decision, in_range ? Decision::Smoking : Decision::NonSmoking);
    if (in_range && e.decision == Decision::Smoking) score.range_detected[r] = true;
  }
  score.per_window = make_report(c, trace.threshold);
  if (!truth.empty())
    score.range_detection_rate = static_cast<double>(detected_count(score)) / static_cast<double>(truth.size());
  return score;
}

// ---------------------------------------------------------------------------
// Files

/// `start,output,decision` with decision 1 for Smoking.
inline void write_trace_csv(std::ostream& out, const DetectionTrace& trace) {
  out << "start,output,decision\n";
  for (const auto& e : trace.entries)
    out << e.start << ',' << text::format_double(e.raw_output) << ',' << (e.decision == Decision::Smoking ? 1 : 0)
        << '\n';
}

inline std::vector<TraceEntry> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "start,output,decision")
    throw Error(ErrorKind::Format, "trace file must start with 'start,output,decision'");
  std::vector<TraceEntry> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = text::split(line, ',');
    if (f.size() != 3) throw Error(ErrorKind::Format, "trace row needs 3 columns");
    const auto start = text::parse_int(f[0]);
    const auto value = text::parse_double(f[1]);
    const auto dec = text::parse_int(f[2]);
    if (!start || *start < 0 || !value || !dec || (*dec != 0 && *dec != 1))
      throw Error(ErrorKind::Format, "bad trace row '" + line + "'");
    out.push_back({static_cast<std::size_t>(*start), *value, *dec == 1 ? Decision::Smoking : Decision::NonSmoking});
  }
  return out;
}

struct PlotRow {
  std::size_t index = 0;
  double x = 0.0, y = 0.0, z = 0.0;
  std::optional<double> output;  // present only where a window starts

  friend bool operator==(const PlotRow&, const PlotRow&) = default;
};

/// One row per session sample with the raw output placed at window starts.
inline std::vector<PlotRow> trace_to_plot_series(const DetectionTrace& trace, const SensorRecording& session) {
  std::vector<PlotRow> rows(session.size());
  for (std::size_t i = 0; i < session.size(); ++i) {
    const auto& s = session.samples()[i];
    rows[i] = {i, s.x, s.y, s.z, std::nullopt};
  }
  for (const auto& e : trace.entries)
    if (e.start < rows.size()) rows[e.start].output = e.raw_output;
  return rows;
}

inline void write_plot_csv(std::ostream& out, const std::vector<PlotRow>& rows) {
  out << "i,x,y,z,output\n";
  for (const auto& r : rows) {
    out << r.index << ',' << text::format_double(r.x) << ',' << text::format_double(r.y) << ','
        << text::format_double(r.z) << ',';
    if (r.output) out << text::format_double(*r.output);
    out << '\n';
  }
}

inline std::vector<PlotRow> read_plot_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "i,x,y,z,output")
    throw Error(ErrorKind::Format, "plot file must start with 'i,x,y,z,output'");
  std::vector<PlotRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = text::split(line, ',');
    if (f.size() != 5) throw Error(ErrorKind::Format, "plot row needs 5 columns");
    const auto i = text::parse_int(f[0]);
    const auto x = text::parse_double(f[1]);
    const auto y = text::parse_double(f[2]);
    const auto z = text::parse_double(f[3]);
    if (!i || *i < 0 || !x || !y || !z) throw Error(ErrorKind::Format, "bad plot row '" + line + "'");
    PlotRow r{static_cast<std::size_t>(*i), *x, *y, *z, std::nullopt};
    if (!f[4].empty()) {
      const auto o = text::parse_double(f[4]);
      if (!o) throw Error(ErrorKind::Format, "bad output in plot row '" + line + "'");
      r.output = *o;
    }
    rows.push_back(r);
  }
  return rows;
}

inline nlohmann::ordered_json to_json(const TraceScore& s) {
  nlohmann::ordered_json j;
  j["per_window"] = to_json(s.per_window);
  nlohmann::ordered_json per_range;
  per_range["ranges"] = s.range_detected.size();
  per_range["detected"] = detected_count(s);
  per_range["detection_rate"] =
      s.range_detection_rate ? nlohmann::ordered_json(*s.range_detection_rate) : nlohmann::ordered_json();
  per_range["flags"] = s.range_detected;
  j["per_range"] = std::move(per_range);
  return j;
}

}  // namespace smokegest

#pragma once

// Accelerometer recordings: CSV ingestion, fixed-length resampling, channel
// selection and rolling-window segmentation of continuous sessions.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "smokegest/error.hpp"
#include "smokegest/text.hpp"

namespace smokegest {

inline constexpr double kSampleRateHz = 50.0;
inline constexpr std::size_t kFeatureLength = 200;

struct SensorSample {
  double t = 0.0;  // seconds
  double x = 0.0;  // g
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const SensorSample&, const SensorSample&) = default;
};

enum class GestureClass {
  Smoking,
  Drinking,
  NoseScratch,
  Yawn,
  Cough,
  HairBrush,
  StomachRub,
  Eating,
  Chapstick,
  Unknown,
};

inline constexpr std::array<GestureClass, 10> kAllGestureClasses = {
    GestureClass::Smoking, GestureClass::Drinking,  GestureClass::NoseScratch, GestureClass::Yawn,
    GestureClass::Cough,   GestureClass::HairBrush, GestureClass::StomachRub,  GestureClass::Eating,
    GestureClass::Chapstick, GestureClass::Unknown};

/// The six isolated non-smoking gestures recorded alongside the puffs.
inline constexpr std::array<GestureClass, 6> kIsolatedConfounders = {
    GestureClass::Drinking, GestureClass::NoseScratch, GestureClass::Yawn,
    GestureClass::Cough,    GestureClass::HairBrush,   GestureClass::StomachRub};

constexpr std::string_view to_string(GestureClass c) {
  switch (c) {
    case GestureClass::Smoking: return "smoking";
    case GestureClass::Drinking: return "drinking";
    case GestureClass::NoseScratch: return "nose_scratch";
    case GestureClass::Yawn: return "yawn";
    case GestureClass::Cough: return "cough";
    case GestureClass::HairBrush: return "hair_brush";
    case GestureClass::StomachRub: return "stomach_rub";
    case GestureClass::Eating: return "eating";
    case GestureClass::Chapstick: return "chapstick";
    case GestureClass::Unknown: return "unknown";
  }
  return "unknown";
}

inline std::optional<GestureClass> parse_gesture_class(std::string_view s) {
  for (auto c : kAllGestureClasses)
    if (to_string(c) == s) return c;
  return std::nullopt;
}

constexpr bool is_smoking(GestureClass c) { return c == GestureClass::Smoking; }

enum class ChannelMode { X, Y, Z, XYZ, AVG };

inline constexpr std::array<ChannelMode, 5> kAllModes = {ChannelMode::X, ChannelMode::Y, ChannelMode::Z,
                                                         ChannelMode::XYZ, ChannelMode::AVG};

constexpr std::string_view to_string(ChannelMode m) {
  switch (m) {
    case ChannelMode::X: return "X";
    case ChannelMode::Y: return "Y";
    case ChannelMode::Z: return "Z";
    case ChannelMode::XYZ: return "XYZ";
    case ChannelMode::AVG: return "AVG";
  }
  return "X";
}

inline std::optional<ChannelMode> parse_channel_mode(std::string_view s) {
  for (auto m : kAllModes)
    if (to_string(m) == s) return m;
  return std::nullopt;
}

/// Network input length for a series of `n` points per axis.
constexpr std::size_t feature_length(ChannelMode mode, std::size_t n = kFeatureLength) {
  return mode == ChannelMode::XYZ ? 3 * n : n;
}

/// An immutable, validated accelerometer log.
class SensorRecording {
 public:
  SensorRecording(std::vector<SensorSample> samples, GestureClass label, std::string device)
      : samples_(std::move(samples)), label_(label), device_(std::move(device)) {
    if (samples_.size() < 2)
      throw Error(ErrorKind::TooFewSamples, "a recording needs at least 2 samples");
    for (std::size_t i = 0; i < samples_.size(); ++i) {
      const auto& s = samples_[i];
      if (!std::isfinite(s.t) || s.t < 0.0 || !std::isfinite(s.x) || !std::isfinite(s.y) ||
          !std::isfinite(s.z))
        throw Error(ErrorKind::MalformedRow, "non-finite or negative value at sample " + std::to_string(i));
      if (i > 0 && !(s.t > samples_[i - 1].t))
        throw Error(ErrorKind::NonMonotonicTime, "t not strictly increasing at sample " + std::to_string(i));
    }
  }

  [[nodiscard]] const std::vector<SensorSample>& samples() const noexcept { return samples_; }
  [[nodiscard]] std::size_t size() const noexcept { return samples_.size(); }
  [[nodiscard]] GestureClass label() const noexcept { return label_; }
  [[nodiscard]] const std::string& device() const noexcept { return device_; }
  [[nodiscard]] double duration() const noexcept { return samples_.back().t - samples_.front().t; }

  friend bool operator==(const SensorRecording&, const SensorRecording&) = default;

 private:
  std::vector<SensorSample> samples_;
  GestureClass label_;
  std::string device_;
};

/// Three axes on a shared uniform grid.
struct FeatureSeries {
  std::vector<double> x, y, z;

  [[nodiscard]] std::size_t size() const noexcept { return x.size(); }
  friend bool operator==(const FeatureSeries&, const FeatureSeries&) = default;
};

struct FeatureVector {
  ChannelMode mode = ChannelMode::X;
  std::vector<double> values;

  [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
};

// ---------------------------------------------------------------------------
// CSV

/// Parses `t,x,y,z` text. Rows are kept in file order.
inline SensorRecording load_recording_csv(std::istream& in, GestureClass label, std::string device) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::EmptyRecording, "missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t,x,y,z") throw Error(ErrorKind::MalformedRow, "expected header 't,x,y,z', got '" + line + "'");

  std::vector<SensorSample> samples;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = text::split(line, ',');
    if (fields.size() != 4)
      throw Error(ErrorKind::MalformedRow, "line " + std::to_string(line_no) + ": expected 4 columns");
    std::array<double, 4> v{};
    for (std::size_t k = 0; k < 4; ++k) {
      const auto parsed = text::parse_double(fields[k]);
      if (!parsed)
        throw Error(ErrorKind::MalformedRow,
                    "line " + std::to_string(line_no) + ": bad number '" + std::string(fields[k]) + "'");
      v[k] = *parsed;
    }
    if (v[0] < 0.0) throw Error(ErrorKind::MalformedRow, "line " + std::to_string(line_no) + ": negative t");
    if (!samples.empty() && !(v[0] > samples.back().t))
      throw Error(ErrorKind::NonMonotonicTime, "line " + std::to_string(line_no) + ": t not strictly increasing");
    samples.push_back({v[0], v[1], v[2], v[3]});
  }
  if (samples.size() < 2) throw Error(ErrorKind::EmptyRecording, "fewer than 2 data rows");
  return SensorRecording(std::move(samples), label, std::move(device));
}

inline void write_recording_csv(std::ostream& out, const SensorRecording& rec) {
  out << "t,x,y,z\n";
  for (const auto& s : rec.samples())
    out << text::format_double(s.t) << ',' << text::format_double(s.x) << ',' << text::format_double(s.y) << ','
        << text::format_double(s.z) << '\n';
}

/// Returns a message when the median sample spacing is more than 20% away from 50 Hz.
inline std::optional<std::string> sample_rate_warning(const SensorRecording& rec) {
  std::vector<double> gaps;
  gaps.reserve(rec.size() - 1);
  for (std::size_t i = 1; i < rec.size(); ++i) gaps.push_back(rec.samples()[i].t - rec.samples()[i - 1].t);
  auto mid = gaps.begin() + static_cast<std::ptrdiff_t>(gaps.size() / 2);
  std::nth_element(gaps.begin(), mid, gaps.end());
  const double nominal = 1.0 / kSampleRateHz;
  if (std::abs(*mid - nominal) > 0.2 * nominal)
    return "median sample spacing " + text::format_double(*mid) + " s deviates more than 20% from 0.02 s";
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Resampling and channel selection

/// Piecewise-linear resampling onto `n` evenly spaced instants spanning the recording.
inline FeatureSeries resample_uniform(const SensorRecording& rec, std::size_t n = kFeatureLength) {
  if (n < 2) throw Error(ErrorKind::InvalidSize, "resampling needs n >= 2");
  const auto& s = rec.samples();
  if (s.size() < 2) throw Error(ErrorKind::TooFewSamples, "recording has fewer than 2 samples");

  FeatureSeries out;
  out.x.resize(n);
  out.y.resize(n);
  out.z.resize(n);
  const double t0 = s.front().t;
  const double span = s.back().t - t0;
  std::size_t seg = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (k == 0 || k == n - 1) {
      const auto& e = k == 0 ? s.front() : s.back();
      out.x[k] = e.x;
      out.y[k] = e.y;
      out.z[k] = e.z;
      continue;
    }
    const double tq = t0 + span * static_cast<double>(k) / static_cast<double>(n - 1);
    while (seg + 2 < s.size() && s[seg + 1].t <= tq) ++seg;
    const auto& a = s[seg];
    const auto& b = s[seg + 1];
    const double u = std::clamp((tq - a.t) / (b.t - a.t), 0.0, 1.0);
    out.x[k] = a.x + u * (b.x - a.x);
    out.y[k] = a.y + u * (b.y - a.y);
    out.z[k] = a.z + u * (b.z - a.z);
  }
  return out;
}

inline FeatureVector extract_features(const FeatureSeries& series, ChannelMode mode) {
  FeatureVector fv{mode, {}};
  switch (mode) {
    case ChannelMode::X: fv.values = series.x; break;
    case ChannelMode::Y: fv.values = series.y; break;
    case ChannelMode::Z: fv.values = series.z; break;
    case ChannelMode::XYZ:
      fv.values.reserve(3 * series.size());
      fv.values.insert(fv.values.end(), series.x.begin(), series.x.end());
      fv.values.insert(fv.values.end(), series.y.begin(), series.y.end());
      fv.values.insert(fv.values.end(), series.z.begin(), series.z.end());
      break;
    case ChannelMode::AVG:
      fv.values.resize(series.size());
      for (std::size_t i = 0; i < series.size(); ++i)
        fv.values[i] = (series.x[i] + series.y[i] + series.z[i]) / 3.0;
      break;
  }
  return fv;
}

// ---------------------------------------------------------------------------
// Rolling windows

struct Window {
  std::size_t start = 0;  // index of the first raw sample
  FeatureSeries series;
};

constexpr std::size_t rolling_window_count(std::size_t length, std::size_t width, std::size_t stride) {
  return length < width ? 0 : (length - width) / stride + 1;
}

/// Raw consecutive samples, no interpolation; a trailing partial window is dropped.
inline std::vector<Window> rolling_windows(const SensorRecording& session, std::size_t width, std::size_t stride = 1) {
  if (width < 2) throw Error(ErrorKind::InvalidSize, "window width must be >= 2");
  if (stride < 1) throw Error(ErrorKind::InvalidSize, "window stride must be >= 1");
  const auto& s = session.samples();
  const std::size_t count = rolling_window_count(s.size(), width, stride);
  std::vector<Window> out;
  out.reserve(count);
  for (std::size_t w = 0; w < count; ++w) {
    Window win;
    win.start = w * stride;
    win.series.x.resize(width);
    win.series.y.resize(width);
    win.series.z.resize(width);
    for (std::size_t i = 0; i < width; ++i) {
      const auto& smp = s[win.start + i];
      win.series.x[i] = smp.x;
      win.series.y[i] = smp.y;
      win.series.z[i] = smp.z;
    }
    out.push_back(std::move(win));
  }
  return out;
}

}  // namespace smokegest

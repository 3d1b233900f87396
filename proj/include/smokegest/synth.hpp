#pragma once

// Parametric stand-in for recorded wrist accelerometer data.
//
// A gesture is a sequence of segments. Each segment moves every axis from the
// previous level to its own level along a raised-cosine arc, optionally with a
// sinusoidal wobble tapered to zero at both segment ends. Levels are deviations
// from the resting posture; the last segment must return to rest, so the
// envelope is zero outside the gesture span. Samples are taken at 50 Hz.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "smokegest/error.hpp"
#include "smokegest/random.hpp"
#include "smokegest/ranges.hpp"
#include "smokegest/signal.hpp"

namespace smokegest {

using Axes = std::array<double, 3>;

struct EnvelopeSegment {
  double duration = 1.0;  // s
  Axes level{};           // deviation from rest reached at the end of the segment, g
  Axes wobble{};          // sinusoid amplitude, g
  double wobble_hz = 0.0;
};

struct GestureTemplate {
  GestureClass label = GestureClass::Unknown;
  std::vector<EnvelopeSegment> segments;
  double duration_jitter = 0.15;   // +/- fraction applied to the whole gesture
  double segment_jitter = 0.05;    // +/- fraction applied to each segment on top
  double amplitude_jitter = 0.10;  // +/- fraction applied to each axis' levels and wobble
  double noise_sigma = 0.02;       // g
  double margin = 0.2;             // up to this many s of rest before and after an isolated recording

  [[nodiscard]] double nominal_duration() const {
    double d = 0.0;
    for (const auto& s : segments) d += s.duration;
    return d;
  }

  void validate() const {
    if (segments.empty()) throw Error(ErrorKind::InvalidArgument, "template has no segments");
    for (const auto& s : segments)
      if (!(s.duration > 0.0) || s.wobble_hz < 0.0)
        throw Error(ErrorKind::InvalidArgument, "segment durations must be positive");
    for (double v : segments.back().level)
      if (v != 0.0) throw Error(ErrorKind::InvalidArgument, "the last segment must return to rest");
    if (noise_sigma < 0.0 || duration_jitter < 0.0 || duration_jitter >= 1.0 || segment_jitter < 0.0 ||
        segment_jitter >= 1.0 || amplitude_jitter < 0.0 || margin < 0.0)
      throw Error(ErrorKind::InvalidArgument, "jitter and noise must be non-negative (duration jitter < 1)");
  }
};

/// Per-axis affine sensor model plus additive white noise: v' = scale * v + offset + N(0, noise).
struct DeviceProfile {
  std::string name = "watch-a";
  Axes offset{0.0, 0.0, 0.0};
  Axes scale{1.0, 1.0, 1.0};
  double noise_sigma = 0.0;

  void validate() const {
    for (double s : scale)
      if (!(s > 0.0)) throw Error(ErrorKind::InvalidArgument, "device scale factors must be positive");
    if (noise_sigma < 0.0) throw Error(ErrorKind::InvalidArgument, "device noise must be non-negative");
  }

  [[nodiscard]] SensorSample apply(SensorSample s) const noexcept {
    s.x = scale[0] * s.x + offset[0];
    s.y = scale[1] * s.y + offset[1];
    s.z = scale[2] * s.z + offset[2];
    return s;
  }
};

inline DeviceProfile watch_a() { return {}; }

inline DeviceProfile watch_b() {
  // Combined with the 0.02 g gesture noise this gives about 1.2x the noise of watch-a.
  return {"watch-b", {0.05, 0.05, 0.05}, {1.05, 0.95, 1.02}, 0.0133};
}

enum class SessionKind { SmokingSession, Eating, Drinking, Chapstick };

constexpr std::string_view to_string(SessionKind k) {
  switch (k) {
    case SessionKind::SmokingSession: return "smoking";
    case SessionKind::Eating: return "eating";
    case SessionKind::Drinking: return "drinking";
    case SessionKind::Chapstick: return "chapstick";
  }
  return "smoking";
}

inline std::optional<SessionKind> parse_session_kind(std::string_view s) {
  for (auto k : {SessionKind::SmokingSession, SessionKind::Eating, SessionKind::Drinking, SessionKind::Chapstick})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

/// How a continuous session of one kind is assembled.
struct SessionPlan {
  GestureClass gesture = GestureClass::Smoking;
  std::size_t min_gestures = 7;
  std::size_t max_gestures = 10;
  double min_gap = 1.5;  // s of idle between gestures
  double max_gap = 4.0;
  double lead = 1.5;     // s of idle before the first and after the last gesture
};

struct SynthConfig {
  double sample_rate_hz = kSampleRateHz;
  Axes rest{-0.9, 0.1, 0.35};  // resting posture, g
  double idle_noise = 0.015;   // g
  double idle_sway = 0.02;     // slow postural drift amplitude, g
  std::map<GestureClass, GestureTemplate> templates;
  std::map<SessionKind, SessionPlan> sessions;
  std::map<std::string, DeviceProfile> profiles;

  [[nodiscard]] const GestureTemplate& template_for(GestureClass c) const {
    const auto it = templates.find(c);
    if (it == templates.end())
      throw Error(ErrorKind::InvalidArgument, "no template for class '" + std::string(to_string(c)) + "'");
    return it->second;
  }

  [[nodiscard]] const DeviceProfile& profile(const std::string& name) const {
    const auto it = profiles.find(name);
    if (it == profiles.end()) throw Error(ErrorKind::InvalidArgument, "unknown device profile '" + name + "'");
    return it->second;
  }
};

namespace detail {

inline EnvelopeSegment seg(double duration, Axes level, Axes wobble = {}, double hz = 0.0) {
  return {duration, level, wobble, hz};
}

}  // namespace detail

/// Built-in templates. Smoking is raise, a long steady hold at the mouth, lower.
/// Cough, nose scratch and yawn share its raise/lower arcs and differ mostly
/// in the hold, which makes them the hardest negatives.
inline SynthConfig default_synth_config() {
  using detail::seg;
  SynthConfig cfg;
  auto add = [&cfg](GestureClass c, std::vector<EnvelopeSegment> s) {
    GestureTemplate t;
    t.label = c;
    t.segments = std::move(s);
    cfg.templates[c] = std::move(t);
  };
  add(GestureClass::Smoking, {seg(1.1, {1.50, -0.30, 0.40}),
                              seg(1.7, {1.45, -0.35, 0.45}, {0.03, 0.03, 0.02}, 0.8),
                              seg(1.2, {0, 0, 0})});
  add(GestureClass::Drinking, {seg(1.0, {1.70, 0.50, -0.20}),
                               seg(1.4, {1.90, 0.80, -0.40}),
                               seg(1.2, {0, 0, 0})});
  add(GestureClass::NoseScratch, {seg(1.0, {1.30, -0.20, 0.60}),
                                  seg(1.1, {1.30, -0.20, 0.60}, {0.08, 0.15, 0.05}, 4.0),
                                  seg(1.1, {0, 0, 0})});
  add(GestureClass::Yawn, {seg(1.3, {1.35, 0.30, 0.60}),
                           seg(1.4, {1.35, 0.35, 0.65}),
                           seg(1.3, {0, 0, 0})});
  add(GestureClass::Cough, {seg(0.7, {1.20, -0.25, 0.50}),
                            seg(0.9, {1.20, -0.25, 0.50}, {0.20, 0.10, 0.15}, 3.0),
                            seg(1.0, {0, 0, 0})});
  add(GestureClass::HairBrush, {seg(1.0, {1.60, 0.20, 1.00}),
                                seg(1.2, {1.40, 0.60, 1.30}),
                                seg(1.4, {0, 0, 0})});
  add(GestureClass::StomachRub, {seg(0.8, {0.50, 0.60, -0.30}),
                                 seg(2.4, {0.50, 0.60, -0.30}, {0.05, 0.25, 0.25}, 1.5),
                                 seg(0.8, {0, 0, 0})});
  add(GestureClass::Eating, {seg(0.9, {1.40, 0.10, 0.30}),
                             seg(0.4, {1.40, 0.10, 0.30}),
                             seg(1.1, {0, 0, 0})});
  add(GestureClass::Chapstick, {seg(1.0, {1.10, -0.10, 0.70}),
                                seg(2.4, {1.10, -0.10, 0.70}, {0.05, 0.20, 0.05}, 1.2),
                                seg(1.0, {0, 0, 0})});

  cfg.sessions[SessionKind::SmokingSession] = {GestureClass::Smoking, 7, 10, 1.5, 4.0, 1.5};
  cfg.sessions[SessionKind::Eating] = {GestureClass::Eating, 8, 12, 2.4, 9.0, 1.5};
  cfg.sessions[SessionKind::Drinking] = {GestureClass::Drinking, 4, 6, 6.0, 15.0, 1.5};
  cfg.sessions[SessionKind::Chapstick] = {GestureClass::Chapstick, 3, 5, 6.0, 12.0, 1.5};

  cfg.profiles["watch-a"] = watch_a();
  cfg.profiles["watch-b"] = watch_b();
  return cfg;
}

namespace detail {

/// Deviation from rest at time t for a realized (already jittered) segment list.
inline Axes envelope_at(const std::vector<EnvelopeSegment>& segs, double t) {
  Axes prev{};
  double t0 = 0.0;
  for (const auto& s : segs) {
    if (t <= t0 + s.duration) {
      const double u = std::clamp((t - t0) / s.duration, 0.0, 1.0);
      const double blend = 0.5 * (1.0 - std::cos(std::numbers::pi * u));
      const double taper = std::sin(std::numbers::pi * u);
      const double phase = 2.0 * std::numbers::pi * s.wobble_hz * (t - t0);
      Axes out{};
      for (std::size_t a = 0; a < 3; ++a)
        out[a] = prev[a] + (s.level[a] - prev[a]) * blend + s.wobble[a] * taper * std::sin(phase);
      return out;
    }
    prev = s.level;
    t0 += s.duration;
  }
  return prev;
}

/// Jittered copy of a template's segments; consumes a fixed number of draws.
inline std::vector<EnvelopeSegment> realize(const GestureTemplate& tpl, Rng& rng) {
  const double stretch = 1.0 + uniform(rng, -tpl.duration_jitter, tpl.duration_jitter);
  Axes gain{};
  for (auto& g : gain) g = 1.0 + uniform(rng, -tpl.amplitude_jitter, tpl.amplitude_jitter);
  std::vector<EnvelopeSegment> out = tpl.segments;
  for (auto& s : out) {
    s.duration *= stretch * (1.0 + uniform(rng, -tpl.segment_jitter, tpl.segment_jitter));
    for (std::size_t a = 0; a < 3; ++a) {
      s.level[a] *= gain[a];
      s.wobble[a] *= gain[a];
    }
  }
  return out;
}

/// Noise-free samples of a realized gesture at `rate` Hz, starting at t = 0.
inline std::vector<Axes> sample_gesture(const std::vector<EnvelopeSegment>& segs, const Axes& rest, double rate) {
  double total = 0.0;
  for (const auto& s : segs) total += s.duration;
  const auto count = static_cast<std::size_t>(std::floor(total * rate)) + 1;
  std::vector<Axes> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto env = envelope_at(segs, static_cast<double>(i) / rate);
    for (std::size_t a = 0; a < 3; ++a) out[i][a] = rest[a] + env[a];
  }
  return out;
}

inline SensorSample emit(std::size_t i, const Axes& v, double rate, const DeviceProfile& profile, Rng& rng) {
  SensorSample s{static_cast<double>(i) / rate, v[0], v[1], v[2]};
  s = profile.apply(s);
  if (profile.noise_sigma > 0.0) {
    s.x += profile.noise_sigma * normal(rng);
    s.y += profile.noise_sigma * normal(rng);
    s.z += profile.noise_sigma * normal(rng);
  }
  return s;
}

}  // namespace detail

/// One isolated gesture, t starting at 0, with random rest margins on both sides.
inline SensorRecording generate_gesture(const GestureTemplate& tpl, const DeviceProfile& profile, Rng& rng,
                                        const SynthConfig& cfg) {
  tpl.validate();
  profile.validate();
  const auto segs = detail::realize(tpl, rng);
  const auto lead = static_cast<std::size_t>(std::round(uniform(rng, 0.0, tpl.margin) * cfg.sample_rate_hz));
  const auto trail = static_cast<std::size_t>(std::round(uniform(rng, 0.0, tpl.margin) * cfg.sample_rate_hz));
  auto clean = std::vector<Axes>(lead, cfg.rest);
  const auto body = detail::sample_gesture(segs, cfg.rest, cfg.sample_rate_hz);
  clean.insert(clean.end(), body.begin(), body.end());
  clean.insert(clean.end(), trail, cfg.rest);
  for (auto& v : clean)
    for (auto& a : v) a += tpl.noise_sigma * normal(rng);
  std::vector<SensorSample> samples;
  samples.reserve(clean.size());
  for (std::size_t i = 0; i < clean.size(); ++i)
    samples.push_back(detail::emit(i, clean[i], cfg.sample_rate_hz, profile, rng));
  return SensorRecording(std::move(samples), tpl.label, profile.name);
}

inline SensorRecording generate_gesture(const GestureTemplate& tpl, const DeviceProfile& profile, Rng& rng) {
  return generate_gesture(tpl, profile, rng, default_synth_config());
}

struct CorpusSpec {
  std::size_t non_smoking = 0;
  std::size_t smoking = 0;
};

/// Smoking gestures first, then non-smoking ones cycling through the six isolated
/// confounders. Item i draws from its own stream derived from `master_seed`.
inline std::vector<SensorRecording> generate_corpus(const CorpusSpec& spec, const DeviceProfile& profile,
                                                    std::uint64_t master_seed, const SynthConfig& cfg) {
  std::vector<SensorRecording> out;
  out.reserve(spec.smoking + spec.non_smoking);
  std::size_t item = 0;
  for (std::size_t k = 0; k < spec.smoking; ++k, ++item) {
    Rng rng(child_seed(master_seed, item));
    out.push_back(generate_gesture(cfg.template_for(GestureClass::Smoking), profile, rng, cfg));
  }
  for (std::size_t k = 0; k < spec.non_smoking; ++k, ++item) {
    Rng rng(child_seed(master_seed, item));
    const auto cls = kIsolatedConfounders[k % kIsolatedConfounders.size()];
    out.push_back(generate_gesture(cfg.template_for(cls), profile, rng, cfg));
  }
  return out;
}

/// Gestures of explicitly chosen classes, `count` each, in class order.
inline std::vector<SensorRecording> generate_gestures(const std::vector<std::pair<GestureClass, std::size_t>>& counts,
                                                      const DeviceProfile& profile, std::uint64_t master_seed,
                                                      const SynthConfig& cfg) {
  std::vector<SensorRecording> out;
  std::size_t item = 0;
  for (const auto& [cls, n] : counts)
    for (std::size_t k = 0; k < n; ++k, ++item) {
      Rng rng(child_seed(master_seed, item));
      out.push_back(generate_gesture(cfg.template_for(cls), profile, rng, cfg));
    }
  return out;
}

struct Session {
  SessionKind kind = SessionKind::SmokingSession;
  SensorRecording recording;
  GestureRanges ranges;  // smoking gestures only
};

/// Idle, gesture, idle, gesture, ..., idle. Ranges are the exact sample spans of the smoking gestures.
inline Session generate_session(SessionKind kind, const DeviceProfile& profile, Rng& rng, const SynthConfig& cfg) {
  profile.validate();
  const auto plan_it = cfg.sessions.find(kind);
  if (plan_it == cfg.sessions.end()) throw Error(ErrorKind::InvalidArgument, "no plan for session kind");
  const auto& plan = plan_it->second;
  const auto& tpl = cfg.template_for(plan.gesture);
  tpl.validate();

  const double rate = cfg.sample_rate_hz;
  const auto n_gestures = static_cast<std::size_t>(
      uniform_int(rng, static_cast<std::int64_t>(plan.min_gestures), static_cast<std::int64_t>(plan.max_gestures)));
  const double sway_phase = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  const double sway_hz = uniform(rng, 0.05, 0.15);

  std::vector<Axes> clean;
  std::vector<SampleRange> ranges;
  auto idle = [&](double seconds) {
    const auto n = static_cast<std::size_t>(std::round(seconds * rate));
    for (std::size_t k = 0; k < n; ++k) {
      const double t = static_cast<double>(clean.size()) / rate;
      const double sway = cfg.idle_sway * std::sin(2.0 * std::numbers::pi * sway_hz * t + sway_phase);
      Axes v = cfg.rest;
      v[0] += sway;
      v[2] -= 0.5 * sway;
      for (auto& a : v) a += cfg.idle_noise * normal(rng);
      clean.push_back(v);
    }
  };

  idle(plan.lead);
  for (std::size_t g = 0; g < n_gestures; ++g) {
    if (g > 0) idle(uniform(rng, plan.min_gap, plan.max_gap));
    const auto segs = detail::realize(tpl, rng);
    auto samples = detail::sample_gesture(segs, cfg.rest, rate);
    const std::size_t start = clean.size();
    for (auto& v : samples) {
      for (auto& a : v) a += tpl.noise_sigma * normal(rng);
      clean.push_back(v);
    }
    if (is_smoking(plan.gesture)) ranges.push_back({start, clean.size()});
  }
  idle(plan.lead);

  std::vector<SensorSample> out;
  out.reserve(clean.size());
  for (std::size_t i = 0; i < clean.size(); ++i) out.push_back(detail::emit(i, clean[i], rate, profile, rng));
  const auto label = is_smoking(plan.gesture) ? GestureClass::Smoking : plan.gesture;
  return {kind, SensorRecording(std::move(out), label, profile.name), GestureRanges(std::move(ranges))};
}

/// The `table1` preset: 120 non-smoking + 20 smoking training gestures,
/// 30 + 10 testing gestures, 5 smoking and 5 non-smoking sessions.
struct Table1Corpus {
  std::vector<SensorRecording> train;
  std::vector<SensorRecording> test;
  std::vector<Session> smoking_sessions;
  std::vector<Session> non_smoking_sessions;
};

inline constexpr CorpusSpec kTable1Train{120, 20};
inline constexpr CorpusSpec kTable1Test{30, 10};
inline constexpr std::size_t kTable1SessionsPerKind = 5;
inline constexpr std::array<SessionKind, 3> kNonSmokingSessionKinds = {SessionKind::Eating, SessionKind::Drinking,
                                                                       SessionKind::Chapstick};

inline Session generate_session_seeded(SessionKind kind, const DeviceProfile& profile, std::uint64_t seed,
                                       const SynthConfig& cfg) {
  Rng rng(seed);
  return generate_session(kind, profile, rng, cfg);
}

inline Table1Corpus make_table1_corpus(std::uint64_t seed, const DeviceProfile& profile, const SynthConfig& cfg) {
  Table1Corpus c;
  c.train = generate_corpus(kTable1Train, profile, child_seed(seed, 1), cfg);
  c.test = generate_corpus(kTable1Test, profile, child_seed(seed, 2), cfg);
  for (std::size_t k = 0; k < kTable1SessionsPerKind; ++k) {
    c.smoking_sessions.push_back(
        generate_session_seeded(SessionKind::SmokingSession, profile, child_seed(seed, 100 + k), cfg));
    c.non_smoking_sessions.push_back(generate_session_seeded(
        kNonSmokingSessionKinds[k % kNonSmokingSessionKinds.size()], profile, child_seed(seed, 200 + k), cfg));
  }
  return c;
}

/// The cross-device session: one smoking session on another device profile.
inline Session make_cross_device_session(std::uint64_t seed, const DeviceProfile& profile, const SynthConfig& cfg) {
  return generate_session_seeded(SessionKind::SmokingSession, profile, child_seed(seed, 300), cfg);
}

// ---------------------------------------------------------------------------
// JSON config

namespace detail {

inline Axes axes_from_json(const nlohmann::ordered_json& j) {
  if (!j.is_array() || j.size() != 3) throw Error(ErrorKind::Format, "expected a 3-element array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace detail

inline nlohmann::ordered_json to_json(const GestureTemplate& t) {
  nlohmann::ordered_json segs = nlohmann::ordered_json::array();
  for (const auto& s : t.segments)
    segs.push_back({{"duration", s.duration}, {"level", s.level}, {"wobble", s.wobble}, {"wobble_hz", s.wobble_hz}});
  return {{"class", std::string(to_string(t.label))},
          {"segments", segs},
          {"duration_jitter", t.duration_jitter},
          {"segment_jitter", t.segment_jitter},
          {"amplitude_jitter", t.amplitude_jitter},
          {"noise_sigma", t.noise_sigma},
          {"margin", t.margin}};
}

inline GestureTemplate template_from_json(const nlohmann::ordered_json& j) {
  GestureTemplate t;
  const auto cls = parse_gesture_class(j.at("class").get<std::string>());
  if (!cls) throw Error(ErrorKind::Format, "unknown gesture class in template");
  t.label = *cls;
  for (const auto& s : j.at("segments")) {
    EnvelopeSegment e;
    e.duration = s.at("duration").get<double>();
    e.level = detail::axes_from_json(s.at("level"));
    if (s.contains("wobble")) e.wobble = detail::axes_from_json(s.at("wobble"));
    e.wobble_hz = s.value("wobble_hz", 0.0);
    t.segments.push_back(e);
  }
  t.duration_jitter = j.value("duration_jitter", t.duration_jitter);
  t.segment_jitter = j.value("segment_jitter", t.segment_jitter);
  t.amplitude_jitter = j.value("amplitude_jitter", t.amplitude_jitter);
  t.noise_sigma = j.value("noise_sigma", t.noise_sigma);
  t.margin = j.value("margin", t.margin);
  t.validate();
  return t;
}

inline nlohmann::ordered_json to_json(const DeviceProfile& p) {
  return {{"name", p.name}, {"offset", p.offset}, {"scale", p.scale}, {"noise_sigma", p.noise_sigma}};
}

inline DeviceProfile profile_from_json(const nlohmann::ordered_json& j) {
  DeviceProfile p;
  p.name = j.at("name").get<std::string>();
  if (j.contains("offset")) p.offset = detail::axes_from_json(j.at("offset"));
  if (j.contains("scale")) p.scale = detail::axes_from_json(j.at("scale"));
  p.noise_sigma = j.value("noise_sigma", 0.0);
  p.validate();
  return p;
}

inline nlohmann::ordered_json to_json(const SynthConfig& cfg) {
  nlohmann::ordered_json j;
  j["sample_rate_hz"] = cfg.sample_rate_hz;
  j["rest"] = cfg.rest;
  j["idle_noise"] = cfg.idle_noise;
  j["idle_sway"] = cfg.idle_sway;
  auto& tpls = j["templates"] = nlohmann::ordered_json::array();
  for (const auto& [_, t] : cfg.templates) tpls.push_back(to_json(t));
  auto& plans = j["sessions"] = nlohmann::ordered_json::array();
  for (const auto& [kind, p] : cfg.sessions)
    plans.push_back({{"kind", std::string(to_string(kind))},
                     {"gesture", std::string(to_string(p.gesture))},
                     {"min_gestures", p.min_gestures},
                     {"max_gestures", p.max_gestures},
                     {"min_gap", p.min_gap},
                     {"max_gap", p.max_gap},
                     {"lead", p.lead}});
  auto& profs = j["profiles"] = nlohmann::ordered_json::array();
  for (const auto& [_, p] : cfg.profiles) profs.push_back(to_json(p));
  return j;
}

/// Overlays a JSON document on the built-in defaults; entries are replaced by class, kind or name.
inline SynthConfig synth_config_from_json(const nlohmann::ordered_json& j) {
  SynthConfig cfg = default_synth_config();
  try {
    cfg.sample_rate_hz = j.value("sample_rate_hz", cfg.sample_rate_hz);
    if (!(cfg.sample_rate_hz > 0.0)) throw Error(ErrorKind::Format, "sample_rate_hz must be positive");
    if (j.contains("rest")) cfg.rest = detail::axes_from_json(j.at("rest"));
    cfg.idle_noise = j.value("idle_noise", cfg.idle_noise);
    cfg.idle_sway = j.value("idle_sway", cfg.idle_sway);
    if (j.contains("templates"))
      for (const auto& t : j.at("templates")) {
        auto tpl = template_from_json(t);
        cfg.templates[tpl.label] = std::move(tpl);
      }
    if (j.contains("sessions"))
      for (const auto& s : j.at("sessions")) {
        const auto kind = parse_session_kind(s.at("kind").get<std::string>());
        const auto gesture = parse_gesture_class(s.at("gesture").get<std::string>());
        if (!kind || !gesture) throw Error(ErrorKind::Format, "unknown session kind or gesture");
        SessionPlan p{*gesture, s.at("min_gestures").get<std::size_t>(), s.at("max_gestures").get<std::size_t>(),
                      s.at("min_gap").get<double>(), s.at("max_gap").get<double>(), s.value("lead", 1.5)};
        if (p.min_gestures > p.max_gestures || p.min_gap < 0.0 || p.min_gap > p.max_gap || p.lead < 0.0)
          throw Error(ErrorKind::Format, "inconsistent session plan");
        cfg.sessions[*kind] = p;
      }
    if (j.contains("profiles"))
      for (const auto& p : j.at("profiles")) {
        auto prof = profile_from_json(p);
        cfg.profiles[prof.name] = std::move(prof);
      }
  } catch (const nlohmann::ordered_json::exception& e) {
    throw Error(ErrorKind::Format, std::string("synth config: ") + e.what());
  }
  return cfg;
}

}  // namespace smokegest

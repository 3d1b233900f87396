#pragma once

// Thresholded decisions, confusion counts and the three reported rates.
// Smoking is the positive class.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "smokegest/error.hpp"
#include "smokegest/signal.hpp"

namespace smokegest {

enum class Decision { NonSmoking, Smoking };

constexpr Decision truth_of(GestureClass c) { return is_smoking(c) ? Decision::Smoking : Decision::NonSmoking; }

inline void check_threshold(double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0))
    throw Error(ErrorKind::InvalidThreshold, "threshold must lie in (0, 1)");
}

/// An output equal to the threshold counts as Smoking.
inline Decision classify(double output, double threshold) {
  check_threshold(threshold);
  return output >= threshold ? Decision::Smoking : Decision::NonSmoking;
}

struct ConfusionCounts {
  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;

  [[nodiscard]] std::size_t total() const noexcept { return tp + tn + fp + fn; }
  [[nodiscard]] std::size_t positives() const noexcept { return tp + fn; }
  [[nodiscard]] std::size_t negatives() const noexcept { return tn + fp; }

  void add(Decision predicted, Decision truth) noexcept {
    if (truth == Decision::Smoking)
      (predicted == Decision::Smoking ? tp : fn) += 1;
    else
      (predicted == Decision::Smoking ? fp : tn) += 1;
  }

  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

inline ConfusionCounts confusion(std::span<const Decision> predictions, std::span<const Decision> truths) {
  if (predictions.size() != truths.size())
    throw Error(ErrorKind::LengthMismatch, "predictions and truths differ in length");
  if (predictions.empty()) throw Error(ErrorKind::Empty, "no predictions");
  ConfusionCounts c;
  for (std::size_t i = 0; i < predictions.size(); ++i) c.add(predictions[i], truths[i]);
  return c;
}

/// tn / (tn + fp); nullopt when there are no negatives.
inline std::optional<double> specificity(const ConfusionCounts& c) {
  if (c.negatives() == 0) return std::nullopt;
  return static_cast<double>(c.tn) / static_cast<double>(c.negatives());
}

/// tp / (tp + fn); nullopt when there are no positives.
inline std::optional<double> sensitivity(const ConfusionCounts& c) {
  if (c.positives() == 0) return std::nullopt;
  return static_cast<double>(c.tp) / static_cast<double>(c.positives());
}

inline double accuracy(const ConfusionCounts& c) {
  if (c.total() == 0) throw Error(ErrorKind::Empty, "accuracy of zero events");
  return static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
}

using FpAttribution = std::map<GestureClass, std::size_t>;

/// False positives per non-smoking class. The six isolated confounders always
/// appear (possibly at zero); other classes appear once seen.
inline FpAttribution fp_attribution(std::span<const std::pair<double, GestureClass>> outputs, double threshold) {
  check_threshold(threshold);
  FpAttribution counts;
  for (auto c : kIsolatedConfounders) counts[c] = 0;
  for (const auto& [out, cls] : outputs) {
    if (is_smoking(cls)) throw Error(ErrorKind::ContainsPositiveClass, "fp attribution over a smoking sample");
    auto& slot = counts[cls];
    if (classify(out, threshold) == Decision::Smoking) ++slot;
  }
  return counts;
}

struct MetricsReport {
  ConfusionCounts counts;
  std::optional<double> specificity;
  std::optional<double> sensitivity;
  std::optional<double> accuracy;
  double threshold = 0.5;
};

inline MetricsReport make_report(const ConfusionCounts& c, double threshold) {
  MetricsReport r;
  r.counts = c;
  r.specificity = smokegest::specificity(c);
  r.sensitivity = smokegest::sensitivity(c);
  if (c.total() > 0) r.accuracy = smokegest::accuracy(c);
  r.threshold = threshold;
  return r;
}

/// Scores raw outputs against gesture labels at one threshold.
struct GestureEvaluation {
  MetricsReport metrics;
  FpAttribution false_positives;
};

inline GestureEvaluation evaluate_outputs(std::span<const std::pair<double, GestureClass>> outputs, double threshold) {
  check_threshold(threshold);
  if (outputs.empty()) throw Error(ErrorKind::Empty, "no outputs to evaluate");
  ConfusionCounts c;
  std::vector<std::pair<double, GestureClass>> negatives;
  for (const auto& [out, cls] : outputs) {
    c.add(classify(out, threshold), truth_of(cls));
    if (!is_smoking(cls)) negatives.emplace_back(out, cls);
  }
  return {make_report(c, threshold), fp_attribution(negatives, threshold)};
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::ordered_json to_json(const ConfusionCounts& c) {
  return {{"tp", c.tp}, {"tn", c.tn}, {"fp", c.fp}, {"fn", c.fn}};
}

inline nlohmann::ordered_json to_json(const MetricsReport& r) {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(); };
  nlohmann::ordered_json j;
  j["threshold"] = r.threshold;
  j["counts"] = to_json(r.counts);
  j["specificity"] = opt(r.specificity);
  j["sensitivity"] = opt(r.sensitivity);
  j["accuracy"] = opt(r.accuracy);
  return j;
}

inline nlohmann::ordered_json to_json(const FpAttribution& fp) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [cls, n] : fp) j[std::string(to_string(cls))] = n;
  return j;
}

inline MetricsReport metrics_from_json(const nlohmann::ordered_json& j) {
  auto opt = [](const nlohmann::ordered_json& v) {
    return v.is_null() ? std::optional<double>{} : std::optional<double>{v.get<double>()};
  };
  MetricsReport r;
  r.threshold = j.at("threshold").get<double>();
  const auto& c = j.at("counts");
  r.counts = {c.at("tp").get<std::size_t>(), c.at("tn").get<std::size_t>(), c.at("fp").get<std::size_t>(),
              c.at("fn").get<std::size_t>()};
  r.specificity = opt(j.at("specificity"));
  r.sensitivity = opt(j.at("sensitivity"));
  r.accuracy = opt(j.at("accuracy"));
  return r;
}

}  // namespace smokegest

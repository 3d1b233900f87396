#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "smokegest/error.hpp"

namespace smokegest {

/// Half-open [start, end) span of session sample indices.
struct SampleRange {
  std::size_t start = 0;
  std::size_t end = 0;

  [[nodiscard]] bool contains(std::size_t i) const noexcept { return i >= start && i < end; }
  friend bool operator==(const SampleRange&, const SampleRange&) = default;
};

/// Ground-truth smoking gestures in a continuous session: sorted, non-overlapping, non-empty spans.
class GestureRanges {
 public:
  GestureRanges() = default;
  explicit GestureRanges(std::vector<SampleRange> ranges) : ranges_(std::move(ranges)) {
    for (std::size_t k = 0; k < ranges_.size(); ++k) {
      if (ranges_[k].start >= ranges_[k].end)
        throw Error(ErrorKind::InvalidArgument, "range " + std::to_string(k) + " is empty or reversed");
      if (k > 0 && ranges_[k].start < ranges_[k - 1].end)
        throw Error(ErrorKind::InvalidArgument, "ranges must be sorted and non-overlapping");
    }
  }

  [[nodiscard]] const std::vector<SampleRange>& ranges() const noexcept { return ranges_; }
  [[nodiscard]] std::size_t size() const noexcept { return ranges_.size(); }
  [[nodiscard]] bool empty() const noexcept { return ranges_.empty(); }

  /// Index of the range holding sample i, or size() when none does.
  [[nodiscard]] std::size_t find(std::size_t i) const noexcept {
    std::size_t lo = 0, hi = ranges_.size();
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (ranges_[mid].end <= i)
        lo = mid + 1;
      else
        hi = mid;
    }
    return lo < ranges_.size() && ranges_[lo].contains(i) ? lo : ranges_.size();
  }

  [[nodiscard]] bool contains(std::size_t i) const noexcept { return find(i) != ranges_.size(); }

  friend bool operator==(const GestureRanges&, const GestureRanges&) = default;

 private:
  std::vector<SampleRange> ranges_;
};

inline nlohmann::ordered_json to_json(const GestureRanges& r) {
  auto a = nlohmann::ordered_json::array();
  for (const auto& s : r.ranges()) a.push_back({{"start", s.start}, {"end", s.end}});
  return a;
}

inline GestureRanges ranges_from_json(const nlohmann::ordered_json& j) {
  if (!j.is_array()) throw Error(ErrorKind::Format, "ranges file must hold a JSON array");
  std::vector<SampleRange> out;
  try {
    for (const auto& e : j) {
      const auto s = e.at("start").get<long long>();
      const auto t = e.at("end").get<long long>();
      if (s < 0 || t < 0) throw Error(ErrorKind::Format, "negative sample index in ranges");
      out.push_back({static_cast<std::size_t>(s), static_cast<std::size_t>(t)});
    }
  } catch (const nlohmann::ordered_json::exception& e) {
    throw Error(ErrorKind::Format, std::string("ranges file: ") + e.what());
  }
  return GestureRanges(std::move(out));
}

}  // namespace smokegest

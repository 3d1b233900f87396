#pragma once

// Small builders shared by the unit tests.

#include <cstddef>
#include <vector>

#include "smokegest/smokegest.hpp"

namespace smokegest::testing {

/// Uniform 50 Hz recording whose axes come from `fx`, `fy`, `fz` evaluated at the sample index.
template <typename Fx, typename Fy, typename Fz>
SensorRecording make_recording(std::size_t n, Fx fx, Fy fy, Fz fz, GestureClass label = GestureClass::Unknown) {
  std::vector<SensorSample> s(n);
  for (std::size_t i = 0; i < n; ++i)
    s[i] = {static_cast<double>(i) / kSampleRateHz, fx(i), fy(i), fz(i)};
  return SensorRecording(std::move(s), label, "test");
}

inline SensorRecording constant_recording(std::size_t n, double x, double y, double z,
                                          GestureClass label = GestureClass::Unknown) {
  return make_recording(
      n, [x](std::size_t) { return x; }, [y](std::size_t) { return y; }, [z](std::size_t) { return z; }, label);
}

inline FeatureVector random_features(Rng& rng, std::size_t n, ChannelMode mode = ChannelMode::X) {
  FeatureVector fv{mode, std::vector<double>(n)};
  for (auto& v : fv.values) v = uniform(rng, -1.5, 1.5);
  return fv;
}

/// Network with every weight drawn uniformly from [-1, 1] and identity normalization.
inline Network random_network(Rng& rng, std::size_t in, std::size_t hidden) {
  Network net = Network::zeros(in, hidden);
  VectorXd w(static_cast<Index>(net.weight_count()));
  for (Index i = 0; i < w.size(); ++i) w[i] = uniform(rng, -1.0, 1.0);
  set_weights(net, w);
  return net;
}

/// A small synthetic gesture set that a network can separate.
inline LabeledDataset small_corpus(std::uint64_t seed, ChannelMode mode = ChannelMode::X,
                                   std::size_t width = 50) {
  const auto recs = generate_corpus({36, 12}, watch_a(), seed, default_synth_config());
  return make_dataset(recs, mode, width);
}

}  // namespace smokegest::testing

#pragma once

// Single-hidden-layer perceptron: tanh hidden units, one logistic output.
// Flat weight order everywhere: w1 (row-major, hidden x input), b1, w2, b2.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "smokegest/error.hpp"
#include "smokegest/random.hpp"
#include "smokegest/signal.hpp"

namespace smokegest {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using Json = nlohmann::ordered_json;

inline constexpr std::size_t kDefaultHidden = 10;
inline constexpr double kDefaultThreshold = 0.5;

/// Per-element min/max of the training inputs; maps [min, max] onto [-1, 1].
struct NormParams {
  VectorXd min;
  VectorXd max;

  static NormParams identity(std::size_t n) {
    return {VectorXd::Constant(static_cast<Index>(n), -1.0), VectorXd::Constant(static_cast<Index>(n), 1.0)};
  }

  /// Element-wise range over a set of equally sized inputs.
  static NormParams fit(std::span<const FeatureVector> inputs) {
    if (inputs.empty()) throw Error(ErrorKind::EmptyDataset, "cannot fit normalization on no inputs");
    const auto n = static_cast<Index>(inputs.front().size());
    NormParams p{VectorXd::Constant(n, std::numeric_limits<double>::infinity()),
                 VectorXd::Constant(n, -std::numeric_limits<double>::infinity())};
    for (const auto& fv : inputs) {
      if (static_cast<Index>(fv.size()) != n) throw Error(ErrorKind::LengthMismatch, "inconsistent input lengths");
      for (Index i = 0; i < n; ++i) {
        p.min[i] = std::min(p.min[i], fv.values[static_cast<std::size_t>(i)]);
        p.max[i] = std::max(p.max[i], fv.values[static_cast<std::size_t>(i)]);
      }
    }
    return p;
  }

  /// Like fit, but every element of a channel block shares the block's overall
  /// range. `blocks` is 3 for concatenated XYZ inputs, 1 otherwise.
  static NormParams fit_pooled(std::span<const FeatureVector> inputs, std::size_t blocks) {
    NormParams p = fit(inputs);
    const auto n = p.min.size();
    if (blocks == 0 || n % static_cast<Index>(blocks) != 0)
      throw Error(ErrorKind::InvalidSize, "input length is not a multiple of the block count");
    const Index len = n / static_cast<Index>(blocks);
    for (Index b = 0; b < static_cast<Index>(blocks); ++b) {
      p.min.segment(b * len, len).setConstant(p.min.segment(b * len, len).minCoeff());
      p.max.segment(b * len, len).setConstant(p.max.segment(b * len, len).maxCoeff());
    }
    return p;
  }

  /// Affine map, no clamping; degenerate elements map to 0.
  [[nodiscard]] VectorXd apply(std::span<const double> raw) const {
    if (static_cast<Index>(raw.size()) != min.size())
      throw Error(ErrorKind::LengthMismatch,
                  "input has " + std::to_string(raw.size()) + " values, expected " + std::to_string(min.size()));
    VectorXd out(min.size());
    for (Index i = 0; i < min.size(); ++i) {
      const double range = max[i] - min[i];
      out[i] = range > 0.0 ? 2.0 * (raw[static_cast<std::size_t>(i)] - min[i]) / range - 1.0 : 0.0;
    }
    return out;
  }
};

struct Network {
  ChannelMode mode = ChannelMode::X;
  MatrixXd w1;  // hidden x input
  VectorXd b1;
  VectorXd w2;
  double b2 = 0.0;
  NormParams norm;
  double threshold = kDefaultThreshold;

  [[nodiscard]] std::size_t input_size() const noexcept { return static_cast<std::size_t>(w1.cols()); }
  [[nodiscard]] std::size_t hidden_size() const noexcept { return static_cast<std::size_t>(w1.rows()); }
  [[nodiscard]] std::size_t weight_count() const noexcept {
    return hidden_size() * (input_size() + 1) + hidden_size() + 1;
  }
  /// Raw samples per axis that one input corresponds to.
  [[nodiscard]] std::size_t window_width() const noexcept {
    return mode == ChannelMode::XYZ ? input_size() / 3 : input_size();
  }

  /// All-zero network with identity normalization.
  static Network zeros(std::size_t input_size, std::size_t hidden_size, ChannelMode mode = ChannelMode::X) {
    if (input_size == 0 || hidden_size == 0)
      throw Error(ErrorKind::InvalidSize, "input and hidden sizes must be positive");
    if (mode == ChannelMode::XYZ && input_size % 3 != 0)
      throw Error(ErrorKind::InvalidSize, "XYZ input size must be a multiple of 3");
    Network net;
    net.mode = mode;
    net.w1 = MatrixXd::Zero(static_cast<Index>(hidden_size), static_cast<Index>(input_size));
    net.b1 = VectorXd::Zero(static_cast<Index>(hidden_size));
    net.w2 = VectorXd::Zero(static_cast<Index>(hidden_size));
    net.norm = NormParams::identity(input_size);
    return net;
  }
};

inline VectorXd weights(const Network& net) {
  const auto h = static_cast<Index>(net.hidden_size());
  const auto in = static_cast<Index>(net.input_size());
  VectorXd w(static_cast<Index>(net.weight_count()));
  for (Index j = 0; j < h; ++j) w.segment(j * in, in) = net.w1.row(j).transpose();
  w.segment(h * in, h) = net.b1;
  w.segment(h * in + h, h) = net.w2;
  w[h * in + 2 * h] = net.b2;
  return w;
}

inline void set_weights(Network& net, const VectorXd& w) {
  if (w.size() != static_cast<Index>(net.weight_count()))
    throw Error(ErrorKind::LengthMismatch, "weight vector has the wrong length");
  const auto h = static_cast<Index>(net.hidden_size());
  const auto in = static_cast<Index>(net.input_size());
  for (Index j = 0; j < h; ++j) net.w1.row(j) = w.segment(j * in, in).transpose();
  net.b1 = w.segment(h * in, h);
  net.w2 = w.segment(h * in + h, h);
  net.b2 = w[h * in + 2 * h];
}

/// Weights uniform in [-0.5, 0.5], biases zero.
inline Network init_network(std::size_t input_size, std::size_t hidden_size, Rng& rng,
                            ChannelMode mode = ChannelMode::X) {
  Network net = Network::zeros(input_size, hidden_size, mode);
  for (Index j = 0; j < net.w1.rows(); ++j)
    for (Index i = 0; i < net.w1.cols(); ++i) net.w1(j, i) = uniform(rng, -0.5, 0.5);
  for (Index j = 0; j < net.w2.size(); ++j) net.w2[j] = uniform(rng, -0.5, 0.5);
  return net;
}

inline double logistic(double z) {
  // Keep the output strictly inside (0, 1) even when exp saturates.
  constexpr double lo = std::numeric_limits<double>::min();
  constexpr double hi = 1.0 - 0x1.0p-53;
  return std::clamp(1.0 / (1.0 + std::exp(-z)), lo, hi);
}

inline VectorXd normalize(const Network& net, const FeatureVector& raw) { return net.norm.apply(raw.values); }

namespace detail {

inline void check_input(const Network& net, const FeatureVector& raw) {
  if (raw.size() != net.input_size())
    throw Error(ErrorKind::LengthMismatch,
                "input has " + std::to_string(raw.size()) + " values, network expects " +
                    std::to_string(net.input_size()));
}

}  // namespace detail

/// Output for an already-normalized input.
inline double forward_normalized(const Network& net, const Eigen::Ref<const VectorXd>& xhat) {
  const VectorXd h = (net.w1 * xhat + net.b1).array().tanh().matrix();
  return logistic(net.w2.dot(h) + net.b2);
}

inline double forward(const Network& net, const FeatureVector& raw) {
  detail::check_input(net, raw);
  return forward_normalized(net, normalize(net, raw));
}

/// Outputs for a batch of normalized inputs, one per row.
inline VectorXd forward_rows(const Network& net, const MatrixXd& xhat_rows) {
  const MatrixXd h = ((xhat_rows * net.w1.transpose()).rowwise() + net.b1.transpose()).array().tanh().matrix();
  VectorXd z = h * net.w2;
  for (Index s = 0; s < z.size(); ++s) z[s] = logistic(z[s] + net.b2);
  return z;
}

/// d(output - target)/d(weights) for each normalized row; the target does not enter.
inline MatrixXd jacobian_rows(const Network& net, const MatrixXd& xhat_rows) {
  const Index n = xhat_rows.rows();
  const auto in = static_cast<Index>(net.input_size());
  const auto hid = static_cast<Index>(net.hidden_size());
  const MatrixXd h = ((xhat_rows * net.w1.transpose()).rowwise() + net.b1.transpose()).array().tanh().matrix();
  const VectorXd z2 = h * net.w2;

  MatrixXd jac(n, static_cast<Index>(net.weight_count()));
  for (Index s = 0; s < n; ++s) {
    const double o = logistic(z2[s] + net.b2);
    const double dout = o * (1.0 - o);
    for (Index j = 0; j < hid; ++j) {
      const double dhid = dout * net.w2[j] * (1.0 - h(s, j) * h(s, j));
      jac.row(s).segment(j * in, in) = dhid * xhat_rows.row(s);
      jac(s, hid * in + j) = dhid;
      jac(s, hid * in + hid + j) = dout * h(s, j);
    }
    jac(s, hid * in + 2 * hid) = dout;
  }
  return jac;
}

struct Example {
  FeatureVector input;
  double target = 0.0;
};

/// Stacks normalized inputs into rows.
inline MatrixXd normalized_rows(const Network& net, std::span<const FeatureVector> inputs) {
  MatrixXd rows(static_cast<Index>(inputs.size()), static_cast<Index>(net.input_size()));
  for (std::size_t s = 0; s < inputs.size(); ++s) {
    detail::check_input(net, inputs[s]);
    rows.row(static_cast<Index>(s)) = net.norm.apply(inputs[s].values).transpose();
  }
  return rows;
}

/// Residual Jacobian (rows: samples, columns: flat weights) with r = output - target.
inline MatrixXd jacobian(const Network& net, std::span<const Example> batch) {
  if (batch.empty()) throw Error(ErrorKind::EmptyBatch, "jacobian of an empty batch");
  std::vector<FeatureVector> inputs;
  inputs.reserve(batch.size());
  for (const auto& ex : batch) inputs.push_back(ex.input);
  return jacobian_rows(net, normalized_rows(net, inputs));
}

// ---------------------------------------------------------------------------
// Model file

inline Json to_json(const Network& net) {
  auto vec = [](const VectorXd& v) {
    Json a = Json::array();
    for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
  };
  Json w1 = Json::array();
  for (Index j = 0; j < net.w1.rows(); ++j) w1.push_back(vec(net.w1.row(j).transpose()));
  Json doc;
  doc["version"] = 1;
  doc["mode"] = std::string(to_string(net.mode));
  doc["input_size"] = net.input_size();
  doc["hidden_size"] = net.hidden_size();
  doc["norm_min"] = vec(net.norm.min);
  doc["norm_max"] = vec(net.norm.max);
  doc["w1"] = std::move(w1);
  doc["b1"] = vec(net.b1);
  doc["w2"] = vec(net.w2);
  doc["b2"] = net.b2;
  doc["threshold"] = net.threshold;
  return doc;
}

inline Network network_from_json(const Json& doc) {
  try {
    if (doc.at("version").get<int>() != 1) throw Error(ErrorKind::Format, "unsupported model version");
    const auto mode = parse_channel_mode(doc.at("mode").get<std::string>());
    if (!mode) throw Error(ErrorKind::Format, "unknown mode");
    const auto in = doc.at("input_size").get<std::size_t>();
    const auto hid = doc.at("hidden_size").get<std::size_t>();
    Network net = Network::zeros(in, hid, *mode);
    auto read_vec = [](const Json& a, std::size_t n, const char* name) {
      if (!a.is_array() || a.size() != n) throw Error(ErrorKind::Format, std::string(name) + " has the wrong length");
      VectorXd v(static_cast<Index>(n));
      for (std::size_t i = 0; i < n; ++i) v[static_cast<Index>(i)] = a[i].get<double>();
      return v;
    };
    net.norm.min = read_vec(doc.at("norm_min"), in, "norm_min");
    net.norm.max = read_vec(doc.at("norm_max"), in, "norm_max");
    const auto& w1 = doc.at("w1");
    if (!w1.is_array() || w1.size() != hid) throw Error(ErrorKind::Format, "w1 has the wrong row count");
    for (std::size_t j = 0; j < hid; ++j) net.w1.row(static_cast<Index>(j)) = read_vec(w1[j], in, "w1 row").transpose();
    net.b1 = read_vec(doc.at("b1"), hid, "b1");
    net.w2 = read_vec(doc.at("w2"), hid, "w2");
    net.b2 = doc.at("b2").get<double>();
    net.threshold = doc.value("threshold", kDefaultThreshold);
    if (!weights(net).allFinite()) throw Error(ErrorKind::Format, "non-finite weight");
    for (Index i = 0; i < net.norm.min.size(); ++i)
      if (!(net.norm.max[i] >= net.norm.min[i])) throw Error(ErrorKind::Format, "norm_max < norm_min");
    return net;
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::Format, std::string("model file: ") + e.what());
  }
}

}  // namespace smokegest

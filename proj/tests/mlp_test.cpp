#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "smokegest/mlp.hpp"
#include "support.hpp"

namespace sg = smokegest;
using sg::Index;
using sg::MatrixXd;
using sg::VectorXd;

TEST(Network, WeightCounts) {
  sg::Rng rng(1);
  EXPECT_EQ(sg::init_network(200, 10, rng).weight_count(), 2021u);
  EXPECT_EQ(sg::init_network(600, 10, rng, sg::ChannelMode::XYZ).weight_count(), 6021u);
  EXPECT_EQ(sg::weights(sg::init_network(200, 10, rng)).size(), 2021);
}

TEST(Network, InitIsSeedDeterministic) {
  sg::Rng a(42), b(42), c(43);
  const VectorXd wa = sg::weights(sg::init_network(200, 10, a));
  const VectorXd wb = sg::weights(sg::init_network(200, 10, b));
  const VectorXd wc = sg::weights(sg::init_network(200, 10, c));
  EXPECT_EQ(wa, wb);
  EXPECT_NE(wa, wc);
  EXPECT_LE(wa.cwiseAbs().maxCoeff(), 0.5);
}

TEST(Network, RejectsBadShapes) {
  sg::Rng rng(1);
  EXPECT_THROW(sg::init_network(0, 10, rng), sg::Error);
  EXPECT_THROW(sg::init_network(200, 0, rng), sg::Error);
  EXPECT_THROW(sg::init_network(200, 10, rng, sg::ChannelMode::XYZ), sg::Error);
}

TEST(Network, WeightsRoundTrip) {
  sg::Rng rng(9);
  auto net = sg::testing::random_network(rng, 7, 3);
  const VectorXd w = sg::weights(net);
  auto other = sg::Network::zeros(7, 3);
  sg::set_weights(other, w);
  EXPECT_EQ(other.w1, net.w1);
  EXPECT_EQ(other.b1, net.b1);
  EXPECT_EQ(other.w2, net.w2);
  EXPECT_EQ(other.b2, net.b2);
  // documented flat order: w1 row-major, b1, w2, b2
  EXPECT_EQ(w[1], net.w1(0, 1));
  EXPECT_EQ(w[7], net.w1(1, 0));
  EXPECT_EQ(w[21], net.b1[0]);
  EXPECT_EQ(w[24], net.w2[0]);
  EXPECT_EQ(w[27], net.b2);
  EXPECT_THROW(sg::set_weights(other, VectorXd::Zero(5)), sg::Error);
}

TEST(Normalize, EndpointsMidpointAndDegenerate) {
  sg::NormParams p{VectorXd(3), VectorXd(3)};
  p.min << -2.0, 0.0, 4.0;
  p.max << 2.0, 10.0, 4.0;
  const std::vector<double> at_min{-2.0, 0.0, 4.0};
  const std::vector<double> mid{0.0, 5.0, 123.0};
  const VectorXd a = p.apply(at_min);
  const VectorXd b = p.apply(mid);
  EXPECT_EQ(a[0], -1.0);
  EXPECT_EQ(a[1], -1.0);
  EXPECT_EQ(b[0], 0.0);
  EXPECT_EQ(b[1], 0.0);
  EXPECT_EQ(a[2], 0.0);
  EXPECT_EQ(b[2], 0.0);
  EXPECT_THROW(p.apply(std::vector<double>{1.0}), sg::Error);
}

TEST(Normalize, FitMapsTrainingRangeOntoUnitInterval) {
  sg::Rng rng(4);
  std::vector<sg::FeatureVector> inputs;
  for (int i = 0; i < 20; ++i) inputs.push_back(sg::testing::random_features(rng, 6));
  const auto p = sg::NormParams::fit(inputs);
  for (const auto& fv : inputs) {
    const VectorXd x = p.apply(fv.values);
    EXPECT_GE(x.minCoeff(), -1.0 - 1e-12);
    EXPECT_LE(x.maxCoeff(), 1.0 + 1e-12);
  }
  const auto pooled = sg::NormParams::fit_pooled(inputs, 2);
  EXPECT_EQ(pooled.min[0], pooled.min[2]);
  EXPECT_EQ(pooled.max[3], pooled.max[5]);
  EXPECT_EQ(pooled.min[0], p.min.head(3).minCoeff());
  EXPECT_THROW(sg::NormParams::fit_pooled(inputs, 4), sg::Error);
}

TEST(Forward, ZeroNetworkGivesHalf) {
  const auto net = sg::Network::zeros(200, 10);
  sg::Rng rng(1);
  EXPECT_EQ(sg::forward(net, sg::testing::random_features(rng, 200)), 0.5);
}

TEST(Forward, HandComputedSingleUnit) {
  auto net = sg::Network::zeros(4, 1);
  net.w2[0] = 1.0;
  const sg::FeatureVector x{sg::ChannelMode::X, {0.0, 0.0, 0.0, 0.0}};
  net.w1.row(0) << 0.3, -0.1, 2.0, 5.0;  // zero input keeps the pre-activation at 0
  EXPECT_DOUBLE_EQ(sg::forward(net, x), 0.5);
  net.b2 = std::log(3.0);
  EXPECT_NEAR(sg::forward(net, x), 0.75, 1e-15);
}

TEST(Forward, OutputStaysInsideOpenUnitInterval) {
  sg::Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    auto net = sg::testing::random_network(rng, 5, 3);
    set_weights(net, 60.0 * sg::weights(net));
    const double o = sg::forward(net, sg::testing::random_features(rng, 5));
    EXPECT_GT(o, 0.0);
    EXPECT_LT(o, 1.0);
  }
}

TEST(Forward, IncreasesWithOutputBias) {
  sg::Rng rng(12);
  auto net = sg::testing::random_network(rng, 6, 4);
  const auto x = sg::testing::random_features(rng, 6);
  double prev = 0.0;
  for (double b = -5.0; b <= 5.0; b += 0.5) {
    net.b2 = b;
    const double o = sg::forward(net, x);
    EXPECT_GT(o, prev);
    prev = o;
  }
}

TEST(Forward, RejectsWrongLength) {
  const auto net = sg::Network::zeros(10, 2);
  EXPECT_THROW(sg::forward(net, sg::FeatureVector{sg::ChannelMode::X, std::vector<double>(9)}), sg::Error);
}

TEST(Forward, BatchMatchesSingle) {
  sg::Rng rng(13);
  const auto net = sg::testing::random_network(rng, 8, 3);
  std::vector<sg::FeatureVector> xs;
  for (int i = 0; i < 6; ++i) xs.push_back(sg::testing::random_features(rng, 8));
  const VectorXd batch = sg::forward_rows(net, sg::normalized_rows(net, xs));
  for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_DOUBLE_EQ(batch[static_cast<Index>(i)], sg::forward(net, xs[i]));
}

TEST(Jacobian, Shape) {
  sg::Rng rng(1);
  const auto net = sg::init_network(200, 10, rng);
  std::vector<sg::Example> batch;
  for (int i = 0; i < 5; ++i) batch.push_back({sg::testing::random_features(rng, 200), 1.0});
  const MatrixXd j = sg::jacobian(net, batch);
  EXPECT_EQ(j.rows(), 5);
  EXPECT_EQ(j.cols(), 2021);
  EXPECT_THROW(sg::jacobian(net, std::span<const sg::Example>{}), sg::Error);
}

TEST(Jacobian, MatchesCentralDifferences) {
  sg::Rng rng(21);
  constexpr double eps = 1e-6;
  for (int trial = 0; trial < 30; ++trial) {
    const auto in = static_cast<std::size_t>(sg::uniform_int(rng, 1, 10));
    const auto hid = static_cast<std::size_t>(sg::uniform_int(rng, 1, 4));
    auto net = sg::testing::random_network(rng, in, hid);
    std::vector<sg::Example> batch;
    for (int i = 0; i < 3; ++i) batch.push_back({sg::testing::random_features(rng, in), 0.0});
    const MatrixXd j = sg::jacobian(net, batch);
    const VectorXd w = sg::weights(net);
    for (Index c = 0; c < w.size(); ++c) {
      VectorXd wp = w, wm = w;
      wp[c] += eps;
      wm[c] -= eps;
      sg::Network np = net, nm = net;
      sg::set_weights(np, wp);
      sg::set_weights(nm, wm);
      for (std::size_t s = 0; s < batch.size(); ++s) {
        const double fd = (sg::forward(np, batch[s].input) - sg::forward(nm, batch[s].input)) / (2 * eps);
        const double an = j(static_cast<Index>(s), c);
        EXPECT_LE(std::abs(an - fd), 1e-4 * std::max(1.0, std::abs(fd))) << "column " << c;
      }
    }
  }
}

TEST(Jacobian, ZeroInputGivesZeroFirstLayerColumns) {
  sg::Rng rng(5);
  const auto net = sg::testing::random_network(rng, 6, 3);
  const std::vector<sg::Example> batch{{{sg::ChannelMode::X, std::vector<double>(6, 0.0)}, 1.0}};
  const MatrixXd j = sg::jacobian(net, batch);
  EXPECT_EQ(j.leftCols(18).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_GT(j.rightCols(7).cwiseAbs().maxCoeff(), 0.0);
}

TEST(ModelJson, RoundTripIsExact) {
  sg::Rng rng(77);
  auto net = sg::init_network(12, 4, rng, sg::ChannelMode::XYZ);
  std::vector<sg::FeatureVector> xs;
  for (int i = 0; i < 5; ++i) xs.push_back(sg::testing::random_features(rng, 12, sg::ChannelMode::XYZ));
  net.norm = sg::NormParams::fit(xs);
  net.b2 = -0.123456789012345;
  net.threshold = 0.8;
  const auto text = sg::to_json(net).dump();
  const auto back = sg::network_from_json(sg::Json::parse(text));
  EXPECT_EQ(back.mode, sg::ChannelMode::XYZ);
  EXPECT_EQ(back.w1, net.w1);
  EXPECT_EQ(back.b1, net.b1);
  EXPECT_EQ(back.w2, net.w2);
  EXPECT_EQ(back.b2, net.b2);
  EXPECT_EQ(back.norm.min, net.norm.min);
  EXPECT_EQ(back.norm.max, net.norm.max);
  EXPECT_EQ(back.threshold, 0.8);
  EXPECT_EQ(sg::to_json(back).dump(), text);
}

TEST(ModelJson, RejectsBrokenDocuments) {
  sg::Rng rng(1);
  const auto good = sg::to_json(sg::init_network(4, 2, rng));
  auto missing = good;
  missing.erase("w2");
  EXPECT_THROW(sg::network_from_json(missing), sg::Error);
  auto short_w1 = good;
  short_w1["w1"].erase(0);
  EXPECT_THROW(sg::network_from_json(short_w1), sg::Error);
  auto bad_mode = good;
  bad_mode["mode"] = "Q";
  EXPECT_THROW(sg::network_from_json(bad_mode), sg::Error);
}

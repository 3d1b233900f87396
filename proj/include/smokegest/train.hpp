#pragma once

// Levenberg-Marquardt training of the gesture network: damped Gauss-Newton
// steps, validation early stopping, seeded 70/15/15 partitioning and
// best-of-N restart selection.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "smokegest/error.hpp"
#include "smokegest/eval.hpp"
#include "smokegest/mlp.hpp"
#include "smokegest/random.hpp"
#include "smokegest/signal.hpp"

namespace smokegest {

struct LabeledItem {
  FeatureVector input;
  double target = 0.0;  // 1 iff label == Smoking
  GestureClass label = GestureClass::Unknown;
};

using LabeledDataset = std::vector<LabeledItem>;

inline LabeledItem make_item(FeatureVector input, GestureClass label) {
  return {std::move(input), is_smoking(label) ? 1.0 : 0.0, label};
}

/// Resamples every recording to `n` points and extracts one channel mode.
inline LabeledDataset make_dataset(std::span<const SensorRecording> recordings, ChannelMode mode,
                                   std::size_t n = kFeatureLength) {
  LabeledDataset out;
  out.reserve(recordings.size());
  for (const auto& rec : recordings) out.push_back(make_item(extract_features(resample_uniform(rec, n), mode), rec.label()));
  return out;
}

inline std::vector<FeatureVector> inputs_of(const LabeledDataset& ds) {
  std::vector<FeatureVector> v;
  v.reserve(ds.size());
  for (const auto& it : ds) v.push_back(it.input);
  return v;
}

inline VectorXd targets_of(const LabeledDataset& ds) {
  VectorXd t(static_cast<Index>(ds.size()));
  for (std::size_t i = 0; i < ds.size(); ++i) t[static_cast<Index>(i)] = ds[i].target;
  return t;
}

// ---------------------------------------------------------------------------
// Partitioning

struct SplitRatios {
  double train = 0.70;
  double val = 0.15;
  double test = 0.15;

  void validate() const {
    if (train < 0.0 || val < 0.0 || test < 0.0 || std::abs(train + val + test - 1.0) > 1e-9)
      throw Error(ErrorKind::InvalidArgument, "split ratios must be non-negative and sum to 1");
  }
};

struct PartitionIndices {
  std::vector<std::size_t> train, val, test;
};

/// Seeded shuffle of 0..n-1, cut at round(n*train) and round(n*(train+val)), rounding half up.
inline PartitionIndices partition_indices(std::size_t n, const SplitRatios& ratios, std::uint64_t seed) {
  ratios.validate();
  if (n == 0) throw Error(ErrorKind::EmptyDataset, "cannot partition an empty dataset");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  shuffle(std::span<std::size_t>(order), rng);

  const auto cut = [n](double fraction) {
    return std::min(n, static_cast<std::size_t>(std::floor(static_cast<double>(n) * fraction + 0.5)));
  };
  const std::size_t a = cut(ratios.train);
  const std::size_t b = std::max(a, cut(ratios.train + ratios.val));
  PartitionIndices p;
  p.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(a));
  p.val.assign(order.begin() + static_cast<std::ptrdiff_t>(a), order.begin() + static_cast<std::ptrdiff_t>(b));
  p.test.assign(order.begin() + static_cast<std::ptrdiff_t>(b), order.end());
  return p;
}

struct Partition {
  LabeledDataset train, val, test;
};

inline LabeledDataset select(const LabeledDataset& ds, std::span<const std::size_t> idx) {
  LabeledDataset out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(ds[i]);
  return out;
}

inline Partition partition(const LabeledDataset& dataset, const SplitRatios& ratios, std::uint64_t seed) {
  const auto p = partition_indices(dataset.size(), ratios, seed);
  return {select(dataset, p.train), select(dataset, p.val), select(dataset, p.test)};
}

// ---------------------------------------------------------------------------
// Damped least squares

/// A problem exposing errors e(w) = target - model(w) and the Jacobian of
/// model(w) - target with respect to w.
template <typename P>
concept LeastSquaresProblem = requires(const P& p, const VectorXd& w) {
  { p.errors(w) } -> std::convertible_to<VectorXd>;
  { p.jacobian(w) } -> std::convertible_to<MatrixXd>;
};

/// The linearization at one point, reusable across damping values.
///
/// Solves (J'J + mu I) d = J'e. With fewer rows than columns the equivalent
/// d = J'(JJ' + mu I)^-1 e is used, which needs only a rows x rows factorization.
class DampedSystem {
 public:
  DampedSystem(MatrixXd jac, VectorXd err) : jac_(std::move(jac)), err_(std::move(err)) {
    if (jac_.rows() == 0) throw Error(ErrorKind::EmptyBatch, "empty batch");
    if (jac_.rows() != err_.size()) throw Error(ErrorKind::LengthMismatch, "jacobian/error row mismatch");
    if (!jac_.allFinite() || !err_.allFinite())
      throw Error(ErrorKind::NumericalFailure, "non-finite jacobian or errors");
    dual_ = jac_.rows() < jac_.cols();
    if (dual_) {
      gram_ = MatrixXd::Zero(jac_.rows(), jac_.rows());
      gram_.selfadjointView<Eigen::Lower>().rankUpdate(jac_);
    } else {
      gram_ = MatrixXd::Zero(jac_.cols(), jac_.cols());
      gram_.selfadjointView<Eigen::Lower>().rankUpdate(jac_.transpose());
    }
    MatrixXd full = gram_.selfadjointView<Eigen::Lower>();
    gram_ = std::move(full);
    gradient_ = jac_.transpose() * err_;
  }

  [[nodiscard]] VectorXd solve(double mu) const {
    if (!(mu > 0.0) || !std::isfinite(mu)) throw Error(ErrorKind::InvalidArgument, "damping must be positive");
    MatrixXd a = gram_;
    a.diagonal().array() += mu;
    const Eigen::LDLT<MatrixXd> ldlt(a);
    VectorXd step = dual_ ? VectorXd(jac_.transpose() * ldlt.solve(err_)) : VectorXd(ldlt.solve(gradient_));
    if (ldlt.info() != Eigen::Success || !step.allFinite())
      throw Error(ErrorKind::NumericalFailure, "damped system solve produced non-finite values");
    return step;
  }

  /// || (J'J + mu I) d - J'e || / || J'e ||.
  [[nodiscard]] double relative_residual(const VectorXd& step, double mu) const {
    const VectorXd lhs = jac_.transpose() * (jac_ * step) + mu * step;
    const double scale = gradient_.norm();
    return scale > 0.0 ? (lhs - gradient_).norm() / scale : (lhs - gradient_).norm();
  }

  [[nodiscard]] const VectorXd& gradient() const noexcept { return gradient_; }
  [[nodiscard]] const MatrixXd& jacobian() const noexcept { return jac_; }
  [[nodiscard]] const VectorXd& errors() const noexcept { return err_; }
  [[nodiscard]] bool uses_dual_form() const noexcept { return dual_; }

 private:
  MatrixXd jac_;
  VectorXd err_;
  MatrixXd gram_;
  VectorXd gradient_;
  bool dual_ = false;
};

/// One Levenberg-Marquardt candidate: w + d.
template <LeastSquaresProblem P>
VectorXd lm_step(const P& problem, const VectorXd& w, double mu) {
  const DampedSystem sys(problem.jacobian(w), problem.errors(w));
  return w + sys.solve(mu);
}

/// Adapts a network and a fixed batch to LeastSquaresProblem.
class NetworkProblem {
 public:
  NetworkProblem(Network proto, const LabeledDataset& batch) : proto_(std::move(proto)) {
    if (batch.empty()) throw Error(ErrorKind::EmptyBatch, "empty batch");
    rows_ = normalized_rows(proto_, inputs_of(batch));
    targets_ = targets_of(batch);
  }

  [[nodiscard]] VectorXd errors(const VectorXd& w) const { return targets_ - forward_rows(at(w), rows_); }
  [[nodiscard]] MatrixXd jacobian(const VectorXd& w) const { return jacobian_rows(at(w), rows_); }
  [[nodiscard]] double sse(const VectorXd& w) const { return errors(w).squaredNorm(); }
  [[nodiscard]] const MatrixXd& rows() const noexcept { return rows_; }
  [[nodiscard]] const VectorXd& targets() const noexcept { return targets_; }

  [[nodiscard]] Network at(const VectorXd& w) const {
    Network net = proto_;
    set_weights(net, w);
    return net;
  }

 private:
  Network proto_;
  MatrixXd rows_;
  VectorXd targets_;
};

/// Candidate weights for a network on a batch.
inline VectorXd lm_step(const Network& net, const LabeledDataset& batch, double mu) {
  return lm_step(NetworkProblem(net, batch), weights(net), mu);
}

// ---------------------------------------------------------------------------
// Training loop

struct TrainConfig {
  double mu0 = 1e-3;
  double mu_inc = 10.0;
  double mu_dec = 10.0;
  double mu_max = 1e10;
  double mu_min = 1e-20;  // floor for repeated decreases
  std::size_t max_epochs = 200;
  std::size_t max_val_failures = 6;
  double sse_goal = 1e-6;
  std::size_t hidden_size = kDefaultHidden;
  bool pooled_norm = true;  // one range per channel instead of per element

  void validate() const {
    if (!(mu0 > 0.0) || !(mu_inc > 1.0) || !(mu_dec > 1.0) || max_epochs < 1 || hidden_size < 1 || !(mu_max > mu0))
      throw Error(ErrorKind::InvalidArgument, "invalid training configuration");
  }
};

enum class StopReason { Converged, ValidationStop, EpochLimit, MuOverflow };

constexpr std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::Converged: return "Converged";
    case StopReason::ValidationStop: return "ValidationStop";
    case StopReason::EpochLimit: return "EpochLimit";
    case StopReason::MuOverflow: return "MuOverflow";
  }
  return "EpochLimit";
}

struct TrainReport {
  std::size_t epochs_run = 0;
  double initial_train_sse = 0.0;
  double final_train_sse = 0.0;
  double final_val_sse = 0.0;
  StopReason stop_reason = StopReason::EpochLimit;
  std::size_t best_val_epoch = 0;
  std::vector<double> train_sse_history;  // one entry per epoch
  std::vector<double> val_sse_history;
  std::vector<double> mu_history;
};

struct TrainResult {
  Network network;
  TrainReport report;
};

/// Trains one network from a seeded initialization. Normalization is fitted on `train_set`.
inline TrainResult train(const LabeledDataset& train_set, const LabeledDataset& val_set, const TrainConfig& config,
                         std::uint64_t seed) {
  config.validate();
  if (train_set.empty()) throw Error(ErrorKind::EmptyDataset, "empty training set");
  if (val_set.empty()) throw Error(ErrorKind::EmptyDataset, "empty validation set");
  const auto mode = train_set.front().input.mode;
  const auto in = train_set.front().input.size();
  for (const auto* ds : {&train_set, &val_set})
    for (const auto& it : *ds)
      if (it.input.size() != in || it.input.mode != mode)
        throw Error(ErrorKind::LengthMismatch, "inconsistent feature vectors in dataset");

  Rng rng(seed);
  Network net = init_network(in, config.hidden_size, rng, mode);
  const auto train_inputs = inputs_of(train_set);
  net.norm = config.pooled_norm ? NormParams::fit_pooled(train_inputs, mode == ChannelMode::XYZ ? 3 : 1)
                                : NormParams::fit(train_inputs);

  const NetworkProblem trn(net, train_set);
  const NetworkProblem val(net, val_set);

  VectorXd w = weights(net);
  double sse = trn.sse(w);
  double val_sse = val.sse(w);
  double mu = config.mu0;

  TrainReport rep;
  rep.initial_train_sse = sse;
  VectorXd best_w = w;
  double best_val = val_sse;
  std::size_t failures = 0;
  bool stopped = false;

  for (std::size_t epoch = 1; epoch <= config.max_epochs && !stopped; ++epoch) {
    const DampedSystem sys(trn.jacobian(w), trn.errors(w));
    bool accepted = false;
    while (true) {
      const VectorXd cand = w + sys.solve(mu);
      const double cand_sse = trn.sse(cand);
      if (std::isfinite(cand_sse) && cand_sse < sse) {
        w = cand;
        sse = cand_sse;
        mu = std::max(mu / config.mu_dec, config.mu_min);
        accepted = true;
        break;
      }
      mu *= config.mu_inc;
      if (mu > config.mu_max) break;
    }

    if (accepted) val_sse = val.sse(w);
    rep.epochs_run = epoch;
    rep.train_sse_history.push_back(sse);
    rep.val_sse_history.push_back(val_sse);
    rep.mu_history.push_back(mu);

    if (!accepted) {
      rep.stop_reason = StopReason::MuOverflow;
      stopped = true;
    } else if (sse <= config.sse_goal) {
      rep.stop_reason = StopReason::Converged;
      stopped = true;
    } else {
      if (val_sse < best_val) {
        best_val = val_sse;
        best_w = w;
        rep.best_val_epoch = epoch;
        failures = 0;
      } else if (++failures >= config.max_val_failures) {
        rep.stop_reason = StopReason::ValidationStop;
        w = best_w;
        stopped = true;
      }
    }
  }
  if (!stopped) rep.stop_reason = StopReason::EpochLimit;

  set_weights(net, w);
  rep.final_train_sse = trn.sse(w);
  rep.final_val_sse = val.sse(w);
  return {std::move(net), std::move(rep)};
}

/// Raw outputs for every item of a dataset.
inline std::vector<std::pair<double, GestureClass>> outputs_of(const Network& net, const LabeledDataset& ds) {
  std::vector<std::pair<double, GestureClass>> out;
  if (ds.empty()) return out;
  const VectorXd o = forward_rows(net, normalized_rows(net, inputs_of(ds)));
  out.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) out.emplace_back(o[static_cast<Index>(i)], ds[i].label);
  return out;
}

inline GestureEvaluation evaluate(const Network& net, const LabeledDataset& ds, double threshold) {
  const auto outs = outputs_of(net, ds);
  return evaluate_outputs(outs, threshold);
}

/// Index of the maximum; ties resolve to the lowest index.
inline std::size_t select_best(std::span<const double> scores) {
  if (scores.empty()) throw Error(ErrorKind::Empty, "no restarts to select from");
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i)
    if (scores[i] > scores[best]) best = i;
  return best;
}

struct RestartSummary {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  double train_accuracy = 0.0;
  TrainReport report;
};

struct BestOfResult {
  Network network;
  TrainReport report;
  std::vector<RestartSummary> restarts;
  std::size_t selected = 0;
  PartitionIndices split;
};

inline constexpr std::size_t kDefaultRestarts = 10;

/// One fixed partition from `master_seed`; restart r is initialized from master_seed ^ r.
/// The restart with the highest training accuracy at 0.5 wins.
inline BestOfResult train_best_of(const LabeledDataset& dataset, const SplitRatios& ratios, const TrainConfig& config,
                                  std::size_t restarts, std::uint64_t master_seed) {
  if (restarts < 1) throw Error(ErrorKind::InvalidArgument, "restarts must be >= 1");
  BestOfResult res;
  res.split = partition_indices(dataset.size(), ratios, master_seed);
  const auto trn = select(dataset, res.split.train);
  const auto val = select(dataset, res.split.val);

  std::vector<Network> nets;
  std::vector<double> scores;
  for (std::size_t r = 0; r < restarts; ++r) {
    const std::uint64_t seed = master_seed ^ static_cast<std::uint64_t>(r);
    auto [net, rep] = train(trn, val, config, seed);
    const auto acc = evaluate(net, trn, kDefaultThreshold).metrics.accuracy.value_or(0.0);
    res.restarts.push_back({r, seed, acc, std::move(rep)});
    nets.push_back(std::move(net));
    scores.push_back(acc);
  }
  res.selected = select_best(scores);
  res.network = std::move(nets[res.selected]);
  res.report = res.restarts[res.selected].report;
  return res;
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::ordered_json to_json(const TrainReport& r) {
  nlohmann::ordered_json j;
  j["epochs_run"] = r.epochs_run;
  j["initial_train_sse"] = r.initial_train_sse;
  j["final_train_sse"] = r.final_train_sse;
  j["final_val_sse"] = r.final_val_sse;
  j["stop_reason"] = std::string(to_string(r.stop_reason));
  j["best_val_epoch"] = r.best_val_epoch;
  j["train_sse_history"] = r.train_sse_history;
  j["val_sse_history"] = r.val_sse_history;
  j["mu_history"] = r.mu_history;
  return j;
}

inline TrainReport train_report_from_json(const nlohmann::ordered_json& j) {
  TrainReport r;
  r.epochs_run = j.at("epochs_run").get<std::size_t>();
  r.initial_train_sse = j.at("initial_train_sse").get<double>();
  r.final_train_sse = j.at("final_train_sse").get<double>();
  r.final_val_sse = j.at("final_val_sse").get<double>();
  const auto reason = j.at("stop_reason").get<std::string>();
  bool known = false;
  for (auto s : {StopReason::Converged, StopReason::ValidationStop, StopReason::EpochLimit, StopReason::MuOverflow})
    if (to_string(s) == reason) {
      r.stop_reason = s;
      known = true;
    }
  if (!known) throw Error(ErrorKind::Format, "unknown stop_reason '" + reason + "'");
  r.best_val_epoch = j.at("best_val_epoch").get<std::size_t>();
  r.train_sse_history = j.at("train_sse_history").get<std::vector<double>>();
  r.val_sse_history = j.at("val_sse_history").get<std::vector<double>>();
  r.mu_history = j.at("mu_history").get<std::vector<double>>();
  return r;
}

inline nlohmann::ordered_json to_json(const TrainConfig& c) {
  return {{"mu0", c.mu0},
          {"mu_inc", c.mu_inc},
          {"mu_dec", c.mu_dec},
          {"mu_max", c.mu_max},
          {"mu_min", c.mu_min},
          {"max_epochs", c.max_epochs},
          {"max_val_failures", c.max_val_failures},
          {"sse_goal", c.sse_goal},
          {"hidden_size", c.hidden_size}};
}

}  // namespace smokegest

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "srtrec/blstm.hpp"
#include "srtrec/config.hpp"
#include "srtrec/losses.hpp"
#include "srtrec/path_extract.hpp"

namespace srtrec {

struct TrainConfig {
  int epochs = 50;
  int batch_size = 8;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double clip_norm = 5.0;
  std::uint64_t seed = 1;
  double validation_split = 0.0;
  double weight_pe1 = 1.0;
  double weight_pe2 = 1.0;
  double weight_pe3 = 1.0;
  LossWeights loss{1.0, true};
  ModelHyper model;

  static const std::set<std::string>& keys() {
    static const std::set<std::string> k = {
        "epochs", "batch_size", "learning_rate", "beta1", "beta2", "adam_epsilon", "clip_norm", "seed",
        "validation_split", "weight_pe1", "weight_pe2", "weight_pe3", "constraint_weight", "aligned_ctc", "layers", "hidden", "input_scale"};
    return k;
  }

  /// Builds a config from key/value text, rejecting unknown keys and
  /// out-of-range values.
  static TrainConfig from(const Config& c) {
    c.require_known(keys());
    TrainConfig t;
    t.epochs = static_cast<int>(c.get_int("epochs", t.epochs));
    t.batch_size = static_cast<int>(c.get_int("batch_size", t.batch_size));
    t.learning_rate = c.get_double("learning_rate", t.learning_rate);
    t.beta1 = c.get_double("beta1", t.beta1);
    t.beta2 = c.get_double("beta2", t.beta2);
    t.adam_epsilon = c.get_double("adam_epsilon", t.adam_epsilon);
    t.clip_norm = c.get_double("clip_norm", t.clip_norm);
    t.seed = static_cast<std::uint64_t>(c.get_int("seed", static_cast<long long>(t.seed)));
    t.validation_split = c.get_double("validation_split", t.validation_split);
    t.weight_pe1 = c.get_double("weight_pe1", t.weight_pe1);
    t.weight_pe2 = c.get_double("weight_pe2", t.weight_pe2);
    t.weight_pe3 = c.get_double("weight_pe3", t.weight_pe3);
    t.loss.constraint = c.get_double("constraint_weight", t.loss.constraint);
    t.loss.aligned = c.get_bool("aligned_ctc", t.loss.aligned);
    t.model.layers = static_cast<int>(c.get_int("layers", t.model.layers));
    t.model.hidden = static_cast<int>(c.get_int("hidden", t.model.hidden));
    t.model.input_scale = c.get_double("input_scale", t.model.input_scale);
    t.model.seed = t.seed;
    t.validate();
    return t;
  }

  void validate() const {
    auto fail = [](const std::string& m) { throw ParseError("invalid config: " + m); };
    if (epochs < 0) fail("epochs must be >= 0");
    if (batch_size < 1) fail("batch_size must be >= 1");
    if (!(learning_rate >= 0)) fail("learning_rate must be >= 0");
    if (!(beta1 >= 0 && beta1 < 1) || !(beta2 >= 0 && beta2 < 1)) fail("beta1/beta2 must be in [0, 1)");
    if (!(clip_norm > 0)) fail("clip_norm must be > 0");
    if (!(validation_split >= 0 && validation_split < 1)) fail("validation_split must be in [0, 1)");
    if (weight_pe1 < 0 || weight_pe2 < 0 || weight_pe3 < 0) fail("rule weights must be >= 0");
    if (!(loss.constraint >= 0)) fail("constraint_weight must be >= 0");
    if (model.layers < 1 || model.hidden < 1) fail("layers and hidden must be >= 1");
  }
};

struct TrainingExample {
  std::string sample_id;
  PathRule rule = PathRule::PE1;
  FeatureSequence feats;
  std::vector<int> target;
  std::vector<bool> junctions;  // off-stroke frames between symbols, if known
  double weight = 1.0;
};

struct EpochStats {
  int epoch = 0;
  double ctc = 0.0;
  double ce = 0.0;
  double total = 0.0;
  double val_total = 0.0;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

inline double rule_weight(const TrainConfig& cfg, PathRule r) {
  switch (r) {
    case PathRule::PE1: return cfg.weight_pe1;
    case PathRule::PE2: return cfg.weight_pe2;
    case PathRule::PE3: return cfg.weight_pe3;
  }
  return 1.0;
}

/// Feature sequence and label ids for one labeled path of a normalized sample.
inline TrainingExample make_example(const InkSample& normalized, const LabeledPath& path, const TrainConfig& cfg,
                                    const LabelAlphabet& alphabet = crohme_alphabet(),
                                    OffStrokeFeature off = OffStrokeFeature::Delta) {
  TrainingExample ex;
  ex.sample_id = path.sample_id;
  ex.rule = path.rule;
  ex.feats = featurize_strokes(normalized, path.stroke_order, off);
  ex.target = build_ctc_target(path, alphabet);
  ex.junctions = junction_frames(ex.feats, path.symbol_strokes);
  ex.weight = rule_weight(cfg, path.rule);
  return ex;
}

/// Loss and parameter gradient of one example.
inline std::pair<LossBreakdown, Vector> example_gradient(const BlstmModel& model, const TrainingExample& ex,
                                                         const LabelLayout& layout, LossWeights w = {}) {
  auto fc = model.forward(ex.feats);
  auto lb = combined_loss(fc.dists, ex.feats, ex.target, layout, w, ex.junctions);
  Vector g = model.backward(fc, lb.grad);
  return {std::move(lb), std::move(g)};
}

inline LossBreakdown example_loss(const BlstmModel& model, const TrainingExample& ex, const LabelLayout& layout,
                                  LossWeights w = {}) {
  return combined_loss(model.classify(ex.feats), ex.feats, ex.target, layout, w, ex.junctions);
}

/// Adam with global-norm gradient clipping.
class Adam {
 public:
  Adam(Eigen::Index n, double lr, double beta1, double beta2, double eps, double clip)
      : m_(Vector::Zero(n)), v_(Vector::Zero(n)), lr_(lr), b1_(beta1), b2_(beta2), eps_(eps), clip_(clip) {}

  void step(Vector& theta, Vector grad) {
    const double norm = grad.norm();
    if (norm > clip_) grad *= clip_ / norm;
    ++t_;
    m_ = b1_ * m_ + (1 - b1_) * grad;
    v_ = b2_ * v_ + (1 - b2_) * grad.cwiseProduct(grad);
    const double c1 = 1 - std::pow(b1_, t_);
    const double c2 = 1 - std::pow(b2_, t_);
    theta.array() -= lr_ * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps_);
  }

 private:
  Vector m_, v_;
  double lr_, b1_, b2_, eps_, clip_;
  int t_ = 0;
};

/// Mini-batch trainer over a fixed model. Each epoch visits the examples in a
/// seeded shuffled order; gradients are summed in index order, so results are
/// reproducible bit for bit.
class Trainer {
 public:
  Trainer(BlstmModel& model, TrainConfig cfg, const LabelLayout& layout)
      : model_(model),
        cfg_(std::move(cfg)),
        layout_(layout),
        adam_(model.parameter_count(), cfg_.learning_rate, cfg_.beta1, cfg_.beta2, cfg_.adam_epsilon, cfg_.clip_norm),
        rng_(cfg_.seed ^ 0x5eedULL) {}

  EpochStats run_epoch(std::span<const TrainingExample> train, std::span<const TrainingExample> val = {}) {
    EpochStats st;
    st.epoch = ++epoch_;
    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng_);
    double weight_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg_.batch_size)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg_.batch_size));
      Vector grad = Vector::Zero(model_.parameter_count());
      for (std::size_t k = start; k < end; ++k) {
        const TrainingExample& ex = train[order[k]];
        auto fail = [&](const std::string& what) {
          std::string ids;
          for (std::size_t j = start; j < end; ++j) ids += (ids.empty() ? "" : ", ") + train[order[j]].sample_id;
          throw TrainingError(what + " in epoch " + std::to_string(epoch_) + ", batch " +
                              std::to_string(start / static_cast<std::size_t>(cfg_.batch_size)) + " (samples: " + ids +
                              ")");
        };
        std::pair<LossBreakdown, Vector> out;
        try {
          out = example_gradient(model_, ex, layout_, cfg_.loss);
        } catch (const Error& e) {
          fail(std::string("non-finite loss (") + e.what() + ")");
        }
        auto& [lb, g] = out;
        if (!std::isfinite(lb.total) || !g.allFinite()) fail("non-finite loss");
        st.ctc += ex.weight * lb.ctc;
        st.ce += ex.weight * lb.ce;
        st.total += ex.weight * lb.total;
        weight_sum += ex.weight;
        grad += ex.weight * g;
      }
      grad /= static_cast<double>(end - start);
      adam_.step(model_.parameters(), std::move(grad));
    }
    if (weight_sum > 0) {
      st.ctc /= weight_sum;
      st.ce /= weight_sum;
      st.total /= weight_sum;
    }
    st.val_total = val.empty() ? st.total : mean_loss(val);
    return st;
  }

  double mean_loss(std::span<const TrainingExample> set) const {
    double sum = 0.0, w = 0.0;
    for (const auto& ex : set) {
      sum += ex.weight * example_loss(model_, ex, layout_, cfg_.loss).total;
      w += ex.weight;
    }
    return w > 0 ? sum / w : 0.0;
  }

 private:
  BlstmModel& model_;
  TrainConfig cfg_;
  LabelLayout layout_;
  Adam adam_;
  std::mt19937_64 rng_;
  int epoch_ = 0;
};

/// Splits by sample id so every path of a sample lands on the same side.
inline std::pair<std::vector<TrainingExample>, std::vector<TrainingExample>> split_validation(
    std::vector<TrainingExample> examples, double fraction, std::uint64_t seed) {
  if (fraction <= 0) return {std::move(examples), {}};
  std::vector<std::string> ids;
  for (const auto& ex : examples)
    if (std::find(ids.begin(), ids.end(), ex.sample_id) == ids.end()) ids.push_back(ex.sample_id);
  std::mt19937_64 rng(seed);
  std::shuffle(ids.begin(), ids.end(), rng);
  const auto n_val = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(ids.size())));
  std::set<std::string> val_ids(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(std::min(n_val, ids.size())));
  std::vector<TrainingExample> train, val;
  for (auto& ex : examples) (val_ids.count(ex.sample_id) ? val : train).push_back(std::move(ex));
  return {std::move(train), std::move(val)};
}

/// Full training run. Returns the parameters with the lowest validation loss
/// (training loss when there is no validation split); epoch 0 stands for the
/// initial parameters.
inline BlstmModel train(std::vector<TrainingExample> examples, const TrainConfig& cfg, const LabelLayout& layout,
                        const std::function<void(const EpochStats&)>& on_epoch = {}) {
  cfg.validate();
  BlstmModel model(cfg.model);
  auto [train_set, val_set] = split_validation(std::move(examples), cfg.validation_split, cfg.seed);
  Trainer trainer(model, cfg, layout);
  BlstmModel best = model;
  double best_loss = std::numeric_limits<double>::infinity();
  for (int e = 0; e < cfg.epochs; ++e) {
    EpochStats st = trainer.run_epoch(train_set, val_set);
    if (on_epoch) on_epoch(st);
    const double score = val_set.empty() ? trainer.mean_loss(train_set) : st.val_total;
    if (score < best_loss) {
      best_loss = score;
      best = model;
    }
  }
  return best;
}

}  // namespace srtrec

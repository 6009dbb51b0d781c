#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "srtrec/distribution.hpp"
#include "srtrec/ink.hpp"

namespace srtrec {

struct ModelHyper {
  int layers = 3;
  int hidden = 64;  // per direction
  int input_dim = 3;
  int output_dim = 109;
  double input_scale = 10.0;  // multiplies dx, dy before the first layer
  std::uint64_t seed = 1;

  friend bool operator==(const ModelHyper&, const ModelHyper&) = default;
};

/// Stacked bidirectional LSTM with a softmax projection. All weights live in
/// one flat vector so optimizers, checkpoints and finite-difference checks
/// can treat them uniformly.
class BlstmModel {
 public:
  struct DirectionCache {
    Matrix gates;   // 4H x T, post-activation: i, f, o, g
    Matrix cell;    // H x T
    Matrix tanh_cell;
    Matrix hidden;  // H x T
  };

  struct LayerCache {
    Matrix input;   // Din x T
    DirectionCache fwd, bwd;
    Matrix output;  // 2H x T
  };

  struct ForwardCache {
    std::vector<LayerCache> layers;
    Matrix logits;  // K x T
    Distributions dists;
  };

  explicit BlstmModel(ModelHyper hp) : hp_(hp) {
    if (hp_.layers < 1 || hp_.hidden < 1 || hp_.input_dim < 1 || hp_.output_dim < 2)
      throw Error("invalid model dimensions");
    std::size_t offset = 0;
    for (int l = 0; l < hp_.layers; ++l) {
      const int din = l == 0 ? hp_.input_dim : 2 * hp_.hidden;
      for (int d = 0; d < 2; ++d) {
        Block b;
        b.din = din;
        b.w = offset;
        offset += static_cast<std::size_t>(4 * hp_.hidden * din);
        b.u = offset;
        offset += static_cast<std::size_t>(4 * hp_.hidden * hp_.hidden);
        b.b = offset;
        offset += static_cast<std::size_t>(4 * hp_.hidden);
        blocks_.push_back(b);
      }
    }
    proj_w_ = offset;
    offset += static_cast<std::size_t>(hp_.output_dim * 2 * hp_.hidden);
    proj_b_ = offset;
    offset += static_cast<std::size_t>(hp_.output_dim);
    theta_ = Vector::Zero(static_cast<Eigen::Index>(offset));
    initialize(hp_.seed);
  }

  const ModelHyper& hyper() const { return hp_; }
  const Vector& parameters() const { return theta_; }
  Vector& parameters() { return theta_; }
  Eigen::Index parameter_count() const { return theta_.size(); }

  void set_parameters(const Vector& theta) {
    if (theta.size() != theta_.size()) throw Error("parameter vector has the wrong length");
    theta_ = theta;
  }

  /// Uniform(-1/sqrt(H), 1/sqrt(H)) recurrent weights, forget bias 1,
  /// zero projection bias.
  void initialize(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const double k = 1.0 / std::sqrt(static_cast<double>(hp_.hidden));
    std::uniform_real_distribution<double> lstm(-k, k);
    const double kp = 1.0 / std::sqrt(static_cast<double>(2 * hp_.hidden));
    std::uniform_real_distribution<double> proj(-kp, kp);
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(proj_w_); ++i) theta_[i] = lstm(rng);
    for (Eigen::Index i = static_cast<Eigen::Index>(proj_w_); i < static_cast<Eigen::Index>(proj_b_); ++i)
      theta_[i] = proj(rng);
    for (Eigen::Index i = static_cast<Eigen::Index>(proj_b_); i < theta_.size(); ++i) theta_[i] = 0.0;
    const int H = hp_.hidden;
    for (const auto& b : blocks_) {
      for (int j = 0; j < 4 * H; ++j) theta_[static_cast<Eigen::Index>(b.b) + j] = 0.0;
      for (int j = H; j < 2 * H; ++j) theta_[static_cast<Eigen::Index>(b.b) + j] = 1.0;
    }
  }

  /// Input matrix (Din x T) for a feature sequence.
  Matrix inputs(const FeatureSequence& feats) const {
    if (feats.empty()) throw Error("empty feature sequence");
    if (hp_.input_dim != 3) throw Error("dimension mismatch: model expects " + std::to_string(hp_.input_dim) + " inputs");
    Matrix x(3, static_cast<Eigen::Index>(feats.size()));
    for (std::size_t t = 0; t < feats.size(); ++t) {
      const auto tt = static_cast<Eigen::Index>(t);
      x(0, tt) = feats.frames[t][0] * hp_.input_scale;
      x(1, tt) = feats.frames[t][1] * hp_.input_scale;
      x(2, tt) = feats.frames[t][2];
    }
    return x;
  }

  /// One direction of one layer. `reverse` runs right to left.
  DirectionCache run_direction(int layer, int direction, const Matrix& x, bool reverse) const {
    const Block& blk = blocks_.at(static_cast<std::size_t>(2 * layer + direction));
    const int H = hp_.hidden;
    const auto T = x.cols();
    auto W = weight(blk.w, 4 * H, blk.din);
    auto U = weight(blk.u, 4 * H, H);
    auto b = weight(blk.b, 4 * H, 1);
    if (x.rows() != blk.din) throw Error("dimension mismatch in layer " + std::to_string(layer));
    DirectionCache c;
    c.gates = W * x;
    c.gates.colwise() += b.col(0);
    c.cell.resize(H, T);
    c.tanh_cell.resize(H, T);
    c.hidden.resize(H, T);
    Vector h_prev = Vector::Zero(H), c_prev = Vector::Zero(H);
    for (Eigen::Index s = 0; s < T; ++s) {
      const Eigen::Index t = reverse ? T - 1 - s : s;
      auto a = c.gates.col(t);
      a.noalias() += U * h_prev;
      for (int j = 0; j < 3 * H; ++j) a[j] = sigmoid(a[j]);
      for (int j = 3 * H; j < 4 * H; ++j) a[j] = std::tanh(a[j]);
      c.cell.col(t) = a.segment(H, H).cwiseProduct(c_prev) + a.segment(0, H).cwiseProduct(a.segment(3 * H, H));
      c.tanh_cell.col(t) = c.cell.col(t).array().tanh().matrix();
      c.hidden.col(t) = a.segment(2 * H, H).cwiseProduct(c.tanh_cell.col(t));
      h_prev = c.hidden.col(t);
      c_prev = c.cell.col(t);
    }
    return c;
  }

  ForwardCache forward(const FeatureSequence& feats) const { return forward(inputs(feats)); }

  ForwardCache forward(const Matrix& x) const {
    ForwardCache fc;
    Matrix in = x;
    const int H = hp_.hidden;
    for (int l = 0; l < hp_.layers; ++l) {
      LayerCache lc;
      lc.input = in;
      lc.fwd = run_direction(l, 0, in, false);
      lc.bwd = run_direction(l, 1, in, true);
      lc.output.resize(2 * H, in.cols());
      lc.output.topRows(H) = lc.fwd.hidden;
      lc.output.bottomRows(H) = lc.bwd.hidden;
      in = lc.output;
      fc.layers.push_back(std::move(lc));
    }
    auto P = weight(proj_w_, hp_.output_dim, 2 * H);
    auto pb = weight(proj_b_, hp_.output_dim, 1);
    fc.logits = P * in;
    fc.logits.colwise() += pb.col(0);
    fc.dists = softmax_columns(fc.logits);
    return fc;
  }

  Distributions classify(const FeatureSequence& feats) const { return forward(feats).dists; }

  /// Gradient of a loss w.r.t. every parameter, given d loss / d logits.
  Vector backward(const ForwardCache& fc, const Matrix& dlogits) const {
    const int H = hp_.hidden;
    Vector grad = Vector::Zero(theta_.size());
    const Matrix& top = fc.layers.back().output;
    auto P = weight(proj_w_, hp_.output_dim, 2 * H);
    grad_block(grad, proj_w_, hp_.output_dim, 2 * H) = dlogits * top.transpose();
    grad_block(grad, proj_b_, hp_.output_dim, 1) = dlogits.rowwise().sum();
    Matrix dout = P.transpose() * dlogits;
    for (int l = hp_.layers - 1; l >= 0; --l) {
      const LayerCache& lc = fc.layers[static_cast<std::size_t>(l)];
      Matrix din = backward_direction(grad, l, 0, lc.input, lc.fwd, dout.topRows(H), false);
      din += backward_direction(grad, l, 1, lc.input, lc.bwd, dout.bottomRows(H), true);
      dout = std::move(din);
    }
    return grad;
  }

 private:
  struct Block {
    int din = 0;
    std::size_t w = 0, u = 0, b = 0;
  };

  static double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

  Eigen::Map<const Matrix> weight(std::size_t offset, int rows, int cols) const {
    return Eigen::Map<const Matrix>(theta_.data() + offset, rows, cols);
  }

  static Eigen::Map<Matrix> grad_block(Vector& g, std::size_t offset, int rows, int cols) {
    return Eigen::Map<Matrix>(g.data() + offset, rows, cols);
  }

  Matrix backward_direction(Vector& grad, int layer, int direction, const Matrix& x, const DirectionCache& c,
                            const Matrix& dhidden, bool reverse) const {
    const Block& blk = blocks_.at(static_cast<std::size_t>(2 * layer + direction));
    const int H = hp_.hidden;
    const auto T = x.cols();
    auto W = weight(blk.w, 4 * H, blk.din);
    auto U = weight(blk.u, 4 * H, H);
    Matrix dA(4 * H, T);
    auto dU = grad_block(grad, blk.u, 4 * H, H);
    Vector dh_next = Vector::Zero(H), dc_next = Vector::Zero(H);
    for (Eigen::Index s = T - 1; s >= 0; --s) {
      const Eigen::Index t = reverse ? T - 1 - s : s;
      const Eigen::Index tp = reverse ? t + 1 : t - 1;  // previous step in processing order
      const bool first = s == 0;
      auto g = c.gates.col(t);
      auto i = g.segment(0, H), f = g.segment(H, H), o = g.segment(2 * H, H), cand = g.segment(3 * H, H);
      Vector dh = dhidden.col(t) + dh_next;
      Vector dc = dh.cwiseProduct(o).cwiseProduct((1.0 - c.tanh_cell.col(t).array().square()).matrix()) + dc_next;
      auto da = dA.col(t);
      da.segment(0, H) = dc.cwiseProduct(cand).cwiseProduct((i.array() * (1.0 - i.array())).matrix());
      if (!first)
        da.segment(H, H) = dc.cwiseProduct(c.cell.col(tp)).cwiseProduct((f.array() * (1.0 - f.array())).matrix());
      else
        da.segment(H, H).setZero();
      da.segment(2 * H, H) = dh.cwiseProduct(c.tanh_cell.col(t)).cwiseProduct((o.array() * (1.0 - o.array())).matrix());
      da.segment(3 * H, H) = dc.cwiseProduct(i).cwiseProduct((1.0 - cand.array().square()).matrix());
      if (!first) dU.noalias() += da * c.hidden.col(tp).transpose();
      dh_next.noalias() = U.transpose() * da;
      dc_next = dc.cwiseProduct(f);
    }
    grad_block(grad, blk.w, 4 * H, blk.din).noalias() += dA * x.transpose();
    grad_block(grad, blk.b, 4 * H, 1).noalias() += dA.rowwise().sum();
    return W.transpose() * dA;
  }

  ModelHyper hp_;
  std::vector<Block> blocks_;
  std::size_t proj_w_ = 0, proj_b_ = 0;
  Vector theta_;
};

}  // namespace srtrec

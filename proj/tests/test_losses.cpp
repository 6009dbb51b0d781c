#include <gtest/gtest.h>

#include "support/support.hpp"

using namespace srtrec;

namespace {

const LabelLayout& layout() {
  static const LabelLayout l = LabelLayout::of(crohme_alphabet());
  return l;
}

Distributions uniform(std::size_t T, int K) {
  Distributions d(T);
  for (auto& f : d) f.p = Vector::Constant(K, 1.0 / K);
  return d;
}

}  // namespace

TEST(ConstraintLoss, UniformClosedForm) {
  std::mt19937_64 rng(1);
  for (int strokes = 1; strokes <= 4; ++strokes) {
    auto fs = testkit::random_features(rng, strokes, 5);
    std::size_t k = 0;
    for (const auto& kind : fs.kinds) k += kind.kind == FrameKind::StrokeFrame;
    auto r = constraint_loss(uniform(fs.size(), 109), fs, layout());
    EXPECT_NEAR(r.loss, -static_cast<double>(k) * std::log(1.0 - 7.0 / 109.0), 1e-9);
  }
}

TEST(ConstraintLoss, ZeroRelationMassIsZero) {
  std::mt19937_64 rng(2);
  auto fs = testkit::random_features(rng, 3, 4);
  Distributions d(fs.size());
  for (auto& f : d) {
    f.p = Vector::Zero(109);
    f.p[3] = 0.5;
    f.p[108] = 0.5;
  }
  auto r = constraint_loss(d, fs, layout());
  EXPECT_EQ(r.loss, 0.0);
}

TEST(ConstraintLoss, OffStrokeFramesAreIgnoredAndClampHolds) {
  std::mt19937_64 rng(3);
  auto fs = testkit::random_features(rng, 2, 3);
  Distributions d(fs.size());
  for (std::size_t t = 0; t < d.size(); ++t) {
    d[t].p = Vector::Zero(109);
    d[t].p[fs.kinds[t].kind == FrameKind::StrokeFrame ? 0 : 101] = 1.0;
  }
  EXPECT_EQ(constraint_loss(d, fs, layout()).loss, 0.0);
  for (auto& f : d) {
    f.p = Vector::Zero(109);
    f.p[107] = 1.0;
  }
  std::size_t k = fs.size() - fs.offstroke_frames().size();
  EXPECT_NEAR(constraint_loss(d, fs, layout()).loss, -static_cast<double>(k) * std::log(kConstraintEpsilon), 1e-9);
}

TEST(ConstraintLoss, LogitGradient) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    auto fs = testkit::random_features(rng, 2, 3);
    const auto T = static_cast<Eigen::Index>(fs.size());
    Matrix logits = Matrix::Random(109, T) * 2;
    auto f = [&](const Vector& x) {
      return constraint_loss(softmax_columns(Eigen::Map<const Matrix>(x.data(), 109, T)), fs, layout()).loss;
    };
    auto r = constraint_loss(softmax_columns(logits), fs, layout());
    Vector x = Eigen::Map<Vector>(logits.data(), logits.size());
    Vector analytic = Eigen::Map<Vector>(r.grad.data(), r.grad.size());
    EXPECT_LT(testkit::max_relative_error(analytic, testkit::numeric_gradient(f, x)), 1e-6);
  }
}

TEST(CombinedLoss, IsTheSum) {
  std::mt19937_64 rng(5);
  auto fs = testkit::random_features(rng, 2, 3);
  auto d = testkit::random_distributions(rng, fs.size(), 109);
  std::vector<int> target{0, 101, 1};
  auto c = combined_loss(d, fs, target, layout());
  EXPECT_DOUBLE_EQ(c.total, ctc_loss(d, target, layout()).loss + constraint_loss(d, fs, layout()).loss);
  EXPECT_DOUBLE_EQ(c.ctc + c.ce, c.total);
}

TEST(AlignedCtc, MatchesMaskedBruteForce) {
  // strokes: symbol A = strokes 0,1; symbol B = stroke 2
  InkSample s;
  s.strokes.push_back({0, {{0, 0}, {0.1, 0.1}}});
  s.strokes.push_back({1, {{0.2, 0}}});
  s.strokes.push_back({2, {{0.5, 0}, {0.6, 0.1}}});
  auto fs = featurize(s);  // frames: s s | s | s s
  ASSERT_EQ(fs.size(), 7u);
  std::mt19937_64 rng(6);
  auto d = testkit::random_distributions(rng, fs.size(), 109, 2.0);
  const std::vector<int> target{4, layout().relation_begin + 4, 9};
  const std::vector<bool> junction{false, false, false, false, true, false, false};
  EXPECT_EQ(junction_frames(fs, {2, 1}), junction);

  auto within = [&](std::size_t t, int k) {
    const bool rel = k >= 101 && k <= 107;
    return rel ? junction[t] : fs.kinds[t].kind == FrameKind::StrokeFrame;
  };
  const double p = testkit::brute_force_ctc_probability(d, target, 108, within);
  EXPECT_NEAR(aligned_ctc_loss(d, fs, target, layout(), junction).loss, -std::log(p), 1e-9);

  auto any_off = [&](std::size_t t, int k) {
    const bool rel = k >= 101 && k <= 107;
    return rel == (fs.kinds[t].kind == FrameKind::OffStrokeFrame);
  };
  const double q = testkit::brute_force_ctc_probability(d, target, 108, any_off);
  EXPECT_NEAR(aligned_ctc_loss(d, fs, target, layout()).loss, -std::log(q), 1e-9);
  EXPECT_GT(q, p);
}

TEST(AlignedCtc, JunctionsNeedConsistentCounts) {
  std::mt19937_64 rng(7);
  auto fs = testkit::random_features(rng, 3, 2);
  EXPECT_TRUE(junction_frames(fs, {}).empty());
  EXPECT_THROW(junction_frames(fs, {3, 1}), Error);
  auto d = testkit::random_distributions(rng, fs.size(), 109);
  EXPECT_THROW(aligned_ctc_loss(d, fs, std::vector<int>{1}, layout(), std::vector<bool>(2)), Error);
}

TEST(CombinedLoss, WeightsAndAlignment) {
  std::mt19937_64 rng(8);
  auto fs = testkit::random_features(rng, 2, 3);
  auto d = testkit::random_distributions(rng, fs.size(), 109);
  std::vector<int> target{0, 101, 1};
  LossWeights w;
  w.constraint = 3.0;
  w.aligned = true;
  auto c = combined_loss(d, fs, target, layout(), w);
  EXPECT_DOUBLE_EQ(c.ctc, aligned_ctc_loss(d, fs, target, layout()).loss);
  EXPECT_DOUBLE_EQ(c.total, c.ctc + 3.0 * c.ce);
  EXPECT_GT(c.ctc, combined_loss(d, fs, target, layout()).ctc);
}

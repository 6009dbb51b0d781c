#include <gtest/gtest.h>

#include "support/support.hpp"

using namespace srtrec;

namespace {

const LabelLayout& layout() {
  static const LabelLayout l = LabelLayout::of(crohme_alphabet());
  return l;
}

ModelHyper small(int layers, int hidden, std::uint64_t seed) {
  ModelHyper h;
  h.layers = layers;
  h.hidden = hidden;
  h.seed = seed;
  return h;
}

enum class Which { Ctc, Constraint, Combined };

double loss_of(const BlstmModel& m, const FeatureSequence& fs, const std::vector<int>& target, Which w) {
  auto d = m.classify(fs);
  switch (w) {
    case Which::Ctc: return ctc_loss(d, target, layout()).loss;
    case Which::Constraint: return constraint_loss(d, fs, layout()).loss;
    case Which::Combined: return combined_loss(d, fs, target, layout()).total;
  }
  return 0;
}

double gradient_error(int layers, int hidden, std::uint64_t seed, Which w) {
  std::mt19937_64 rng(seed);
  BlstmModel m(small(layers, hidden, seed));
  auto fs = testkit::random_features(rng, 3, 4);
  std::vector<int> target{2, 101 + static_cast<int>(seed % 6), 7, 107, 9};
  auto fc = m.forward(fs);
  Matrix dlogits;
  switch (w) {
    case Which::Ctc: dlogits = ctc_loss(fc.dists, target, layout()).grad; break;
    case Which::Constraint: dlogits = constraint_loss(fc.dists, fs, layout()).grad; break;
    case Which::Combined: dlogits = combined_loss(fc.dists, fs, target, layout()).grad; break;
  }
  Vector analytic = m.backward(fc, dlogits);
  BlstmModel probe = m;
  auto f = [&](const Vector& theta) {
    probe.set_parameters(theta);
    return loss_of(probe, fs, target, w);
  };
  return testkit::max_relative_error(analytic, testkit::numeric_gradient(f, m.parameters()));
}

}  // namespace

TEST(Blstm, OutputsAreDistributions) {
  std::mt19937_64 rng(1);
  BlstmModel m(small(2, 6, 1));
  auto fs = testkit::random_features(rng, 4, 6);
  auto d = m.classify(fs);
  ASSERT_EQ(d.size(), fs.size());
  for (const auto& f : d) {
    EXPECT_EQ(f.size(), 109);
    EXPECT_NEAR(f.p.sum(), 1.0, 1e-12);
    EXPECT_GE(f.p.minCoeff(), 0.0);
  }
}

TEST(Blstm, SameSeedSameWeights) {
  EXPECT_EQ(BlstmModel(small(1, 4, 9)).parameters(), BlstmModel(small(1, 4, 9)).parameters());
  EXPECT_NE(BlstmModel(small(1, 4, 9)).parameters(), BlstmModel(small(1, 4, 10)).parameters());
}

TEST(Blstm, OutputDependsOnBothDirections) {
  // Changing the last frame must change the first output (backward pass)
  // and changing the first frame must change the last output (forward pass).
  BlstmModel m(small(1, 4, 2));
  Matrix x = Matrix::Random(3, 6);
  auto base = m.forward(x).logits;
  Matrix y = x;
  y(0, 5) += 1.0;
  EXPECT_GT((m.forward(y).logits.col(0) - base.col(0)).norm(), 1e-9);
  Matrix z = x;
  z(0, 0) += 1.0;
  EXPECT_GT((m.forward(z).logits.col(5) - base.col(5)).norm(), 1e-9);
}

TEST(Blstm, GradientCtcOneLayer) {
  for (std::uint64_t s = 1; s <= 5; ++s) EXPECT_LT(gradient_error(1, 8, s, Which::Ctc), 1e-4) << s;
}

TEST(Blstm, GradientConstraintOneLayer) {
  for (std::uint64_t s = 1; s <= 5; ++s) EXPECT_LT(gradient_error(1, 8, s, Which::Constraint), 1e-4) << s;
}

TEST(Blstm, GradientCombinedTwoLayers) {
  for (std::uint64_t s = 1; s <= 3; ++s) EXPECT_LT(gradient_error(2, 4, s, Which::Combined), 1e-4) << s;
}

TEST(Blstm, RejectsBadShapes) {
  EXPECT_THROW(BlstmModel(small(0, 4, 1)), Error);
  BlstmModel m(small(1, 4, 1));
  EXPECT_THROW(m.set_parameters(Vector::Zero(3)), Error);
}

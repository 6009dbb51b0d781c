#include <gtest/gtest.h>

#include "support/support.hpp"

using namespace srtrec;

namespace {

const LabelAlphabet& A() { return crohme_alphabet(); }

InkSample strokes(int n) {
  InkSample s;
  for (int i = 0; i < n; ++i) s.strokes.push_back({i, {{double(i), 0}, {double(i) + 0.5, 1}}});
  return s;
}

/// Every frame starts as a near-certain blank.
Distributions blanks(std::size_t T) {
  Distributions d(T);
  for (auto& f : d) {
    f.p = Vector::Constant(A().size(), 1e-4);
    f.p[A().blank_id()] = 1.0 - 1e-4 * (A().size() - 1);
  }
  return d;
}

void put(FrameDistribution& f, std::initializer_list<std::pair<int, double>> mass) {
  double used = 0;
  for (auto [k, p] : mass) used += p;
  f.p = Vector::Constant(A().size(), (1.0 - used) / (A().size() - static_cast<int>(mass.size())));
  for (auto [k, p] : mass) f.p[k] = p;
}

int rel(Relation r) { return A().relation_id(r); }

}  // namespace

TEST(DecodeRelations, RelationOrBlank) {
  auto fs = featurize(strokes(3));
  auto d = blanks(fs.size());
  put(d[fs.offstroke_frame(1)], {{rel(Relation::Right), 0.6}, {A().blank_id(), 0.2}});
  put(d[fs.offstroke_frame(2)], {{rel(Relation::Sup), 0.05}, {A().blank_id(), 0.9}});
  auto cuts = decode_relations(d, fs);
  ASSERT_EQ(cuts.size(), 2u);
  EXPECT_EQ(cuts[0], Relation::Right);
  EXPECT_FALSE(cuts[1]);
}

TEST(DecodeRelations, TieGoesToTheRelation) {
  auto fs = featurize(strokes(2));
  auto d = blanks(fs.size());
  put(d[fs.offstroke_frame(1)], {{rel(Relation::Below), 0.4}, {A().blank_id(), 0.4}});
  EXPECT_EQ(decode_relations(d, fs)[0], Relation::Below);
}

TEST(DecodeRelations, NoRelCompetesLikeARelation) {
  auto fs = featurize(strokes(2));
  auto d = blanks(fs.size());
  put(d[fs.offstroke_frame(1)], {{A().norel_id(), 0.5}, {rel(Relation::Right), 0.3}, {A().blank_id(), 0.2}});
  EXPECT_EQ(decode_relations(d, fs)[0], Relation::NoRel);
}

TEST(DecodeSymbols, BestNonBlankClassPerSegment) {
  // strokes 0,1 form one symbol (gap 1 blank), stroke 2 another
  auto fs = featurize(strokes(3));
  auto d = blanks(fs.size());
  put(d[fs.offstroke_frame(2)], {{rel(Relation::Right), 0.9}});
  const int x = A().symbol_id("x"), y = A().symbol_id("y");
  put(d[fs.stroke_frames[1].first], {{x, 0.3}, {A().blank_id(), 0.6}});
  put(d[fs.stroke_frames[0].first], {{y, 0.2}, {A().blank_id(), 0.7}});
  put(d[fs.stroke_frames[2].first + 1], {{y, 0.01}, {A().blank_id(), 0.98}});
  auto oned = decode_1d(d, fs, strokes(3));
  ASSERT_EQ(oned.symbols.size(), 2u);
  EXPECT_EQ(oned.symbols[0].label, "x");
  EXPECT_EQ(oned.symbols[0].stroke_ids, (std::vector<int>{0, 1}));
  EXPECT_EQ(oned.symbols[1].label, "y");
  EXPECT_EQ(oned.tokens(), (std::vector<std::string>{"x", "Right", "y"}));
}

TEST(DecodeSymbols, GeometricMeanPrefersSteadyClass) {
  auto fs = featurize(strokes(1));
  auto d = blanks(fs.size());
  const int a = A().symbol_id("a"), b = A().symbol_id("b");
  put(d[0], {{a, 0.5}, {b, 0.2}});
  put(d[1], {{a, 1e-6}, {b, 0.2}});
  std::vector<std::optional<Relation>> none;
  EXPECT_EQ(decode_symbols(d, fs, none, A(), SegmentAggregation::Max)[0], a);
  EXPECT_EQ(decode_symbols(d, fs, none, A(), SegmentAggregation::GeometricMean)[0], b);
}

TEST(DecodeSymbols, SegmentsFollowCuts) {
  std::vector<std::optional<Relation>> cuts{std::nullopt, Relation::Right, std::nullopt};
  auto segs = segments_from_cuts(4, cuts);
  ASSERT_EQ(segs.size(), 2u);
  EXPECT_EQ(segs[0], (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(segs[1], (std::vector<std::size_t>{2, 3}));
}

TEST(Decode, RejectsMismatchedInput) {
  auto fs = featurize(strokes(2));
  EXPECT_THROW(decode_relations(blanks(fs.size() - 1), fs), Error);
  FeatureSequence empty;
  EXPECT_THROW(decode_1d({}, empty, InkSample{}), Error);
}

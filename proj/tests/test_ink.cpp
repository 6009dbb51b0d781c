#include <gtest/gtest.h>

#include "support/support.hpp"

using namespace srtrec;

namespace {

InkSample two_strokes() {
  InkSample s;
  s.strokes.push_back({0, {{10, 10}, {10, 30}}});
  s.strokes.push_back({1, {{20, 10}, {40, 10}, {40, 30}}});
  return s;
}

}  // namespace

TEST(Normalize, UnitHeightAtOrigin) {
  auto n = normalize(two_strokes());
  BBox b = n.bbox();
  EXPECT_NEAR(b.min_x, 0.0, 1e-12);
  EXPECT_NEAR(b.min_y, 0.0, 1e-12);
  EXPECT_NEAR(b.height(), 1.0, 1e-12);
  EXPECT_NEAR(b.width(), 1.5, 1e-12);
}

TEST(Normalize, SpacingIsUniform) {
  auto n = normalize(two_strokes(), {0.05});
  for (const auto& s : n.strokes)
    for (std::size_t i = 1; i < s.points.size(); ++i) {
      double d = distance(s.points[i - 1], s.points[i]);
      EXPECT_GE(d, 0.025);
      EXPECT_LE(d, 0.075);
    }
  // stroke 0 has length 1 -> 20 steps, 21 points
  EXPECT_EQ(n.strokes[0].points.size(), 21u);
}

TEST(Normalize, IsIdempotent) {
  for (const auto& tex : {"x^{2}+1", "\\frac{a}{b}", "\\int d^{2}x"}) {
    auto once = normalize(synth::render(tex, 9));
    auto twice = normalize(once);
    ASSERT_EQ(once.strokes.size(), twice.strokes.size());
    for (std::size_t k = 0; k < once.strokes.size(); ++k) {
      ASSERT_EQ(once.strokes[k].points.size(), twice.strokes[k].points.size()) << tex;
      for (std::size_t i = 0; i < once.strokes[k].points.size(); ++i) {
        EXPECT_NEAR(once.strokes[k].points[i].x, twice.strokes[k].points[i].x, 1e-9);
        EXPECT_NEAR(once.strokes[k].points[i].y, twice.strokes[k].points[i].y, 1e-9);
      }
    }
  }
}

TEST(Normalize, DegenerateInk) {
  InkSample dot;
  dot.strokes.push_back({0, {{5, 5}}});
  auto n = normalize(dot);
  EXPECT_EQ(n.strokes[0].points.size(), 1u);
  EXPECT_DOUBLE_EQ(n.strokes[0].points[0].x, 0.0);

  InkSample flat;
  flat.strokes.push_back({0, {{0, 3}, {4, 3}}});
  auto f = normalize(flat);
  EXPECT_NEAR(f.bbox().width(), 1.0, 1e-12);

  EXPECT_THROW(normalize(InkSample{}), Error);
  InkSample bad;
  bad.strokes.push_back({0, {{std::nan(""), 0}}});
  EXPECT_THROW(normalize(bad), Error);
}

TEST(Normalize, GroundTruthBoxesFollowTheInk) {
  auto n = normalize(synth::render("x+y", 1));
  for (const auto& node : n.ground_truth->nodes()) {
    BBox b = n.bbox_of(node.stroke_ids);
    EXPECT_DOUBLE_EQ(node.bbox.min_x, b.min_x);
    EXPECT_DOUBLE_EQ(node.bbox.max_y, b.max_y);
  }
}

TEST(Featurize, FrameLayout) {
  auto fs = featurize(two_strokes());
  // 2 + 1 + 3 frames
  ASSERT_EQ(fs.size(), 6u);
  EXPECT_EQ(fs.stroke_count(), 2u);
  EXPECT_EQ(fs.offstroke_frame(1), 2u);
  EXPECT_EQ(fs.offstroke_frames(), (std::vector<std::size_t>{2}));
  EXPECT_EQ(fs.frames[0], (Frame{0, 0, 1}));
  EXPECT_EQ(fs.frames[1], (Frame{0, 20, 1}));
  EXPECT_EQ(fs.frames[2], (Frame{10, -20, 0}));
  EXPECT_EQ(fs.frames[3], (Frame{0, 0, 1}));
  EXPECT_EQ(fs.frames[5], (Frame{0, 20, 1}));
  EXPECT_EQ(fs.kinds[2], (FrameKind{FrameKind::OffStrokeFrame, 1}));
  EXPECT_EQ(fs.kinds[4], (FrameKind{FrameKind::StrokeFrame, 1}));
}

TEST(Featurize, MidpointVariantAndCustomOrder) {
  auto fs = featurize_strokes(two_strokes(), {1, 0}, OffStrokeFeature::Midpoint);
  ASSERT_EQ(fs.size(), 6u);
  EXPECT_EQ(fs.frames[3], (Frame{25, 20, 0}));
  EXPECT_EQ(fs.stroke_order, (std::vector<int>{1, 0}));
  EXPECT_EQ(fs.kinds[0].index, 1);
  EXPECT_THROW(featurize_strokes(two_strokes(), {3}), Error);
}

TEST(InkML, ParsesTracesAndTruth) {
  const std::string doc = R"(<ink xmlns="http://www.w3.org/2003/InkML">
  <annotation type="truth">$x^2$</annotation>
  <trace id="0">0 0, 10 10</trace>
  <trace id="1">10 0, 0 10</trace>
  <trace id="2">12 -5, 15 -8, 12 -12</trace>
  <traceGroup>
    <annotation type="truth">Segmentation</annotation>
    <traceGroup><annotation type="truth">x</annotation><traceView traceDataRef="0"/><traceView traceDataRef="1"/></traceGroup>
    <traceGroup><annotation type="truth">2</annotation><traceView traceDataRef="2"/></traceGroup>
  </traceGroup>
</ink>)";
  const std::string lg = "O, x_1, x, 1.0, 0, 1\nO, 2_1, 2, 1.0, 2\nR, x_1, 2_1, Sup, 1.0\n";
  auto s = parse_inkml(doc, "a", lg);
  ASSERT_EQ(s.strokes.size(), 3u);
  EXPECT_EQ(s.strokes[2].points.size(), 3u);
  ASSERT_TRUE(s.ground_truth);
  EXPECT_EQ(to_latex(*s.ground_truth), "x^{2}");
  EXPECT_FALSE(s.ground_truth->node(0).bbox.empty());
}

TEST(InkML, SingleSymbolWithoutLg) {
  const std::string doc = R"(<ink><trace id="t1">1 1, 2 2</trace>
  <traceGroup><traceGroup><annotation type="truth">,</annotation><traceView traceDataRef="t1"/></traceGroup></traceGroup></ink>)";
  auto s = parse_inkml(doc);
  ASSERT_TRUE(s.ground_truth);
  EXPECT_EQ(s.ground_truth->node(0).label, "COMMA");
}

TEST(InkML, Errors) {
  EXPECT_THROW(parse_inkml("<ink><trace>"), ParseError);
  EXPECT_THROW(parse_inkml("<notink/>"), ParseError);
  EXPECT_THROW(parse_inkml("<ink><trace>1 x</trace></ink>"), ParseError);
  const std::string unknown = R"(<ink><trace id="0">1 1, 2 2</trace>
  <traceGroup><annotation type="truth">\heart</annotation><traceView traceDataRef="0"/></traceGroup></ink>)";
  try {
    parse_inkml(unknown);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("\\heart"), std::string::npos);
  }
}

TEST(InkML, WriteParseRoundTrip) {
  auto s = synth::render("\\frac{a}{b}+x^{2}", 4, "w");
  auto text = write_inkml(s);
  auto lg = to_lg(*s.ground_truth).str();
  auto back = parse_inkml(text, "w", lg);
  ASSERT_EQ(back.strokes.size(), s.strokes.size());
  for (std::size_t k = 0; k < s.strokes.size(); ++k) {
    ASSERT_EQ(back.strokes[k].points.size(), s.strokes[k].points.size());
    EXPECT_NEAR(back.strokes[k].points.back().x, s.strokes[k].points.back().x, 1e-6);
  }
  EXPECT_EQ(*back.ground_truth, *s.ground_truth);
}

TEST(StrokeJson, RoundTripAndErrors) {
  auto s = two_strokes();
  auto j = to_stroke_json(s);
  EXPECT_EQ(j["v"], 1);
  auto back = parse_stroke_json(j);
  ASSERT_EQ(back.strokes.size(), 2u);
  EXPECT_EQ(back.strokes[1].points[2].y, 30);
  EXPECT_THROW(parse_stroke_json(nlohmann::json::parse(R"({"strokes": [[[1]]]})")), ParseError);
  EXPECT_THROW(parse_stroke_json(nlohmann::json::parse(R"({"strokes": [[]]})")), ParseError);
  EXPECT_THROW(parse_stroke_json(nlohmann::json::parse(R"([1, 2])")), ParseError);
  EXPECT_TRUE(parse_stroke_json(nlohmann::json::parse(R"({"strokes": []})")).strokes.empty());
}

TEST(Synth, GroundTruthMatchesInput) {
  for (const auto& tex : testkit::oracle_layouts()) {
    auto s = synth::render(tex, 1);
    ASSERT_TRUE(s.ground_truth);
    EXPECT_NO_THROW(s.validate());
    EXPECT_EQ(s.ground_truth->size(), parse_latex(tex).size()) << tex;
    EXPECT_FALSE(has_interleaved_symbols(*s.ground_truth));
  }
}

TEST(Synth, SameSeedSameInk) {
  auto a = synth::render("x^{2}", 5);
  auto b = synth::render("x^{2}", 5);
  auto c = synth::render("x^{2}", 6);
  EXPECT_EQ(a.strokes[0].points.front().x, b.strokes[0].points.front().x);
  EXPECT_NE(a.strokes[0].points.front().x, c.strokes[0].points.front().x);
}

#include <gtest/gtest.h>

#include "support/support.hpp"

using namespace srtrec;

namespace {

OneDSymbol sym(const std::string& label, int stroke, BBox box) { return {label, {stroke}, box}; }

BBox box(double x0, double y0, double x1, double y1) {
  BBox b;
  b.add(Point{x0, y0});
  b.add(Point{x1, y1});
  return b;
}

/// Puts all mass on blank: no junction is ever a valid connection.
struct AllBlank {
  Distributions classify(const FeatureSequence& fs) const {
    Distributions d(fs.size());
    for (auto& f : d) {
      f.p = Vector::Zero(crohme_alphabet().size());
      f.p[crohme_alphabet().blank_id()] = 1.0;
    }
    return d;
  }
};

}  // namespace

TEST(Cut, SplitsAtNoRelOnly) {
  OneDSrt o;
  o.symbols = {sym("x", 0, box(0, 0, 1, 1)), sym("2", 1, box(1, -1, 1.5, 0)), sym("+", 2, box(2, 0, 3, 1)),
               sym("1", 3, box(3.5, 0, 4, 1))};
  o.relations = {Relation::Sup, Relation::NoRel, Relation::Right};
  auto subs = cut_at_norel(o);
  ASSERT_EQ(subs.size(), 2u);
  EXPECT_EQ(to_latex(subs[0].tree), "x^{2}");
  EXPECT_EQ(to_latex(subs[1].tree), "+1");
  EXPECT_DOUBLE_EQ(subs[0].bbox.min_y, -1);
  o.relations.pop_back();
  EXPECT_THROW(cut_at_norel(o), Error);
}

TEST(Sort, RightThenBelowThenLeftEdge) {
  EXPECT_TRUE(sorts_before(box(0, 0, 1, 1), box(2, 0, 3, 1)));
  EXPECT_FALSE(sorts_before(box(2, 0, 3, 1), box(0, 0, 1, 1)));
  EXPECT_TRUE(sorts_before(box(0, 0, 2, 1), box(1, 2, 3, 3)));
  EXPECT_TRUE(sorts_before(box(0, 0, 2, 2), box(1, 1, 3, 3)));
  EXPECT_FALSE(sorts_before(box(1, 1, 3, 3), box(0, 0, 2, 2)));
}

TEST(Sort, OrdersFragmentsAndIsStable) {
  auto frag = [](const std::string& l, BBox b) {
    return SubSrt{Srt({{0, l, {0}, b}}, {}, 0), b, false};
  };
  SubSrtList list = {frag("c", box(4, 0, 5, 1)), frag("a", box(0, 0, 1, 1)), frag("den", box(0, 2, 3, 3)),
                     frag("b", box(2, 0, 3, 1))};
  auto sorted = sort_subtrees(list);
  std::vector<std::string> labels;
  for (const auto& s : sorted) labels.push_back(s.tree.node(0).label);
  EXPECT_EQ(labels, (std::vector<std::string>{"a", "b", "den", "c"}));
  SubSrtList same = {frag("p", box(0, 0, 1, 1)), frag("q", box(0, 0, 1, 1))};
  auto kept = sort_subtrees(same);
  EXPECT_EQ(kept[0].tree.node(0).label, "p");
}

TEST(Candidates, SkipNodesWithARightChild) {
  Srt t({{0, "a", {0}, {}}, {1, "b", {1}, {}}, {2, "2", {2}, {}}},
        {{0, 1, Relation::Right}, {1, 2, Relation::Sup}}, 0);
  auto c = candidate_nodes({t, {}, false});
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].label, "b");
  EXPECT_EQ(c[1].label, "2");
}

TEST(Connect, OracleRebuildsFraction) {
  auto s = normalize(synth::render("\\frac{a}{b}", 2));
  OracleClassifier oracle(*s.ground_truth);
  auto r = recognize(oracle, s);
  EXPECT_EQ(r.tree, *s.ground_truth);
  EXPECT_TRUE(r.dropped.empty());
  bool accepted = false;
  for (const auto& d : r.trace) accepted |= d.accepted && d.relation == Relation::Below;
  EXPECT_TRUE(accepted);
}

TEST(Connect, UnconnectableFragmentsAreDropped) {
  auto s = normalize(synth::render("x+y", 2));
  OneDSrt o;
  for (const auto& n : s.ground_truth->nodes()) o.symbols.push_back({n.label, n.stroke_ids, n.bbox});
  o.relations.assign(o.symbols.size() - 1, Relation::NoRel);
  auto res = connect(AllBlank{}, sort_subtrees(cut_at_norel(o)), s);
  EXPECT_EQ(res.tree.size(), 1u);
  EXPECT_EQ(res.tree.node(res.tree.root()).label, "x");
  EXPECT_EQ(res.dropped.size(), 2u);
  EXPECT_GT(res.classifier_calls, 0);
  for (const auto& d : res.trace) EXPECT_FALSE(d.accepted);
}

TEST(Connect, EmptyListIsAnError) { EXPECT_THROW(connect(AllBlank{}, {}, InkSample{}), Error); }

TEST(Oracle, EveryLayoutRoundTrips) {
  const auto& layouts = testkit::oracle_layouts();
  ASSERT_GE(layouts.size(), 50u);
  for (std::size_t i = 0; i < layouts.size(); ++i) {
    auto s = synth::render(layouts[i], 100 + i);
    OracleClassifier oracle(*s.ground_truth);
    auto r = recognize(oracle, s);
    EXPECT_EQ(r.tree, *s.ground_truth) << layouts[i] << " -> " << to_latex(r.tree);
    EXPECT_TRUE(r.dropped.empty()) << layouts[i];
  }
}

TEST(Oracle, TrueLabelsOnFrames) {
  auto s = normalize(synth::render("x^{2}", 1));
  OracleClassifier oracle(*s.ground_truth);
  auto fs = featurize(s);
  const auto& a = crohme_alphabet();
  EXPECT_EQ(oracle.true_label(fs, 0), a.symbol_id("x"));
  // x has two strokes: the gap between them is blank, the next gap is Sup
  EXPECT_EQ(oracle.true_label(fs, fs.offstroke_frame(1)), a.blank_id());
  EXPECT_EQ(oracle.true_label(fs, fs.offstroke_frame(2)), a.relation_id(Relation::Sup));
}

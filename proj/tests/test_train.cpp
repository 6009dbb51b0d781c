#include <gtest/gtest.h>

#include "support/support.hpp"

using namespace srtrec;

namespace {

TrainConfig tiny() {
  TrainConfig c;
  c.model.layers = 1;
  c.model.hidden = 8;
  c.learning_rate = 1e-2;
  c.batch_size = 4;
  return c;
}

std::vector<TrainingExample> tiny_set(const TrainConfig& cfg) {
  std::vector<TrainingExample> out;
  int i = 0;
  for (const char* tex : {"x^{2}", "a+b", "\\frac{1}{n}"}) {
    auto s = normalize(synth::render(tex, 3, "t" + std::to_string(i++)));
    for (const auto& p : extract_paths(s, {})) out.push_back(make_example(s, p, cfg));
  }
  return out;
}

const LabelLayout& layout() {
  static const LabelLayout l = LabelLayout::of(crohme_alphabet());
  return l;
}

}  // namespace

TEST(Train, LossGoesDown) {
  auto cfg = tiny();
  auto set = tiny_set(cfg);
  BlstmModel m(cfg.model);
  Trainer tr(m, cfg, layout());
  const double before = tr.mean_loss(set);
  EpochStats last;
  for (int e = 0; e < 40; ++e) last = tr.run_epoch(set);
  EXPECT_LT(tr.mean_loss(set), 0.5 * before);
  EXPECT_EQ(last.epoch, 40);
  EXPECT_GT(last.total, 0.0);
}

TEST(Train, SameSeedSameParameters) {
  auto cfg = tiny();
  auto set = tiny_set(cfg);
  BlstmModel a(cfg.model), b(cfg.model);
  Trainer ta(a, cfg, layout()), tb(b, cfg, layout());
  for (int e = 0; e < 3; ++e) {
    ta.run_epoch(set);
    tb.run_epoch(set);
  }
  EXPECT_EQ(a.parameters(), b.parameters());
}

TEST(Train, NonFiniteLossNamesTheBatch) {
  auto cfg = tiny();
  auto set = tiny_set(cfg);
  BlstmModel m(cfg.model);
  Vector bad = m.parameters();
  bad.setConstant(std::numeric_limits<double>::quiet_NaN());
  m.set_parameters(bad);
  Trainer tr(m, cfg, layout());
  try {
    tr.run_epoch(set);
    FAIL();
  } catch (const TrainingError& e) {
    EXPECT_NE(std::string(e.what()).find("epoch 1"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("samples: t"), std::string::npos);
  }
}

TEST(Train, ValidationSplitKeepsSamplesTogether) {
  auto cfg = tiny();
  auto [train, val] = split_validation(tiny_set(cfg), 0.34, 5);
  ASSERT_FALSE(val.empty());
  ASSERT_FALSE(train.empty());
  for (const auto& v : val)
    for (const auto& t : train) EXPECT_NE(v.sample_id, t.sample_id);
  auto [all, none] = split_validation(tiny_set(cfg), 0.0, 5);
  EXPECT_TRUE(none.empty());
}

TEST(Train, ValidationLossIsReported) {
  auto cfg = tiny();
  auto [train, val] = split_validation(tiny_set(cfg), 0.34, 5);
  BlstmModel m(cfg.model);
  Trainer tr(m, cfg, layout());
  auto st = tr.run_epoch(train, val);
  EXPECT_DOUBLE_EQ(st.val_total, tr.mean_loss(val));
}

TEST(Train, ExamplesCarrySymbolJunctions) {
  auto cfg = tiny();
  auto s = normalize(synth::render("x+1", 3, "j"));
  ExtractOptions o;
  o.pe1 = o.pe3 = false;
  auto ex = make_example(s, extract_paths(s, o).front(), cfg);
  // x and + have two strokes each: five strokes, four gaps, two between symbols
  ASSERT_EQ(ex.feats.stroke_count(), 5u);
  std::vector<std::size_t> marked;
  for (std::size_t t = 0; t < ex.junctions.size(); ++t)
    if (ex.junctions[t]) marked.push_back(t);
  EXPECT_EQ(marked, (std::vector<std::size_t>{ex.feats.offstroke_frame(2), ex.feats.offstroke_frame(4)}));
  EXPECT_TRUE(cfg.loss.aligned);
}

TEST(TrainConfig, ReadsKeysAndRejectsBadValues) {
  auto c = TrainConfig::from(Config::parse("epochs = 3\nhidden = 5\nconstraint_weight = 0.5\naligned_ctc = false\n"));
  EXPECT_EQ(c.epochs, 3);
  EXPECT_EQ(c.model.hidden, 5);
  EXPECT_DOUBLE_EQ(c.loss.constraint, 0.5);
  EXPECT_FALSE(c.loss.aligned);
  EXPECT_THROW(TrainConfig::from(Config::parse("aligned_ctc = maybe\n")), ParseError);
  EXPECT_THROW(TrainConfig::from(Config::parse("epochs = -1\n")), ParseError);
  EXPECT_THROW(TrainConfig::from(Config::parse("learning_rat = 1\n")), ParseError);
  EXPECT_THROW(TrainConfig::from(Config::parse("validation_split = 1\n")), ParseError);
}

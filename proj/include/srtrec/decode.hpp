#pragma once

#include <cmath>
#include <concepts>
#include <limits>
#include <optional>
#include <vector>

#include "srtrec/distribution.hpp"
#include "srtrec/ink.hpp"

namespace srtrec {

/// Anything that maps a feature sequence to one distribution per frame.
template <class C>
concept FrameClassifier = requires(const C& c, const FeatureSequence& f) {
  { c.classify(f) } -> std::convertible_to<Distributions>;
};

/// Relation decision at every off-stroke: the best relation (NoRel
/// included) when its probability is at least P(blank), blank otherwise.
/// Entry i-1 belongs to gap i; nullopt means blank.
inline std::vector<std::optional<Relation>> decode_relations(const Distributions& dists, const FeatureSequence& feats,
                                                             const LabelAlphabet& alphabet = crohme_alphabet()) {
  if (dists.size() != feats.size()) throw Error("distribution count does not match frame count");
  std::vector<std::optional<Relation>> out;
  for (std::size_t gap = 1; gap < feats.stroke_count(); ++gap) {
    const auto& d = dists[feats.offstroke_frame(gap)];
    auto [rel, p] = best_relation(d, alphabet);
    if (p >= d[alphabet.blank_id()])
      out.emplace_back(rel);
    else
      out.emplace_back(std::nullopt);
  }
  return out;
}

enum class SegmentAggregation { Max, GeometricMean };

/// Strokes (sequence positions) grouped into symbols by the relation cuts.
inline std::vector<std::vector<std::size_t>> segments_from_cuts(std::size_t stroke_count,
                                                                const std::vector<std::optional<Relation>>& cuts) {
  std::vector<std::vector<std::size_t>> segs;
  if (stroke_count == 0) return segs;
  segs.push_back({0});
  for (std::size_t k = 1; k < stroke_count; ++k) {
    if (cuts.at(k - 1)) segs.push_back({});
    segs.back().push_back(k);
  }
  return segs;
}

/// Symbol class per segment: per-class aggregate over the segment's frames
/// (its strokes and interior off-strokes), then argmax over symbol classes.
inline std::vector<int> decode_symbols(const Distributions& dists, const FeatureSequence& feats,
                                       const std::vector<std::optional<Relation>>& cuts,
                                       const LabelAlphabet& alphabet = crohme_alphabet(),
                                       SegmentAggregation agg = SegmentAggregation::Max) {
  std::vector<int> out;
  for (const auto& seg : segments_from_cuts(feats.stroke_count(), cuts)) {
    const std::size_t begin = feats.stroke_frames[seg.front()].first;
    const std::size_t end = feats.stroke_frames[seg.back()].second;
    int best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < alphabet.symbol_count(); ++c) {
      double score = agg == SegmentAggregation::Max ? -std::numeric_limits<double>::infinity() : 0.0;
      for (std::size_t t = begin; t < end; ++t) {
        if (agg == SegmentAggregation::Max)
          score = std::max(score, dists[t][c]);
        else
          score += std::log(std::max(dists[t][c], 1e-300));
      }
      if (score > best_score) {
        best_score = score;
        best = c;
      }
    }
    out.push_back(best);
  }
  return out;
}

struct OneDSymbol {
  std::string label;
  std::vector<int> stroke_ids;
  BBox bbox;
};

/// Classifier output in input order: symbols[i] and symbols[i+1] are linked
/// by relations[i] (NoRel allowed).
struct OneDSrt {
  std::vector<OneDSymbol> symbols;
  std::vector<Relation> relations;

  std::vector<std::string> tokens() const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < symbols.size(); ++i) {
      if (i) out.emplace_back(relation_name(relations[i - 1]));
      out.push_back(symbols[i].label);
    }
    return out;
  }
};

/// Relation and symbol decoding combined into a 1D SRT. `ink` supplies the
/// stroke geometry for symbol boxes.
inline OneDSrt decode_1d(const Distributions& dists, const FeatureSequence& feats, const InkSample& ink,
                         const LabelAlphabet& alphabet = crohme_alphabet(),
                         SegmentAggregation agg = SegmentAggregation::Max) {
  if (feats.stroke_count() == 0) throw Error("cannot recognize zero strokes");
  auto cuts = decode_relations(dists, feats, alphabet);
  auto labels = decode_symbols(dists, feats, cuts, alphabet, agg);
  auto segs = segments_from_cuts(feats.stroke_count(), cuts);
  OneDSrt out;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    OneDSymbol sym;
    sym.label = alphabet.symbol(labels[i]);
    for (std::size_t k : segs[i]) sym.stroke_ids.push_back(feats.stroke_order[k]);
    sym.bbox = ink.bbox_of(sym.stroke_ids);
    std::sort(sym.stroke_ids.begin(), sym.stroke_ids.end());
    out.symbols.push_back(std::move(sym));
  }
  for (const auto& c : cuts)
    if (c) out.relations.push_back(*c);
  return out;
}

template <FrameClassifier C>
OneDSrt recognize_1d(const C& classifier, const FeatureSequence& feats, const InkSample& ink,
                     const LabelAlphabet& alphabet = crohme_alphabet(),
                     SegmentAggregation agg = SegmentAggregation::Max) {
  if (feats.stroke_count() == 0) throw Error("cannot recognize zero strokes");
  return decode_1d(classifier.classify(feats), feats, ink, alphabet, agg);
}

}  // namespace srtrec

#pragma once

#include <algorithm>
#include <cmath>
#include <span>

#include "srtrec/ctc.hpp"
#include "srtrec/ink.hpp"

namespace srtrec {

inline constexpr double kConstraintEpsilon = 1e-7;

struct LossValue {
  double loss = 0.0;
  Matrix grad;  // d loss / d logits, K x T
};

/// Penalizes relation mass (6 relations + NoRel) on stroke frames:
/// -sum over stroke frames of log(1 - P_rel), with 1 - P_rel clamped to
/// kConstraintEpsilon. Off-stroke frames contribute nothing.
inline LossValue constraint_loss(const Distributions& dists, const FeatureSequence& feats, const LabelLayout& layout) {
  if (dists.size() != feats.size()) throw Error("distribution count does not match frame count");
  LossValue r;
  const int K = layout.size;
  r.grad = Matrix::Zero(K, static_cast<Eigen::Index>(dists.size()));
  for (std::size_t t = 0; t < dists.size(); ++t) {
    if (feats.kinds[t].kind != FrameKind::StrokeFrame) continue;
    const auto& p = dists[t].p;
    double keep = 0.0;  // probability outside the relation partition
    for (int k = 0; k < K; ++k)
      if (!layout.is_relation(k)) keep += p[k];
    if (keep < kConstraintEpsilon) {
      r.loss -= std::log(kConstraintEpsilon);
      continue;
    }
    r.loss -= std::log(keep);
    const auto tt = static_cast<Eigen::Index>(t);
    for (int k = 0; k < K; ++k) r.grad(k, tt) = layout.is_relation(k) ? p[k] : p[k] * (1.0 - 1.0 / keep);
  }
  return r;
}

inline LossValue ctc_loss(const Distributions& dists, std::span<const int> target, const LabelLayout& layout) {
  auto r = ctc::loss(dists, target, layout.blank);
  return {r.loss, std::move(r.grad)};
}

/// CTC restricted to alignments that put symbols on stroke frames and
/// relations (NoRel included) on off-stroke frames. When `relation_frames`
/// is non-empty, relations are further limited to the frames it marks.
inline LossValue aligned_ctc_loss(const Distributions& dists, const FeatureSequence& feats,
                                  std::span<const int> target, const LabelLayout& layout,
                                  const std::vector<bool>& relation_frames = {}) {
  if (dists.size() != feats.size()) throw Error("distribution count does not match frame count");
  if (!relation_frames.empty() && relation_frames.size() != feats.size())
    throw Error("relation frame mask does not match frame count");
  auto r = ctc::loss(dists, target, layout.blank, [&](std::size_t t, int k) {
    const bool off = feats.kinds[t].kind == FrameKind::OffStrokeFrame;
    if (!layout.is_relation(k)) return !off;
    return relation_frames.empty() ? off : relation_frames[t];
  });
  return {r.loss, std::move(r.grad)};
}

/// Off-stroke frames between two symbols, given the stroke count of each
/// symbol in sequence order. Empty when the counts are unknown.
inline std::vector<bool> junction_frames(const FeatureSequence& feats, const std::vector<int>& symbol_strokes) {
  if (symbol_strokes.empty()) return {};
  std::vector<bool> out(feats.size(), false);
  std::size_t seen = 0;
  for (std::size_t i = 0; i + 1 < symbol_strokes.size(); ++i) {
    seen += static_cast<std::size_t>(symbol_strokes[i]);
    if (seen >= feats.stroke_count()) throw Error("symbol stroke counts exceed the sequence");
    out[feats.offstroke_frame(seen)] = true;
  }
  return out;
}

struct LossBreakdown {
  double ctc = 0.0;
  double ce = 0.0;
  double total = 0.0;
  Matrix grad;
};

/// The defaults give the plain sum CTC + constraint.
struct LossWeights {
  double constraint = 1.0;
  bool aligned = false;  // aligned_ctc_loss in place of ctc_loss
};

/// CTC plus the weighted stroke-frame relation constraint; `ce` is
/// reported unweighted.
inline LossBreakdown combined_loss(const Distributions& dists, const FeatureSequence& feats,
                                   std::span<const int> target, const LabelLayout& layout, LossWeights w = {},
                                   const std::vector<bool>& relation_frames = {}) {
  auto c = w.aligned ? aligned_ctc_loss(dists, feats, target, layout, relation_frames)
                     : ctc_loss(dists, target, layout);
  auto e = constraint_loss(dists, feats, layout);
  LossBreakdown b;
  b.ctc = c.loss;
  b.ce = e.loss;
  b.total = b.ctc + w.constraint * b.ce;
  b.grad = c.grad + w.constraint * e.grad;
  return b;
}

}  // namespace srtrec

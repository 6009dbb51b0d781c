#pragma once

#include <map>
#include <set>

#include "srtrec/decode.hpp"
#include "srtrec/srt.hpp"

namespace srtrec {

/// Frame classifier that reads the answer off a ground-truth SRT: 1 - eps
/// on the true label of every frame, eps spread over the rest. Stroke
/// frames get their symbol; an off-stroke between two strokes of one
/// symbol gets blank, between a parent and its child the edge relation,
/// and NoRel anywhere else.
class OracleClassifier {
 public:
  explicit OracleClassifier(const Srt& truth, double eps = 1e-3, const LabelAlphabet& alphabet = crohme_alphabet())
      : truth_(truth), eps_(eps), alphabet_(alphabet) {
    for (const auto& n : truth.nodes())
      for (int s : n.stroke_ids) owner_[s] = n.id;
    for (const auto& e : truth.edges()) edges_[{e.parent, e.child}] = e.relation;
  }

  int true_label(const FeatureSequence& fs, std::size_t t) const {
    const FrameKind& k = fs.kinds.at(t);
    if (k.kind == FrameKind::StrokeFrame) return alphabet_.symbol_id(truth_.node(owner(k.index)).label);
    const auto gap = static_cast<std::size_t>(k.index);
    const NodeId a = owner(fs.stroke_order.at(gap - 1));
    const NodeId b = owner(fs.stroke_order.at(gap));
    if (a == b) return alphabet_.blank_id();
    auto it = edges_.find({a, b});
    return it == edges_.end() ? alphabet_.norel_id() : alphabet_.relation_id(it->second);
  }

  Distributions classify(const FeatureSequence& fs) const {
    const int k = alphabet_.size();
    Distributions out(fs.size());
    for (std::size_t t = 0; t < fs.size(); ++t) {
      out[t].p = Vector::Constant(k, eps_ / (k - 1));
      out[t].p[true_label(fs, t)] = 1.0 - eps_;
    }
    return out;
  }

 private:
  NodeId owner(int stroke) const {
    auto it = owner_.find(stroke);
    if (it == owner_.end()) throw Error("oracle has no owner for stroke " + std::to_string(stroke));
    return it->second;
  }

  Srt truth_;
  double eps_;
  const LabelAlphabet& alphabet_;
  std::map<int, NodeId> owner_;
  std::map<std::pair<NodeId, NodeId>, Relation> edges_;
};

}  // namespace srtrec

#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "srtrec/decode.hpp"
#include "srtrec/ink.hpp"
#include "srtrec/srt.hpp"

namespace srtrec {

/// A connected fragment of the 1D SRT.
struct SubSrt {
  Srt tree;
  BBox bbox;
  bool stuck = false;
};

using SubSrtList = std::vector<SubSrt>;

/// Splits the 1D SRT at every NoRel. Each run becomes a chain rooted at its
/// first symbol; node ids are positions in `oned.symbols`.
inline SubSrtList cut_at_norel(const OneDSrt& oned) {
  if (oned.symbols.empty()) return {};
  if (oned.relations.size() + 1 != oned.symbols.size()) throw Error("1D SRT needs one relation between symbols");
  SubSrtList out;
  std::vector<SrtNode> nodes;
  std::vector<SrtEdge> edges;
  auto flush = [&] {
    NodeId root = nodes.front().id;
    BBox b;
    for (const auto& n : nodes) b.add(n.bbox);
    out.push_back({Srt(std::move(nodes), std::move(edges), root), b, false});
    nodes.clear();
    edges.clear();
  };
  for (std::size_t i = 0; i < oned.symbols.size(); ++i) {
    if (i > 0) {
      Relation r = oned.relations[i - 1];
      if (r == Relation::NoRel)
        flush();
      else
        edges.push_back({static_cast<NodeId>(i - 1), static_cast<NodeId>(i), r});
    }
    const auto& s = oned.symbols[i];
    nodes.push_back({static_cast<NodeId>(i), s.label, s.stroke_ids, s.bbox});
  }
  flush();
  return out;
}

/// A before B: B lies completely right of A; otherwise B lies completely
/// below A; otherwise A starts further left.
inline bool sorts_before(const BBox& a, const BBox& b) {
  if (a.max_x < b.min_x) return true;
  if (b.max_x < a.min_x) return false;
  if (a.max_y < b.min_y) return true;
  if (b.max_y < a.min_y) return false;
  return a.min_x < b.min_x;
}

/// Stable insertion sort under sorts_before. The relation is not a strict
/// weak order, so std::stable_sort is not an option.
inline SubSrtList sort_subtrees(SubSrtList list) {
  for (std::size_t i = 1; i < list.size(); ++i) {
    std::size_t j = i;
    while (j > 0 && sorts_before(list[i].bbox, list[j - 1].bbox) && !sorts_before(list[j - 1].bbox, list[i].bbox)) --j;
    if (j != i) {
      SubSrt item = std::move(list[i]);
      list.erase(list.begin() + static_cast<std::ptrdiff_t>(i));
      list.insert(list.begin() + static_cast<std::ptrdiff_t>(j), std::move(item));
    }
  }
  return list;
}

/// Nodes without an outgoing Right edge, by first stroke.
inline std::vector<SrtNode> candidate_nodes(const SubSrt& sub) {
  std::vector<SrtNode> out;
  for (const auto& n : sub.tree.nodes())
    if (!sub.tree.child(n.id, Relation::Right)) out.push_back(n);
  std::sort(out.begin(), out.end(), [](const SrtNode& a, const SrtNode& b) { return a.min_stroke() < b.min_stroke(); });
  return out;
}

/// Strokes of a fragment, node by node in preorder.
inline std::vector<int> tree_order_strokes(const Srt& tree) {
  std::vector<int> out;
  for (NodeId id : tree.preorder()) {
    const auto& s = tree.node(id).stroke_ids;
    out.insert(out.end(), s.begin(), s.end());
  }
  return out;
}

struct ConnectionScore {
  NodeId candidate_node = 0;
  std::size_t target = 0;  // index into the working sub-SRT list
  Relation relation = Relation::NoRel;
  double probability = 0.0;
  FrameDistribution junction;  // full distribution at the junction off-stroke
};

/// Classifies the relation between `source` and the fragment `target` from
/// a synthetic sequence: source strokes, one junction off-stroke, target
/// strokes in tree order. Reports the argmax of the relation partition.
template <FrameClassifier C>
ConnectionScore score_connection(const C& classifier, const SrtNode& source, const SubSrt& target,
                                 const InkSample& ink, const LabelAlphabet& alphabet = crohme_alphabet(),
                                 OffStrokeFeature off = OffStrokeFeature::Delta) {
  std::vector<int> order = source.stroke_ids;
  auto tail = tree_order_strokes(target.tree);
  if (order.empty() || tail.empty()) throw Error("connection scoring needs strokes on both sides");
  order.insert(order.end(), tail.begin(), tail.end());
  FeatureSequence fs = featurize_strokes(ink, order, off);
  Distributions d = classifier.classify(fs);
  ConnectionScore s;
  s.candidate_node = source.id;
  s.junction = d.at(fs.offstroke_frame(source.stroke_ids.size()));
  std::tie(s.relation, s.probability) = best_relation(s.junction, alphabet);
  return s;
}

/// One scoring decision, for debugging and UI inspection.
struct ConnectionDecision {
  std::size_t source = 0;
  std::size_t target = 0;
  std::string mode;  // "local" or "global"
  NodeId node = 0;
  std::string node_label;
  Relation relation = Relation::NoRel;
  double probability = 0.0;
  bool accepted = false;
};

struct ConnectResult {
  Srt tree;
  std::vector<Srt> dropped;
  std::vector<ConnectionDecision> trace;
  int classifier_calls = 0;
};

namespace detail {

struct Proposal {
  NodeId node = 0;
  std::size_t target = 0;
  Relation relation = Relation::NoRel;
  double probability = -1.0;
  bool valid = false;
};

/// Best tree relation whose (node, relation) slot is free, judged valid when
/// it is at least as likely as both blank and NoRel at the junction.
inline Proposal propose(const SubSrt& source, const SrtNode& node, const ConnectionScore& score,
                        const LabelAlphabet& alphabet) {
  Proposal p;
  p.node = node.id;
  for (Relation r : kTreeRelations) {
    if (source.tree.child(node.id, r)) continue;
    const double pr = score.junction[alphabet.relation_id(r)];
    if (pr > p.probability) {
      p.probability = pr;
      p.relation = r;
    }
  }
  if (p.probability < 0) return p;
  p.valid = p.probability >= score.junction[alphabet.blank_id()] &&
            p.probability >= score.junction[alphabet.norel_id()];
  return p;
}

inline SubSrt attach(const SubSrt& host, NodeId node, Relation rel, const SubSrt& guest) {
  std::vector<SrtNode> nodes = host.tree.nodes();
  std::vector<SrtEdge> edges = host.tree.edges();
  nodes.insert(nodes.end(), guest.tree.nodes().begin(), guest.tree.nodes().end());
  edges.insert(edges.end(), guest.tree.edges().begin(), guest.tree.edges().end());
  edges.push_back({node, guest.tree.root(), rel});
  BBox b = host.bbox;
  b.add(guest.bbox);
  return {Srt(std::move(nodes), std::move(edges), host.tree.root()), b, false};
}

}  // namespace detail

/// Local/global reconnection of sorted fragments. Every pass scans the list;
/// fragment i first tries its successor, then every other fragment except
/// the successor. The first accepted connection restarts the scan. Stops
/// when one fragment is left or a full pass connects nothing; leftover
/// fragments after the first are reported as dropped.
template <FrameClassifier C>
ConnectResult connect(const C& classifier, SubSrtList list, const InkSample& ink,
                      const LabelAlphabet& alphabet = crohme_alphabet(),
                      OffStrokeFeature off = OffStrokeFeature::Delta) {
  if (list.empty()) throw Error("nothing to connect");
  ConnectResult res;

  auto best_into = [&](std::size_t i, const std::vector<std::size_t>& targets, const char* mode) {
    detail::Proposal best;
    for (std::size_t k : targets) {
      for (const auto& node : candidate_nodes(list[i])) {
        auto score = score_connection(classifier, node, list[k], ink, alphabet, off);
        ++res.classifier_calls;
        auto p = detail::propose(list[i], node, score, alphabet);
        p.target = k;
        res.trace.push_back({i, k, mode, node.id, node.label, p.relation, p.probability, false});
        if ((p.valid && !best.valid) || (p.valid == best.valid && p.probability > best.probability)) best = p;
      }
    }
    return best;
  };

  while (list.size() > 1) {
    for (auto& s : list) s.stuck = false;
    bool connected = false;
    for (std::size_t i = 0; i < list.size() && !connected; ++i) {
      std::optional<detail::Proposal> chosen;
      if (i + 1 < list.size()) {
        auto p = best_into(i, {i + 1}, "local");
        if (p.valid) chosen = p;
      }
      if (!chosen) {
        std::vector<std::size_t> others;
        for (std::size_t k = 0; k < list.size(); ++k)
          if (k != i && k != i + 1) others.push_back(k);
        if (!others.empty()) {
          auto p = best_into(i, others, "global");
          if (p.valid) chosen = p;
        }
      }
      if (!chosen) {
        list[i].stuck = true;
        continue;
      }
      for (auto it = res.trace.rbegin(); it != res.trace.rend(); ++it)
        if (it->source == i && it->target == chosen->target && it->node == chosen->node) {
          it->accepted = true;
          break;
        }
      list[i] = detail::attach(list[i], chosen->node, chosen->relation, list[chosen->target]);
      list.erase(list.begin() + static_cast<std::ptrdiff_t>(chosen->target));
      connected = true;
    }
    if (!connected) break;
  }
  res.tree = list.front().tree;
  for (std::size_t i = 1; i < list.size(); ++i) res.dropped.push_back(list[i].tree);
  return res;
}

struct RecognizerOptions {
  NormalizeOptions normalize;
  OffStrokeFeature off_stroke = OffStrokeFeature::Delta;
  SegmentAggregation aggregation = SegmentAggregation::Max;
};

struct Recognition {
  Srt tree;
  OneDSrt oned;
  std::vector<Srt> dropped;
  std::vector<ConnectionDecision> trace;
  std::map<std::string, double> timing_ms;
};

/// normalize, featurize, classify, decode 1D, cut, sort, connect.
template <FrameClassifier C>
Recognition recognize(const C& classifier, const InkSample& sample, const RecognizerOptions& opts = {},
                      const LabelAlphabet& alphabet = crohme_alphabet()) {
  using clock = std::chrono::steady_clock;
  auto ms = [](clock::time_point a, clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
  };
  if (sample.strokes.empty()) throw Error("cannot recognize zero strokes");
  Recognition r;
  auto t0 = clock::now();
  InkSample ink = normalize(sample, opts.normalize);
  FeatureSequence feats = featurize(ink, opts.off_stroke);
  auto t1 = clock::now();
  r.oned = recognize_1d(classifier, feats, ink, alphabet, opts.aggregation);
  auto t2 = clock::now();
  SubSrtList subs = sort_subtrees(cut_at_norel(r.oned));
  auto t3 = clock::now();
  ConnectResult cr = connect(classifier, std::move(subs), ink, alphabet, opts.off_stroke);
  auto t4 = clock::now();
  r.tree = std::move(cr.tree);
  r.dropped = std::move(cr.dropped);
  r.trace = std::move(cr.trace);
  r.timing_ms = {{"preprocess", ms(t0, t1)}, {"classify", ms(t1, t2)}, {"cut_sort", ms(t2, t3)}, {"connect", ms(t3, t4)}};
  return r;
}

}  // namespace srtrec

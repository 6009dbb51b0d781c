#pragma once

#include <algorithm>
#include <array>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "srtrec/srt.hpp"

namespace srtrec {

struct MatchCounts {
  std::size_t matched = 0;
  std::size_t truth = 0;
  std::size_t predicted = 0;

  double recall() const { return truth ? static_cast<double>(matched) / static_cast<double>(truth) : 1.0; }
  double precision() const { return predicted ? static_cast<double>(matched) / static_cast<double>(predicted) : 1.0; }

  MatchCounts& operator+=(const MatchCounts& o) {
    matched += o.matched;
    truth += o.truth;
    predicted += o.predicted;
    return *this;
  }
};

struct SymbolScores {
  MatchCounts segments;
  MatchCounts seg_class;
};

namespace detail {

inline std::map<StrokeSet, const SrtNode*> by_strokes(const Srt& t) {
  std::map<StrokeSet, const SrtNode*> m;
  for (const auto& n : t.nodes()) m[n.stroke_ids] = &n;
  return m;
}

using EdgeKey = std::pair<StrokeSet, StrokeSet>;

inline std::map<EdgeKey, Relation> edges_by_strokes(const Srt& t) {
  std::map<EdgeKey, Relation> m;
  for (const auto& e : t.edges()) m[{t.node(e.parent).stroke_ids, t.node(e.child).stroke_ids}] = e.relation;
  return m;
}

}  // namespace detail

/// Segments match on identical stroke sets; Segment+Class also needs the label.
inline SymbolScores score_symbols(const Srt& pred, const Srt& truth) {
  SymbolScores s;
  s.segments.truth = s.seg_class.truth = truth.size();
  s.segments.predicted = s.seg_class.predicted = pred.size();
  auto p = detail::by_strokes(pred);
  for (const auto& n : truth.nodes()) {
    auto it = p.find(n.stroke_ids);
    if (it == p.end()) continue;
    ++s.segments.matched;
    if (it->second->label == n.label) ++s.seg_class.matched;
  }
  return s;
}

/// A predicted edge counts when both endpoints are segmented and classified
/// correctly and the directed relation label agrees.
inline MatchCounts score_relations(const Srt& pred, const Srt& truth) {
  MatchCounts m;
  m.truth = truth.edges().size();
  m.predicted = pred.edges().size();
  auto p = detail::by_strokes(pred);
  auto pe = detail::edges_by_strokes(pred);
  auto good = [&](const SrtNode& n) {
    auto it = p.find(n.stroke_ids);
    return it != p.end() && it->second->label == n.label;
  };
  for (const auto& e : truth.edges()) {
    const auto& a = truth.node(e.parent);
    const auto& b = truth.node(e.child);
    if (!good(a) || !good(b)) continue;
    auto it = pe.find({a.stroke_ids, b.stroke_ids});
    if (it != pe.end() && it->second == e.relation) ++m.matched;
  }
  return m;
}

/// Label-graph symmetric difference at symbol level: node label errors on
/// matched segments, unmatched segments on either side, edge label errors,
/// and missing or spurious edges. Node and edge errors weigh the same.
inline std::size_t count_errors(const Srt& pred, const Srt& truth) {
  std::size_t errors = 0;
  auto p = detail::by_strokes(pred);
  auto t = detail::by_strokes(truth);
  for (const auto& [strokes, node] : t) {
    auto it = p.find(strokes);
    if (it == p.end() || it->second->label != node->label) ++errors;
  }
  for (const auto& [strokes, node] : p)
    if (!t.count(strokes)) ++errors;
  auto pe = detail::edges_by_strokes(pred);
  auto te = detail::edges_by_strokes(truth);
  for (const auto& [key, rel] : te) {
    auto it = pe.find(key);
    if (it == pe.end() || it->second != rel) ++errors;
  }
  for (const auto& [key, rel] : pe)
    if (!te.count(key)) ++errors;
  return errors;
}

struct ExpRate {
  std::size_t expressions = 0;
  std::array<std::size_t, 4> within{};  // 0, <=1, <=2, <=3 errors

  double rate(std::size_t k) const {
    return expressions ? static_cast<double>(within.at(k)) / static_cast<double>(expressions) : 0.0;
  }
};

using TreePair = std::pair<Srt, Srt>;  // (prediction, truth)

inline ExpRate exprate(const std::vector<TreePair>& pairs) {
  ExpRate r;
  for (const auto& [pred, truth] : pairs) {
    const std::size_t e = count_errors(pred, truth);
    ++r.expressions;
    for (std::size_t k = 0; k < 4; ++k)
      if (e <= k) ++r.within[k];
  }
  return r;
}

/// Counts keyed (output label, ground-truth label).
using ConfusionTable = std::map<std::pair<std::string, std::string>, std::size_t>;

inline const std::vector<std::string>& edge_confusion_labels() {
  static const std::vector<std::string> labels = {"*", "Above", "Below", "Inside", "Right", "Sub", "Sup", "NoRel"};
  return labels;
}

namespace detail {

/// Stroke-level label of the ordered stroke pair (a, b): '*' inside one
/// symbol, the relation when a's symbol is the parent of b's, NoRel otherwise.
inline std::map<std::pair<int, int>, std::string> stroke_pair_labels(const Srt& t, const std::vector<int>& strokes) {
  std::map<int, const SrtNode*> owner;
  for (const auto& n : t.nodes())
    for (int s : n.stroke_ids) owner[s] = &n;
  std::map<std::pair<int, int>, std::string> out;
  for (int a : strokes)
    for (int b : strokes) {
      if (a == b) continue;
      auto ia = owner.find(a), ib = owner.find(b);
      std::string label = "NoRel";
      if (ia != owner.end() && ib != owner.end()) {
        if (ia->second == ib->second)
          label = "*";
        else {
          for (const auto& e : t.edges())
            if (e.parent == ia->second->id && e.child == ib->second->id) label = std::string(relation_name(e.relation));
        }
      }
      out[{a, b}] = label;
    }
  return out;
}

}  // namespace detail

struct Confusions {
  ConfusionTable nodes;
  ConfusionTable edges;
};

/// Node table over stroke-set-matched symbols; edge table over ordered
/// stroke pairs of the ground truth.
inline Confusions confusion_tables(const std::vector<TreePair>& pairs) {
  Confusions c;
  for (const auto& [pred, truth] : pairs) {
    auto p = detail::by_strokes(pred);
    for (const auto& n : truth.nodes()) {
      auto it = p.find(n.stroke_ids);
      if (it != p.end()) ++c.nodes[{it->second->label, n.label}];
    }
    auto strokes = truth.strokes();
    auto tl = detail::stroke_pair_labels(truth, strokes);
    auto pl = detail::stroke_pair_labels(pred, strokes);
    for (const auto& [key, tlabel] : tl) ++c.edges[{pl.at(key), tlabel}];
  }
  return c;
}

struct EvalReport {
  MatchCounts segments;
  MatchCounts seg_class;
  MatchCounts tree_relations;
  ExpRate expressions;
  Confusions confusions;
  std::size_t excluded = 0;  // samples without ground truth
  std::size_t dropped_fragments = 0;

  static EvalReport build(const std::vector<TreePair>& pairs, std::size_t excluded = 0) {
    EvalReport r;
    for (const auto& [pred, truth] : pairs) {
      auto s = score_symbols(pred, truth);
      r.segments += s.segments;
      r.seg_class += s.seg_class;
      r.tree_relations += score_relations(pred, truth);
    }
    r.expressions = exprate(pairs);
    r.confusions = confusion_tables(pairs);
    r.excluded = excluded;
    return r;
  }

  nlohmann::json to_json() const {
    auto rp = [](const MatchCounts& m) {
      return nlohmann::json{{"recall", m.recall()}, {"precision", m.precision()}, {"matched", m.matched},
                            {"truth", m.truth}, {"predicted", m.predicted}};
    };
    auto table = [](const ConfusionTable& t) {
      nlohmann::json out = nlohmann::json::array();
      for (const auto& [key, n] : t) out.push_back({{"output", key.first}, {"truth", key.second}, {"count", n}});
      return out;
    };
    return {{"v", 1},
            {"note", "ExpRate error counts weigh node and edge label errors equally"},
            {"expressions", expressions.expressions},
            {"excluded", excluded},
            {"dropped_fragments", dropped_fragments},
            {"symbol_level", {{"segments", rp(segments)}, {"segment_class", rp(seg_class)}, {"tree_relations", rp(tree_relations)}}},
            {"expression_level",
             {{"correct", expressions.rate(0)},
              {"le1_error", expressions.rate(1)},
              {"le2_errors", expressions.rate(2)},
              {"le3_errors", expressions.rate(3)}}},
            {"node_confusions", table(confusions.nodes)},
            {"edge_confusions", table(confusions.edges)}};
  }

  /// Aligned tables: symbol level (recall/precision for Segments,
  /// Segment + Class, Tree relations) and expression level (Correct, <=1,
  /// <=2, <=3 errors), percentages.
  std::string text(const std::string& system = "srtrec") const {
    std::ostringstream os;
    os << std::fixed << std::setprecision(2);
    os << "Symbol level (%)\n";
    os << std::left << std::setw(14) << "System" << std::right << std::setw(10) << "Segments" << std::setw(10) << ""
       << std::setw(18) << "Segment + Class" << std::setw(4) << "" << std::setw(16) << "Tree relations" << "\n";
    os << std::left << std::setw(14) << "" << std::right;
    for (int i = 0; i < 3; ++i) os << std::setw(10) << "Recall" << std::setw(11) << "Precision";
    os << "\n" << std::left << std::setw(14) << system << std::right;
    for (const auto* m : {&segments, &seg_class, &tree_relations})
      os << std::setw(10) << 100 * m->recall() << std::setw(11) << 100 * m->precision();
    os << "\n\nExpression level (%)\n";
    os << std::left << std::setw(14) << "System" << std::right << std::setw(12) << "Correct" << std::setw(12)
       << "<= 1 error" << std::setw(13) << "<= 2 errors" << std::setw(13) << "<= 3 errors" << "\n";
    os << std::left << std::setw(14) << system << std::right << std::setw(12) << 100 * expressions.rate(0)
       << std::setw(12) << 100 * expressions.rate(1) << std::setw(13) << 100 * expressions.rate(2) << std::setw(13)
       << 100 * expressions.rate(3) << "\n";
    os << "\n" << expressions.expressions << " expressions scored, " << excluded << " excluded without ground truth\n";
    os << "ExpRate error counts weigh node and edge label errors equally\n";
    return os.str();
  }

  /// output,truth,count
  static std::string csv(const ConfusionTable& t) {
    std::ostringstream os;
    os << "output,truth,count\n";
    auto quote = [](const std::string& s) {
      if (s.find_first_of(",\"") == std::string::npos) return s;
      std::string q = "\"";
      for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
      return q + "\"";
    };
    for (const auto& [key, n] : t) os << quote(key.first) << ',' << quote(key.second) << ',' << n << '\n';
    return os.str();
  }

  /// Edge confusion matrix in the fixed label order, rows = output, columns = truth.
  std::string edge_matrix_csv() const {
    const auto& labels = edge_confusion_labels();
    std::ostringstream os;
    os << "output\\truth";
    for (const auto& l : labels) os << ',' << l;
    os << '\n';
    for (const auto& row : labels) {
      os << row;
      for (const auto& col : labels) {
        auto it = confusions.edges.find({row, col});
        os << ',' << (it == confusions.edges.end() ? 0 : it->second);
      }
      os << '\n';
    }
    return os.str();
  }
};

}  // namespace srtrec

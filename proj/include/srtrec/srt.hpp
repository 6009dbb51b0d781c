#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "srtrec/alphabet.hpp"
#include "srtrec/error.hpp"
#include "srtrec/geometry.hpp"

namespace srtrec {

using NodeId = int;
using StrokeSet = std::vector<int>;  // strictly increasing stroke indices

/// One symbol of a symbol relation tree.
struct SrtNode {
  NodeId id = 0;
  std::string label;
  StrokeSet stroke_ids;
  BBox bbox;

  int min_stroke() const { return stroke_ids.empty() ? -1 : stroke_ids.front(); }
};

struct SrtEdge {
  NodeId parent = 0;
  NodeId child = 0;
  Relation relation = Relation::Right;

  friend bool operator==(const SrtEdge&, const SrtEdge&) = default;
};

/// Symbol relation tree. Node ids are unique but need not be dense; node
/// identity across trees is the stroke set.
class Srt {
 public:
  Srt() = default;
  Srt(std::vector<SrtNode> nodes, std::vector<SrtEdge> edges, NodeId root)
      : nodes_(std::move(nodes)), edges_(std::move(edges)), root_(root) {
    validate();
  }

  /// Single-node tree.
  static Srt leaf(SrtNode node) {
    NodeId id = node.id;
    return Srt({std::move(node)}, {}, id);
  }

  const std::vector<SrtNode>& nodes() const { return nodes_; }
  const std::vector<SrtEdge>& edges() const { return edges_; }
  NodeId root() const { return root_; }
  bool empty() const { return nodes_.empty(); }
  std::size_t size() const { return nodes_.size(); }

  const SrtNode& node(NodeId id) const {
    for (const auto& n : nodes_)
      if (n.id == id) return n;
    throw Error("no node with id " + std::to_string(id));
  }

  bool contains(NodeId id) const {
    return std::any_of(nodes_.begin(), nodes_.end(), [&](const SrtNode& n) { return n.id == id; });
  }

  std::optional<SrtEdge> parent_edge(NodeId id) const {
    for (const auto& e : edges_)
      if (e.child == id) return e;
    return std::nullopt;
  }

  /// Outgoing edges of a node, children ordered by their first stroke.
  std::vector<SrtEdge> child_edges(NodeId id) const {
    std::vector<SrtEdge> out;
    for (const auto& e : edges_)
      if (e.parent == id) out.push_back(e);
    std::sort(out.begin(), out.end(), [&](const SrtEdge& a, const SrtEdge& b) {
      return std::make_tuple(node(a.child).min_stroke(), a.child) <
             std::make_tuple(node(b.child).min_stroke(), b.child);
    });
    return out;
  }

  std::optional<NodeId> child(NodeId id, Relation r) const {
    for (const auto& e : edges_)
      if (e.parent == id && e.relation == r) return e.child;
    return std::nullopt;
  }

  bool is_leaf(NodeId id) const {
    return std::none_of(edges_.begin(), edges_.end(), [&](const SrtEdge& e) { return e.parent == id; });
  }

  std::size_t leaf_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [&](const SrtNode& n) { return is_leaf(n.id); }));
  }

  /// Preorder from the root, children by first stroke.
  std::vector<NodeId> preorder() const {
    std::vector<NodeId> out;
    if (empty()) return out;
    std::vector<NodeId> stack{root_};
    while (!stack.empty()) {
      NodeId id = stack.back();
      stack.pop_back();
      out.push_back(id);
      auto kids = child_edges(id);
      for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(it->child);
    }
    return out;
  }

  /// Node ids of the subtree rooted at `id`, preorder.
  std::vector<NodeId> subtree(NodeId id) const {
    std::vector<NodeId> out;
    std::vector<NodeId> stack{id};
    while (!stack.empty()) {
      NodeId cur = stack.back();
      stack.pop_back();
      out.push_back(cur);
      auto kids = child_edges(cur);
      for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(it->child);
    }
    return out;
  }

  BBox bbox() const {
    BBox b;
    for (const auto& n : nodes_) b.add(n.bbox);
    return b;
  }

  std::vector<int> strokes() const {
    std::vector<int> out;
    for (const auto& n : nodes_) out.insert(out.end(), n.stroke_ids.begin(), n.stroke_ids.end());
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Throws unless the node/edge sets form a tree rooted at root().
  void validate() const {
    if (nodes_.empty()) {
      if (!edges_.empty()) throw Error("edges without nodes");
      return;
    }
    std::set<NodeId> ids;
    std::set<StrokeSet> stroke_sets;
    for (const auto& n : nodes_) {
      if (!ids.insert(n.id).second) throw Error("duplicate node id " + std::to_string(n.id));
      if (n.stroke_ids.empty()) throw Error("node " + std::to_string(n.id) + " has no strokes");
      if (!std::is_sorted(n.stroke_ids.begin(), n.stroke_ids.end()) ||
          std::adjacent_find(n.stroke_ids.begin(), n.stroke_ids.end()) != n.stroke_ids.end())
        throw Error("node " + std::to_string(n.id) + " stroke ids not strictly increasing");
      if (!stroke_sets.insert(n.stroke_ids).second)
        throw Error("two nodes share the same stroke set");
    }
    if (!ids.count(root_)) throw Error("root is not a node");
    std::map<NodeId, int> parents;
    std::set<std::pair<NodeId, Relation>> slots;
    for (const auto& e : edges_) {
      if (e.relation == Relation::NoRel) throw Error("NoRel is not a tree edge");
      if (!ids.count(e.parent) || !ids.count(e.child)) throw Error("edge endpoint is not a node");
      if (e.child == root_) throw Error("root has a parent");
      if (++parents[e.child] > 1) throw Error("node " + std::to_string(e.child) + " has two parents");
      if (!slots.insert({e.parent, e.relation}).second)
        throw Error("node " + std::to_string(e.parent) + " has two " +
                    std::string(relation_name(e.relation)) + " children");
    }
    if (edges_.size() != nodes_.size() - 1) throw Error("edge count does not form a tree");
    if (subtree(root_).size() != nodes_.size()) throw Error("tree is not connected");
  }

  /// Canonical (stroke-set keyed) view used for equality.
  struct Canonical {
    std::vector<std::pair<StrokeSet, std::string>> nodes;
    std::vector<std::tuple<StrokeSet, StrokeSet, Relation>> edges;
    StrokeSet root;
    friend bool operator==(const Canonical&, const Canonical&) = default;
  };

  Canonical canonical() const {
    Canonical c;
    for (const auto& n : nodes_) c.nodes.emplace_back(n.stroke_ids, n.label);
    for (const auto& e : edges_) c.edges.emplace_back(node(e.parent).stroke_ids, node(e.child).stroke_ids, e.relation);
    std::sort(c.nodes.begin(), c.nodes.end());
    std::sort(c.edges.begin(), c.edges.end());
    if (!empty()) c.root = node(root_).stroke_ids;
    return c;
  }

  /// Structural equality: same labels on the same stroke sets, same edges.
  friend bool operator==(const Srt& a, const Srt& b) { return a.canonical() == b.canonical(); }

 private:
  std::vector<SrtNode> nodes_;
  std::vector<SrtEdge> edges_;
  NodeId root_ = 0;
};

/// Alternating symbol/relation linearization of (part of) an SRT.
struct DerivedPath {
  std::vector<SrtNode> nodes;
  std::vector<Relation> relations;  // relations[i] sits between nodes[i] and nodes[i+1]

  /// [symbol, relation, symbol, ...] as label strings.
  std::vector<std::string> tokens() const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (i) out.emplace_back(relation_name(relations[i - 1]));
      out.push_back(nodes[i].label);
    }
    return out;
  }

  std::vector<NodeId> node_ids() const {
    std::vector<NodeId> out;
    for (const auto& n : nodes) out.push_back(n.id);
    return out;
  }

  /// Stroke ids of every covered node, node by node.
  std::vector<int> stroke_order() const {
    std::vector<int> out;
    for (const auto& n : nodes) out.insert(out.end(), n.stroke_ids.begin(), n.stroke_ids.end());
    return out;
  }

  friend bool operator==(const DerivedPath& a, const DerivedPath& b) {
    return a.tokens() == b.tokens() && a.stroke_order() == b.stroke_order() &&
           a.node_ids() == b.node_ids();
  }
};

}  // namespace srtrec

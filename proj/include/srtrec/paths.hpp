#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "srtrec/srt.hpp"

namespace srtrec {

/// Relation emitted between two consecutive nodes of a traversal: the edge
/// label when `earlier` is the parent of `later`, NoRel otherwise.
inline Relation relation_between(const Srt& tree, NodeId earlier, NodeId later) {
  for (const auto& e : tree.edges())
    if (e.parent == earlier && e.child == later) return e.relation;
  return Relation::NoRel;
}

inline DerivedPath path_through(const Srt& tree, const std::vector<NodeId>& order) {
  DerivedPath p;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i) p.relations.push_back(relation_between(tree, order[i - 1], order[i]));
    p.nodes.push_back(tree.node(order[i]));
  }
  return p;
}

/// One path per leaf, following tree edges from the root. Never contains NoRel.
inline std::vector<DerivedPath> derived_paths_from_root(const Srt& tree) {
  if (tree.empty()) throw Error("empty SRT");
  std::vector<DerivedPath> out;
  std::vector<NodeId> route;
  auto walk = [&](auto&& self, NodeId id) -> void {
    route.push_back(id);
    auto kids = tree.child_edges(id);
    if (kids.empty()) out.push_back(path_through(tree, route));
    for (const auto& e : kids) self(self, e.child);
    route.pop_back();
  };
  walk(walk, tree.root());
  return out;
}

/// Node ids ordered by first stroke.
inline std::vector<NodeId> writing_order(const Srt& tree, const std::vector<NodeId>& ids) {
  std::vector<NodeId> order = ids;
  std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
    return tree.node(a).min_stroke() < tree.node(b).min_stroke();
  });
  for (std::size_t i = 1; i < order.size(); ++i)
    if (tree.node(order[i - 1]).min_stroke() == tree.node(order[i]).min_stroke())
      throw Error("overlapping symbol segmentation");
  return order;
}

/// Every node once, in writing order, NoRel between nodes not linked
/// parent-before-child.
inline DerivedPath writing_order_path(const Srt& tree) {
  if (tree.empty()) throw Error("empty SRT");
  std::vector<NodeId> ids;
  for (const auto& n : tree.nodes()) ids.push_back(n.id);
  return path_through(tree, writing_order(tree, ids));
}

enum class ShuffleScope { RootOnly, AllNodes };

/// Random traversals simulating other writing orders. RootOnly permutes the
/// sub-trees hanging off the root and keeps writing order inside each;
/// AllNodes permutes children at every node (preorder).
inline std::vector<DerivedPath> random_root_shuffle_paths(const Srt& tree, int count, std::uint64_t seed,
                                                          ShuffleScope scope = ShuffleScope::RootOnly) {
  std::vector<DerivedPath> out;
  if (count <= 0) return out;
  if (tree.empty()) throw Error("empty SRT");
  std::mt19937_64 rng(seed);
  for (int k = 0; k < count; ++k) {
    std::vector<NodeId> order;
    if (scope == ShuffleScope::RootOnly) {
      order.push_back(tree.root());
      auto kids = tree.child_edges(tree.root());
      std::shuffle(kids.begin(), kids.end(), rng);
      for (const auto& e : kids) {
        auto sub = writing_order(tree, tree.subtree(e.child));
        order.insert(order.end(), sub.begin(), sub.end());
      }
    } else {
      auto walk = [&](auto&& self, NodeId id) -> void {
        order.push_back(id);
        auto kids = tree.child_edges(id);
        std::shuffle(kids.begin(), kids.end(), rng);
        for (const auto& e : kids) self(self, e.child);
      };
      walk(walk, tree.root());
    }
    out.push_back(path_through(tree, order));
  }
  return out;
}

/// Union of the nodes and non-NoRel edges of every path. Nodes are matched by
/// stroke set.
inline Srt reconstruct_from_paths(const std::vector<DerivedPath>& paths) {
  std::map<StrokeSet, SrtNode> nodes;
  std::map<std::pair<StrokeSet, StrokeSet>, Relation> edges;
  for (const auto& p : paths) {
    if (p.nodes.empty() || p.relations.size() + 1 != p.nodes.size())
      throw Error("malformed derived path");
    for (const auto& n : p.nodes) {
      auto [it, fresh] = nodes.emplace(n.stroke_ids, n);
      if (!fresh && it->second.label != n.label) throw Error("inconsistent paths");
    }
    for (std::size_t i = 0; i < p.relations.size(); ++i) {
      if (p.relations[i] == Relation::NoRel) continue;
      auto key = std::make_pair(p.nodes[i].stroke_ids, p.nodes[i + 1].stroke_ids);
      auto [it, fresh] = edges.emplace(key, p.relations[i]);
      if (!fresh && it->second != p.relations[i]) throw Error("inconsistent paths");
    }
  }
  if (nodes.empty()) throw Error("paths do not cover a tree");

  std::vector<SrtNode> node_list;
  std::set<NodeId> ids;
  bool ids_unique = true;
  for (const auto& [strokes, n] : nodes) {
    node_list.push_back(n);
    ids_unique = ids_unique && ids.insert(n.id).second;
  }
  std::sort(node_list.begin(), node_list.end(),
            [](const SrtNode& a, const SrtNode& b) { return a.stroke_ids < b.stroke_ids; });
  if (!ids_unique)
    for (std::size_t i = 0; i < node_list.size(); ++i) node_list[i].id = static_cast<NodeId>(i);

  auto id_of = [&](const StrokeSet& s) {
    for (const auto& n : node_list)
      if (n.stroke_ids == s) return n.id;
    throw Error("paths do not cover a tree");
  };
  std::vector<SrtEdge> edge_list;
  std::map<NodeId, int> parent_count;
  std::set<std::pair<NodeId, Relation>> slots;
  for (const auto& [key, rel] : edges) {
    SrtEdge e{id_of(key.first), id_of(key.second), rel};
    if (++parent_count[e.child] > 1 || !slots.insert({e.parent, e.relation}).second)
      throw Error("inconsistent paths");
    edge_list.push_back(e);
  }
  std::vector<NodeId> roots;
  for (const auto& n : node_list)
    if (!parent_count.count(n.id)) roots.push_back(n.id);
  if (roots.size() != 1) throw Error("paths do not cover a tree");
  try {
    return Srt(std::move(node_list), std::move(edge_list), roots.front());
  } catch (const Error&) {
    throw Error("paths do not cover a tree");
  }
}

}  // namespace srtrec

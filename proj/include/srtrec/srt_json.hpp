#pragma once

#include <json.hpp>

#include "srtrec/srt.hpp"

namespace srtrec {

inline constexpr int kJsonVersion = 1;

inline nlohmann::json bbox_to_json(const BBox& b) {
  if (b.empty()) return nullptr;
  return nlohmann::json::array({b.min_x, b.min_y, b.max_x, b.max_y});
}

inline BBox bbox_from_json(const nlohmann::json& j) {
  if (j.is_null()) return {};
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>(), j.at(3).get<double>()};
}

inline nlohmann::json to_json(const Srt& tree) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : tree.nodes())
    nodes.push_back({{"id", n.id}, {"label", n.label}, {"strokes", n.stroke_ids}, {"bbox", bbox_to_json(n.bbox)}});
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : tree.edges())
    edges.push_back({{"parent", e.parent}, {"child", e.child}, {"relation", relation_name(e.relation)}});
  nlohmann::json out = {{"v", kJsonVersion}, {"nodes", nodes}, {"edges", edges}};
  out["root"] = tree.empty() ? nlohmann::json(nullptr) : nlohmann::json(tree.root());
  return out;
}

inline Srt srt_from_json(const nlohmann::json& j) {
  try {
    std::vector<SrtNode> nodes;
    for (const auto& n : j.at("nodes"))
      nodes.push_back({n.at("id").get<NodeId>(), n.at("label").get<std::string>(),
                       n.at("strokes").get<std::vector<int>>(), bbox_from_json(n.value("bbox", nlohmann::json()))});
    std::vector<SrtEdge> edges;
    for (const auto& e : j.at("edges")) {
      auto rel = parse_relation(e.at("relation").get<std::string>());
      if (!rel) throw ParseError("unknown relation " + e.at("relation").get<std::string>());
      edges.push_back({e.at("parent").get<NodeId>(), e.at("child").get<NodeId>(), *rel});
    }
    if (nodes.empty()) return Srt();
    return Srt(std::move(nodes), std::move(edges), j.at("root").get<NodeId>());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad SRT JSON: ") + e.what());
  }
}

}  // namespace srtrec

#pragma once

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "srtrec/srt.hpp"

namespace srtrec {

// LgEval label graph files, object/relation subset:
//   O, <id>, <label>, 1.0, <stroke>, <stroke>, ...
//   R, <parent id>, <child id>, <relation>, 1.0
// Lines starting with '#' and blank lines are ignored.

struct LgObject {
  std::string id;
  std::string label;
  double weight = 1.0;
  std::vector<int> strokes;
};

struct LgRelation {
  std::string parent;
  std::string child;
  std::string label;
  double weight = 1.0;
};

struct LgDocument {
  std::vector<LgObject> objects;
  std::vector<LgRelation> relations;

  std::string str() const {
    std::ostringstream os;
    os << "# Objects(" << objects.size() << ")\n";
    for (const auto& o : objects) {
      os << "O, " << o.id << ", " << o.label << ", 1.0";
      for (int s : o.strokes) os << ", " << s;
      os << '\n';
    }
    os << "\n# Relations(" << relations.size() << ")\n";
    for (const auto& r : relations) os << "R, " << r.parent << ", " << r.child << ", " << r.label << ", 1.0\n";
    return os.str();
  }

  static LgDocument parse(const std::string& text) {
    LgDocument doc;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      auto fields = split(line);
      if (fields.empty() || fields.front().empty() || fields.front()[0] == '#') continue;
      const std::string& kind = fields[0];
      if (kind == "O") {
        if (fields.size() < 5) throw ParseError("object line needs id, label, weight and strokes", line_no);
        LgObject o{fields[1], fields[2], to_double(fields[3], line_no), {}};
        for (std::size_t i = 4; i < fields.size(); ++i) o.strokes.push_back(to_int(fields[i], line_no));
        if (o.id.empty() || o.label.empty()) throw ParseError("empty object id or label", line_no);
        doc.objects.push_back(std::move(o));
      } else if (kind == "R" || kind == "EO") {
        if (fields.size() != 5) throw ParseError("relation line needs parent, child, label, weight", line_no);
        doc.relations.push_back({fields[1], fields[2], fields[3], to_double(fields[4], line_no)});
      } else {
        throw ParseError("unknown line type '" + kind + "'", line_no);
      }
    }
    return doc;
  }

 private:
  static std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(line);
    while (std::getline(in, cur, ',')) {
      auto b = cur.find_first_not_of(" \t\r");
      auto e = cur.find_last_not_of(" \t\r");
      out.push_back(b == std::string::npos ? std::string() : cur.substr(b, e - b + 1));
    }
    while (!out.empty() && out.back().empty() && out.size() > 1) out.pop_back();
    return out;
  }

  static double to_double(const std::string& s, std::size_t line) {
    try {
      std::size_t used = 0;
      double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ParseError("bad number '" + s + "'", line);
    }
  }

  static int to_int(const std::string& s, std::size_t line) {
    try {
      std::size_t used = 0;
      int v = std::stoi(s, &used);
      if (used != s.size() || v < 0) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ParseError("bad stroke id '" + s + "'", line);
    }
  }
};

inline LgDocument to_lg(const Srt& tree) {
  LgDocument doc;
  std::vector<const SrtNode*> order;
  for (const auto& n : tree.nodes()) order.push_back(&n);
  std::sort(order.begin(), order.end(), [](const SrtNode* a, const SrtNode* b) { return a->stroke_ids < b->stroke_ids; });
  std::map<std::string, int> seen;
  std::map<NodeId, std::string> names;
  for (const SrtNode* n : order) {
    std::string id = n->label + "_" + std::to_string(++seen[n->label]);
    names[n->id] = id;
    doc.objects.push_back({id, n->label, 1.0, n->stroke_ids});
  }
  std::vector<SrtEdge> edges = tree.edges();
  std::sort(edges.begin(), edges.end(), [&](const SrtEdge& a, const SrtEdge& b) {
    return std::make_pair(tree.node(a.parent).stroke_ids, tree.node(a.child).stroke_ids) <
           std::make_pair(tree.node(b.parent).stroke_ids, tree.node(b.child).stroke_ids);
  });
  for (const auto& e : edges)
    doc.relations.push_back({names[e.parent], names[e.child], std::string(relation_name(e.relation)), 1.0});
  return doc;
}

/// Node ids follow object order. Bounding boxes are left empty; LG carries
/// no geometry.
inline Srt from_lg(const LgDocument& doc) {
  std::map<std::string, NodeId> ids;
  std::vector<SrtNode> nodes;
  for (const auto& o : doc.objects) {
    NodeId id = static_cast<NodeId>(nodes.size());
    if (!ids.emplace(o.id, id).second) throw Error("duplicate LG object id " + o.id);
    StrokeSet strokes = o.strokes;
    std::sort(strokes.begin(), strokes.end());
    strokes.erase(std::unique(strokes.begin(), strokes.end()), strokes.end());
    nodes.push_back({id, o.label, std::move(strokes), {}});
  }
  std::vector<SrtEdge> edges;
  std::vector<bool> has_parent(nodes.size(), false);
  for (const auto& r : doc.relations) {
    auto p = ids.find(r.parent);
    auto c = ids.find(r.child);
    if (p == ids.end() || c == ids.end()) throw Error("LG relation references unknown object");
    auto rel = parse_relation(r.label);
    if (!rel || *rel == Relation::NoRel) throw Error("unknown LG relation label " + r.label);
    edges.push_back({p->second, c->second, *rel});
    has_parent[static_cast<std::size_t>(c->second)] = true;
  }
  if (nodes.empty()) return Srt();
  auto root = std::find(has_parent.begin(), has_parent.end(), false);
  if (root == has_parent.end()) throw Error("LG graph has no root");
  return Srt(std::move(nodes), std::move(edges), static_cast<NodeId>(root - has_parent.begin()));
}

}  // namespace srtrec

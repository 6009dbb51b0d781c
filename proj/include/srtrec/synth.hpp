#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "srtrec/ink.hpp"
#include "srtrec/latex_parse.hpp"

namespace srtrec {

/// Synthetic handwriting: glyph templates, a 2D layout engine for
/// ExprNode trees, and a fixed small-alphabet corpus.
namespace synth {

using Polyline = std::vector<Point>;

/// Unit-height template: baseline at y = 0, top near y = -1, y grows down.
struct Glyph {
  double width = 0.6;
  std::vector<Polyline> strokes;
};

inline const std::map<std::string, Glyph>& glyph_table() {
  static const std::map<std::string, Glyph> table = {
      {"x", {0.7, {{{0, -0.7}, {0.7, 0}}, {{0.7, -0.7}, {0, 0}}}}},
      {"y", {0.7, {{{0, -0.7}, {0.35, -0.3}, {0.7, -0.7}, {0.35, -0.3}, {0.15, 0.05}}}}},
      {"a", {0.6, {{{0.6, -0.5}, {0.3, -0.7}, {0, -0.35}, {0.3, 0}, {0.6, -0.3}, {0.6, -0.7}, {0.6, 0}}}}},
      {"b", {0.6, {{{0, -1}, {0, 0}, {0.4, -0.05}, {0.6, -0.35}, {0.3, -0.6}, {0, -0.4}}}}},
      {"d", {0.6, {{{0.6, -0.4}, {0.3, -0.6}, {0, -0.3}, {0.3, 0}, {0.6, -0.2}, {0.6, -1}, {0.6, 0}}}}},
      {"h", {0.6, {{{0, -1}, {0, 0}, {0, -0.4}, {0.3, -0.65}, {0.6, -0.4}, {0.6, 0}}}}},
      {"n", {0.6, {{{0, -0.7}, {0, 0}, {0, -0.45}, {0.3, -0.7}, {0.6, -0.45}, {0.6, 0}}}}},
      {"i", {0.2, {{{0.1, -0.65}, {0.1, 0}}, {{0.1, -0.95}, {0.12, -0.9}}}}},
      {"k", {0.6, {{{0, -1}, {0, 0}}, {{0.6, -0.7}, {0.05, -0.35}, {0.6, 0}}}}},
      {"1", {0.3, {{{0, -0.8}, {0.25, -1}, {0.25, 0}}}}},
      {"2", {0.6, {{{0, -0.75}, {0.3, -1}, {0.6, -0.75}, {0, 0}, {0.6, 0}}}}},
      {"3", {0.6, {{{0, -0.9}, {0.5, -0.95}, {0.2, -0.5}, {0.6, -0.25}, {0.3, 0}, {0, -0.1}}}}},
      {"0", {0.6, {{{0.3, -1}, {0, -0.5}, {0.3, 0}, {0.6, -0.5}, {0.3, -1}}}}},
      {"+", {0.7, {{{0, -0.4}, {0.7, -0.4}}, {{0.35, -0.75}, {0.35, -0.05}}}}},
      {"-", {0.7, {{{0, -0.4}, {0.7, -0.4}}}}},
      {"=", {0.7, {{{0, -0.55}, {0.7, -0.55}}, {{0, -0.25}, {0.7, -0.25}}}}},
      {"(", {0.3, {{{0.3, -1}, {0, -0.5}, {0.3, 0.1}}}}},
      {")", {0.3, {{{0, -1}, {0.3, -0.5}, {0, 0.1}}}}},
      {"\\int", {0.5, {{{0.5, -1.1}, {0.35, -1.15}, {0.25, -0.5}, {0.15, 0.15}, {0, 0.1}}}}},
      {"\\sqrt", {0.8, {{{0, -0.4}, {0.12, -0.45}, {0.28, 0}, {0.4, -1}, {0.8, -1}}}}},
      {"\\log",
       {1.3,
        {{{0, -1}, {0, 0}},
         {{0.55, -0.6}, {0.3, -0.5}, {0.3, -0.1}, {0.55, 0}, {0.6, -0.3}, {0.55, -0.6}},
         {{1.2, -0.6}, {0.9, -0.55}, {0.95, -0.2}, {1.2, -0.3}, {1.2, 0.2}, {0.9, 0.3}}}}},
      {"\\sum", {0.8, {{{0.8, -1}, {0, -1}, {0.45, -0.5}, {0, 0}, {0.8, 0}}}}},
      {"\\alpha", {0.7, {{{0.7, -0.7}, {0.3, -0.1}, {0.05, -0.35}, {0.3, -0.7}, {0.7, 0}}}}},
      {"\\pi", {0.7, {{{0, -0.7}, {0.7, -0.7}}, {{0.2, -0.7}, {0.15, 0}}, {{0.5, -0.7}, {0.55, 0}}}}},
  };
  return table;
}

/// Template for `label`; symbols without a hand-drawn template get a
/// deterministic scribble derived from the label text.
inline Glyph glyph_for(const std::string& label) {
  const auto& t = glyph_table();
  if (auto it = t.find(label); it != t.end()) return it->second;
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : label) h = (h ^ c) * 1099511628211ULL;
  std::mt19937_64 rng(h);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Glyph g;
  g.width = 0.4 + 0.4 * u(rng);
  const int n = 1 + static_cast<int>(h % 2);
  for (int s = 0; s < n; ++s) {
    Polyline p;
    for (int k = 0; k < 4; ++k) p.push_back({g.width * u(rng), -0.9 * u(rng)});
    g.strokes.push_back(p);
  }
  return g;
}

/// Inserts points so consecutive samples are at most `step` apart.
inline Polyline densify(const Polyline& p, double step) {
  if (p.size() < 2) return p;
  Polyline out{p.front()};
  for (std::size_t i = 1; i < p.size(); ++i) {
    const double d = distance(p[i - 1], p[i]);
    const int n = std::max(1, static_cast<int>(std::ceil(d / step)));
    for (int k = 1; k <= n; ++k) {
      const double t = static_cast<double>(k) / n;
      out.push_back({p[i - 1].x + t * (p[i].x - p[i - 1].x), p[i - 1].y + t * (p[i].y - p[i - 1].y)});
    }
  }
  return out;
}

struct Style {
  double scale = 100.0;   // device units per glyph height
  double jitter = 0.02;   // point noise, fraction of the glyph size
  double slant = 0.08;    // max shear
  double size_var = 0.06; // max relative size change per symbol
};

/// Node of the writing-order tree: children sorted so that preorder is the
/// order in which a writer produces the symbols.
struct Block {
  BBox box;
  std::map<int, std::vector<Polyline>> ink;  // preorder index -> strokes

  void shift(double dx, double dy) {
    box = {box.min_x + dx, box.min_y + dy, box.max_x + dx, box.max_y + dy};
    for (auto& [k, strokes] : ink)
      for (auto& s : strokes)
        for (auto& p : s) {
          p.x += dx;
          p.y += dy;
        }
  }

  void merge(Block other) {
    box.add(other.box);
    for (auto& [k, s] : other.ink) ink[k] = std::move(s);
  }
};

inline int writing_rank(Relation r) {
  switch (r) {
    case Relation::Above: return 0;
    case Relation::Below: return 1;
    case Relation::Inside: return 2;
    case Relation::Sup: return 3;
    case Relation::Sub: return 4;
    default: return 5;
  }
}

/// Children sorted by writing rank, recursively.
inline ExprNode in_writing_order(ExprNode n) {
  std::stable_sort(n.children.begin(), n.children.end(),
                   [](const auto& a, const auto& b) { return writing_rank(a.first) < writing_rank(b.first); });
  for (auto& [r, c] : n.children) c = in_writing_order(std::move(c));
  return n;
}

class Layout {
 public:
  Layout(std::uint64_t seed, Style style) : rng_(seed), style_(style) {}

  Block place(const ExprNode& n, double s) {
    const int index = next_++;
    const ExprNode* above = nullptr;
    const ExprNode* below = nullptr;
    const ExprNode* inside = nullptr;
    const ExprNode* sup = nullptr;
    const ExprNode* sub = nullptr;
    const ExprNode* right = nullptr;
    for (const auto& [r, c] : n.children) {
      switch (r) {
        case Relation::Above: above = &c; break;
        case Relation::Below: below = &c; break;
        case Relation::Inside: inside = &c; break;
        case Relation::Sup: sup = &c; break;
        case Relation::Sub: sub = &c; break;
        case Relation::Right: right = &c; break;
        case Relation::NoRel: throw Error("NoRel edge in expression");
      }
    }
    const bool bar = n.label == "-" && (above || below);
    if (inside && n.label != "\\sqrt") throw Error("synthetic layout supports Inside only under \\sqrt");

    Block b;
    BBox glyph_box;
    Block over, under, content;
    const double sz = s * (1.0 + style_.size_var * uniform());
    if (bar) {
      if (above) over = place(*above, 0.8 * s);
      if (below) under = place(*below, 0.8 * s);
      const double w = std::max(above ? over.box.width() : 0.0, below ? under.box.width() : 0.0) + 0.3 * s;
      const double y = -0.4 * s + 0.03 * s * uniform();
      b.ink[index] = {jittered({{0, y}, {w, y + 0.02 * s * uniform()}}, sz)};
      glyph_box = stroke_box(b.ink[index]);
      if (above) {
        over.shift((w - over.box.width()) / 2 - over.box.min_x, y - 0.15 * s - over.box.max_y);
        b.merge(std::move(over));
        above = nullptr;
      }
      if (below) {
        under.shift((w - under.box.width()) / 2 - under.box.min_x, y + 0.15 * s - under.box.min_y);
        b.merge(std::move(under));
        below = nullptr;
      }
    } else if (inside) {
      content = place(*inside, s);
      content.shift(0.5 * s - content.box.min_x, 0.0);
      const double top = std::min(content.box.min_y, -s) - 0.15 * s;
      const double bottom = std::max(content.box.max_y, 0.0) + 0.05 * s;
      const double mid = bottom - 0.35 * (bottom - top);
      Polyline p{{0, mid}, {0.12 * s, mid - 0.05 * s}, {0.28 * s, bottom}, {0.4 * s, top}, {content.box.max_x + 0.1 * s, top}};
      b.ink[index] = {jittered(p, sz)};
      glyph_box = stroke_box(b.ink[index]);
      b.merge(std::move(content));
    } else {
      Glyph g = glyph_for(n.label);
      const double shear = style_.slant * uniform();
      std::vector<Polyline> strokes;
      for (const auto& stroke : g.strokes) {
        Polyline p;
        for (const auto& q : stroke) p.push_back({(q.x - shear * q.y) * sz, q.y * sz});
        strokes.push_back(jittered(p, sz));
      }
      glyph_box = stroke_box(strokes);
      b.ink[index] = std::move(strokes);
    }
    if (b.box.empty()) b.box = glyph_box;
    else b.box.add(glyph_box);

    const double gw = glyph_box.width();
    if (above) {
      Block a = place(*above, 0.6 * s);
      a.shift(glyph_box.min_x + (gw - a.box.width()) / 2 - a.box.min_x, glyph_box.min_y - 0.12 * s - a.box.max_y);
      b.merge(std::move(a));
    }
    if (below) {
      Block u = place(*below, 0.6 * s);
      u.shift(glyph_box.min_x + (gw - u.box.width()) / 2 - u.box.min_x, glyph_box.max_y + 0.12 * s - u.box.min_y);
      b.merge(std::move(u));
    }
    const double script_x = b.box.max_x + 0.06 * s;
    const double gh = std::max(glyph_box.height(), 0.3 * s);
    if (sup) {
      Block p = place(*sup, 0.6 * s);
      p.shift(script_x - p.box.min_x, glyph_box.min_y + 0.45 * gh - p.box.max_y);
      b.merge(std::move(p));
    }
    if (sub) {
      Block p = place(*sub, 0.6 * s);
      p.shift(script_x - p.box.min_x, glyph_box.max_y - 0.35 * gh - p.box.min_y);
      b.merge(std::move(p));
    }
    if (right) {
      Block r = place(*right, s);
      r.shift(b.box.max_x + 0.25 * s - r.box.min_x, 0.0);
      b.merge(std::move(r));
    }
    return b;
  }

 private:
  double uniform() { return std::uniform_real_distribution<double>(-1.0, 1.0)(rng_); }

  Polyline jittered(const Polyline& p, double sz) {
    Polyline out = densify(p, 0.08 * sz);
    std::normal_distribution<double> noise(0.0, style_.jitter * sz);
    for (auto& q : out) {
      q.x += noise(rng_);
      q.y += noise(rng_);
    }
    return out;
  }

  static BBox stroke_box(const std::vector<Polyline>& strokes) {
    BBox b;
    for (const auto& s : strokes)
      for (const auto& p : s) b.add(p);
    return b;
  }

  std::mt19937_64 rng_;
  Style style_;
  int next_ = 0;
};

/// Renders `expr` as ink written in preorder (Above, Below, Inside, Sup,
/// Sub, Right), with the ground-truth SRT attached.
inline InkSample render(const ExprNode& expr, std::uint64_t seed, const std::string& source_id = "synthetic",
                        Style style = {}) {
  ExprNode ordered = in_writing_order(expr);
  Layout layout(seed, style);
  Block block = layout.place(ordered, style.scale);

  InkSample sample;
  sample.source_id = source_id;
  std::vector<SrtNode> nodes;
  for (auto& [index, strokes] : block.ink) {
    SrtNode node;
    node.id = index;
    for (auto& s : strokes) {
      node.stroke_ids.push_back(static_cast<int>(sample.strokes.size()));
      sample.strokes.push_back({static_cast<int>(sample.strokes.size()), std::move(s)});
    }
    nodes.push_back(std::move(node));
  }
  std::vector<SrtEdge> edges;
  int counter = 0;
  auto walk = [&](auto&& self, const ExprNode& n) -> void {
    const int id = counter++;
    nodes[static_cast<std::size_t>(id)].label = n.label;
    for (const auto& [r, c] : n.children) {
      edges.push_back({id, counter, r});
      self(self, c);
    }
  };
  walk(walk, ordered);
  sample.ground_truth = with_bboxes(Srt(std::move(nodes), std::move(edges), 0), sample);
  return sample;
}

inline InkSample render(const std::string& latex, std::uint64_t seed, const std::string& source_id = "synthetic",
                        Style style = {}) {
  return render(parse_latex(latex), seed, source_id, style);
}

/// Twenty expressions over fifteen symbols, every tree relation present.
inline const std::vector<std::string>& desk_corpus() {
  static const std::vector<std::string> c = {
      "x^{2}+1",        "\\frac{a}{b}",   "\\sqrt{x}+y",  "\\int xdx",     "a_{n}=b",
      "x_{1}+x_{2}",    "\\frac{1}{n}",   "y=x^{3}",      "\\sqrt{a+b}",   "h^{2}-1",
      "\\int_{1}^{2}x", "a^{n}b",         "\\int d^{2}x", "b_{1}",         "\\frac{x}{2}+1",
      "n+1=a",          "y_{n}^{2}",      "3x+2",         "\\sqrt{2}",     "a-b=h",
  };
  return c;
}

inline std::vector<std::string> desk_symbols() {
  return {"x", "y", "a", "b", "n", "1", "2", "3", "+", "-", "=", "\\int", "d", "h", "\\sqrt"};
}

}  // namespace synth
}  // namespace srtrec

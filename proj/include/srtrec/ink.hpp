#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "srtrec/srt.hpp"

namespace srtrec {

struct Stroke {
  int id = 0;
  std::vector<Point> points;

  BBox bbox() const {
    BBox b;
    for (const auto& p : points) b.add(p);
    return b;
  }
};

struct InkSample {
  std::string source_id;
  std::vector<Stroke> strokes;  // writing order, ids 0..n-1
  std::optional<Srt> ground_truth;

  BBox bbox() const {
    BBox b;
    for (const auto& s : strokes) b.add(s.bbox());
    return b;
  }

  BBox bbox_of(const std::vector<int>& stroke_ids) const {
    BBox b;
    for (int id : stroke_ids) b.add(strokes.at(static_cast<std::size_t>(id)).bbox());
    return b;
  }

  void validate() const {
    for (std::size_t i = 0; i < strokes.size(); ++i) {
      if (strokes[i].id != static_cast<int>(i)) throw Error("stroke ids must be 0..n-1 in order");
      if (strokes[i].points.empty()) throw Error("stroke " + std::to_string(i) + " has no points");
      for (const auto& p : strokes[i].points)
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
          throw Error("stroke " + std::to_string(i) + " has a non-finite coordinate");
    }
  }
};

/// Rebuilds every node's bbox from the member strokes of `sample`.
inline Srt with_bboxes(const Srt& tree, const InkSample& sample) {
  std::vector<SrtNode> nodes = tree.nodes();
  for (auto& n : nodes) {
    for (int s : n.stroke_ids)
      if (s < 0 || static_cast<std::size_t>(s) >= sample.strokes.size())
        throw Error("node '" + n.label + "' references missing stroke " + std::to_string(s));
    n.bbox = sample.bbox_of(n.stroke_ids);
  }
  if (nodes.empty()) return tree;
  return Srt(std::move(nodes), tree.edges(), tree.root());
}

struct NormalizeOptions {
  double spacing = 0.05;  // resampling step, in height-normalized units
};

namespace detail {

inline bool uniformly_spaced(const std::vector<Point>& pts, double spacing) {
  for (std::size_t i = 1; i < pts.size(); ++i) {
    double d = distance(pts[i - 1], pts[i]);
    if (d < 0.5 * spacing || d > 1.5 * spacing) return false;
  }
  return true;
}

/// Unit height at the origin and no gap wider than the resampling bound.
inline bool already_normalized(const InkSample& s, double spacing) {
  BBox b = s.bbox();
  if (std::abs(b.min_x) > 1e-9 || std::abs(b.min_y) > 1e-9) return false;
  if (std::abs(b.height() - 1.0) > 1e-9 && !(b.height() < 1e-12 && std::abs(b.width() - 1.0) < 1e-9)) return false;
  for (const auto& st : s.strokes)
    for (std::size_t i = 1; i < st.points.size(); ++i)
      if (distance(st.points[i - 1], st.points[i]) > 1.5 * spacing + 1e-12) return false;
  return true;
}

/// Equal arc-length resampling that keeps both endpoints. Strokes shorter
/// than half a step collapse to their first point.
inline std::vector<Point> resample(const std::vector<Point>& pts, double spacing) {
  if (pts.size() <= 1 || uniformly_spaced(pts, spacing)) return pts;
  std::vector<double> cum(pts.size(), 0.0);
  for (std::size_t i = 1; i < pts.size(); ++i) cum[i] = cum[i - 1] + distance(pts[i - 1], pts[i]);
  const double length = cum.back();
  if (length < 0.5 * spacing) return {pts.front()};
  const auto steps = static_cast<std::size_t>(std::max(1.0, std::round(length / spacing)));
  const double step = length / static_cast<double>(steps);
  std::vector<Point> out{pts.front()};
  std::size_t seg = 1;
  for (std::size_t k = 1; k < steps; ++k) {
    const double target = step * static_cast<double>(k);
    while (seg + 1 < pts.size() && cum[seg] < target) ++seg;
    const double span = cum[seg] - cum[seg - 1];
    const double t = span > 0 ? (target - cum[seg - 1]) / span : 0.0;
    out.push_back({pts[seg - 1].x + t * (pts[seg].x - pts[seg - 1].x),
                   pts[seg - 1].y + t * (pts[seg].y - pts[seg - 1].y)});
  }
  out.push_back(pts.back());
  return out;
}

inline void fit_unit_height(std::vector<Stroke>& strokes) {
  BBox b;
  for (const auto& s : strokes) b.add(s.bbox());
  double scale = 1.0;
  if (b.height() > 0) scale = 1.0 / b.height();
  else if (b.width() > 0) scale = 1.0 / b.width();
  for (auto& s : strokes)
    for (auto& p : s.points) p = {(p.x - b.min_x) * scale, (p.y - b.min_y) * scale};
}

}  // namespace detail

/// Translates the ink to the origin, scales it to unit height (unit width
/// for flat ink, identity for a single point) and resamples every stroke to
/// uniform spacing.
inline InkSample normalize(const InkSample& sample, const NormalizeOptions& opts = {}) {
  if (sample.strokes.empty()) throw Error("cannot normalize a sample without strokes");
  sample.validate();
  InkSample out = sample;
  if (detail::already_normalized(out, opts.spacing)) {
    if (out.ground_truth && !out.ground_truth->empty()) out.ground_truth = with_bboxes(*out.ground_truth, out);
    return out;
  }
  detail::fit_unit_height(out.strokes);
  for (auto& s : out.strokes) s.points = detail::resample(s.points, opts.spacing);
  detail::fit_unit_height(out.strokes);
  if (out.ground_truth && !out.ground_truth->empty()) out.ground_truth = with_bboxes(*out.ground_truth, out);
  return out;
}

enum class OffStrokeFeature { Delta, Midpoint };

struct FrameKind {
  enum Kind { StrokeFrame, OffStrokeFrame } kind = StrokeFrame;
  int index = 0;  // stroke id, or gap index i (between the (i-1)th and ith stroke of the sequence)

  friend bool operator==(const FrameKind&, const FrameKind&) = default;
};

using Frame = std::array<double, 3>;  // dx, dy, pen down (1) / up (0)

/// Classifier input: stroke frames interleaved with one frame per pen-up gap.
struct FeatureSequence {
  std::vector<Frame> frames;
  std::vector<FrameKind> kinds;
  std::vector<int> stroke_order;                         // stroke ids in sequence order
  std::vector<std::pair<std::size_t, std::size_t>> stroke_frames;  // [begin, end) per sequence stroke

  std::size_t size() const { return frames.size(); }
  bool empty() const { return frames.empty(); }
  std::size_t stroke_count() const { return stroke_order.size(); }

  /// Frame index of gap i (1 <= i < stroke_count()).
  std::size_t offstroke_frame(std::size_t gap) const { return stroke_frames.at(gap).first - 1; }

  std::vector<std::size_t> offstroke_frames() const {
    std::vector<std::size_t> out;
    for (std::size_t t = 0; t < kinds.size(); ++t)
      if (kinds[t].kind == FrameKind::OffStrokeFrame) out.push_back(t);
    return out;
  }
};

/// Frames for the given strokes of `sample`, in the given order. Off-stroke
/// frames are derived from the adjacency in `order`, not the original one.
inline FeatureSequence featurize_strokes(const InkSample& sample, const std::vector<int>& order,
                                         OffStrokeFeature off = OffStrokeFeature::Delta) {
  FeatureSequence fs;
  fs.stroke_order = order;
  const Point* prev = nullptr;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto id = static_cast<std::size_t>(order[k]);
    if (id >= sample.strokes.size()) throw Error("stroke id out of range: " + std::to_string(order[k]));
    const Stroke& s = sample.strokes[id];
    if (s.points.empty()) throw Error("stroke " + std::to_string(id) + " has no points");
    if (k > 0) {
      const Point& next = s.points.front();
      if (off == OffStrokeFeature::Delta)
        fs.frames.push_back({next.x - prev->x, next.y - prev->y, 0.0});
      else
        fs.frames.push_back({0.5 * (next.x + prev->x), 0.5 * (next.y + prev->y), 0.0});
      fs.kinds.push_back({FrameKind::OffStrokeFrame, static_cast<int>(k)});
    }
    const std::size_t begin = fs.frames.size();
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      if (i == 0)
        fs.frames.push_back({0.0, 0.0, 1.0});
      else
        fs.frames.push_back({s.points[i].x - s.points[i - 1].x, s.points[i].y - s.points[i - 1].y, 1.0});
      fs.kinds.push_back({FrameKind::StrokeFrame, s.id});
    }
    fs.stroke_frames.emplace_back(begin, fs.frames.size());
    prev = &s.points.back();
  }
  return fs;
}

inline FeatureSequence featurize(const InkSample& sample, OffStrokeFeature off = OffStrokeFeature::Delta) {
  std::vector<int> order(sample.strokes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  return featurize_strokes(sample, order, off);
}

}  // namespace srtrec

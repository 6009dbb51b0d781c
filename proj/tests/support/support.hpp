#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "srtrec.hpp"

namespace srtrec::testkit {

/// Random tree with at most `max_nodes` nodes; symbols get 1-3 consecutive
/// strokes, written in a random symbol order.
inline Srt random_srt(std::mt19937_64& rng, int max_nodes, const LabelAlphabet& alphabet = crohme_alphabet()) {
  std::uniform_int_distribution<int> count(1, max_nodes);
  const int n = count(rng);
  std::vector<SrtEdge> edges;
  std::set<std::pair<NodeId, Relation>> used;
  for (NodeId child = 1; child < n; ++child) {
    while (true) {
      NodeId parent = std::uniform_int_distribution<int>(0, child - 1)(rng);
      Relation r = kTreeRelations[std::uniform_int_distribution<std::size_t>(0, 5)(rng)];
      if (used.insert({parent, r}).second) {
        edges.push_back({parent, child, r});
        break;
      }
    }
  }
  std::vector<NodeId> write(static_cast<std::size_t>(n));
  std::iota(write.begin(), write.end(), 0);
  std::shuffle(write.begin(), write.end(), rng);
  std::vector<SrtNode> nodes(static_cast<std::size_t>(n));
  int stroke = 0;
  for (NodeId id : write) {
    auto& node = nodes[static_cast<std::size_t>(id)];
    node.id = id;
    node.label = alphabet.symbol(std::uniform_int_distribution<int>(0, alphabet.symbol_count() - 1)(rng));
    const int k = std::uniform_int_distribution<int>(1, 3)(rng);
    for (int j = 0; j < k; ++j) node.stroke_ids.push_back(stroke++);
  }
  return Srt(std::move(nodes), std::move(edges), 0);
}

/// Random SRTs until every tree relation has appeared at least once.
inline std::vector<Srt> random_srts(std::size_t count, int max_nodes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Srt> out;
  std::set<Relation> seen;
  while (out.size() < count || seen.size() < kTreeRelations.size()) {
    Srt t = random_srt(rng, max_nodes);
    for (const auto& e : t.edges()) seen.insert(e.relation);
    out.push_back(std::move(t));
  }
  return out;
}

/// Ink with one short horizontal stroke per stroke id, so geometry exists.
inline InkSample dummy_ink(const Srt& tree) {
  InkSample s;
  const auto strokes = tree.strokes();
  const int n = strokes.empty() ? 0 : strokes.back() + 1;
  for (int i = 0; i < n; ++i) s.strokes.push_back({i, {{double(i), 0.0}, {double(i) + 0.5, 0.2}}});
  s.ground_truth = with_bboxes(tree, s);
  return s;
}

inline Distributions random_distributions(std::mt19937_64& rng, std::size_t T, int K, double spread = 1.0) {
  std::normal_distribution<double> g(0.0, spread);
  Matrix logits(K, static_cast<Eigen::Index>(T));
  for (Eigen::Index t = 0; t < logits.cols(); ++t)
    for (int k = 0; k < K; ++k) logits(k, t) = g(rng);
  return softmax_columns(logits);
}

/// Sum over every frame-level path that collapses to `target`, enumerated
/// one path at a time (depth-first, pruned to prefixes of the target).
/// Paths emitting a non-blank label where `allowed` says no are skipped.
inline double brute_force_ctc_probability(const Distributions& d, const std::vector<int>& target, int blank,
                                          const std::function<bool(std::size_t, int)>& allowed = {}) {
  const std::size_t T = d.size();
  const int K = d.front().size();
  double total = 0.0;
  std::function<void(std::size_t, std::size_t, int, double)> walk = [&](std::size_t t, std::size_t emitted, int last,
                                                                        double prob) {
    if (t == T) {
      if (emitted == target.size()) total += prob;
      return;
    }
    for (int k = 0; k < K; ++k) {
      if (k != blank && allowed && !allowed(t, k)) continue;
      std::size_t e = emitted;
      if (k != blank && k != last) {
        if (e == target.size() || target[e] != k) continue;
        ++e;
      }
      walk(t + 1, e, k, prob * d[t][k]);
    }
  };
  walk(0, 0, -1, 1.0);
  return total;
}

/// Central differences of f at x, one coordinate at a time.
inline Vector numeric_gradient(const std::function<double(const Vector&)>& f, Vector x, double h = 1e-5) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const double up = f(x);
    x[i] = keep - h;
    const double down = f(x);
    x[i] = keep;
    g[i] = (up - down) / (2 * h);
  }
  return g;
}

/// |a - b| / max(|a|, |b|, floor), worst coordinate.
inline double max_relative_error(const Vector& a, const Vector& b, double floor = 1e-2) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double den = std::max({std::abs(a[i]), std::abs(b[i]), floor});
    worst = std::max(worst, std::abs(a[i] - b[i]) / den);
  }
  return worst;
}

/// Random feature sequence with `strokes` strokes of 1..max_points points.
inline FeatureSequence random_features(std::mt19937_64& rng, int strokes, int max_points) {
  InkSample s;
  std::normal_distribution<double> g(0.0, 0.1);
  for (int i = 0; i < strokes; ++i) {
    Stroke st{i, {}};
    const int n = std::uniform_int_distribution<int>(1, max_points)(rng);
    double x = i * 0.3, y = 0;
    for (int k = 0; k < n; ++k) {
      x += g(rng);
      y += g(rng);
      st.points.push_back({x, y});
    }
    s.strokes.push_back(std::move(st));
  }
  return featurize(s);
}

/// Layouts for the oracle suite, LaTeX in the subset the synthesizer reads.
inline const std::vector<std::string>& oracle_layouts() {
  static const std::vector<std::string> l = {
      "\\int d^{2}x",
      "\\frac{h}{2}\\log h",
      "x",
      "x+y",
      "x^{2}",
      "x_{1}",
      "x_{i}^{2}",
      "a^{b^{c}}",
      "a_{b_{c}}",
      "\\frac{a}{b}",
      "\\frac{1}{2}+\\frac{3}{4}",
      "\\frac{a+b}{c-d}",
      "\\frac{\\frac{a}{b}}{c}",
      "\\sqrt{x}",
      "\\sqrt{x+1}",
      "\\sqrt{\\frac{a}{b}}",
      "\\sqrt{x^{2}+y^{2}}",
      "e^{i\\pi}+1=0",
      "\\sum_{i}^{n}i",
      "\\int_{0}^{1}xdx",
      "\\log x",
      "\\sin x+\\cos y",
      "f(x)=x^{2}",
      "a=b+c",
      "2^{n}-1",
      "x_{n+1}=x_{n}",
      "\\alpha+\\beta=\\gamma",
      "\\lim_{x}f",
      "y=mx+b",
      "(a+b)^{2}",
      "\\frac{x^{2}}{2}",
      "\\frac{1}{\\sqrt{2}}",
      "\\sqrt{2}\\pi",
      "a_{1}+a_{2}+a_{3}",
      "\\int_{a}^{b}f(x)dx",
      "\\sum_{k}k^{2}",
      "\\overset{n}{\\sum}k",
      "\\underset{i}{\\sum}a",
      "x\\leq y",
      "\\sqrt{\\sqrt{x}}",
      "\\frac{d}{dx}f",
      "p^{2}+q^{2}=r^{2}",
      "\\log_{2}n",
      "\\theta^{2}",
      "\\mu_{1}-\\mu_{2}",
      "1+1=2",
      "\\frac{n}{n+1}",
      "a^{2}b^{2}",
      "\\pi r^{2}",
      "x^{n}+y^{n}=z^{n}",
      "\\sigma^{2}_{x}",
      "\\frac{\\pi}{4}",
      "\\tan\\theta",
      "k!",
      "\\sqrt{a}b",
  };
  return l;
}

}  // namespace srtrec::testkit

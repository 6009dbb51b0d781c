#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "srtrec/alphabet.hpp"

namespace srtrec {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Softmax output for one frame over the full label space.
struct FrameDistribution {
  Vector p;

  double operator[](int k) const { return p[k]; }
  int size() const { return static_cast<int>(p.size()); }
};

using Distributions = std::vector<FrameDistribution>;

/// Column-wise softmax of a K x T logit matrix.
inline Distributions softmax_columns(const Matrix& logits) {
  Distributions out(static_cast<std::size_t>(logits.cols()));
  for (Eigen::Index t = 0; t < logits.cols(); ++t) {
    const double m = logits.col(t).maxCoeff();
    Vector e = (logits.col(t).array() - m).exp().matrix();
    out[static_cast<std::size_t>(t)].p = e / e.sum();
  }
  return out;
}

/// Label-id layout of the relation partition and blank. Decoupled from
/// LabelAlphabet so the losses also run on toy label sets.
struct LabelLayout {
  int size = 0;
  int relation_begin = 0;  // 6 relations then NoRel
  int relation_end = 0;
  int blank = 0;

  static LabelLayout of(const LabelAlphabet& a) {
    return {a.size(), a.relation_begin(), a.relation_end(), a.blank_id()};
  }
  bool is_relation(int k) const { return k >= relation_begin && k < relation_end; }
};

/// Relation (incl. NoRel) with the highest probability in one frame.
inline std::pair<Relation, double> best_relation(const FrameDistribution& d, const LabelAlphabet& a) {
  int best = a.relation_begin();
  for (int k = a.relation_begin(); k < a.relation_end(); ++k)
    if (d[k] > d[best]) best = k;
  return {a.relation_of(best), d[best]};
}

}  // namespace srtrec

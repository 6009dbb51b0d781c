#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "srtrec/distribution.hpp"
#include "srtrec/error.hpp"

namespace srtrec::ctc {

inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

inline double log_add(double a, double b) {
  if (a == kLogZero) return b;
  if (b == kLogZero) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

inline double safe_log(double x) { return x > 0 ? std::log(x) : kLogZero; }

struct Result {
  double loss = 0.0;
  Matrix grad;  // d loss / d logits, K x T (distributions assumed to be softmax outputs)
};

/// Minimum number of frames able to carry `target` (repeats need a blank in between).
inline std::size_t min_frames(std::span<const int> target) {
  std::size_t need = target.size();
  for (std::size_t i = 1; i < target.size(); ++i)
    if (target[i] == target[i - 1]) ++need;
  return need;
}

/// May label k be emitted at frame t? Blank is always allowed.
using AlignmentMask = std::function<bool(std::size_t t, int k)>;

/// Negative log-likelihood of `target` summed over every CTC alignment,
/// by the forward-backward recursions in log space. With a mask, only
/// alignments that emit each label on an allowed frame are counted.
inline Result loss(const Distributions& dists, std::span<const int> target, int blank,
                   const AlignmentMask& allowed = {}) {
  const auto T = dists.size();
  if (T == 0) throw Error("CTC over an empty sequence");
  if (min_frames(target) > T)
    throw Error("target too long for T frames (need " + std::to_string(min_frames(target)) + ", have " +
                std::to_string(T) + ")");
  const int K = dists.front().size();
  const std::size_t S = 2 * target.size() + 1;
  std::vector<int> ext(S, blank);
  for (std::size_t u = 0; u < target.size(); ++u) ext[2 * u + 1] = target[u];

  Matrix logp(K, static_cast<Eigen::Index>(T));
  for (std::size_t t = 0; t < T; ++t)
    for (int k = 0; k < K; ++k)
      logp(k, static_cast<Eigen::Index>(t)) =
          (!allowed || k == blank || allowed(t, k)) ? safe_log(dists[t][k]) : kLogZero;

  auto skip_ok = [&](std::size_t s) { return s >= 2 && ext[s] != blank && ext[s] != ext[s - 2]; };

  std::vector<std::vector<double>> alpha(T, std::vector<double>(S, kLogZero));
  std::vector<std::vector<double>> beta(T, std::vector<double>(S, kLogZero));
  alpha[0][0] = logp(ext[0], 0);
  if (S > 1) alpha[0][1] = logp(ext[1], 0);
  for (std::size_t t = 1; t < T; ++t) {
    for (std::size_t s = 0; s < S; ++s) {
      double a = alpha[t - 1][s];
      if (s >= 1) a = log_add(a, alpha[t - 1][s - 1]);
      if (skip_ok(s)) a = log_add(a, alpha[t - 1][s - 2]);
      alpha[t][s] = a == kLogZero ? kLogZero : a + logp(ext[s], static_cast<Eigen::Index>(t));
    }
  }
  beta[T - 1][S - 1] = logp(ext[S - 1], static_cast<Eigen::Index>(T - 1));
  if (S > 1) beta[T - 1][S - 2] = logp(ext[S - 2], static_cast<Eigen::Index>(T - 1));
  for (std::size_t t = T - 1; t-- > 0;) {
    for (std::size_t s = 0; s < S; ++s) {
      double b = beta[t + 1][s];
      if (s + 1 < S) b = log_add(b, beta[t + 1][s + 1]);
      if (s + 2 < S && ext[s + 2] != blank && ext[s + 2] != ext[s]) b = log_add(b, beta[t + 1][s + 2]);
      beta[t][s] = b == kLogZero ? kLogZero : b + logp(ext[s], static_cast<Eigen::Index>(t));
    }
  }

  double log_total = alpha[T - 1][S - 1];
  if (S > 1) log_total = log_add(log_total, alpha[T - 1][S - 2]);
  if (log_total == kLogZero) throw Error("CTC target has zero probability");

  Result r;
  r.loss = -log_total;
  r.grad = Matrix::Zero(K, static_cast<Eigen::Index>(T));
  for (std::size_t t = 0; t < T; ++t) {
    const auto tt = static_cast<Eigen::Index>(t);
    std::vector<double> occupancy(static_cast<std::size_t>(K), kLogZero);
    for (std::size_t s = 0; s < S; ++s) {
      if (alpha[t][s] == kLogZero || beta[t][s] == kLogZero) continue;
      double g = alpha[t][s] + beta[t][s] - logp(ext[s], tt);
      auto& o = occupancy[static_cast<std::size_t>(ext[s])];
      o = log_add(o, g);
    }
    for (int k = 0; k < K; ++k) {
      const double post = occupancy[static_cast<std::size_t>(k)] == kLogZero
                              ? 0.0
                              : std::exp(occupancy[static_cast<std::size_t>(k)] - log_total);
      r.grad(k, tt) = dists[t][k] - post;
    }
  }
  return r;
}

}  // namespace srtrec::ctc

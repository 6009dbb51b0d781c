#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "srtrec/alphabet.hpp"
#include "srtrec/ink.hpp"
#include "srtrec/paths.hpp"

namespace srtrec {

enum class PathRule { PE1, PE2, PE3 };

inline std::string_view rule_name(PathRule r) {
  switch (r) {
    case PathRule::PE1: return "PE1";
    case PathRule::PE2: return "PE2";
    case PathRule::PE3: return "PE3";
  }
  return "?";
}

inline PathRule parse_rule(std::string_view s) {
  if (s == "PE1") return PathRule::PE1;
  if (s == "PE2") return PathRule::PE2;
  if (s == "PE3") return PathRule::PE3;
  throw Error("unknown path rule " + std::string(s));
}

/// A CTC training target: which strokes to feed, in what order, and the
/// alternating symbol/relation labels expected from them.
struct LabeledPath {
  std::string sample_id;
  std::string source;  // file the ink came from, if any
  PathRule rule = PathRule::PE1;
  std::vector<int> stroke_order;
  std::vector<std::string> target;
  std::vector<int> symbol_strokes;  // stroke count of each symbol in the target
  DerivedPath path;  // not serialized

  static LabeledPath from(const InkSample& sample, PathRule rule, DerivedPath p) {
    LabeledPath lp;
    lp.sample_id = sample.source_id;
    lp.rule = rule;
    lp.stroke_order = p.stroke_order();
    lp.target = p.tokens();
    for (const auto& n : p.nodes) lp.symbol_strokes.push_back(static_cast<int>(n.stroke_ids.size()));
    lp.path = std::move(p);
    return lp;
  }
};

namespace detail {

inline const Srt& require_truth(const InkSample& sample) {
  if (!sample.ground_truth || sample.ground_truth->empty())
    throw Error("sample '" + sample.source_id + "' has no ground truth");
  return *sample.ground_truth;
}

}  // namespace detail

/// True when some symbol's strokes are split by another symbol's strokes.
inline bool has_interleaved_symbols(const Srt& tree) {
  for (const auto& n : tree.nodes())
    if (n.stroke_ids.back() - n.stroke_ids.front() + 1 != static_cast<int>(n.stroke_ids.size())) return true;
  return false;
}

inline std::vector<LabeledPath> extract_pe1(const InkSample& sample) {
  std::vector<LabeledPath> out;
  for (auto& p : derived_paths_from_root(detail::require_truth(sample)))
    out.push_back(LabeledPath::from(sample, PathRule::PE1, std::move(p)));
  return out;
}

inline LabeledPath extract_pe2(const InkSample& sample) {
  const Srt& truth = detail::require_truth(sample);
  if (has_interleaved_symbols(truth)) throw Error("non-consecutive symbol in '" + sample.source_id + "'");
  return LabeledPath::from(sample, PathRule::PE2, writing_order_path(truth));
}

/// Random-order paths, minus any that coincide with the writing-order path.
inline std::vector<LabeledPath> extract_pe3(const InkSample& sample, int count, std::uint64_t seed,
                                            ShuffleScope scope = ShuffleScope::RootOnly) {
  const Srt& truth = detail::require_truth(sample);
  std::vector<LabeledPath> out;
  if (count <= 0) return out;
  const DerivedPath writing = writing_order_path(truth);
  for (auto& p : random_root_shuffle_paths(truth, count, seed, scope)) {
    if (p == writing) continue;
    out.push_back(LabeledPath::from(sample, PathRule::PE3, std::move(p)));
  }
  return out;
}

inline std::vector<int> build_ctc_target(const std::vector<std::string>& labels,
                                         const LabelAlphabet& alphabet = crohme_alphabet()) {
  std::vector<int> ids;
  ids.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool want_symbol = i % 2 == 0;
    if (want_symbol) {
      auto id = alphabet.find_symbol(labels[i]);
      if (!id) throw Error("unknown label in target: " + labels[i]);
      ids.push_back(*id);
    } else {
      auto rel = parse_relation(labels[i]);
      if (!rel) throw Error("unknown label in target: " + labels[i]);
      ids.push_back(alphabet.relation_id(*rel));
    }
  }
  return ids;
}

inline std::vector<int> build_ctc_target(const LabeledPath& path, const LabelAlphabet& alphabet = crohme_alphabet()) {
  return build_ctc_target(path.target, alphabet);
}

inline std::vector<std::string> target_labels(const std::vector<int>& ids,
                                              const LabelAlphabet& alphabet = crohme_alphabet()) {
  std::vector<std::string> out;
  for (int id : ids) out.push_back(alphabet.name(id));
  return out;
}

struct ExtractOptions {
  bool pe1 = true;
  bool pe2 = true;
  bool pe3 = true;
  int pe3_count = 4;
  std::uint64_t seed = 1;
  ShuffleScope pe3_scope = ShuffleScope::RootOnly;
};

/// All enabled rules for one sample. Samples with interleaved symbols yield
/// nothing; callers log them.
inline std::vector<LabeledPath> extract_paths(const InkSample& sample, const ExtractOptions& opts) {
  std::vector<LabeledPath> out;
  if (has_interleaved_symbols(detail::require_truth(sample))) return out;
  if (opts.pe1)
    for (auto& p : extract_pe1(sample)) out.push_back(std::move(p));
  if (opts.pe2) out.push_back(extract_pe2(sample));
  if (opts.pe3)
    for (auto& p : extract_pe3(sample, opts.pe3_count, opts.seed, opts.pe3_scope)) out.push_back(std::move(p));
  return out;
}

// Training manifest: one JSON object per line.

inline nlohmann::json to_json(const LabeledPath& p) {
  return {{"v", 1}, {"sample", p.sample_id}, {"source", p.source}, {"rule", rule_name(p.rule)},
          {"stroke_order", p.stroke_order}, {"target", p.target}, {"symbol_strokes", p.symbol_strokes}};
}

inline LabeledPath labeled_path_from_json(const nlohmann::json& j) {
  LabeledPath p;
  p.sample_id = j.at("sample").get<std::string>();
  p.source = j.value("source", std::string());
  p.rule = parse_rule(j.at("rule").get<std::string>());
  p.stroke_order = j.at("stroke_order").get<std::vector<int>>();
  p.target = j.at("target").get<std::vector<std::string>>();
  if (p.target.empty() || p.target.size() % 2 == 0) throw ParseError("target must have odd length");
  p.symbol_strokes = j.value("symbol_strokes", std::vector<int>{});
  if (!p.symbol_strokes.empty()) {
    int total = 0;
    for (int n : p.symbol_strokes) total += n;
    if (p.symbol_strokes.size() != (p.target.size() + 1) / 2 || total != static_cast<int>(p.stroke_order.size()))
      throw ParseError("symbol_strokes does not match target and stroke_order");
  }
  return p;
}

inline void write_manifest(std::ostream& os, const std::vector<LabeledPath>& paths) {
  for (const auto& p : paths) os << to_json(p).dump() << '\n';
}

inline std::vector<LabeledPath> read_manifest(std::istream& in) {
  std::vector<LabeledPath> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(labeled_path_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("bad manifest record: ") + e.what(), line_no);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return out;
}

}  // namespace srtrec

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "srtrec/error.hpp"

namespace srtrec {

/// Spatial relations between symbols. NoRel is only legal inside derived
/// paths and classifier output, never on a tree edge.
enum class Relation : std::uint8_t { Right, Above, Below, Inside, Sup, Sub, NoRel };

inline constexpr std::array<Relation, 6> kTreeRelations = {
    Relation::Right, Relation::Above, Relation::Below,
    Relation::Inside, Relation::Sup, Relation::Sub};

inline constexpr std::string_view relation_name(Relation r) {
  switch (r) {
    case Relation::Right: return "Right";
    case Relation::Above: return "Above";
    case Relation::Below: return "Below";
    case Relation::Inside: return "Inside";
    case Relation::Sup: return "Sup";
    case Relation::Sub: return "Sub";
    case Relation::NoRel: return "NoRel";
  }
  return "?";
}

inline std::optional<Relation> parse_relation(std::string_view s) {
  for (Relation r : kTreeRelations)
    if (relation_name(r) == s) return r;
  if (s == "NoRel") return Relation::NoRel;
  return std::nullopt;
}

/// The 101 CROHME 2014 symbol classes, in canonical id order.
inline const std::vector<std::string>& crohme_symbols() {
  static const std::vector<std::string> symbols = {
      "!", "(", ")", "+", "COMMA", "-", ".", "/", "=", "[", "]", "\\{", "\\}", "|",
      "0", "1", "2", "3", "4", "5", "6", "7", "8", "9",
      "A", "B", "C", "E", "F", "G", "H", "I", "L", "M", "N", "P", "R", "S", "T", "V", "X", "Y",
      "a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k", "l", "m",
      "n", "o", "p", "q", "r", "s", "t", "u", "v", "w", "x", "y", "z",
      "\\Delta", "\\alpha", "\\beta", "\\gamma", "\\lambda", "\\mu", "\\phi", "\\pi",
      "\\sigma", "\\theta",
      "\\cos", "\\sin", "\\tan", "\\log", "\\lim",
      "\\div", "\\times", "\\pm", "\\neq", "\\leq", "\\geq", "\\lt", "\\gt", "\\in",
      "\\exists", "\\forall", "\\infty", "\\int", "\\sum", "\\sqrt", "\\rightarrow",
      "\\ldots", "\\prime"};
  return symbols;
}

/// Output label space of the temporal classifier:
/// [symbols..., Right, Above, Below, Inside, Sup, Sub, NoRel, blank].
class LabelAlphabet {
 public:
  explicit LabelAlphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
      const auto& s = symbols_[i];
      if (parse_relation(s) || s == "blank")
        throw Error("symbol label collides with a reserved label: " + s);
      if (!index_.emplace(s, static_cast<int>(i)).second)
        throw Error("duplicate symbol label: " + s);
    }
  }

  int symbol_count() const { return static_cast<int>(symbols_.size()); }
  int size() const { return symbol_count() + 8; }

  int relation_id(Relation r) const { return symbol_count() + static_cast<int>(r); }
  int norel_id() const { return relation_id(Relation::NoRel); }
  int blank_id() const { return symbol_count() + 7; }

  /// First id of the relation partition (6 relations followed by NoRel).
  int relation_begin() const { return symbol_count(); }
  int relation_end() const { return symbol_count() + 7; }

  bool is_symbol(int id) const { return id >= 0 && id < symbol_count(); }
  bool is_relation(int id) const { return id >= relation_begin() && id < relation_end(); }

  std::optional<int> find_symbol(std::string_view label) const {
    auto it = index_.find(std::string(label));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  int symbol_id(std::string_view label) const {
    if (auto id = find_symbol(label)) return *id;
    throw Error("unknown symbol label: " + std::string(label));
  }

  bool contains_symbol(std::string_view label) const { return find_symbol(label).has_value(); }

  Relation relation_of(int id) const {
    if (!is_relation(id)) throw Error("label id is not a relation: " + std::to_string(id));
    return static_cast<Relation>(id - relation_begin());
  }

  const std::string& symbol(int id) const { return symbols_.at(static_cast<std::size_t>(id)); }
  const std::vector<std::string>& symbols() const { return symbols_; }

  /// Printable name for any label id.
  std::string name(int id) const {
    if (is_symbol(id)) return symbols_[static_cast<std::size_t>(id)];
    if (is_relation(id)) return std::string(relation_name(relation_of(id)));
    if (id == blank_id()) return "blank";
    throw Error("label id out of range: " + std::to_string(id));
  }

  int id_of(std::string_view name) const {
    if (auto r = parse_relation(name)) return relation_id(*r);
    if (name == "blank") return blank_id();
    return symbol_id(name);
  }

  std::vector<std::string> all_names() const {
    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(size()));
    for (int i = 0; i < size(); ++i) out.push_back(name(i));
    return out;
  }

  /// FNV-1a over every label name, in id order. Checkpoints store it so a
  /// model is never paired with a different label layout.
  std::string hash() const {
    std::uint64_t h = 1469598103934665603ull;
    for (const auto& n : all_names()) {
      for (unsigned char c : n) {
        h ^= c;
        h *= 1099511628211ull;
      }
      h ^= 0xff;
      h *= 1099511628211ull;
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
      out[static_cast<std::size_t>(i)] = kHex[h & 0xf];
      h >>= 4;
    }
    return out;
  }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, int> index_;
};

inline const LabelAlphabet& crohme_alphabet() {
  static const LabelAlphabet alphabet(crohme_symbols());
  return alphabet;
}

}  // namespace srtrec

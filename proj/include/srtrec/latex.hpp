#pragma once

#include <cctype>
#include <string>

#include "srtrec/srt.hpp"

namespace srtrec {

namespace detail {

inline bool ends_with_control_word(const std::string& s) {
  std::size_t i = s.size();
  while (i > 0 && std::isalpha(static_cast<unsigned char>(s[i - 1]))) --i;
  return i < s.size() && i > 0 && s[i - 1] == '\\' && (i < 2 || s[i - 2] != '\\');
}

inline void append_token(std::string& out, const std::string& next) {
  if (!next.empty() && ends_with_control_word(out) && std::isalpha(static_cast<unsigned char>(next.front())))
    out += ' ';
  out += next;
}

inline std::string latex_symbol(const std::string& label) {
  if (label == "COMMA") return ",";
  return label;
}

inline bool is_fraction_bar(const std::string& label) { return label == "-" || label == "\\frac"; }

inline std::string render_node(const Srt& tree, NodeId id) {
  const SrtNode& n = tree.node(id);
  auto sub = [&](Relation r) -> std::optional<std::string> {
    if (auto c = tree.child(id, r)) return render_node(tree, *c);
    return std::nullopt;
  };
  std::string out = latex_symbol(n.label);
  if (auto inside = sub(Relation::Inside)) out += "{" + *inside + "}";

  auto above = sub(Relation::Above);
  auto below = sub(Relation::Below);
  if (is_fraction_bar(n.label) && (above || below)) {
    out = "\\frac{" + above.value_or("") + "}{" + below.value_or("") + "}";
  } else {
    if (above) out = "\\overset{" + *above + "}{" + out + "}";
    if (below) out = "\\underset{" + *below + "}{" + out + "}";
  }
  if (auto s = sub(Relation::Sub)) out += "_{" + *s + "}";
  if (auto s = sub(Relation::Sup)) out += "^{" + *s + "}";
  if (auto right = sub(Relation::Right)) append_token(out, *right);
  return out;
}

}  // namespace detail

/// LaTeX rendering: Right concatenates, Sup/Sub become scripts, Inside
/// becomes the radicand, Above/Below on a bar become \frac and on anything
/// else \overset/\underset.
inline std::string to_latex(const Srt& tree) {
  if (tree.empty()) return "";
  return detail::render_node(tree, tree.root());
}

}  // namespace srtrec

#pragma once

#include <cctype>
#include <string>
#include <vector>

#include "srtrec/alphabet.hpp"
#include "srtrec/error.hpp"

namespace srtrec {

/// Label tree without ink: what a LaTeX string describes.
struct ExprNode {
  std::string label;
  std::vector<std::pair<Relation, ExprNode>> children;

  std::size_t size() const {
    std::size_t n = 1;
    for (const auto& [r, c] : children) n += c.size();
    return n;
  }
};

/// Parser for the LaTeX subset that to_latex emits: juxtaposition,
/// ^{} _{}, \frac{}{}, \sqrt{}, \overset{}{}, \underset{}{}, single
/// characters and backslash commands known to the alphabet.
class LatexParser {
 public:
  explicit LatexParser(std::string text, const LabelAlphabet& alphabet = crohme_alphabet())
      : s_(std::move(text)), alphabet_(alphabet) {}

  ExprNode parse() {
    auto nodes = sequence();
    skip_space();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    if (nodes.empty()) fail("empty expression");
    return chain(std::move(nodes));
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("LaTeX at offset " + std::to_string(pos_) + ": " + what);
  }

  void skip_space() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_space();
    return pos_ < s_.size() && s_[pos_] == c;
  }

  void expect(char c) {
    if (!peek(c)) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  static ExprNode chain(std::vector<ExprNode> terms) {
    for (std::size_t i = terms.size() - 1; i > 0; --i) attach_right(terms[i - 1], std::move(terms[i]));
    return std::move(terms.front());
  }

  static void attach_right(ExprNode& term, ExprNode next) { term.children.emplace_back(Relation::Right, std::move(next)); }

  std::vector<ExprNode> sequence() {
    std::vector<ExprNode> out;
    while (true) {
      skip_space();
      if (pos_ >= s_.size() || s_[pos_] == '}') break;
      out.push_back(term());
    }
    return out;
  }

  ExprNode group() {
    expect('{');
    auto nodes = sequence();
    expect('}');
    if (nodes.empty()) fail("empty group");
    return chain(std::move(nodes));
  }

  std::string command() {
    std::size_t start = pos_++;
    if (pos_ < s_.size() && !std::isalpha(static_cast<unsigned char>(s_[pos_]))) return s_.substr(start, ++pos_ - start);
    while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    return s_.substr(start, pos_ - start);
  }

  ExprNode term() {
    skip_space();
    ExprNode base;
    if (s_[pos_] == '\\') {
      std::string cmd = command();
      if (cmd == "\\frac") {
        base.label = "-";
        base.children.emplace_back(Relation::Above, group());
        base.children.emplace_back(Relation::Below, group());
      } else if (cmd == "\\sqrt") {
        base.label = "\\sqrt";
        base.children.emplace_back(Relation::Inside, group());
      } else if (cmd == "\\overset" || cmd == "\\underset") {
        ExprNode over = group();
        ExprNode inner = group();
        if (!inner.children.empty()) fail(cmd + " needs a single-symbol base");
        base = std::move(inner);
        base.children.emplace_back(cmd == "\\overset" ? Relation::Above : Relation::Below, std::move(over));
      } else if (cmd == "\\{" || cmd == "\\}") {
        base.label = cmd;
      } else {
        if (!alphabet_.contains_symbol(cmd)) fail("unknown command " + cmd);
        base.label = cmd;
        if (peek('{') && base.label != "\\sqrt") fail("unexpected group after " + cmd);
      }
    } else if (s_[pos_] == '{') {
      fail("bare group");
    } else {
      char c = s_[pos_++];
      base.label = c == ',' ? "COMMA" : std::string(1, c);
      if (!alphabet_.contains_symbol(base.label)) fail("unknown symbol " + base.label);
    }
    while (peek('^') || peek('_')) {
      const Relation r = s_[pos_] == '^' ? Relation::Sup : Relation::Sub;
      ++pos_;
      skip_space();
      ExprNode script;
      if (peek('{'))
        script = group();
      else
        script = term_no_scripts();
      base.children.emplace_back(r, std::move(script));
    }
    return base;
  }

  ExprNode term_no_scripts() {
    skip_space();
    if (pos_ >= s_.size()) fail("missing script");
    ExprNode n;
    if (s_[pos_] == '\\')
      n.label = command();
    else {
      char c = s_[pos_++];
      n.label = c == ',' ? "COMMA" : std::string(1, c);
    }
    if (!alphabet_.contains_symbol(n.label)) fail("unknown symbol " + n.label);
    return n;
  }

  std::string s_;
  const LabelAlphabet& alphabet_;
  std::size_t pos_ = 0;
};

inline ExprNode parse_latex(const std::string& text, const LabelAlphabet& alphabet = crohme_alphabet()) {
  return LatexParser(text, alphabet).parse();
}

}  // namespace srtrec

#pragma once

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <json.hpp>

#include "srtrec/alphabet.hpp"
#include "srtrec/ink.hpp"
#include "srtrec/lg.hpp"

namespace srtrec {

namespace detail {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

/// InkML truth annotations spell a few classes differently from LG files.
inline std::string canonical_label(std::string label) {
  if (label == ",") return "COMMA";
  if (label == "<") return "\\lt";
  if (label == ">") return "\\gt";
  if (label == "\\{" || label == "{") return "\\{";
  if (label == "\\}" || label == "}") return "\\}";
  return label;
}

inline std::vector<Point> parse_trace_points(const std::string& text, const std::string& id) {
  std::vector<Point> pts;
  std::istringstream in(text);
  std::string chunk;
  while (std::getline(in, chunk, ',')) {
    std::istringstream coords(chunk);
    double x = 0, y = 0;
    if (!(coords >> x)) {
      if (chunk.find_first_not_of(" \t\r\n") == std::string::npos) continue;
      throw ParseError("bad point '" + chunk + "' in trace " + id);
    }
    if (!(coords >> y)) throw ParseError("point without y coordinate in trace " + id);
    pts.push_back({x, y});
  }
  return pts;
}

struct TraceGroupSymbol {
  std::string label;
  std::vector<std::string> trace_refs;
};

inline void collect_trace_groups(const boost::property_tree::ptree& node, std::vector<TraceGroupSymbol>& out) {
  for (const auto& [name, child] : node) {
    if (name != "traceGroup") continue;
    TraceGroupSymbol sym;
    bool has_views = false;
    for (const auto& [cname, c] : child) {
      if (cname == "annotation" && c.get("<xmlattr>.type", "") == "truth") sym.label = c.get_value<std::string>();
      if (cname == "traceView") {
        has_views = true;
        sym.trace_refs.push_back(c.get("<xmlattr>.traceDataRef", ""));
      }
    }
    if (has_views && !sym.label.empty()) out.push_back(std::move(sym));
    collect_trace_groups(child, out);
  }
}

}  // namespace detail

/// CROHME InkML subset: trace, traceGroup, annotation. Timestamps are
/// ignored and writing order is document order. `lg_text`, when given,
/// supplies the ground-truth tree (stroke ids there are trace ids).
inline InkSample parse_inkml(const std::string& bytes, const std::string& source_id = {},
                             const std::optional<std::string>& lg_text = std::nullopt,
                             const LabelAlphabet& alphabet = crohme_alphabet()) {
  namespace pt = boost::property_tree;
  pt::ptree doc;
  try {
    std::istringstream in(bytes);
    pt::read_xml(in, doc, pt::xml_parser::trim_whitespace);
  } catch (const pt::xml_parser_error& e) {
    throw ParseError("malformed InkML: " + std::string(e.message()), e.line());
  }
  auto ink = doc.get_child_optional("ink");
  if (!ink) throw ParseError("InkML has no <ink> root");

  InkSample sample;
  sample.source_id = source_id;
  std::map<std::string, int> trace_index;
  for (const auto& [name, node] : *ink) {
    if (name != "trace") continue;
    std::string id = node.get("<xmlattr>.id", node.get("<xmlattr>.xml:id", std::to_string(sample.strokes.size())));
    Stroke s;
    s.id = static_cast<int>(sample.strokes.size());
    s.points = detail::parse_trace_points(node.get_value<std::string>(), id);
    if (s.points.empty()) throw ParseError("trace " + id + " has no points");
    trace_index[id] = s.id;
    sample.strokes.push_back(std::move(s));
  }
  if (sample.strokes.empty()) throw ParseError("InkML has no trace data");

  std::vector<detail::TraceGroupSymbol> symbols;
  detail::collect_trace_groups(*ink, symbols);
  std::vector<std::string> unknown;
  for (auto& sym : symbols) {
    sym.label = detail::canonical_label(sym.label);
    if (!alphabet.contains_symbol(sym.label)) unknown.push_back(sym.label);
  }
  auto map_trace = [&](const std::string& ref) {
    auto it = trace_index.find(ref);
    if (it == trace_index.end()) throw ParseError("reference to unknown trace " + ref);
    return it->second;
  };

  if (lg_text) {
    LgDocument lg = LgDocument::parse(*lg_text);
    for (auto& o : lg.objects) {
      o.label = detail::canonical_label(o.label);
      if (!alphabet.contains_symbol(o.label)) unknown.push_back(o.label);
      for (int& s : o.strokes) s = map_trace(std::to_string(s));
    }
    if (!unknown.empty()) {
      std::string list;
      for (const auto& u : unknown) list += (list.empty() ? "" : ", ") + u;
      throw ParseError("unknown symbol label(s): " + list);
    }
    sample.ground_truth = with_bboxes(from_lg(lg), sample);
  } else {
    if (!unknown.empty()) {
      std::string list;
      for (const auto& u : unknown) list += (list.empty() ? "" : ", ") + u;
      throw ParseError("unknown symbol label(s): " + list);
    }
    if (symbols.size() == 1) {
      StrokeSet strokes;
      for (const auto& ref : symbols.front().trace_refs) strokes.push_back(map_trace(ref));
      std::sort(strokes.begin(), strokes.end());
      sample.ground_truth = with_bboxes(Srt::leaf({0, symbols.front().label, strokes, {}}), sample);
    }
  }
  return sample;
}

/// Writes the strokes (and, with ground truth, the symbol trace groups).
inline std::string write_inkml(const InkSample& sample) {
  auto escape = [](const std::string& s) {
    std::string out;
    for (char c : s) {
      if (c == '<') out += "&lt;";
      else if (c == '>') out += "&gt;";
      else if (c == '&') out += "&amp;";
      else out += c;
    }
    return out;
  };
  std::ostringstream os;
  os.precision(17);
  os << "<ink xmlns=\"http://www.w3.org/2003/InkML\">\n";
  os << "<annotation type=\"UI\">" << escape(sample.source_id) << "</annotation>\n";
  for (const auto& s : sample.strokes) {
    os << "<trace id=\"" << s.id << "\">";
    for (std::size_t i = 0; i < s.points.size(); ++i) os << (i ? ", " : "") << s.points[i].x << ' ' << s.points[i].y;
    os << "</trace>\n";
  }
  if (sample.ground_truth) {
    os << "<traceGroup xml:id=\"g\">\n<annotation type=\"truth\">Segmentation</annotation>\n";
    for (const auto& n : sample.ground_truth->nodes()) {
      os << "<traceGroup xml:id=\"g" << n.id << "\">\n<annotation type=\"truth\">"
         << escape(n.label == "COMMA" ? "," : n.label) << "</annotation>\n";
      for (int s : n.stroke_ids) os << "<traceView traceDataRef=\"" << s << "\"/>\n";
      os << "</traceGroup>\n";
    }
    os << "</traceGroup>\n";
  }
  os << "</ink>\n";
  return os.str();
}

/// {"strokes": [[[x, y], ...], ...]}
inline InkSample parse_stroke_json(const nlohmann::json& body, const std::string& source_id = {}) {
  if (!body.is_object() || !body.contains("strokes") || !body["strokes"].is_array())
    throw ParseError("expected an object with a \"strokes\" array");
  InkSample sample;
  sample.source_id = source_id;
  for (const auto& st : body["strokes"]) {
    if (!st.is_array()) throw ParseError("stroke must be an array of points");
    Stroke s;
    s.id = static_cast<int>(sample.strokes.size());
    for (const auto& p : st) {
      if (!p.is_array() || p.size() < 2 || !p[0].is_number() || !p[1].is_number())
        throw ParseError("point must be [x, y]");
      s.points.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    if (s.points.empty()) throw ParseError("stroke " + std::to_string(s.id) + " has no points");
    sample.strokes.push_back(std::move(s));
  }
  sample.validate();
  return sample;
}

inline nlohmann::json to_stroke_json(const InkSample& sample) {
  nlohmann::json strokes = nlohmann::json::array();
  for (const auto& s : sample.strokes) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : s.points) pts.push_back({p.x, p.y});
    strokes.push_back(pts);
  }
  return {{"v", 1}, {"strokes", strokes}};
}

/// Loads an .inkml file (with its sibling .lg when present) or a raw-strokes
/// .json file.
inline InkSample load_sample(const std::filesystem::path& path) {
  const std::string text = detail::read_file(path);
  const std::string id = path.stem().string();
  if (path.extension() == ".json") {
    try {
      return parse_stroke_json(nlohmann::json::parse(text), id);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("bad stroke JSON: ") + e.what());
    }
  }
  auto lg_path = path;
  lg_path.replace_extension(".lg");
  std::optional<std::string> lg;
  if (std::filesystem::exists(lg_path)) lg = detail::read_file(lg_path);
  return parse_inkml(text, id, lg);
}

}  // namespace srtrec

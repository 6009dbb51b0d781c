#pragma once

#include <string>
#include <utility>

#include <httplib.h>
#include <json.hpp>

#include "srtrec/inkml.hpp"
#include "srtrec/latex.hpp"
#include "srtrec/srt_json.hpp"
#include "srtrec/tree_build.hpp"

namespace srtrec {

inline nlohmann::json oned_to_json(const OneDSrt& oned) {
  nlohmann::json symbols = nlohmann::json::array();
  for (const auto& s : oned.symbols)
    symbols.push_back({{"label", s.label}, {"strokes", s.stroke_ids}, {"bbox", bbox_to_json(s.bbox)}});
  nlohmann::json rels = nlohmann::json::array();
  for (Relation r : oned.relations) rels.push_back(std::string(relation_name(r)));
  return {{"symbols", symbols}, {"relations", rels}, {"tokens", oned.tokens()}};
}

/// RecognitionResult. Boxes are reported in the coordinates of `original`.
inline nlohmann::json recognition_to_json(const Recognition& r, const InkSample& original) {
  const Srt tree = with_bboxes(r.tree, original);
  OneDSrt oned = r.oned;
  for (auto& s : oned.symbols) s.bbox = original.bbox_of(s.stroke_ids);
  nlohmann::json dropped = nlohmann::json::array();
  for (const auto& d : r.dropped) {
    const Srt t = with_bboxes(d, original);
    dropped.push_back({{"latex", to_latex(t)}, {"srt", to_json(t)}});
  }
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& c : r.trace)
    trace.push_back({{"source", c.source},
                     {"target", c.target},
                     {"mode", c.mode},
                     {"node", c.node},
                     {"node_label", c.node_label},
                     {"relation", std::string(relation_name(c.relation))},
                     {"probability", c.probability},
                     {"accepted", c.accepted}});
  return {{"v", kJsonVersion}, {"latex", to_latex(tree)},      {"srt", to_json(tree)},
          {"oned", oned_to_json(oned)}, {"dropped_fragments", dropped}, {"timing_ms", r.timing_ms},
          {"connections", trace}};
}

inline nlohmann::json alphabet_to_json(const LabelAlphabet& a) {
  nlohmann::json rels = nlohmann::json::array();
  for (int k = a.relation_begin(); k < a.relation_end(); ++k) rels.push_back(a.name(k));
  return {{"v", kJsonVersion},
          {"alphabet_hash", a.hash()},
          {"labels", a.all_names()},
          {"symbols", a.symbols()},
          {"relations", rels},
          {"blank", a.name(a.blank_id())}};
}

struct HttpReply {
  int status = 200;
  nlohmann::json body;
};

inline HttpReply error_reply(int status, const std::string& message) {
  return {status, {{"v", kJsonVersion}, {"error", message}}};
}

/// POST /recognize without the transport: 400 on a malformed body, 422 on
/// zero strokes.
template <FrameClassifier C>
HttpReply handle_recognize(const C& classifier, const std::string& body, const RecognizerOptions& opts = {},
                           const LabelAlphabet& alphabet = crohme_alphabet()) {
  InkSample sample;
  try {
    sample = parse_stroke_json(nlohmann::json::parse(body), "request");
  } catch (const nlohmann::json::exception& e) {
    return error_reply(400, std::string("malformed JSON: ") + e.what());
  } catch (const Error& e) {
    return error_reply(400, e.what());
  }
  if (sample.strokes.empty()) return error_reply(422, "no strokes to recognize");
  try {
    return {200, recognition_to_json(recognize(classifier, sample, opts, alphabet), sample)};
  } catch (const Error& e) {
    return error_reply(500, e.what());
  }
}

/// HTTP front end. The classifier is shared read-only across worker threads.
template <FrameClassifier C>
class RecognitionService {
 public:
  RecognitionService(C classifier, RecognizerOptions opts = {}, const LabelAlphabet& alphabet = crohme_alphabet(),
                     std::string cors_origin = "*")
      : classifier_(std::move(classifier)), opts_(opts), alphabet_(alphabet) {
    server_.set_default_headers({{"Access-Control-Allow-Origin", cors_origin},
                                 {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                                 {"Access-Control-Allow-Headers", "Content-Type"}});
    server_.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    server_.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
      send(res, {200, {{"v", kJsonVersion}, {"status", "ok"}, {"alphabet_hash", alphabet_.hash()}}});
    });
    server_.Get("/alphabet", [this](const httplib::Request&, httplib::Response& res) {
      send(res, {200, alphabet_to_json(alphabet_)});
    });
    server_.Post("/recognize", [this](const httplib::Request& req, httplib::Response& res) {
      send(res, handle_recognize(classifier_, req.body, opts_, alphabet_));
    });
  }

  /// Binds; port 0 picks a free port. Returns the bound port or -1.
  int bind(const std::string& host, int port) {
    if (port == 0) return server_.bind_to_any_port(host);
    return server_.bind_to_port(host, port) ? port : -1;
  }

  bool listen() { return server_.listen_after_bind(); }
  void stop() { server_.stop(); }
  void wait_until_ready() { server_.wait_until_ready(); }

 private:
  static void send(httplib::Response& res, const HttpReply& reply) {
    res.status = reply.status;
    res.set_content(reply.body.dump(), "application/json");
  }

  C classifier_;
  RecognizerOptions opts_;
  const LabelAlphabet& alphabet_;
  httplib::Server server_;
};

}  // namespace srtrec

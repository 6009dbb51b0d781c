#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "srtrec/blstm.hpp"

namespace srtrec {

class CheckpointError : public Error {
 public:
  using Error::Error;
};

/// Everything needed to rebuild a recognizer: weights plus the input
/// pipeline settings they were trained with.
struct Checkpoint {
  ModelHyper hyper;
  Vector weights;
  std::string alphabet_hash;
  double spacing = 0.05;
  OffStrokeFeature off_stroke = OffStrokeFeature::Delta;

  static Checkpoint of(const BlstmModel& model, const LabelAlphabet& alphabet, double spacing = 0.05,
                       OffStrokeFeature off = OffStrokeFeature::Delta) {
    return {model.hyper(), model.parameters(), alphabet.hash(), spacing, off};
  }

  BlstmModel model() const {
    BlstmModel m(hyper);
    m.set_parameters(weights);
    return m;
  }

  nlohmann::json to_json() const {
    return {{"v", 1},
            {"format", "srtrec-checkpoint"},
            {"alphabet_hash", alphabet_hash},
            {"hyper",
             {{"layers", hyper.layers},
              {"hidden", hyper.hidden},
              {"input_dim", hyper.input_dim},
              {"output_dim", hyper.output_dim},
              {"input_scale", hyper.input_scale},
              {"seed", hyper.seed}}},
            {"spacing", spacing},
            {"off_stroke", off_stroke == OffStrokeFeature::Delta ? "delta" : "midpoint"},
            {"weights", std::vector<double>(weights.data(), weights.data() + weights.size())}};
  }

  static Checkpoint from_json(const nlohmann::json& j) {
    try {
      if (j.at("format").get<std::string>() != "srtrec-checkpoint") throw CheckpointError("not a checkpoint file");
      if (j.at("v").get<int>() != 1) throw CheckpointError("unsupported checkpoint version");
      Checkpoint c;
      const auto& h = j.at("hyper");
      c.hyper.layers = h.at("layers").get<int>();
      c.hyper.hidden = h.at("hidden").get<int>();
      c.hyper.input_dim = h.at("input_dim").get<int>();
      c.hyper.output_dim = h.at("output_dim").get<int>();
      c.hyper.input_scale = h.at("input_scale").get<double>();
      c.hyper.seed = h.at("seed").get<std::uint64_t>();
      c.alphabet_hash = j.at("alphabet_hash").get<std::string>();
      c.spacing = j.at("spacing").get<double>();
      c.off_stroke = j.at("off_stroke").get<std::string>() == "midpoint" ? OffStrokeFeature::Midpoint
                                                                          : OffStrokeFeature::Delta;
      auto w = j.at("weights").get<std::vector<double>>();
      c.weights = Eigen::Map<Vector>(w.data(), static_cast<Eigen::Index>(w.size()));
      BlstmModel probe(c.hyper);
      if (probe.parameter_count() != c.weights.size())
        throw CheckpointError("weight count does not match the stored dimensions");
      if (!c.weights.allFinite()) throw CheckpointError("checkpoint holds non-finite weights");
      return c;
    } catch (const nlohmann::json::exception& e) {
      throw CheckpointError(std::string("corrupted checkpoint: ") + e.what());
    } catch (const CheckpointError&) {
      throw;
    } catch (const Error& e) {
      throw CheckpointError(std::string("corrupted checkpoint: ") + e.what());
    }
  }

  /// Refuses a checkpoint trained against a different label layout.
  void require_alphabet(const LabelAlphabet& alphabet) const {
    if (alphabet_hash != alphabet.hash())
      throw CheckpointError("alphabet hash mismatch: checkpoint " + alphabet_hash + ", build " + alphabet.hash());
    if (hyper.output_dim != alphabet.size()) throw CheckpointError("checkpoint output size does not match the alphabet");
  }

  void save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << to_json().dump() << '\n';
    if (!out) throw Error("failed writing " + path.string());
  }

  static Checkpoint load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("cannot read " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(os.str());
    } catch (const nlohmann::json::exception& e) {
      throw CheckpointError(std::string("corrupted checkpoint: ") + e.what());
    }
    return from_json(j);
  }
};

}  // namespace srtrec

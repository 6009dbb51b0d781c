// srtrec: path extraction, training, recognition, evaluation and the HTTP service.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "srtrec.hpp"

namespace fs = std::filesystem;
using namespace srtrec;

namespace {

struct UsageError : Error {
  using Error::Error;
};

/// Ink files of a directory, sorted by name.
std::vector<fs::path> ink_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw UsageError("not a directory: " + dir.string());
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto ext = e.path().extension();
    if (e.is_regular_file() && (ext == ".inkml" || ext == ".json")) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error("cannot write " + path.string());
}

// extract-paths

struct ExtractArgs {
  std::string dir, out;
  std::vector<std::string> rules{"PE1", "PE2", "PE3"};
  int pe3_count = 4;
  std::uint64_t seed = 1;
  std::string scope = "root";
};

int cmd_extract(const ExtractArgs& a) {
  ExtractOptions opts;
  opts.pe1 = opts.pe2 = opts.pe3 = false;
  for (const auto& r : a.rules) {
    switch (parse_rule(r)) {
      case PathRule::PE1: opts.pe1 = true; break;
      case PathRule::PE2: opts.pe2 = true; break;
      case PathRule::PE3: opts.pe3 = true; break;
    }
  }
  opts.pe3_count = a.pe3_count;
  opts.seed = a.seed;
  opts.pe3_scope = a.scope == "all" ? ShuffleScope::AllNodes : ShuffleScope::RootOnly;

  std::vector<LabeledPath> paths;
  std::map<std::string, int> per_rule;
  int samples = 0, skipped = 0, interleaved = 0;
  for (const auto& file : ink_files(a.dir)) {
    try {
      InkSample s = load_sample(file);
      if (!s.ground_truth || s.ground_truth->empty()) throw Error("no ground truth");
      auto got = extract_paths(s, opts);
      if (got.empty()) {
        ++interleaved;
        std::cerr << "warning: " << file.string() << ": symbols are not written consecutively, skipped\n";
        continue;
      }
      ++samples;
      for (auto& p : got) {
        p.source = file.string();
        ++per_rule[std::string(rule_name(p.rule))];
        paths.push_back(std::move(p));
      }
    } catch (const Error& e) {
      ++skipped;
      std::cerr << "warning: " << file.string() << ": " << e.what() << ", skipped\n";
    }
  }
  std::ostringstream os;
  write_manifest(os, paths);
  write_text(a.out, os.str());
  std::cerr << "samples " << samples << ", paths " << paths.size();
  for (const auto& [rule, n] : per_rule) std::cerr << ", " << rule << " " << n;
  std::cerr << ", unreadable " << skipped << ", interleaved " << interleaved << "\n";
  return 0;
}

// train

struct TrainArgs {
  std::string manifest, config, out, metrics;
  std::vector<std::string> overrides;
  bool verbose = false;
};

TrainConfig load_config(const std::string& file, const std::vector<std::string>& overrides) {
  Config c;
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in) throw UsageError("cannot read config " + file);
    std::ostringstream os;
    os << in.rdbuf();
    c = Config::parse(os.str());
  }
  for (const auto& kv : overrides) c.assign(kv);
  return TrainConfig::from(c);
}

int cmd_train(const TrainArgs& a) {
  const TrainConfig cfg = load_config(a.config, a.overrides);
  std::ifstream in(a.manifest);
  if (!in) throw UsageError("cannot read manifest " + a.manifest);
  const auto paths = read_manifest(in);
  const fs::path base = fs::path(a.manifest).parent_path();

  std::map<std::string, InkSample> samples;
  std::vector<TrainingExample> examples;
  const NormalizeOptions norm;
  for (const auto& p : paths) {
    if (p.source.empty()) throw Error("manifest record for '" + p.sample_id + "' has no source file");
    fs::path src = p.source;
    if (src.is_relative() && !fs::exists(src)) src = base / src;
    auto it = samples.find(src.string());
    if (it == samples.end()) it = samples.emplace(src.string(), normalize(load_sample(src), norm)).first;
    examples.push_back(make_example(it->second, p, cfg));
  }
  if (examples.empty() && cfg.epochs > 0) throw UsageError("manifest holds no paths");

  std::ostringstream metrics;
  metrics << "epoch,ctc,ce,total,val_total\n";
  metrics.precision(10);
  BlstmModel model = train(std::move(examples), cfg, LabelLayout::of(crohme_alphabet()), [&](const EpochStats& st) {
    metrics << st.epoch << ',' << st.ctc << ',' << st.ce << ',' << st.total << ',' << st.val_total << '\n';
    if (a.verbose || st.epoch == 1 || st.epoch == cfg.epochs)
      std::cerr << "epoch " << st.epoch << " loss " << st.total << " (ctc " << st.ctc << ", ce " << st.ce
                << ", val " << st.val_total << ")\n";
  });
  Checkpoint::of(model, crohme_alphabet(), norm.spacing).save(a.out);
  const std::string metrics_path = a.metrics.empty() ? a.out + ".metrics.csv" : a.metrics;
  write_text(metrics_path, metrics.str());
  std::cerr << "wrote " << a.out << " and " << metrics_path << "\n";
  return 0;
}

// recognize / eval / serve

Checkpoint load_checkpoint(const std::string& path) {
  Checkpoint c = Checkpoint::load(path);
  c.require_alphabet(crohme_alphabet());
  return c;
}

RecognizerOptions options_for(const Checkpoint& c) {
  RecognizerOptions o;
  o.normalize.spacing = c.spacing;
  o.off_stroke = c.off_stroke;
  return o;
}

InkSample read_input(const std::string& path, const std::string& format) {
  std::string fmt = format;
  if (fmt.empty()) fmt = fs::path(path).extension() == ".json" ? "json" : "inkml";
  if (fmt == "json") {
    try {
      return parse_stroke_json(nlohmann::json::parse(detail::read_file(path)), fs::path(path).stem().string());
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("bad stroke JSON: ") + e.what());
    }
  }
  if (fmt != "inkml") throw UsageError("unknown format " + fmt);
  return load_sample(path);
}

struct RecognizeArgs {
  std::string checkpoint, input, format;
  bool oracle = false;
};

int cmd_recognize(const RecognizeArgs& a) {
  if (!a.oracle && a.checkpoint.empty()) throw UsageError("--checkpoint is required without --oracle");
  std::optional<Checkpoint> ckpt;
  if (!a.oracle) ckpt = load_checkpoint(a.checkpoint);
  const InkSample sample = read_input(a.input, a.format);
  if (sample.strokes.empty()) throw Error("no strokes to recognize");
  nlohmann::json result;
  if (a.oracle) {
    if (!sample.ground_truth || sample.ground_truth->empty()) throw UsageError("--oracle needs ground truth");
    result = recognition_to_json(recognize(OracleClassifier(*sample.ground_truth), sample), sample);
  } else {
    result = recognition_to_json(recognize(ckpt->model(), sample, options_for(*ckpt)), sample);
  }
  std::cout << result.dump(2) << std::endl;
  return 0;
}

struct EvalArgs {
  std::string checkpoint, dir, report;
  bool oracle = false;
};

int cmd_eval(const EvalArgs& a) {
  if (!a.oracle && a.checkpoint.empty()) throw UsageError("--checkpoint is required without --oracle");
  std::optional<Checkpoint> ckpt;
  std::optional<BlstmModel> model;
  if (!a.oracle) {
    ckpt = load_checkpoint(a.checkpoint);
    model = ckpt->model();
  }
  std::vector<TreePair> pairs;
  std::size_t excluded = 0, dropped = 0, unreadable = 0;
  for (const auto& file : ink_files(a.dir)) {
    InkSample s;
    try {
      s = load_sample(file);
    } catch (const Error& e) {
      ++unreadable;
      std::cerr << "warning: " << file.string() << ": " << e.what() << ", skipped\n";
      continue;
    }
    if (!s.ground_truth || s.ground_truth->empty()) {
      ++excluded;
      continue;
    }
    Recognition r = a.oracle ? recognize(OracleClassifier(*s.ground_truth), s)
                             : recognize(*model, s, options_for(*ckpt));
    dropped += r.dropped.size();
    pairs.emplace_back(std::move(r.tree), *s.ground_truth);
  }
  EvalReport rep = EvalReport::build(pairs, excluded + unreadable);
  rep.dropped_fragments = dropped;

  const fs::path report = a.report;
  const fs::path stem = report.parent_path() / report.stem();
  write_text(report, rep.to_json().dump(2) + "\n");
  write_text(stem.string() + ".txt", rep.text());
  write_text(stem.string() + "_nodes.csv", EvalReport::csv(rep.confusions.nodes));
  write_text(stem.string() + "_edges.csv", EvalReport::csv(rep.confusions.edges));
  write_text(stem.string() + "_edge_matrix.csv", rep.edge_matrix_csv());
  std::cout << rep.text();
  return 0;
}

struct ServeArgs {
  std::string checkpoint, host = "127.0.0.1", cors = "*";
  int port = 8080;
};

int cmd_serve(const ServeArgs& a) {
  const Checkpoint ckpt = load_checkpoint(a.checkpoint);
  RecognitionService service(ckpt.model(), options_for(ckpt), crohme_alphabet(), a.cors);
  const int port = service.bind(a.host, a.port);
  if (port < 0) throw Error("cannot bind " + a.host + ":" + std::to_string(a.port));
  std::cout << "listening on http://" << a.host << ":" << port << std::endl;
  return service.listen() ? 0 : 1;
}

// synth

struct SynthArgs {
  std::string out;
  std::uint64_t seed = 1;
  int copies = 1;
};

int cmd_synth(const SynthArgs& a) {
  fs::create_directories(a.out);
  int n = 0;
  for (int c = 0; c < a.copies; ++c) {
    for (std::size_t i = 0; i < synth::desk_corpus().size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "desk_%02d_%02zu", c, i);
      const InkSample s = synth::render(synth::desk_corpus()[i], a.seed + 1000 * c + i, name);
      write_text(fs::path(a.out) / (std::string(name) + ".inkml"), write_inkml(s));
      write_text(fs::path(a.out) / (std::string(name) + ".lg"), to_lg(*s.ground_truth).str());
      ++n;
    }
  }
  std::cerr << "wrote " << n << " samples to " << a.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online handwritten math expression recognition with symbol relation trees"};
  app.require_subcommand(1);

  ExtractArgs ex;
  auto* e = app.add_subcommand("extract-paths", "Derive labeled training paths from InkML + LG files");
  e->add_option("dir", ex.dir, "Directory of .inkml (+ .lg) files")->required();
  e->add_option("-o,--out", ex.out, "Manifest to write (JSON lines)")->required();
  e->add_option("--rules", ex.rules, "Path rules to apply")->delimiter(',')->check(CLI::IsMember({"PE1", "PE2", "PE3"}));
  e->add_option("--pe3-count", ex.pe3_count, "Random paths per sample for PE3")->check(CLI::NonNegativeNumber);
  e->add_option("--seed", ex.seed, "Seed for PE3 shuffles");
  e->add_option("--pe3-scope", ex.scope, "Shuffle children of the root only, or of every node")
      ->check(CLI::IsMember({"root", "all"}));

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "Train the frame classifier");
  t->add_option("manifest", tr.manifest, "Manifest from extract-paths")->required();
  t->add_option("-c,--config", tr.config, "key = value config file");
  t->add_option("--set", tr.overrides, "Override one config key (key=value)");
  t->add_option("-o,--out", tr.out, "Checkpoint to write")->required();
  t->add_option("--metrics", tr.metrics, "Per-epoch loss CSV (default: <out>.metrics.csv)");
  t->add_flag("-v,--verbose", tr.verbose, "Log every epoch");

  RecognizeArgs rc;
  auto* r = app.add_subcommand("recognize", "Recognize one expression and print the result JSON");
  r->add_option("input", rc.input, "Ink file")->required();
  r->add_option("-m,--checkpoint", rc.checkpoint, "Trained checkpoint");
  r->add_option("-f,--format", rc.format, "Input format (default: from the extension)")
      ->check(CLI::IsMember({"inkml", "json"}));
  r->add_flag("--oracle", rc.oracle, "Classify frames from the file's ground truth");

  EvalArgs ev;
  auto* v = app.add_subcommand("eval", "Score a test directory");
  v->add_option("dir", ev.dir, "Directory of .inkml (+ .lg) files")->required();
  v->add_option("-m,--checkpoint", ev.checkpoint, "Trained checkpoint");
  v->add_option("-o,--report", ev.report, "Report JSON; tables and CSVs are written next to it")->required();
  v->add_flag("--oracle", ev.oracle, "Classify frames from each file's ground truth");

  ServeArgs sv;
  auto* s = app.add_subcommand("serve", "Run the HTTP recognition service");
  s->add_option("-m,--checkpoint", sv.checkpoint, "Trained checkpoint")->required();
  s->add_option("--host", sv.host, "Bind address");
  s->add_option("-p,--port", sv.port, "Port (0 picks a free one)");
  s->add_option("--cors-origin", sv.cors, "Value of Access-Control-Allow-Origin");

  SynthArgs sy;
  auto* y = app.add_subcommand("synth", "Write the synthetic desk corpus as InkML + LG");
  y->add_option("-o,--out", sy.out, "Output directory")->required();
  y->add_option("--seed", sy.seed, "Rendering seed");
  y->add_option("--copies", sy.copies, "Renderings per expression")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*e) return cmd_extract(ex);
    if (*t) return cmd_train(tr);
    if (*r) return cmd_recognize(rc);
    if (*v) return cmd_eval(ev);
    if (*s) return cmd_serve(sv);
    if (*y) return cmd_synth(sy);
  } catch (const UsageError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}

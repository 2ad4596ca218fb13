#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "genremap/cli.hpp"
#include "genremap/config.hpp"
#include "genremap/corpus.hpp"
#include "genremap/ensemble.hpp"
#include "genremap/error.hpp"
#include "genremap/eval.hpp"
#include "genremap/features.hpp"
#include "genremap/model_io.hpp"
#include "genremap/parallel.hpp"
#include "genremap/rng.hpp"
#include "genremap/segment.hpp"
#include "genremap/sequence.hpp"
#include "genremap/synth.hpp"

namespace genremap {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fixed(double x, int digits = 4) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

// Flags shared by every subcommand, plus the per-subcommand ones. Optional
// values stay unset unless given on the command line.
struct Flags {
  std::string corpus, taxonomy, config, out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;

  // simulate
  std::string spec, preset, out = "corpus.jsonl";
  // build-vocab, select-features, train, mine-correlations
  std::optional<std::size_t> size, candidates, k_per_side;
  std::optional<std::string> positive, classifier;
  std::string level = "page";
  std::string slices;
  // predict, agreement, smooth, segment
  std::string model, model_a, model_b, bank, hmm, decoded;
  // evaluate
  std::optional<std::size_t> k;
  // mine-correlations
  std::string target;
  std::string target_column = "probability";
  // trend
  std::string predictions;
  std::string column = "probability";
  std::optional<int> bin;
};

class Context {
 public:
  Context(const Flags& f, std::ostream& out) : flags(f), out_(out) {
    if (!f.config.empty()) config = load_config(f.config);
    if (!f.taxonomy.empty()) config.taxonomy = f.taxonomy;
    if (f.seed) config.seed = *f.seed;
    if (f.jobs) config.jobs = *f.jobs;
    if (config.jobs < 1) throw UsageError("--jobs must be at least 1");
    out_dir = f.out_dir;
  }

  const GenreTaxonomy& taxonomy() {
    if (!taxonomy_) {
      taxonomy_ = config.taxonomy.empty() ? GenreTaxonomy::default_taxonomy()
                                          : GenreTaxonomy::from_file(config.taxonomy);
    }
    return *taxonomy_;
  }

  const Tokenizer& tokenizer() {
    if (!tokenizer_) {
      tokenizer_ = config.names_lexicon.empty() ? Tokenizer()
                                                : Tokenizer::from_lexicon_file(config.names_lexicon);
    }
    return *tokenizer_;
  }

  std::vector<Volume> corpus() {
    if (flags.corpus.empty()) throw UsageError("--corpus is required");
    auto volumes = load_volumes(flags.corpus, taxonomy(), tokenizer());
    if (volumes.empty()) throw Error("corpus has no volumes: " + flags.corpus);
    return volumes;
  }

  fs::path output(const std::string& name) {
    fs::path p(name);
    if (p.is_relative()) p = out_dir / p;
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    return p;
  }

  void write(const std::string& name, const std::string& text) { write_text_file(output(name), text); }

  void summary(const std::string& line) { out_ << line << '\n'; }

  VolumeClassifierOptions volume_options() const {
    VolumeClassifierOptions o;
    o.candidates = flags.candidates.value_or(config.candidates);
    o.k_per_side = flags.k_per_side.value_or(config.k_per_side);
    o.kind = parse_classifier_kind(flags.classifier.value_or(config.volume_classifier));
    o.alpha = config.alpha;
    o.lambda = config.lambda;
    o.seed = config.seed;
    return o;
  }

  BankOptions bank_options() const {
    BankOptions o;
    o.kind = parse_classifier_kind(flags.classifier.value_or(config.classifier));
    o.lambda = config.lambda;
    o.alpha = config.alpha;
    o.seed = config.seed;
    o.jobs = config.jobs;
    return o;
  }

  LineRuleParams line_params() const {
    LineRuleParams p;
    p.max_chars = config.line_max_chars;
    p.window = config.line_window;
    p.last_year = config.verse_last_year;
    return p;
  }

  GenreId positive() const { return flags.positive.value_or(config.positive); }

  const Flags& flags;
  RunConfig config;
  fs::path out_dir;

 private:
  std::ostream& out_;
  std::optional<GenreTaxonomy> taxonomy_;
  std::optional<Tokenizer> tokenizer_;
};

std::vector<GenreId> binary_labels(const std::vector<Volume>& volumes, const GenreId& positive) {
  std::vector<GenreId> labels;
  for (const auto& v : volumes) {
    if (!v.gold_labels) throw Error("volume " + v.volume_id + " has no gold labels");
    labels.push_back(majority_label(v) == positive ? positive : "~" + positive);
  }
  return labels;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// Reads the named columns of a CSV with a header row.
std::vector<std::vector<std::string>> read_csv_columns(const std::string& path,
                                                       const std::vector<std::string>& names) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw Error(path + ": empty file");
  const auto header = split_csv_line(line);
  std::vector<std::size_t> idx;
  for (const auto& n : names) {
    auto it = std::find(header.begin(), header.end(), n);
    if (it == header.end()) throw Error(path + ": missing column: " + n);
    idx.push_back(static_cast<std::size_t>(it - header.begin()));
  }
  std::vector<std::vector<std::string>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    std::vector<std::string> row;
    for (std::size_t i : idx) {
      if (i >= cells.size()) throw Error(path + ": line " + std::to_string(line_no) + ": too few columns");
      row.push_back(cells[i]);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

double parse_double(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    const double x = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return x;
  } catch (const std::exception&) {
    throw Error(where + ": not a number: " + s);
  }
}

int parse_int(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    const int x = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return x;
  } catch (const std::exception&) {
    throw Error(where + ": not an integer: " + s);
  }
}

std::vector<SliceSpec> parse_slices(const std::string& text) {
  std::vector<SliceSpec> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto dash = item.find('-');
    if (dash == std::string::npos) throw UsageError("--slices expects START-END[,START-END...]: " + item);
    try {
      out.push_back({std::stoi(item.substr(0, dash)), std::stoi(item.substr(dash + 1))});
    } catch (const std::exception&) {
      throw UsageError("--slices expects START-END[,START-END...]: " + item);
    }
  }
  if (out.empty()) throw UsageError("--slices is empty");
  return out;
}

// ---------------------------------------------------------------------------

void cmd_simulate(Context& ctx) {
  const Flags& f = ctx.flags;
  if (f.spec.empty() == f.preset.empty()) throw UsageError("simulate needs exactly one of --spec or --preset");
  CorpusSpec spec;
  if (!f.spec.empty()) {
    spec = load_spec(f.spec);
    if (f.seed) spec.seed = *f.seed;
  } else if (f.preset == "pages") {
    spec = spec_from_json(page_corpus_spec_json(ctx.config.seed));
  } else if (f.preset == "point-of-view") {
    spec = spec_from_json(point_of_view_spec_json(ctx.config.seed));
  } else {
    throw UsageError("unknown preset: " + f.preset + " (expected pages or point-of-view)");
  }
  const auto volumes = generate_corpus(spec, ctx.config.jobs);
  const fs::path path = ctx.output(f.out);
  save_volumes(path, volumes);

  // Genres outside the active taxonomy get a companion taxonomy file.
  std::string note;
  bool outside = false;
  for (const auto& g : spec.genres) outside = outside || !ctx.taxonomy().contains(g.genre);
  if (outside) {
    json leaves = json::array();
    for (const auto& g : spec.genres) {
      const GenreId super = ctx.taxonomy().contains(g.genre) ? ctx.taxonomy().superclass_of(g.genre) : g.genre;
      leaves.push_back({{"genre", g.genre}, {"superclass", super}});
    }
    ctx.write("taxonomy.json", json{{"leaves", leaves}}.dump(1) + "\n");
    note = "; taxonomy in " + ctx.output("taxonomy.json").string();
  }
  std::size_t pages = 0;
  for (const auto& v : volumes) pages += v.pages.size();
  ctx.summary("simulate: " + std::to_string(volumes.size()) + " volumes, " + std::to_string(pages) +
              " pages -> " + path.string() + note);
}

void cmd_build_vocab(Context& ctx) {
  const auto volumes = ctx.corpus();
  const Vocabulary vocab = build_vocabulary(volumes, ctx.flags.size.value_or(ctx.config.vocab_size));
  save_vocabulary(ctx.output("vocab.json"), vocab);
  ctx.summary("build-vocab: " + std::to_string(vocab.size()) + " features from " +
              std::to_string(volumes.size()) + " volumes -> " + ctx.output("vocab.json").string());
}

void cmd_select_features(Context& ctx) {
  const auto volumes = ctx.corpus();
  const GenreId positive = ctx.positive();
  const auto opts = ctx.volume_options();
  const Vocabulary candidates = build_vocabulary(volumes, opts.candidates);
  const auto labels = binary_labels(volumes, positive);
  std::vector<FeatureVector> a, b;
  for (std::size_t i = 0; i < volumes.size(); ++i)
    (labels[i] == positive ? a : b).push_back(extract_volume_features(volumes[i], candidates));
  if (a.empty() || b.empty()) throw Error("no volumes on one side of " + positive + " vs rest");
  const auto sel = select_discriminative_features(a, b, candidates, opts.k_per_side);
  ctx.write("selection.json", selection_to_json(sel));
  ctx.summary("select-features: " + std::to_string(sel.positive.size()) + " + " +
              std::to_string(sel.negative.size()) + " words for " + positive + " (" +
              std::to_string(a.size()) + " vs " + std::to_string(b.size()) + " volumes) -> " +
              ctx.output("selection.json").string());
}

void train_pages(Context& ctx) {
  const auto volumes = ctx.corpus();
  const Vocabulary vocab = build_vocabulary(volumes, ctx.flags.size.value_or(ctx.config.vocab_size));
  std::vector<std::vector<FeatureVector>> per_volume(volumes.size());
  parallel_for(volumes.size(), ctx.config.jobs,
               [&](std::size_t i) { per_volume[i] = extract_volume_page_features(volumes[i], vocab); });
  std::vector<FeatureVector> pages;
  std::vector<GenreId> labels;
  for (std::size_t i = 0; i < volumes.size(); ++i) {
    if (!volumes[i].gold_labels) throw Error("volume " + volumes[i].volume_id + " has no gold labels");
    pages.insert(pages.end(), per_volume[i].begin(), per_volume[i].end());
    labels.insert(labels.end(), volumes[i].gold_labels->begin(), volumes[i].gold_labels->end());
  }
  const auto bank = train_bank(pages, labels, ctx.taxonomy(), vocab, ctx.bank_options());
  const auto hmm = estimate_transition_matrix(volumes, ctx.taxonomy(), ctx.config.kappa);
  save_vocabulary(ctx.output("vocab.json"), vocab);
  save_bank(ctx.output("bank.json"), bank);
  save_hmm(ctx.output("hmm.json"), hmm);
  ctx.summary("train: " + std::to_string(bank.classifiers.size()) + " page classifiers on " +
              std::to_string(pages.size()) + " pages, HMM over " + std::to_string(hmm.states.size()) +
              " states -> " + ctx.output("bank.json").string() + ", " + ctx.output("hmm.json").string());
}

void train_volume(Context& ctx) {
  const auto volumes = ctx.corpus();
  const GenreId positive = ctx.positive();
  const auto labels = binary_labels(volumes, positive);
  const BinaryModel model = train_volume_classifier(volumes, labels, positive, ctx.volume_options());
  save_model(ctx.output("model.json"), model);
  ctx.summary("train: volume classifier for " + positive + " on " + std::to_string(volumes.size()) +
              " volumes, " + std::to_string(model_vocabulary(model).size()) + " features -> " +
              ctx.output("model.json").string());
}

void train_ensemble(Context& ctx) {
  const auto volumes = ctx.corpus();
  const GenreId positive = ctx.positive();
  const auto specs = ctx.flags.slices.empty() ? ctx.config.slices : parse_slices(ctx.flags.slices);
  if (specs.empty()) throw UsageError("no time slices configured");
  TimeSlicedEnsemble ensemble;
  ensemble.weighting = parse_weighting(ctx.config.weighting);
  ensemble.slices.resize(specs.size());
  parallel_for(specs.size(), ctx.config.jobs, [&](std::size_t s) {
    const SliceSpec sp = specs[s];
    if (sp.start >= sp.end)
      throw Error("time slice needs start < end: " + std::to_string(sp.start) + "-" + std::to_string(sp.end));
    std::vector<Volume> in_slice;
    for (const auto& v : volumes)
      if (v.year >= sp.start && v.year <= sp.end) in_slice.push_back(v);
    if (in_slice.empty())
      throw Error("no volumes in slice " + std::to_string(sp.start) + "-" + std::to_string(sp.end));
    auto opts = ctx.volume_options();
    opts.seed = derive_seed(ctx.config.seed, s);
    TimeSlice& slice = ensemble.slices[s];
    slice.start_year = sp.start;
    slice.end_year = sp.end;
    slice.model = train_volume_classifier(in_slice, binary_labels(in_slice, positive), positive, opts);
    slice.model_path = "slice_" + std::to_string(sp.start) + "_" + std::to_string(sp.end) + ".json";
  });
  for (const auto& slice : ensemble.slices) save_model(ctx.output(slice.model_path), slice.model);
  save_ensemble(ctx.output("ensemble.json"), ensemble);
  ctx.summary("train: " + std::to_string(ensemble.slices.size()) + "-slice " +
              weighting_name(ensemble.weighting) + " ensemble for " + positive + " covering " +
              std::to_string(ensemble.coverage_start()) + "-" + std::to_string(ensemble.coverage_end()) +
              " -> " + ctx.output("ensemble.json").string());
}

void cmd_train(Context& ctx) {
  const std::string& level = ctx.flags.level;
  if (level == "page") return train_pages(ctx);
  if (level == "volume") return train_volume(ctx);
  if (level == "ensemble") return train_ensemble(ctx);
  throw UsageError("unknown --level: " + level + " (expected page, volume or ensemble)");
}

void cmd_predict(Context& ctx) {
  if (ctx.flags.model.empty()) throw UsageError("--model is required");
  const json j = read_json_file(ctx.flags.model);
  const auto volumes = ctx.corpus();
  const double threshold = ctx.config.threshold;

  if (j.is_object() && j.value("kind", "") == "bank") {
    const auto bank = bank_from_json(j);
    std::vector<std::string> rows(volumes.size());
    std::vector<std::size_t> counts(volumes.size());
    parallel_for(volumes.size(), ctx.config.jobs, [&](std::size_t i) {
      std::ostringstream o;
      const auto fvs = extract_volume_page_features(volumes[i], bank.vocab);
      for (std::size_t p = 0; p < fvs.size(); ++p) {
        const auto d = classify_page_one_vs_all(bank, fvs[p]);
        o << volumes[i].volume_id << ',' << p << ',' << d.leaf << ',' << d.superclass << ','
          << num(d.posteriors.at(d.leaf)) << '\n';
      }
      rows[i] = o.str();
      counts[i] = fvs.size();
    });
    std::string text = "volume_id,page,leaf,superclass,probability\n";
    std::size_t pages = 0;
    for (std::size_t i = 0; i < volumes.size(); ++i) {
      text += rows[i];
      pages += counts[i];
    }
    ctx.write("page_predictions.csv", text);
    ctx.summary("predict: " + std::to_string(pages) + " pages in " + std::to_string(volumes.size()) +
                " volumes -> " + ctx.output("page_predictions.csv").string());
    return;
  }

  std::vector<EnsemblePrediction> preds(volumes.size());
  if (j.is_object() && j.contains("slices")) {
    const auto ensemble = load_ensemble(ctx.flags.model);
    parallel_for(volumes.size(), ctx.config.jobs,
                 [&](std::size_t i) { preds[i] = ensemble_predict(ensemble, volumes[i]); });
  } else {
    const BinaryModel model = model_from_json(j);
    parallel_for(volumes.size(), ctx.config.jobs,
                 [&](std::size_t i) { preds[i].probability = predict_volume(model, volumes[i]); });
  }
  std::string text = "volume_id,year,probability,predicted,out_of_coverage\n";
  std::size_t positives = 0, outside = 0;
  for (std::size_t i = 0; i < volumes.size(); ++i) {
    const bool yes = preds[i].probability >= threshold;
    positives += yes;
    outside += preds[i].out_of_coverage;
    text += volumes[i].volume_id + ',' + std::to_string(volumes[i].year) + ',' + num(preds[i].probability) +
            ',' + (yes ? "1" : "0") + ',' + (preds[i].out_of_coverage ? "1" : "0") + '\n';
  }
  ctx.write("predictions.csv", text);
  std::string note = outside ? ", " + std::to_string(outside) + " outside slice coverage" : "";
  ctx.summary("predict: " + std::to_string(positives) + " of " + std::to_string(volumes.size()) +
              " volumes at p >= " + fixed(threshold, 2) + note + " -> " + ctx.output("predictions.csv").string());
}

void cmd_smooth(Context& ctx) {
  if (ctx.flags.bank.empty() || ctx.flags.hmm.empty()) throw UsageError("smooth needs --bank and --hmm");
  const auto bank = load_bank(ctx.flags.bank);
  const auto hmm = load_hmm(ctx.flags.hmm);
  const auto volumes = ctx.corpus();
  std::vector<SmoothedVolume> out(volumes.size());
  parallel_for(volumes.size(), ctx.config.jobs,
               [&](std::size_t i) { out[i] = smooth_volume(bank, hmm, volumes[i], bank.vocab); });
  std::string text;
  std::size_t changed = 0, pages = 0;
  for (const auto& s : out) {
    text += smoothed_to_json_line(s) + "\n";
    for (std::size_t p = 0; p < s.raw_labels.size(); ++p) changed += s.raw_labels[p] != s.decoded.labels[p];
    pages += s.raw_labels.size();
  }
  ctx.write("decoded.jsonl", text);
  ctx.summary("smooth: " + std::to_string(volumes.size()) + " volumes, " + std::to_string(changed) + " of " +
              std::to_string(pages) + " page labels changed -> " + ctx.output("decoded.jsonl").string());
}

void cmd_segment(Context& ctx) {
  const Flags& f = ctx.flags;
  if (f.decoded.empty() && f.corpus.empty()) throw UsageError("segment needs --decoded and/or --corpus");
  std::string note;
  if (!f.decoded.empty()) {
    std::ifstream in(f.decoded);
    if (!in) throw Error("cannot open " + f.decoded);
    std::string line, text;
    std::size_t n = 0, ranges = 0, line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      SmoothedVolume s;
      try {
        s = smoothed_from_json_line(line);
      } catch (const Error& e) {
        throw Error(f.decoded + ": line " + std::to_string(line_no) + ": " + e.what());
      }
      if (s.decoded.labels.empty()) throw Error(f.decoded + ": line " + std::to_string(line_no) + ": no pages");
      const auto r = extract_page_ranges(s.decoded);
      text += ranges_to_json_line(s.volume_id, r) + "\n";
      ranges += r.size();
      ++n;
    }
    ctx.write("ranges.jsonl", text);
    note = std::to_string(ranges) + " ranges in " + std::to_string(n) + " volumes -> " +
           ctx.output("ranges.jsonl").string();
  }
  if (!f.corpus.empty()) {
    const auto volumes = ctx.corpus();
    const auto params = ctx.line_params();
    std::vector<std::string> rows(volumes.size());
    std::vector<std::size_t> verse(volumes.size()), total(volumes.size());
    std::size_t gated = 0;
    for (const auto& v : volumes) gated += line_rule_applies(v.year, params);
    parallel_for(volumes.size(), ctx.config.jobs, [&](std::size_t i) {
      const Volume& v = volumes[i];
      if (!line_rule_applies(v.year, params)) return;
      std::ostringstream o;
      for (std::size_t p = 0; p < v.pages.size(); ++p) {
        const auto classes = classify_lines(v.pages[p].lines(), params);
        for (std::size_t l = 0; l < classes.size(); ++l) {
          o << v.volume_id << ',' << p << ',' << l << ',' << line_label_name(classes[l].label) << '\n';
          verse[i] += classes[l].label == LineLabel::kVerse;
          ++total[i];
        }
      }
      rows[i] = o.str();
    });
    std::string text = "volume_id,page,line,label\n";
    std::size_t nv = 0, nt = 0;
    for (std::size_t i = 0; i < volumes.size(); ++i) {
      text += rows[i];
      nv += verse[i];
      nt += total[i];
    }
    ctx.write("line_classes.csv", text);
    if (!note.empty()) note += "; ";
    note += std::to_string(nv) + " of " + std::to_string(nt) + " lines verse in " + std::to_string(gated) +
            " volumes up to " + std::to_string(params.last_year) + " -> " + ctx.output("line_classes.csv").string();
  }
  ctx.summary("segment: " + note);
}

void cmd_evaluate(Context& ctx) {
  const auto volumes = ctx.corpus();
  const std::size_t k = ctx.flags.k.value_or(ctx.config.folds);
  if (ctx.flags.level == "page") {
    PipelineConfig pc;
    pc.vocab_size = ctx.flags.size.value_or(ctx.config.vocab_size);
    pc.bank = ctx.bank_options();
    pc.kappa = ctx.config.kappa;
    pc.jobs = ctx.config.jobs;
    const auto cv = crossvalidate_pipeline(volumes, ctx.taxonomy(), k, ctx.config.seed, pc);
    ctx.write("metrics_raw.csv", metrics_to_csv(cv.raw_report));
    ctx.write("metrics_smoothed.csv", metrics_to_csv(cv.smoothed_report));
    ctx.write("comparison.csv", comparison_to_csv(cv.raw_report, cv.smoothed_report));
    ctx.summary("evaluate: " + std::to_string(k) + "-fold micro-F1 raw " + fixed(cv.raw_report.micro_f1) +
                " smoothed " + fixed(cv.smoothed_report.micro_f1) + ", macro-F1 raw " +
                fixed(cv.raw_report.macro_f1) + " smoothed " + fixed(cv.smoothed_report.macro_f1) + " -> " +
                ctx.output("comparison.csv").string());
    return;
  }
  if (ctx.flags.level == "volume") {
    const GenreId positive = ctx.positive();
    const auto cv = crossvalidate_volume_classifier(volumes, positive, "~" + positive, k, ctx.config.seed,
                                                    ctx.volume_options(), ctx.config.jobs);
    ctx.write("metrics_volume.csv", metrics_to_csv(cv.report));
    std::string text = "volume_id,year,probability\n";
    for (std::size_t i = 0; i < volumes.size(); ++i)
      text += volumes[i].volume_id + ',' + std::to_string(volumes[i].year) + ',' + num(cv.probabilities[i]) + '\n';
    ctx.write("cv_predictions.csv", text);
    ctx.summary("evaluate: " + std::to_string(k) + "-fold " + positive + " F1 " +
                fixed(cv.report.for_class(positive).f1) + ", micro-F1 " + fixed(cv.report.micro_f1) + " -> " +
                ctx.output("metrics_volume.csv").string());
    return;
  }
  throw UsageError("unknown --level: " + ctx.flags.level + " (expected page or volume)");
}

void cmd_mine_correlations(Context& ctx) {
  const auto volumes = ctx.corpus();
  std::vector<double> target(volumes.size());
  std::string target_name = "pronoun ratio";
  if (ctx.flags.target.empty()) {
    for (std::size_t i = 0; i < volumes.size(); ++i) target[i] = pronoun_ratio(volumes[i]);
  } else {
    std::map<std::string, double> by_id;
    for (const auto& row : read_csv_columns(ctx.flags.target, {"volume_id", ctx.flags.target_column}))
      by_id[row[0]] = parse_double(row[1], ctx.flags.target);
    for (std::size_t i = 0; i < volumes.size(); ++i) {
      auto it = by_id.find(volumes[i].volume_id);
      if (it == by_id.end()) throw Error(ctx.flags.target + ": no value for volume " + volumes[i].volume_id);
      target[i] = it->second;
    }
    target_name = ctx.flags.target_column;
  }
  const Vocabulary vocab = build_vocabulary(volumes, ctx.flags.size.value_or(5000));
  const auto records = mine_correlations(volumes, vocab, target);
  ctx.write("correlations.csv", correlations_to_csv(records));
  std::string top = records.empty() ? "none" : records.front().word + " (r=" + fixed(records.front().r, 3) + ")";
  ctx.summary("mine-correlations: " + std::to_string(records.size()) + " words against " + target_name +
              ", top " + top + " -> " + ctx.output("correlations.csv").string());
}

void cmd_agreement(Context& ctx) {
  if (ctx.flags.model_a.empty() || ctx.flags.model_b.empty())
    throw UsageError("agreement needs --model-a and --model-b");
  const BinaryModel a = load_model(ctx.flags.model_a);
  const BinaryModel b = load_model(ctx.flags.model_b);
  const auto volumes = ctx.corpus();
  const auto result = model_agreement(a, b, volumes);
  ctx.write("agreement.csv", agreement_to_csv(result));
  ctx.write("agreement_summary.csv", "r,n\n" + num(result.r) + "," + std::to_string(result.p_a.size()) + "\n");
  ctx.summary("agreement: r = " + fixed(result.r) + " over " + std::to_string(result.p_a.size()) +
              " volumes -> " + ctx.output("agreement.csv").string());
}

void cmd_trend(Context& ctx) {
  if (ctx.flags.predictions.empty()) throw UsageError("--predictions is required");
  const int bin = ctx.flags.bin.value_or(ctx.config.bin_width);
  if (bin < 1) throw UsageError("--bin must be at least 1");
  std::vector<double> values;
  std::vector<int> years;
  for (const auto& row : read_csv_columns(ctx.flags.predictions, {"year", ctx.flags.column})) {
    years.push_back(parse_int(row[0], ctx.flags.predictions));
    values.push_back(parse_double(row[1], ctx.flags.predictions));
  }
  const auto series = time_binned_means(values, years, bin);
  ctx.write("trend.csv", trend_to_csv(series));
  ctx.summary("trend: " + std::to_string(values.size()) + " values in " + std::to_string(series.bins.size()) +
              " bins of " + std::to_string(bin) + " years -> " + ctx.output("trend.csv").string());
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Genre mapping for collections of dated, multi-page volumes", "genremap"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags f;
  app.add_option("--corpus", f.corpus, "Corpus JSONL");
  app.add_option("--taxonomy", f.taxonomy, "Taxonomy JSON (default: built-in)");
  app.add_option("--config", f.config, "Run config JSON; flags override it");
  app.add_option("--seed", f.seed, "Seed for all randomness");
  app.add_option("--jobs", f.jobs, "Worker threads");
  app.add_option("--out-dir", f.out_dir, "Directory for outputs")->capture_default_str();

  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic corpus");
  simulate->add_option("--spec", f.spec, "Corpus spec JSON");
  simulate->add_option("--preset", f.preset, "pages or point-of-view");
  simulate->add_option("--out", f.out, "Output file name")->capture_default_str();

  auto* build_vocab = app.add_subcommand("build-vocab", "Most frequent feature ids");
  build_vocab->add_option("--size", f.size, "Vocabulary size");

  auto* select = app.add_subcommand("select-features", "Rank-sum feature selection");
  select->add_option("--positive", f.positive, "Target class");
  select->add_option("--candidates", f.candidates, "Candidate vocabulary size");
  select->add_option("--k", f.k_per_side, "Words kept per direction");

  auto* train = app.add_subcommand("train", "Train page or volume models");
  train->add_option("--level", f.level, "page, volume or ensemble")->capture_default_str();
  train->add_option("--size", f.size, "Page vocabulary size");
  train->add_option("--positive", f.positive, "Target class of volume models");
  train->add_option("--candidates", f.candidates, "Candidate vocabulary size");
  train->add_option("--k", f.k_per_side, "Selected words per direction");
  train->add_option("--classifier", f.classifier, "logistic or naive_bayes");
  train->add_option("--slices", f.slices, "START-END[,START-END...]");

  auto* predict = app.add_subcommand("predict", "Apply a model, ensemble or page bank");
  predict->add_option("--model", f.model, "Model, ensemble or bank JSON");

  auto* smooth = app.add_subcommand("smooth", "HMM-smooth page predictions");
  smooth->add_option("--bank", f.bank, "Page classifier bank JSON");
  smooth->add_option("--hmm", f.hmm, "HMM JSON");

  auto* segment = app.add_subcommand("segment", "Page ranges and verse/prose lines");
  segment->add_option("--decoded", f.decoded, "decoded.jsonl from smooth");

  auto* evaluate = app.add_subcommand("evaluate", "Volume-partitioned cross-validation");
  evaluate->add_option("--k", f.k, "Number of folds");
  evaluate->add_option("--level", f.level, "page or volume")->capture_default_str();
  evaluate->add_option("--size", f.size, "Page vocabulary size");
  evaluate->add_option("--positive", f.positive, "Target class at volume level");
  evaluate->add_option("--candidates", f.candidates, "Candidate vocabulary size");
  evaluate->add_option("--classifier", f.classifier, "logistic or naive_bayes");

  auto* mine = app.add_subcommand("mine-correlations", "Correlate word frequencies with a target");
  mine->add_option("--size", f.size, "Words considered (default 5000)");
  mine->add_option("--target", f.target, "CSV with volume_id and a target column (default: pronoun ratio)");
  mine->add_option("--target-column", f.target_column, "Target column name")->capture_default_str();

  auto* agreement = app.add_subcommand("agreement", "Correlation of two models' predictions");
  agreement->add_option("--model-a", f.model_a, "First model JSON");
  agreement->add_option("--model-b", f.model_b, "Second model JSON");

  auto* trend = app.add_subcommand("trend", "Time-binned means of a prediction column");
  trend->add_option("--predictions", f.predictions, "CSV with year and value columns");
  trend->add_option("--bin", f.bin, "Bin width in years");
  trend->add_option("--column", f.column, "Value column")->capture_default_str();

  const std::map<CLI::App*, void (*)(Context&)> handlers = {
      {simulate, cmd_simulate}, {build_vocab, cmd_build_vocab}, {select, cmd_select_features},
      {train, cmd_train},       {predict, cmd_predict},         {smooth, cmd_smooth},
      {segment, cmd_segment},   {evaluate, cmd_evaluate},       {mine, cmd_mine_correlations},
      {agreement, cmd_agreement}, {trend, cmd_trend}};

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }

  try {
    Context ctx(f, out);
    for (const auto& [sub, fn] : handlers)
      if (sub->parsed()) fn(ctx);
    return 0;
  } catch (const UsageError& e) {
    err << "genremap: " << e.what() << '\n' << "Run with --help for usage.\n";
    return 1;
  } catch (const std::exception& e) {
    err << "genremap: " << e.what() << '\n';
    return 2;
  }
}

int run_command(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_command(args, std::cout, std::cerr);
}

}  // namespace genremap

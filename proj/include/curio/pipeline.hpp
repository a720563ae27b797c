#pragma once

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "curio/classifier.hpp"
#include "curio/corpus.hpp"
#include "curio/digest.hpp"
#include "curio/error.hpp"
#include "curio/infogap.hpp"
#include "curio/io.hpp"
#include "curio/novelty.hpp"
#include "curio/rng.hpp"
#include "curio/surprise.hpp"
#include "curio/topic_model.hpp"

namespace curio {

inline constexpr const char* kManifestFormat = "curio.manifest.v1";
inline constexpr const char* kLexiconDirEnv = "CURIO_LEXICON_DIR";

// ---------------------------------------------------------------------------
// Run configuration
// ---------------------------------------------------------------------------

/// Inclusive [start, end] date range; empty side means unbounded. Dates are
/// YYYYMMDD integers (JSON accepts "YYYY-MM-DD" strings too).
struct DateWindow {
  std::optional<int> start;
  std::optional<int> end;

  bool empty() const { return !start && !end; }
};

struct DatasetSpec {
  std::string path;
  DatasetFormat format = DatasetFormat::csv;
  std::optional<int> label;  // overrides / replaces a label column
};

struct TopicsConfig {
  int num_topics = 200;
  double alpha = -1.0;  // <= 0 picks 50/K
  double beta = 0.01;
  int train_sweeps = 500;
  int fold_in_sweeps = 50;
};

struct ModelConfig {
  ModelKind kind = ModelKind::logreg;
  int epochs = 500;            // logreg
  double learning_rate = 0.1;  // logreg
  double l2 = 1e-4;            // logreg
  int iterations = 100000;     // svm
  double lambda = 1e-4;        // svm
};

struct LexiconConfig {
  std::string uncertainty;
  std::string anticipation;
  std::vector<std::string> self_concept;
  std::string rules;  // optional RuleConfig JSON path
};

struct RunConfig {
  std::vector<DatasetSpec> datasets;
  std::string reference_path;
  DateWindow novelty_window;
  DateWindow surprise_window;
  LexiconConfig lexicons;
  TopicsConfig topics;
  FeatureSet feature_set = FeatureSet::all;
  ModelConfig model;
  double train_fraction = 0.2;
  std::uint64_t seed = 1;
  std::string outdir;

  nlohmann::json to_json() const;
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::string& path);
};

namespace detail {

inline std::optional<int> date_from_json(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  if (j.is_string()) return parse_date(j.get<std::string>());
  if (j.is_number_integer()) return parse_date(std::to_string(j.get<long long>()));
  throw Error("date must be a YYYYMMDD integer or YYYY-MM-DD string");
}

inline nlohmann::json window_to_json(const DateWindow& w) {
  if (w.empty()) return nullptr;
  nlohmann::json j;
  j["start"] = w.start ? nlohmann::json(*w.start) : nlohmann::json(nullptr);
  j["end"] = w.end ? nlohmann::json(*w.end) : nlohmann::json(nullptr);
  return j;
}

inline DateWindow window_from_json(const nlohmann::json& j) {
  DateWindow w;
  if (j.is_null()) return w;
  if (!j.is_object()) throw Error("date window must be an object or null");
  if (j.contains("start")) w.start = date_from_json(j["start"]);
  if (j.contains("end")) w.end = date_from_json(j["end"]);
  return w;
}

inline DatasetFormat guess_format(const std::string& path) {
  return path.size() >= 6 && path.rfind(".jsonl") == path.size() - 6
             ? DatasetFormat::jsonl
             : DatasetFormat::csv;
}

}  // namespace detail

inline nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["datasets"] = nlohmann::json::array();
  for (const auto& d : datasets) {
    nlohmann::json dj;
    dj["path"] = d.path;
    dj["format"] = to_string(d.format);
    if (d.label) dj["label"] = *d.label;
    j["datasets"].push_back(dj);
  }
  j["reference"]["path"] = reference_path;
  j["reference"]["novelty_window"] = detail::window_to_json(novelty_window);
  j["reference"]["surprise_window"] = detail::window_to_json(surprise_window);
  j["lexicons"]["uncertainty"] = lexicons.uncertainty;
  j["lexicons"]["anticipation"] = lexicons.anticipation;
  j["lexicons"]["self_concept"] = lexicons.self_concept;
  j["lexicons"]["rules"] = lexicons.rules;
  j["topics"]["num_topics"] = topics.num_topics;
  j["topics"]["alpha"] = topics.alpha;
  j["topics"]["beta"] = topics.beta;
  j["topics"]["train_sweeps"] = topics.train_sweeps;
  j["topics"]["fold_in_sweeps"] = topics.fold_in_sweeps;
  j["feature_set"] = to_string(feature_set);
  j["model"]["kind"] = to_string(model.kind);
  j["model"]["epochs"] = model.epochs;
  j["model"]["learning_rate"] = model.learning_rate;
  j["model"]["l2"] = model.l2;
  j["model"]["iterations"] = model.iterations;
  j["model"]["lambda"] = model.lambda;
  j["train_fraction"] = train_fraction;
  j["seed"] = seed;
  j["outdir"] = outdir;
  return j;
}

inline RunConfig RunConfig::from_json(const nlohmann::json& j) {
  RunConfig c;
  if (!j.contains("datasets") || !j["datasets"].is_array() ||
      j["datasets"].empty())
    throw Error("config needs a non-empty 'datasets' array");
  for (const auto& dj : j["datasets"]) {
    DatasetSpec d;
    d.path = dj.at("path").get<std::string>();
    d.format = dj.contains("format")
                   ? parse_dataset_format(dj["format"].get<std::string>())
                   : detail::guess_format(d.path);
    if (dj.contains("label") && !dj["label"].is_null()) {
      int v = dj["label"].get<int>();
      if (v != 0 && v != 1) throw Error("dataset label must be 0 or 1");
      d.label = v;
    }
    c.datasets.push_back(std::move(d));
  }
  if (j.contains("reference") && !j["reference"].is_null()) {
    const auto& r = j["reference"];
    c.reference_path = r.value("path", std::string());
    if (r.contains("novelty_window"))
      c.novelty_window = detail::window_from_json(r["novelty_window"]);
    if (r.contains("surprise_window"))
      c.surprise_window = detail::window_from_json(r["surprise_window"]);
  }
  if (j.contains("lexicons") && !j["lexicons"].is_null()) {
    const auto& l = j["lexicons"];
    c.lexicons.uncertainty = l.value("uncertainty", std::string());
    c.lexicons.anticipation = l.value("anticipation", std::string());
    if (l.contains("self_concept"))
      c.lexicons.self_concept = l["self_concept"].get<std::vector<std::string>>();
    c.lexicons.rules = l.value("rules", std::string());
  }
  if (j.contains("topics")) {
    const auto& t = j["topics"];
    c.topics.num_topics = t.value("num_topics", c.topics.num_topics);
    c.topics.alpha = t.value("alpha", c.topics.alpha);
    c.topics.beta = t.value("beta", c.topics.beta);
    c.topics.train_sweeps = t.value("train_sweeps", c.topics.train_sweeps);
    c.topics.fold_in_sweeps = t.value("fold_in_sweeps", c.topics.fold_in_sweeps);
  }
  if (j.contains("feature_set"))
    c.feature_set = parse_feature_set(j["feature_set"].get<std::string>());
  if (j.contains("model")) {
    const auto& m = j["model"];
    if (m.contains("kind")) c.model.kind = parse_model_kind(m["kind"].get<std::string>());
    c.model.epochs = m.value("epochs", c.model.epochs);
    c.model.learning_rate = m.value("learning_rate", c.model.learning_rate);
    c.model.l2 = m.value("l2", c.model.l2);
    c.model.iterations = m.value("iterations", c.model.iterations);
    c.model.lambda = m.value("lambda", c.model.lambda);
  }
  c.train_fraction = j.value("train_fraction", c.train_fraction);
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  c.outdir = j.value("outdir", std::string());
  return c;
}

inline RunConfig RunConfig::load(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(path + ": " + e.what());
  }
  try {
    return from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw Error(path + ": " + e.what());
  }
}

/// Lexicon paths are taken as given when they exist; otherwise they are tried
/// under $CURIO_LEXICON_DIR so configs can name bundled lexicons portably.
inline std::string resolve_lexicon_path(const std::string& path) {
  if (path.empty()) throw Error("empty lexicon path");
  if (file_exists(path)) return path;
  const char* dir = std::getenv(kLexiconDirEnv);
  if (dir && *dir) {
    std::string alt = (std::filesystem::path(dir) / path).string();
    if (file_exists(alt)) return alt;
    throw Error("lexicon file '" + path + "' not found (also tried '" + alt +
                "')");
  }
  throw Error("lexicon file '" + path + "' not found (set " +
              std::string(kLexiconDirEnv) + " to a lexicon directory)");
}

// ---------------------------------------------------------------------------
// Artifact helpers
// ---------------------------------------------------------------------------

inline nlohmann::json exposure_to_json(const ExposureDistribution& e) {
  nlohmann::json j;
  j["format"] = "curio.exposure.v1";
  j["num_topics"] = e.probs.size();
  j["source_size"] = e.source_size;
  j["probs"] = e.probs;
  return j;
}

inline ExposureDistribution exposure_from_json(const nlohmann::json& j) {
  ExposureDistribution e;
  if (!j.contains("format") || j["format"] != "curio.exposure.v1")
    throw Error("exposure file has unexpected format tag");
  e.probs = j.at("probs").get<std::vector<double>>();
  e.source_size = j.at("source_size").get<std::size_t>();
  if (e.probs.size() != j.at("num_topics").get<std::size_t>())
    throw Error("exposure file has inconsistent topic count");
  return e;
}

/// Per-headline metric table (novelty_scores.csv / surprise_scores.csv):
/// columns are id, class, then one numeric column per metric.
struct ScoreTable {
  std::vector<std::string> metrics;
  std::vector<std::int64_t> ids;
  std::vector<int> labels;
  std::vector<std::vector<double>> values;  // one row per headline

  std::vector<double> column(const std::string& metric) const {
    for (std::size_t c = 0; c < metrics.size(); ++c) {
      if (metrics[c] != metric) continue;
      std::vector<double> out;
      out.reserve(values.size());
      for (const auto& row : values) out.push_back(row[c]);
      return out;
    }
    throw Error("no metric column '" + metric + "' (have: " +
                join_tokens(metrics) + ")");
  }
};

inline ScoreTable load_scores_csv(const std::string& path) {
  auto records = parse_csv_file(path);
  if (records.empty()) throw Error(path + ": empty scores file");
  const auto& header = records[0].fields;
  if (header.size() < 3 || header[0] != "id" || header[1] != "class")
    throw Error(path + ": expected header id,class,<metrics...>");
  ScoreTable t;
  for (std::size_t c = 2; c < header.size(); ++c) t.metrics.push_back(header[c]);
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    std::string ctx = path + ":" + std::to_string(rec.line);
    if (rec.fields.size() != header.size())
      throw Error(ctx + ": wrong number of fields");
    t.ids.push_back(parse_int(rec.fields[0], ctx));
    t.labels.push_back(static_cast<int>(parse_int(rec.fields[1], ctx)));
    std::vector<double> row;
    for (std::size_t c = 2; c < rec.fields.size(); ++c)
      row.push_back(parse_double(rec.fields[c], ctx));
    t.values.push_back(std::move(row));
  }
  return t;
}

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count_clickbait = 0;
  std::size_t count_nonclickbait = 0;
};

/// Equal-width bins over [min, max]; the top edge is inclusive. A constant
/// metric degenerates to a single occupied bin.
inline std::vector<HistogramBin> histogram_bins(const std::vector<double>& values,
                                                const std::vector<int>& labels,
                                                int bins = 50) {
  if (bins < 1) throw Error("histogram needs at least one bin");
  if (values.empty()) throw Error("histogram needs at least one value");
  if (values.size() != labels.size())
    throw Error("histogram: values and labels differ in length");
  double lo = values[0], hi = values[0];
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double width = (hi - lo) / bins;
  std::vector<HistogramBin> out(static_cast<std::size_t>(bins));
  for (int b = 0; b < bins; ++b) {
    out[b].lo = lo + width * b;
    out[b].hi = b + 1 == bins ? hi : lo + width * (b + 1);
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    int b = width > 0.0 ? static_cast<int>((values[i] - lo) / width) : 0;
    if (b >= bins) b = bins - 1;
    if (labels[i] == 1) ++out[b].count_clickbait;
    else ++out[b].count_nonclickbait;
  }
  return out;
}

inline std::string histogram_csv(const std::vector<HistogramBin>& bins) {
  std::string out = "bin_low,bin_high,count_clickbait,count_nonclickbait\n";
  for (const auto& b : bins) {
    out += fmt_double(b.lo);
    out += ',';
    out += fmt_double(b.hi);
    out += ',';
    out += std::to_string(b.count_clickbait);
    out += ',';
    out += std::to_string(b.count_nonclickbait);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

/// How far a run should go; the CLI verbs map onto these cut points.
enum class StopAfter { load, topics, featurize, train, full };

inline const char* to_string(StopAfter s) {
  switch (s) {
    case StopAfter::load: return "load";
    case StopAfter::topics: return "topics";
    case StopAfter::featurize: return "featurize";
    case StopAfter::train: return "train";
    case StopAfter::full: return "full";
  }
  return "?";
}

struct StageRecord {
  std::string name;
  bool skipped = false;
  double seconds = 0.0;
};

struct RunResult {
  std::string outdir;
  std::vector<StageRecord> stages;
  std::optional<Metrics> metrics;  // present when the run reached evaluate
};

/// Orchestrates a run directory. Stages whose outputs already exist are
/// skipped, which makes reruns incremental; a config.snapshot.json guard
/// refuses to mix artifacts from different configurations in one directory.
class Pipeline {
 public:
  explicit Pipeline(RunConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.outdir.empty()) throw Error("config has no outdir");
  }

  RunResult run(StopAfter stop = StopAfter::full) {
    prepare_outdir();
    try {
      run_stages(stop);
    } catch (const StageError& e) {
      try {
        write_manifest(stop, e.stage());
      } catch (...) {
        // keep the stage failure, not the manifest write failure
      }
      throw;
    }
    if (!metrics_ && stop == StopAfter::full &&
        file_exists(abs_path(kReportJson))) {
      // evaluate was skipped on a warm rerun; recover its result
      nlohmann::json j = nlohmann::json::parse(read_file(abs_path(kReportJson)));
      metrics_ = metrics_from_json(j.at("metrics"));
    }
    write_manifest(stop, "");
    RunResult r;
    r.outdir = cfg_.outdir;
    r.stages = stages_;
    r.metrics = metrics_;
    return r;
  }

  const RunConfig& config() const { return cfg_; }

  // Relative artifact names, fixed so tooling can rely on them.
  static constexpr const char* kConfigSnapshot = "config.snapshot.json";
  static constexpr const char* kHeadlines = "headlines.jsonl";
  static constexpr const char* kRules = "lexicons/rules.json";
  static constexpr const char* kTopicModel = "topic_model.bin";
  static constexpr const char* kTopicModelMeta = "topic_model.bin.json";
  static constexpr const char* kExposure = "exposure.json";
  static constexpr const char* kBigrams = "bigram_table.tsv";
  static constexpr const char* kFeatures = "features.csv";
  static constexpr const char* kNoveltyScores = "novelty_scores.csv";
  static constexpr const char* kSurpriseScores = "surprise_scores.csv";
  static constexpr const char* kSplit = "split.json";
  static constexpr const char* kModel = "model.json";
  static constexpr const char* kReportJson = "report.json";
  static constexpr const char* kReportTxt = "report.txt";
  static constexpr const char* kHistKl = "hist_kl.csv";
  static constexpr const char* kHistHellinger = "hist_hellinger.csv";
  static constexpr const char* kHistZeroRun = "hist_zero_run.csv";
  static constexpr const char* kHistMaxNonzero = "hist_max_nonzero.csv";
  static constexpr const char* kManifest = "manifest.json";

 private:
  RunConfig cfg_;
  std::vector<StageRecord> stages_;
  std::optional<Metrics> metrics_;

  // Lazily (re)loaded state shared between stages.
  std::vector<Headline> headlines_;
  std::optional<TopicModel> topics_;
  std::optional<ExposureDistribution> exposure_;
  std::optional<BigramTable> bigrams_;
  std::optional<FeatureMatrix> features_;
  std::optional<Split> split_;
  std::optional<LinearModel> model_;

  bool want_novelty() const { return uses_novelty(cfg_.feature_set); }
  bool want_surprise() const { return uses_surprise(cfg_.feature_set); }
  bool want_infogap() const { return uses_infogap(cfg_.feature_set); }

  std::uint64_t topics_seed() const { return derive_seed(cfg_.seed, 1); }
  std::uint64_t exposure_seed() const { return derive_seed(cfg_.seed, 2); }
  std::uint64_t featurize_seed() const { return derive_seed(cfg_.seed, 3); }
  std::uint64_t split_seed() const { return derive_seed(cfg_.seed, 4); }
  std::uint64_t train_seed() const { return derive_seed(cfg_.seed, 5); }

  std::string abs_path(const std::string& rel) const {
    return (std::filesystem::path(cfg_.outdir) / rel).string();
  }

  void prepare_outdir() {
    ensure_directory(cfg_.outdir);
    ensure_directory(abs_path("lexicons"));
    const std::string snapshot = cfg_.to_json().dump(2) + "\n";
    const std::string path = abs_path(kConfigSnapshot);
    if (file_exists(path)) {
      if (read_file(path) != snapshot)
        throw Error("output directory '" + cfg_.outdir +
                    "' holds artifacts from a different configuration; use a "
                    "fresh directory or delete " + std::string(kConfigSnapshot));
    } else {
      write_file(path, snapshot);
    }
  }

  void stage(const char* name, bool needed,
             const std::vector<std::string>& outputs,
             const std::function<void()>& body) {
    if (!needed) return;
    StageRecord rec;
    rec.name = name;
    bool have_all = !outputs.empty();
    for (const auto& out : outputs)
      if (!file_exists(abs_path(out))) have_all = false;
    if (have_all) {
      rec.skipped = true;
      stages_.push_back(rec);
      return;
    }
    auto t0 = std::chrono::steady_clock::now();
    try {
      body();
    } catch (const StageError&) {
      throw;
    } catch (const nlohmann::json::exception& e) {
      throw StageError(name, e.what());
    } catch (const std::exception& e) {
      throw StageError(name, e.what());
    }
    rec.seconds = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0).count();
    stages_.push_back(rec);
  }

  void run_stages(StopAfter stop) {
    stage("load", true, {kHeadlines, kRules}, [&] { do_load(); });
    if (stop == StopAfter::load) return;

    stage("topics", want_novelty(), {kTopicModel, kTopicModelMeta},
          [&] { do_topics(); });
    if (stop == StopAfter::topics) return;

    stage("exposure", want_novelty(), {kExposure}, [&] { do_exposure(); });
    stage("surprise-table", want_surprise(), {kBigrams},
          [&] { do_surprise_table(); });
    stage("featurize", true, featurize_outputs(), [&] { do_featurize(); });
    if (stop == StopAfter::featurize) return;

    stage("split", true, {kSplit}, [&] { do_split(); });
    stage("train", true, {kModel}, [&] { do_train(); });
    if (stop == StopAfter::train) return;

    stage("evaluate", true, {kReportJson}, [&] { do_evaluate(); });
    stage("report", true, report_outputs(), [&] { do_report(); });
  }

  std::vector<std::string> report_outputs() const {
    std::vector<std::string> outs = {kReportTxt};
    if (want_novelty()) {
      outs.push_back(kHistKl);
      outs.push_back(kHistHellinger);
    }
    if (want_surprise()) {
      outs.push_back(kHistZeroRun);
      outs.push_back(kHistMaxNonzero);
    }
    return outs;
  }

  std::vector<std::string> featurize_outputs() const {
    std::vector<std::string> outs = {kFeatures};
    if (want_novelty()) outs.push_back(kNoveltyScores);
    if (want_surprise()) outs.push_back(kSurpriseScores);
    return outs;
  }

  // -- stage bodies ---------------------------------------------------------

  void do_load() {
    headlines_.clear();
    for (const auto& d : cfg_.datasets) {
      auto part = load_headlines(d.path, d.format, d.label,
                                 static_cast<std::int64_t>(headlines_.size()));
      headlines_.insert(headlines_.end(),
                        std::make_move_iterator(part.begin()),
                        std::make_move_iterator(part.end()));
    }
    if (headlines_.empty()) throw Error("no headlines in configured datasets");
    std::string out;
    for (const auto& h : headlines_) {
      nlohmann::json j;
      j["id"] = h.id;
      j["label"] = h.label.value_or(-1);
      j["text"] = h.text;
      out += j.dump();
      out += '\n';
    }
    write_file(abs_path(kHeadlines), out);

    RuleConfig rules = RuleConfig::defaults();
    if (!cfg_.lexicons.rules.empty()) {
      std::string p = resolve_lexicon_path(cfg_.lexicons.rules);
      rules = RuleConfig::from_json(nlohmann::json::parse(read_file(p)));
    }
    write_file(abs_path(kRules), rules.to_json().dump(2) + "\n");

    if (want_infogap()) {
      if (cfg_.lexicons.uncertainty.empty() || cfg_.lexicons.anticipation.empty())
        throw Error("feature set '" + to_string(cfg_.feature_set) +
                    "' needs uncertainty and anticipation lexicons in the "
                    "config");
      copy_lexicon(cfg_.lexicons.uncertainty, LexiconKind::uncertainty,
                   "lexicons/uncertainty.txt");
      copy_lexicon(cfg_.lexicons.anticipation, LexiconKind::anticipation,
                   "lexicons/anticipation.txt");
      for (std::size_t i = 0; i < cfg_.lexicons.self_concept.size(); ++i)
        copy_lexicon(cfg_.lexicons.self_concept[i], LexiconKind::self_concept,
                     "lexicons/self_concept_" + std::to_string(i) + ".txt");
    }
  }

  /// Lexicons are persisted in normalized form (sorted, one word per line) so
  /// the run directory is a self-contained input for scoring.
  void copy_lexicon(const std::string& src, LexiconKind kind,
                    const std::string& rel_dst) {
    Lexicon lex = load_lexicon(resolve_lexicon_path(src), kind);
    std::vector<std::string> words(lex.words.begin(), lex.words.end());
    std::sort(words.begin(), words.end());
    std::string out;
    for (const auto& w : words) {
      out += w;
      out += '\n';
    }
    write_file(abs_path(rel_dst), out);
  }

  void do_topics() {
    // The novelty topic model is fit on the reference corpus (novelty
    // window), never on the labeled headlines; those are only folded in.
    ReferenceCorpus docs = windowed_reference(cfg_.novelty_window);
    TopicModel m = train_lda(docs, cfg_.topics.num_topics, cfg_.topics.alpha,
                             cfg_.topics.beta, cfg_.topics.train_sweeps,
                             topics_seed());
    save_topic_model(m, abs_path(kTopicModel));
    topics_ = std::move(m);
  }

  void do_exposure() {
    ReferenceCorpus ref = windowed_reference(cfg_.novelty_window);
    ExposureDistribution e = exposure(topic_model_artifact(), ref,
                                      exposure_seed(),
                                      cfg_.topics.fold_in_sweeps);
    write_file(abs_path(kExposure), exposure_to_json(e).dump(2) + "\n");
    exposure_ = std::move(e);
  }

  void do_surprise_table() {
    ReferenceCorpus ref = windowed_reference(cfg_.surprise_window);
    BigramTable t = build_bigram_table(ref);
    save_bigram_table(t, abs_path(kBigrams));
    bigrams_ = std::move(t);
  }

  void do_featurize() {
    const auto& headlines = load_headlines_artifact();

    RuleConfig rules;
    std::optional<Lexicon> unc, ant;
    std::vector<Lexicon> self;
    InfoGapExtractor extractor;
    FeaturizeResources res;
    res.fold_in_sweeps = cfg_.topics.fold_in_sweeps;
    if (want_novelty()) {
      res.topics = &topic_model_artifact();
      res.exposure = &exposure_artifact();
    }
    if (want_surprise()) res.bigrams = &bigrams_artifact();
    if (want_infogap()) {
      rules = load_rules_artifact();
      unc = load_lexicon(abs_path("lexicons/uncertainty.txt"),
                         LexiconKind::uncertainty);
      ant = load_lexicon(abs_path("lexicons/anticipation.txt"),
                         LexiconKind::anticipation);
      for (std::size_t i = 0; i < cfg_.lexicons.self_concept.size(); ++i)
        self.push_back(load_lexicon(
            abs_path("lexicons/self_concept_" + std::to_string(i) + ".txt"),
            LexiconKind::self_concept));
      extractor.rules = rules;
      extractor.uncertainty = &*unc;
      extractor.anticipation = &*ant;
      for (const auto& lx : self) extractor.self_concept.push_back(&lx);
      res.infogap = &extractor;
    }

    FeatureMatrix m = featurize(headlines, cfg_.feature_set, res,
                                featurize_seed());
    save_features_csv(m, abs_path(kFeatures));
    if (want_novelty()) write_scores(m, 0, {"kl", "hellinger"}, kNoveltyScores);
    if (want_surprise())
      write_scores(m, want_novelty() ? 2 : 0, {"zero_run", "max_nonzero"},
                   kSurpriseScores);
    features_ = std::move(m);
  }

  void write_scores(const FeatureMatrix& m, std::size_t first_col,
                    const std::vector<std::string>& names,
                    const std::string& rel_path) {
    std::string out = "id,class";
    for (const auto& n : names) {
      out += ',';
      out += n;
    }
    out += '\n';
    for (std::size_t i = 0; i < m.rows.size(); ++i) {
      out += std::to_string(m.ids[i]);
      out += ',';
      out += std::to_string(m.labels[i]);
      for (std::size_t c = 0; c < names.size(); ++c) {
        out += ',';
        out += fmt_double(m.rows[i][first_col + c]);
      }
      out += '\n';
    }
    write_file(abs_path(rel_path), out);
  }

  void do_split() {
    const FeatureMatrix& m = features_artifact();
    Split s = stratified_split(m.labels, cfg_.train_fraction, split_seed());
    nlohmann::json j;
    j["format"] = "curio.split.v1";
    j["train_fraction"] = cfg_.train_fraction;
    j["train"] = s.train;
    j["test"] = s.test;
    write_file(abs_path(kSplit), j.dump() + "\n");
    split_ = std::move(s);
  }

  void do_train() {
    const FeatureMatrix& m = features_artifact();
    const Split& s = split_artifact();
    FeatureMatrix train = take_rows(m, s.train);
    LinearModel model;
    if (cfg_.model.kind == ModelKind::logreg) {
      LogRegOptions opt;
      opt.epochs = cfg_.model.epochs;
      opt.learning_rate = cfg_.model.learning_rate;
      opt.l2 = cfg_.model.l2;
      model = train_logreg(train, opt);
    } else {
      SvmOptions opt;
      opt.iterations = cfg_.model.iterations;
      opt.lambda = cfg_.model.lambda;
      opt.seed = train_seed();
      model = train_svm(train, opt);
    }
    save_model(model, abs_path(kModel));
    model_ = std::move(model);
  }

  void do_evaluate() {
    const FeatureMatrix& m = features_artifact();
    const Split& s = split_artifact();
    FeatureMatrix test = take_rows(m, s.test);
    Metrics metrics = evaluate(model_artifact(), test);
    metrics_ = metrics;
    nlohmann::json j;
    j["format"] = "curio.report.v1";
    j["model"] = to_string(cfg_.model.kind);
    j["feature_set"] = to_string(cfg_.feature_set);
    j["train_size"] = s.train.size();
    j["test_size"] = s.test.size();
    j["metrics"] = metrics_to_json(metrics);
    write_file(abs_path(kReportJson), j.dump(2) + "\n");
  }

  void do_report() {
    nlohmann::json j = nlohmann::json::parse(read_file(abs_path(kReportJson)));
    Metrics m = metrics_from_json(j.at("metrics"));
    if (!metrics_) metrics_ = m;
    std::string out;
    out += "run: " + cfg_.outdir + "\n";
    out += "train/test: " + std::to_string(j["train_size"].get<std::size_t>()) +
           "/" + std::to_string(j["test_size"].get<std::size_t>()) + "\n";
    out += metrics_table(cfg_.model.kind, cfg_.feature_set, m) + "\n";
    write_file(abs_path(kReportTxt), out);

    if (want_novelty()) {
      ScoreTable t = load_scores_csv(abs_path(kNoveltyScores));
      write_hist(t, "kl", kHistKl);
      write_hist(t, "hellinger", kHistHellinger);
    }
    if (want_surprise()) {
      ScoreTable t = load_scores_csv(abs_path(kSurpriseScores));
      write_hist(t, "zero_run", kHistZeroRun);
      write_hist(t, "max_nonzero", kHistMaxNonzero);
    }
  }

  void write_hist(const ScoreTable& t, const std::string& metric,
                  const std::string& rel_path) {
    write_file(abs_path(rel_path),
               histogram_csv(histogram_bins(t.column(metric), t.labels)));
  }

  // -- artifact rehydration ---------------------------------------------------

  const std::vector<Headline>& load_headlines_artifact() {
    if (headlines_.empty())
      headlines_ = load_headlines(abs_path(kHeadlines), DatasetFormat::jsonl);
    return headlines_;
  }

  const TopicModel& topic_model_artifact() {
    if (!topics_) topics_ = load_topic_model(abs_path(kTopicModel));
    return *topics_;
  }

  const ExposureDistribution& exposure_artifact() {
    if (!exposure_)
      exposure_ = exposure_from_json(
          nlohmann::json::parse(read_file(abs_path(kExposure))));
    return *exposure_;
  }

  const BigramTable& bigrams_artifact() {
    if (!bigrams_) bigrams_ = load_bigram_table(abs_path(kBigrams));
    return *bigrams_;
  }

  const FeatureMatrix& features_artifact() {
    if (!features_)
      features_ = load_features_csv(abs_path(kFeatures), cfg_.feature_set);
    return *features_;
  }

  const Split& split_artifact() {
    if (!split_) {
      nlohmann::json j = nlohmann::json::parse(read_file(abs_path(kSplit)));
      Split s;
      s.train = j.at("train").get<std::vector<std::size_t>>();
      s.test = j.at("test").get<std::vector<std::size_t>>();
      split_ = std::move(s);
    }
    return *split_;
  }

  const LinearModel& model_artifact() {
    if (!model_) model_ = load_model(abs_path(kModel));
    return *model_;
  }

  RuleConfig load_rules_artifact() {
    return RuleConfig::from_json(
        nlohmann::json::parse(read_file(abs_path(kRules))));
  }

  ReferenceCorpus windowed_reference(const DateWindow& w) const {
    if (cfg_.reference_path.empty())
      throw Error("config has no reference corpus path");
    return load_reference(cfg_.reference_path, w.start, w.end);
  }

  // -- manifest ---------------------------------------------------------------

  void write_manifest(StopAfter stop, const std::string& failed_stage) {
    nlohmann::json j;
    j["format"] = kManifestFormat;
    j["status"] = failed_stage.empty() ? "complete" : "incomplete";
    if (!failed_stage.empty()) j["failed_stage"] = failed_stage;
    j["stop_after"] = to_string(stop);
    j["seed"] = cfg_.seed;
    j["config_sha256"] = sha256_hex(cfg_.to_json().dump(2) + "\n");
    nlohmann::json counts;
    if (std::size_t n = headline_count()) counts["headlines"] = n;
    if (split_) {
      counts["train"] = split_->train.size();
      counts["test"] = split_->test.size();
    }
    j["counts"] = counts;
    nlohmann::json stages = nlohmann::json::array();
    for (const auto& s : stages_) {
      nlohmann::json sj;
      sj["name"] = s.name;
      sj["skipped"] = s.skipped;
      sj["seconds"] = s.seconds;
      stages.push_back(sj);
    }
    j["stages"] = stages;
    nlohmann::json arts;
    for (const std::string& rel : artifact_names()) {
      std::string p = abs_path(rel);
      if (!file_exists(p)) continue;
      nlohmann::json a;
      a["sha256"] = sha256_file(p);
      a["bytes"] = std::filesystem::file_size(p);
      arts[rel] = a;
    }
    j["artifacts"] = arts;
    write_file(abs_path(kManifest), j.dump(2) + "\n");
  }

  /// Count without forcing a full reload on warm reruns.
  std::size_t headline_count() const {
    if (!headlines_.empty()) return headlines_.size();
    if (features_) return features_->size();
    const std::string p =
        (std::filesystem::path(cfg_.outdir) / kHeadlines).string();
    if (!file_exists(p)) return 0;
    std::string contents = read_file(p);
    std::size_t n = 0;
    for (char c : contents)
      if (c == '\n') ++n;
    return n;
  }

  std::vector<std::string> artifact_names() const {
    std::vector<std::string> names = {
        kConfigSnapshot, kHeadlines,       kRules,       kTopicModel,
        kTopicModelMeta, kExposure,        kBigrams,     kFeatures,
        kNoveltyScores,  kSurpriseScores,  kSplit,       kModel,
        kReportJson,     kReportTxt,       kHistKl,      kHistHellinger,
        kHistZeroRun,    kHistMaxNonzero};
    names.push_back("lexicons/uncertainty.txt");
    names.push_back("lexicons/anticipation.txt");
    for (std::size_t i = 0; i < cfg_.lexicons.self_concept.size(); ++i)
      names.push_back("lexicons/self_concept_" + std::to_string(i) + ".txt");
    return names;
  }
};

inline RunResult run_pipeline(const RunConfig& cfg,
                              StopAfter stop = StopAfter::full) {
  Pipeline p(cfg);
  return p.run(stop);
}

// ---------------------------------------------------------------------------
// Scoring new headlines against a finished run
// ---------------------------------------------------------------------------

struct ScoreResult {
  std::string text;
  std::vector<std::string> schema;
  std::vector<double> features;
  double score = 0.0;
  double prob = 0.0;
  int label = 0;

  /// The per-headline "curiosity profile": every feature by name plus the
  /// classifier's score, probability and hard label.
  nlohmann::json to_json() const {
    nlohmann::json j;
    j["text"] = text;
    nlohmann::json f;
    for (std::size_t i = 0; i < schema.size(); ++i) f[schema[i]] = features[i];
    j["features"] = f;
    j["score"] = score;
    j["prob"] = prob;
    j["label"] = label;
    return j;
  }
};

/// Loads a model plus the featurization resources it needs from a run
/// directory, then scores ad-hoc headlines. Texts are keyed by a hash of
/// their bytes so scoring is deterministic and order-independent.
class ScoreSession {
 public:
  explicit ScoreSession(const std::string& run_dir,
                        const std::string& model_path = "") {
    auto rel = [&](const std::string& name) {
      return (std::filesystem::path(run_dir) / name).string();
    };
    cfg_ = RunConfig::from_json(
        nlohmann::json::parse(read_file(rel(Pipeline::kConfigSnapshot))));
    model_ = load_model(model_path.empty() ? rel(Pipeline::kModel) : model_path);
    if (model_.schema_version != kFeatureSchemaVersion)
      throw Error("model was built with feature schema '" +
                  model_.schema_version + "', this build expects '" +
                  kFeatureSchemaVersion + "'");
    if (model_.schema != feature_schema(model_.set))
      throw Error("model schema does not match its feature set");

    if (uses_novelty(model_.set)) {
      topics_ = load_topic_model(rel(Pipeline::kTopicModel));
      exposure_ = exposure_from_json(
          nlohmann::json::parse(read_file(rel(Pipeline::kExposure))));
    }
    if (uses_surprise(model_.set))
      bigrams_ = load_bigram_table(rel(Pipeline::kBigrams));
    if (uses_infogap(model_.set)) {
      rules_ = RuleConfig::from_json(
          nlohmann::json::parse(read_file(rel(Pipeline::kRules))));
      unc_ = load_lexicon(rel("lexicons/uncertainty.txt"),
                          LexiconKind::uncertainty);
      ant_ = load_lexicon(rel("lexicons/anticipation.txt"),
                          LexiconKind::anticipation);
      for (std::size_t i = 0;; ++i) {
        std::string p =
            rel("lexicons/self_concept_" + std::to_string(i) + ".txt");
        if (!file_exists(p)) break;
        self_.push_back(load_lexicon(p, LexiconKind::self_concept));
      }
    }
  }

  const LinearModel& model() const { return model_; }

  ScoreResult score(const std::string& text) const {
    Headline h = Headline::make(
        static_cast<std::int64_t>(fnv1a64(text)), text, std::nullopt);
    InfoGapExtractor extractor;
    FeaturizeResources res;
    res.fold_in_sweeps = cfg_.topics.fold_in_sweeps;
    if (topics_) {
      res.topics = &*topics_;
      res.exposure = &*exposure_;
    }
    if (bigrams_) res.bigrams = &*bigrams_;
    if (uses_infogap(model_.set)) {
      extractor.rules = rules_;
      extractor.uncertainty = &*unc_;
      extractor.anticipation = &*ant_;
      for (const auto& lx : self_) extractor.self_concept.push_back(&lx);
      res.infogap = &extractor;
    }
    FeatureMatrix m = featurize({h}, model_.set, res,
                                derive_seed(cfg_.seed, 3));
    Prediction p = predict(model_, m.rows[0]);
    ScoreResult r;
    r.text = text;
    r.schema = model_.schema;
    r.features = m.rows[0];
    r.score = p.score;
    r.prob = p.prob;
    r.label = p.label;
    return r;
  }

 private:
  RunConfig cfg_;
  LinearModel model_;
  std::optional<TopicModel> topics_;
  std::optional<ExposureDistribution> exposure_;
  std::optional<BigramTable> bigrams_;
  RuleConfig rules_;
  std::optional<Lexicon> unc_, ant_;
  std::vector<Lexicon> self_;
};

}  // namespace curio

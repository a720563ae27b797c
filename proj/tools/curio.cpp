// curio: clickbait curiosity-feature toolkit command line.
//
// Subcommands map onto pipeline cut points (prep, topics-train, featurize,
// train) plus full runs (eval, run), model application (score), topic-count
// selection (topics-select) and histogram extraction (plot-data). stdout is
// machine-parseable (JSON or CSV); diagnostics go to stderr. Exit codes:
// 0 success, 1 usage error, 2 data or processing error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "curio/pipeline.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> outdir;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("-c,--config", opts.config_path, "run configuration JSON")
      ->required();
  cmd->add_option("--seed", opts.seed, "override the configured seed");
  cmd->add_option("--outdir", opts.outdir, "override the configured outdir");
}

curio::RunConfig load_config(const CommonOpts& opts) {
  curio::RunConfig cfg = curio::RunConfig::load(opts.config_path);
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.outdir) cfg.outdir = *opts.outdir;
  return cfg;
}

nlohmann::json stages_json(const curio::RunResult& r) {
  nlohmann::json out;
  out["outdir"] = r.outdir;
  out["stages"] = nlohmann::json::array();
  for (const auto& s : r.stages) {
    nlohmann::json sj;
    sj["name"] = s.name;
    sj["skipped"] = s.skipped;
    sj["seconds"] = s.seconds;
    out["stages"].push_back(sj);
  }
  return out;
}

int run_to(const CommonOpts& opts, curio::StopAfter stop) {
  curio::RunResult r = curio::run_pipeline(load_config(opts), stop);
  std::cout << stages_json(r).dump() << "\n";
  return 0;
}

std::vector<std::string> gather_texts(const std::vector<std::string>& texts,
                                      const std::string& input_path) {
  std::vector<std::string> out = texts;
  auto take_lines = [&](std::istream& in) {
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) out.push_back(line);
    }
  };
  if (!input_path.empty()) {
    if (input_path == "-") {
      take_lines(std::cin);
    } else {
      std::istringstream in(curio::read_file(input_path));
      take_lines(in);
    }
  } else if (texts.empty()) {
    take_lines(std::cin);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"clickbait curiosity-feature toolkit"};
  app.require_subcommand(1);

  CommonOpts prep_opts, topics_opts, feat_opts, train_opts, eval_opts, run_opts;
  add_common(app.add_subcommand("prep", "load datasets and lexicons into the "
                                        "run directory"),
             prep_opts);
  add_common(app.add_subcommand("topics-train",
                                "train the topic model (implies prep)"),
             topics_opts);
  add_common(app.add_subcommand("featurize",
                                "compute feature matrix and score tables"),
             feat_opts);
  add_common(app.add_subcommand("train", "split and train the classifier"),
             train_opts);
  add_common(app.add_subcommand("eval", "full run; print the report JSON"),
             eval_opts);
  add_common(app.add_subcommand("run", "full run; print a metrics CSV row"),
             run_opts);

  CommonOpts select_opts;
  std::vector<int> candidates;
  int select_sweeps = 200;
  int select_top_n = 10;
  auto* select = app.add_subcommand(
      "topics-select", "score candidate topic counts by coherence");
  add_common(select, select_opts);
  select->add_option("--candidates", candidates, "topic counts to try")
      ->required()
      ->delimiter(',');
  select->add_option("--sweeps", select_sweeps, "training sweeps per candidate");
  select->add_option("--top-n", select_top_n, "top words per topic scored");

  std::string score_run, score_model, score_input;
  std::vector<std::string> score_texts;
  auto* score = app.add_subcommand("score", "score headlines with a run's model");
  score->add_option("--run", score_run, "run directory")->required();
  score->add_option("--model", score_model, "model JSON (default: run's model)");
  score->add_option("--text", score_texts, "headline text (repeatable)");
  score->add_option("--input", score_input,
                    "file with one headline per line ('-' for stdin)");

  std::string plot_run, plot_metric;
  int plot_bins = 50;
  auto* plot = app.add_subcommand(
      "plot-data", "histogram a per-headline metric by class");
  plot->add_option("--run", plot_run, "run directory")->required();
  plot->add_option("--metric", plot_metric,
                   "kl, hellinger, zero_run or max_nonzero")
      ->required();
  plot->add_option("--bins", plot_bins, "number of bins");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream os;
    int code = app.exit(e, os, os);
    std::cerr << os.str();
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand("prep")) return run_to(prep_opts, curio::StopAfter::load);
    if (app.got_subcommand("topics-train"))
      return run_to(topics_opts, curio::StopAfter::topics);
    if (app.got_subcommand("featurize"))
      return run_to(feat_opts, curio::StopAfter::featurize);
    if (app.got_subcommand("train"))
      return run_to(train_opts, curio::StopAfter::train);

    if (app.got_subcommand("eval")) {
      curio::RunConfig cfg = load_config(eval_opts);
      curio::run_pipeline(cfg, curio::StopAfter::full);
      std::cout << curio::read_file(
          (std::filesystem::path(cfg.outdir) / curio::Pipeline::kReportJson)
              .string());
      return 0;
    }

    if (app.got_subcommand("run")) {
      curio::RunConfig cfg = load_config(run_opts);
      curio::RunResult r = curio::run_pipeline(cfg, curio::StopAfter::full);
      if (!r.metrics) throw curio::Error("run finished without metrics");
      std::cout << "model,features,accuracy,f1,mse\n"
                << curio::metrics_csv_row(cfg.model.kind, cfg.feature_set,
                                          *r.metrics)
                << "\n";
      return 0;
    }

    if (app.got_subcommand("topics-select")) {
      curio::RunConfig cfg = load_config(select_opts);
      curio::ReferenceCorpus docs;
      for (const auto& d : cfg.datasets) {
        auto part = curio::load_headlines(
            d.path, d.format, d.label,
            static_cast<std::int64_t>(docs.headlines.size()));
        docs.headlines.insert(docs.headlines.end(),
                              std::make_move_iterator(part.begin()),
                              std::make_move_iterator(part.end()));
      }
      curio::SelectTopicsOptions opt;
      opt.alpha = cfg.topics.alpha;
      opt.beta = cfg.topics.beta;
      opt.sweeps = select_sweeps;
      opt.top_n = select_top_n;
      opt.seed = curio::derive_seed(cfg.seed, 1);
      curio::TopicSelection sel =
          curio::select_num_topics(docs, candidates, opt);
      nlohmann::json out;
      out["best"] = sel.best;
      out["scores"] = nlohmann::json::array();
      for (const auto& s : sel.scores) {
        nlohmann::json sj;
        sj["num_topics"] = s.num_topics;
        sj["coherence"] = s.coherence;
        out["scores"].push_back(sj);
      }
      std::cout << out.dump() << "\n";
      return 0;
    }

    if (app.got_subcommand("score")) {
      curio::ScoreSession session(score_run, score_model);
      for (const auto& text : gather_texts(score_texts, score_input))
        std::cout << session.score(text).to_json().dump() << "\n";
      return 0;
    }

    if (app.got_subcommand("plot-data")) {
      const bool novelty = plot_metric == "kl" || plot_metric == "hellinger";
      const bool surprise =
          plot_metric == "zero_run" || plot_metric == "max_nonzero";
      if (!novelty && !surprise)
        throw curio::Error("unknown metric '" + plot_metric +
                           "' (expected kl, hellinger, zero_run or max_nonzero)");
      std::string path =
          (std::filesystem::path(plot_run) /
           (novelty ? curio::Pipeline::kNoveltyScores
                    : curio::Pipeline::kSurpriseScores))
              .string();
      curio::ScoreTable t = curio::load_scores_csv(path);
      auto bins =
          curio::histogram_bins(t.column(plot_metric), t.labels, plot_bins);
      std::cout << curio::histogram_csv(bins);
      return 0;
    }
  } catch (const curio::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

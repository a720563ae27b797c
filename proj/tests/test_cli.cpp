// End-to-end tests for the curio command line. Each case shells out to the
// real binary (path in $CURIO_CLI, set by CTest) and inspects exit code,
// stdout and stderr.

#include <sys/wait.h>

#include <cstdlib>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>
#include <json.hpp>

#include "curio/pipeline.hpp"
#include "testutil.hpp"

namespace {

struct CmdResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string shell_quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) {
    if (c == '\'')
      q += "'\\''";
    else
      q += c;
  }
  q += "'";
  return q;
}

testutil::TempDir& io_dir() {
  static testutil::TempDir d;
  return d;
}

CmdResult run_cli(const std::string& args, const std::string& stdin_path = "") {
  const char* exe = std::getenv("CURIO_CLI");
  REQUIRE(exe != nullptr);
  static int seq = 0;
  const std::string out_path = io_dir().file("out_" + std::to_string(seq));
  const std::string err_path = io_dir().file("err_" + std::to_string(seq));
  ++seq;
  std::string cmd = shell_quote(exe) + " " + args;
  if (!stdin_path.empty()) cmd += " < " + shell_quote(stdin_path);
  cmd += " > " + shell_quote(out_path) + " 2> " + shell_quote(err_path);
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  CmdResult r;
  r.code = WEXITSTATUS(status);
  r.out = curio::read_file(out_path);
  r.err = curio::read_file(err_path);
  return r;
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == '\n') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

// One shared config and one completed full run; built on first use so every
// later case can reuse the trained run directory.
struct CliFixture {
  testutil::TempDir dir;
  curio::RunConfig cfg;
  std::string config_path;
  std::string outdir;
  CmdResult full_run;

  CliFixture() {
    cfg = testutil::make_run_config(dir);
    config_path = dir.file("config.json");
    curio::write_file(config_path, cfg.to_json().dump(2) + "\n");
    outdir = cfg.outdir;
    full_run = run_cli("run -c " + shell_quote(config_path));
    REQUIRE(full_run.code == 0);
  }
};

CliFixture& fixture() {
  static CliFixture f;
  return f;
}

}  // namespace

TEST_CASE("cli help and usage errors") {
  SECTION("--help exits 0 with help text on stderr") {
    CmdResult r = run_cli("--help");
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    CHECK(r.err.find("Usage:") != std::string::npos);
    CHECK(r.err.find("topics-select") != std::string::npos);
    CHECK(r.err.find("plot-data") != std::string::npos);
  }
  SECTION("no subcommand is a usage error") {
    CmdResult r = run_cli("");
    CHECK(r.code == 1);
    CHECK_FALSE(r.err.empty());
  }
  SECTION("unknown subcommand is a usage error") {
    CmdResult r = run_cli("frobnicate");
    CHECK(r.code == 1);
    CHECK_FALSE(r.err.empty());
  }
  SECTION("missing --config is a usage error") {
    CmdResult r = run_cli("run");
    CHECK(r.code == 1);
    CHECK(r.err.find("--config") != std::string::npos);
  }
  SECTION("missing config file is a data error") {
    CmdResult r = run_cli("run -c /nonexistent/curio-config.json");
    CHECK(r.code == 2);
    CHECK(r.err.rfind("error:", 0) == 0);
  }
  SECTION("unparseable config file is a data error") {
    testutil::TempDir dir;
    const std::string bad = dir.file("bad.json");
    curio::write_file(bad, "{not json");
    CmdResult r = run_cli("run -c " + shell_quote(bad));
    CHECK(r.code == 2);
    CHECK(r.err.rfind("error:", 0) == 0);
  }
}

TEST_CASE("cli run prints a metrics CSV row") {
  CliFixture& f = fixture();
  CHECK(f.full_run.err.empty());

  std::vector<std::string> lines = lines_of(f.full_run.out);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "model,features,accuracy,f1,mse");
  std::vector<std::string> fields = split_commas(lines[1]);
  REQUIRE(fields.size() == 5);
  CHECK(fields[0] == "logreg");
  CHECK(fields[1] == "all");
  const double acc = curio::parse_double(fields[2], "accuracy");
  const double f1 = curio::parse_double(fields[3], "f1");
  const double mse = curio::parse_double(fields[4], "mse");
  CHECK(acc >= 0.0);
  CHECK(acc <= 1.0);
  CHECK(f1 >= 0.0);
  CHECK(f1 <= 1.0);
  CHECK(mse >= 0.0);
  CHECK(mse <= 1.0);

  SECTION("a warm rerun prints the identical row") {
    CmdResult again = run_cli("run -c " + shell_quote(f.config_path));
    CHECK(again.code == 0);
    CHECK(again.out == f.full_run.out);
    CHECK(again.err.empty());
  }
}

TEST_CASE("cli eval prints the report JSON") {
  CliFixture& f = fixture();
  CmdResult r = run_cli("eval -c " + shell_quote(f.config_path));
  REQUIRE(r.code == 0);
  nlohmann::json report = nlohmann::json::parse(r.out);
  REQUIRE(report.contains("metrics"));
  CHECK(report["metrics"]["n"].get<std::size_t>() == 90);

  // The CSV row from `run` is formatted from the same metrics object.
  std::vector<std::string> fields =
      split_commas(lines_of(f.full_run.out)[1]);
  CHECK(report["metrics"]["accuracy"].get<double>() ==
        curio::parse_double(fields[2], "accuracy"));
}

TEST_CASE("cli prep stops after the load stage") {
  CliFixture& f = fixture();
  const std::string prep_dir = f.dir.file("prep_run");
  CmdResult r = run_cli("prep -c " + shell_quote(f.config_path) +
                        " --outdir " + shell_quote(prep_dir));
  REQUIRE(r.code == 0);
  CHECK(r.err.empty());

  nlohmann::json j = nlohmann::json::parse(r.out);
  CHECK(j["outdir"].get<std::string>() == prep_dir);
  REQUIRE(j["stages"].size() == 1);
  CHECK(j["stages"][0]["name"].get<std::string>() == "load");
  CHECK(j["stages"][0]["skipped"].get<bool>() == false);

  namespace fs = std::filesystem;
  CHECK(fs::exists(fs::path(prep_dir) / "headlines.jsonl"));
  CHECK_FALSE(fs::exists(fs::path(prep_dir) / "features.csv"));
  nlohmann::json manifest = nlohmann::json::parse(
      curio::read_file((fs::path(prep_dir) / "manifest.json").string()));
  CHECK(manifest["stop_after"].get<std::string>() == "load");
  CHECK(manifest["status"].get<std::string>() == "complete");
}

TEST_CASE("cli featurize stops before training") {
  CliFixture& f = fixture();
  const std::string feat_dir = f.dir.file("feat_run");
  CmdResult r = run_cli("featurize -c " + shell_quote(f.config_path) +
                        " --outdir " + shell_quote(feat_dir));
  REQUIRE(r.code == 0);

  nlohmann::json j = nlohmann::json::parse(r.out);
  std::vector<std::string> names;
  for (const auto& s : j["stages"]) names.push_back(s["name"].get<std::string>());
  CHECK(names == std::vector<std::string>{"load", "topics", "exposure",
                                          "surprise-table", "featurize"});

  namespace fs = std::filesystem;
  CHECK(fs::exists(fs::path(feat_dir) / "features.csv"));
  CHECK_FALSE(fs::exists(fs::path(feat_dir) / "model.json"));
}

TEST_CASE("cli seed override lands in the manifest") {
  CliFixture& f = fixture();
  const std::string seed_dir = f.dir.file("seed_run");
  CmdResult r = run_cli("prep -c " + shell_quote(f.config_path) +
                        " --seed 99 --outdir " + shell_quote(seed_dir));
  REQUIRE(r.code == 0);
  nlohmann::json manifest = nlohmann::json::parse(curio::read_file(
      (std::filesystem::path(seed_dir) / "manifest.json").string()));
  CHECK(manifest["seed"].get<std::uint64_t>() == 99);
}

TEST_CASE("cli score emits one JSON line per headline") {
  CliFixture& f = fixture();
  const std::string base = "score --run " + shell_quote(f.outdir);

  SECTION("--text") {
    CmdResult r = run_cli(
        base + " --text 'you wont believe what these cats did'");
    REQUIRE(r.code == 0);
    std::vector<std::string> lines = lines_of(r.out);
    REQUIRE(lines.size() == 1);
    nlohmann::json j = nlohmann::json::parse(lines[0]);
    CHECK(j["text"].get<std::string>() ==
          "you wont believe what these cats did");
    REQUIRE(j["features"].size() == 18);
    CHECK(j["features"].contains("novelty_kl"));
    CHECK(j["features"].contains("infogap_contains_number"));
    CHECK(j["prob"].get<double>() > 0.5);
    CHECK(j["label"].get<int>() == 1);
  }

  SECTION("--text is repeatable") {
    CmdResult r = run_cli(base +
                          " --text 'council approves budget plan'"
                          " --text 'which city are you?'");
    REQUIRE(r.code == 0);
    std::vector<std::string> lines = lines_of(r.out);
    REQUIRE(lines.size() == 2);
    nlohmann::json news = nlohmann::json::parse(lines[0]);
    CHECK(news["prob"].get<double>() < 0.5);
    CHECK(news["label"].get<int>() == 0);
    CHECK(nlohmann::json::parse(lines[1])["label"].get<int>() == 1);
  }

  SECTION("--input file, blank lines skipped") {
    const std::string in_path = f.dir.file("headlines.txt");
    curio::write_file(in_path,
                      "council approves budget plan\n"
                      "\n"
                      "17 photos that prove cats rule\n");
    CmdResult r = run_cli(base + " --input " + shell_quote(in_path));
    REQUIRE(r.code == 0);
    CHECK(lines_of(r.out).size() == 2);
  }

  SECTION("--input - reads stdin") {
    const std::string in_path = f.dir.file("stdin.txt");
    curio::write_file(in_path, "minister backs farm package\n");
    CmdResult r = run_cli(base + " --input -", in_path);
    REQUIRE(r.code == 0);
    std::vector<std::string> lines = lines_of(r.out);
    REQUIRE(lines.size() == 1);
    CHECK(nlohmann::json::parse(lines[0])["text"].get<std::string>() ==
          "minister backs farm package");
  }

  SECTION("scoring is deterministic") {
    const std::string args = base + " --text 'this is why dogs bark'";
    CmdResult a = run_cli(args);
    CmdResult b = run_cli(args);
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    CHECK(a.out == b.out);
  }

  SECTION("missing --run is a usage error") {
    CmdResult r = run_cli("score --text hello");
    CHECK(r.code == 1);
    CHECK(r.err.find("--run") != std::string::npos);
  }
}

TEST_CASE("cli plot-data prints per-class histograms") {
  CliFixture& f = fixture();
  const std::string base = "plot-data --run " + shell_quote(f.outdir);

  SECTION("kl histogram, default bins") {
    CmdResult r = run_cli(base + " --metric kl");
    REQUIRE(r.code == 0);
    std::vector<std::string> lines = lines_of(r.out);
    REQUIRE(lines.size() == 51);
    CHECK(lines[0] == "bin_low,bin_high,count_clickbait,count_nonclickbait");
    std::size_t total = 0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
      std::vector<std::string> fields = split_commas(lines[i]);
      REQUIRE(fields.size() == 4);
      total += curio::parse_int(fields[2], "count");
      total += curio::parse_int(fields[3], "count");
    }
    CHECK(total == 120);  // every headline lands in exactly one bin
  }

  SECTION("--bins is honoured") {
    CmdResult r = run_cli(base + " --metric zero_run --bins 5");
    REQUIRE(r.code == 0);
    CHECK(lines_of(r.out).size() == 6);
  }

  SECTION("unknown metric is a data error") {
    CmdResult r = run_cli(base + " --metric bogus");
    CHECK(r.code == 2);
    CHECK(r.err.find("unknown metric") != std::string::npos);
  }
}

TEST_CASE("cli topics-select reports coherence per candidate") {
  CliFixture& f = fixture();
  CmdResult r = run_cli("topics-select -c " + shell_quote(f.config_path) +
                        " --candidates 2,3 --sweeps 10 --top-n 4");
  REQUIRE(r.code == 0);
  nlohmann::json j = nlohmann::json::parse(r.out);
  const int best = j["best"].get<int>();
  CHECK((best == 2 || best == 3));
  REQUIRE(j["scores"].size() == 2);
  CHECK(j["scores"][0]["num_topics"].get<int>() == 2);
  CHECK(j["scores"][1]["num_topics"].get<int>() == 3);
  CHECK(j["scores"][0]["coherence"].is_number());
  CHECK(j["scores"][1]["coherence"].is_number());
}

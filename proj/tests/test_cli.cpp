#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "genremap/cli.hpp"
#include "genremap/config.hpp"
#include "genremap/error.hpp"
#include "genremap/synth.hpp"

using namespace genremap;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_command(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("genremap_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("usage errors exit 1") {
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({}).code == 1);
  CHECK(run({"build-vocab", "--no-such-flag"}).code == 1);
  CHECK(run({"--help"}).code == 0);
  const Run r = run({"simulate", "--preset", "sideways", "--out-dir", fresh_dir("usage").string()});
  CHECK(r.code == 1);
  CHECK(!r.err.empty());
}

TEST_CASE("data errors exit 2") {
  const fs::path d = fresh_dir("data");
  write(d / "bad.jsonl", "{\"volume_id\": \"v\", \"pages\": []}\n");
  const Run r = run({"build-vocab", "--corpus", (d / "bad.jsonl").string(), "--out-dir", d.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("missing field: year") != std::string::npos);
  CHECK(run({"build-vocab", "--corpus", (d / "absent.jsonl").string(), "--out-dir", d.string()}).code == 2);
}

TEST_CASE("config files reject unknown keys") {
  CHECK_THROWS_AS(config_from_json(nlohmann::json{{"vocab_sise", 100}}), UsageError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json{{"slices", {{{"start", 1}, {"end", 2}, {"mid", 3}}}}}),
                  UsageError);
  const auto c = config_from_json(nlohmann::json{{"vocab_size", 100}, {"kappa", 0.25}});
  CHECK(c.vocab_size == 100);
  CHECK(c.kappa == 0.25);
  CHECK(c.folds == 10);
  const auto back = config_from_json(config_to_json(c));
  CHECK(back.vocab_size == 100);
  CHECK(back.slices.size() == 3);

  const fs::path d = fresh_dir("config");
  write(d / "config.json", "{\"colour\": 1}");
  CHECK(run({"simulate", "--preset", "pages", "--config", (d / "config.json").string(), "--out-dir", d.string()})
            .code == 1);
}

TEST_CASE("simulate then evaluate writes metrics") {
  const fs::path d = fresh_dir("evaluate");
  auto spec = page_corpus_spec_json(4);
  spec["n_volumes"] = 12;
  spec["pages"] = {5, 8};
  write(d / "spec.json", spec.dump());
  Run r = run({"simulate", "--spec", (d / "spec.json").string(), "--out", "corpus.jsonl", "--out-dir", d.string()});
  REQUIRE(r.code == 0);
  CHECK(fs::exists(d / "corpus.jsonl"));
  r = run({"evaluate", "--corpus", (d / "corpus.jsonl").string(), "--k", "3", "--seed", "7", "--size", "80",
           "--out-dir", d.string()});
  REQUIRE(r.code == 0);
  CHECK(slurp(d / "metrics_raw.csv").rfind("class,precision,recall,f1\n", 0) == 0);
  CHECK(slurp(d / "metrics_smoothed.csv").find("\nmicro,,,") != std::string::npos);
  CHECK(slurp(d / "comparison.csv").rfind("class,raw_f1,smoothed_f1\n", 0) == 0);
  const std::string first = slurp(d / "metrics_smoothed.csv");
  REQUIRE(run({"evaluate", "--corpus", (d / "corpus.jsonl").string(), "--k", "3", "--seed", "7", "--size", "80",
               "--jobs", "3", "--out-dir", d.string()})
              .code == 0);
  CHECK(slurp(d / "metrics_smoothed.csv") == first);
}

TEST_CASE("trend from a predictions file") {
  const fs::path d = fresh_dir("trend");
  write(d / "preds.csv", "volume_id,year,probability\na,1700,0.5\nb,1702,0.7\nc,1711,0.2\n");
  const Run r = run({"trend", "--predictions", (d / "preds.csv").string(), "--bin", "5", "--out-dir", d.string()});
  REQUIRE(r.code == 0);
  CHECK(slurp(d / "trend.csv") ==
        "bin_start,n,mean,stderr\n1700,2,0.600000,0.100000\n1710,1,0.200000,0.000000\n");
  CHECK(run({"trend", "--predictions", (d / "preds.csv").string(), "--column", "nope", "--out-dir", d.string()})
            .code == 2);
}

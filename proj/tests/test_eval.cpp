#include <doctest.h>

#include <algorithm>
#include <set>

#include "genremap/error.hpp"
#include "genremap/eval.hpp"
#include "genremap/rng.hpp"
#include "genremap/synth.hpp"
#include "oracles.hpp"

using namespace genremap;

TEST_CASE("point-of-view confusion table") {
  const ConfusionMatrix cm({"first-person", "third-person"}, {{115, 4}, {4, 165}});
  const auto r = f1_scores(cm);
  const auto& first = r.for_class("first-person");
  CHECK(first.precision == doctest::Approx(0.966).epsilon(0.0005 / 0.966));
  CHECK(first.recall == doctest::Approx(0.966).epsilon(0.0005 / 0.966));
  CHECK(first.f1 == doctest::Approx(0.966).epsilon(0.0005 / 0.966));
  CHECK(first.support == 119);
  CHECK(cm.total() == 288);
}

TEST_CASE("perfect diagonal") {
  const ConfusionMatrix cm({"a", "b", "c"}, {{3, 0, 0}, {0, 5, 0}, {0, 0, 1}});
  const auto r = f1_scores(cm);
  CHECK(r.macro_f1 == 1.0);
  CHECK(r.micro_f1 == 1.0);
  for (const auto& m : r.per_class) CHECK(m.f1 == 1.0);
}

TEST_CASE("three-class matrix against the oracle") {
  const std::vector<std::vector<std::size_t>> m = {{7, 2, 1}, {3, 9, 0}, {0, 4, 6}};
  const auto r = f1_scores(ConfusionMatrix({"a", "b", "c"}, m));
  double macro = 0.0;
  for (std::size_t c = 0; c < 3; ++c) {
    const auto o = oracle::class_prf(m, c);
    CHECK(r.per_class[c].precision == doctest::Approx(o.precision).epsilon(1e-12));
    CHECK(r.per_class[c].recall == doctest::Approx(o.recall).epsilon(1e-12));
    CHECK(r.per_class[c].f1 == doctest::Approx(o.f1).epsilon(1e-12));
    macro += o.f1 / 3.0;
  }
  CHECK(r.macro_f1 == doctest::Approx(macro).epsilon(1e-12));
  CHECK(r.micro_f1 == doctest::Approx(22.0 / 32.0).epsilon(1e-12));
}

TEST_CASE("zero-support classes are absent from the macro average") {
  const std::vector<std::vector<std::size_t>> m = {{4, 1, 0}, {1, 4, 0}, {0, 0, 0}};
  const auto r = f1_scores(ConfusionMatrix({"a", "b", "c"}, m));
  CHECK_FALSE(r.for_class("c").present);
  CHECK(r.macro_f1 == doctest::Approx(0.8));
  CHECK(metrics_to_csv(r).find("\nc,") == std::string::npos);
  CHECK_THROWS_WITH_AS(f1_scores(ConfusionMatrix({"a", "b"})), "confusion matrix is empty", Error);
}

TEST_CASE("metrics are invariant to relabelling rows and columns together") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t s = 4;
    std::vector<std::vector<std::size_t>> m(s, std::vector<std::size_t>(s));
    for (auto& row : m)
      for (auto& x : row) x = static_cast<std::size_t>(rng.uniform_int(0, 9));
    std::vector<std::size_t> perm = {0, 1, 2, 3};
    rng.shuffle(perm);
    std::vector<std::vector<std::size_t>> pm(s, std::vector<std::size_t>(s));
    for (std::size_t i = 0; i < s; ++i)
      for (std::size_t j = 0; j < s; ++j) pm[i][j] = m[perm[i]][perm[j]];
    const std::vector<GenreId> names = {"a", "b", "c", "d"};
    std::vector<GenreId> pnames;
    for (std::size_t i : perm) pnames.push_back(names[i]);
    const auto r = f1_scores(ConfusionMatrix(names, m));
    const auto pr = f1_scores(ConfusionMatrix(pnames, pm));
    CHECK(r.macro_f1 == doctest::Approx(pr.macro_f1).epsilon(1e-12));
    CHECK(r.micro_f1 == pr.micro_f1);
    for (const auto& g : names) CHECK(r.for_class(g).f1 == doctest::Approx(pr.for_class(g).f1).epsilon(1e-12));
    std::size_t trace = 0, total = 0;
    for (std::size_t i = 0; i < s; ++i)
      for (std::size_t j = 0; j < s; ++j) {
        total += m[i][j];
        if (i == j) trace += m[i][j];
      }
    if (total > 0) CHECK(r.micro_f1 == doctest::Approx(static_cast<double>(trace) / static_cast<double>(total)));
  }
}

TEST_CASE("volume folds") {
  const auto ten = kfold_by_volume(10, 10, 1);
  for (const auto& f : ten) CHECK(f.test.size() == 1);

  const auto folds = kfold_by_volume(23, 5, 9);
  std::multiset<std::size_t> seen;
  for (const auto& f : folds) {
    CHECK(f.test.size() >= 4);
    CHECK(f.test.size() <= 5);
    CHECK(f.train.size() + f.test.size() == 23);
    CHECK(std::is_sorted(f.train.begin(), f.train.end()));
    for (std::size_t i : f.test) {
      seen.insert(i);
      CHECK(std::find(f.train.begin(), f.train.end(), i) == f.train.end());
    }
  }
  CHECK(seen.size() == 23);
  CHECK(std::set<std::size_t>(seen.begin(), seen.end()).size() == 23);

  const auto again = kfold_by_volume(23, 5, 9);
  for (std::size_t i = 0; i < folds.size(); ++i) CHECK(again[i].test == folds[i].test);
  CHECK_THROWS_WITH_AS(kfold_by_volume(5, 1, 0), "k must be at least 2", Error);
  CHECK_THROWS_AS(kfold_by_volume(3, 5, 0), Error);
}

TEST_CASE("a single-genre corpus cross-validates perfectly") {
  auto j = page_corpus_spec_json(1);
  j["genres"] = nlohmann::json::array({j["genres"][0]});
  j["n_volumes"] = 6;
  j["pages"] = {3, 5};
  const auto vols = generate_corpus(spec_from_json(j));
  PipelineConfig config;
  config.vocab_size = 50;
  const auto cv = crossvalidate_pipeline(vols, GenreTaxonomy::default_taxonomy(), 3, 2, config);
  CHECK(cv.raw_report.micro_f1 == 1.0);
  CHECK(cv.smoothed_report.micro_f1 == 1.0);
  CHECK(cv.raw_report.macro_f1 == 1.0);
  CHECK(cv.smoothed_report.macro_f1 == 1.0);
}

TEST_CASE("trend bins") {
  const std::vector<double> half(30, 0.5);
  std::vector<int> years;
  for (int i = 0; i < 30; ++i) years.push_back(1700 + i * 3);
  const auto t = time_binned_means(half, years, 5);
  for (const auto& b : t.bins) {
    CHECK(b.mean == 0.5);
    CHECK(b.std_error == 0.0);
    CHECK(b.n >= 1);
  }
  for (std::size_t i = 1; i < t.bins.size(); ++i) CHECK(t.bins[i].start_year > t.bins[i - 1].start_year);

  Rng rng(8);
  std::vector<double> v;
  std::vector<int> y;
  for (int i = 0; i < 200; ++i) {
    v.push_back(rng.uniform());
    y.push_back(static_cast<int>(rng.uniform_int(1700, 1899)));
  }
  const auto base = time_binned_means(v, y, 20);
  std::vector<std::size_t> idx(v.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  rng.shuffle(idx);
  std::vector<double> sv;
  std::vector<int> sy;
  for (std::size_t i : idx) {
    sv.push_back(v[i]);
    sy.push_back(y[i]);
  }
  const auto shuffled = time_binned_means(sv, sy, 20);
  REQUIRE(shuffled.bins.size() == base.bins.size());
  for (std::size_t i = 0; i < base.bins.size(); ++i) {
    CHECK(shuffled.bins[i].mean == base.bins[i].mean);
    CHECK(shuffled.bins[i].std_error == base.bins[i].std_error);
    CHECK(base.bins[i].start_year % 20 == 0);
  }
  CHECK(trend_to_csv(base).rfind("bin_start,n,mean,stderr\n1700,", 0) == 0);
  CHECK_THROWS_AS(time_binned_means(std::vector<double>{}, std::vector<int>{}, 5), Error);
  CHECK_THROWS_AS(time_binned_means(v, y, 0), Error);
}

TEST_CASE("metrics CSV layout") {
  const auto r = f1_scores(ConfusionMatrix({"a", "b"}, {{1, 1}, {0, 2}}));
  const std::string csv = metrics_to_csv(r);
  CHECK(csv.rfind("class,precision,recall,f1\na,1.000000,0.500000,0.666667\n", 0) == 0);
  CHECK(csv.find("\nmicro,,,0.750000\n") != std::string::npos);
  CHECK(comparison_to_csv(r, r).rfind("class,raw_f1,smoothed_f1\n", 0) == 0);
}

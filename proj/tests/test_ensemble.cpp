#include <doctest.h>

#include <filesystem>

#include "genremap/ensemble.hpp"
#include "genremap/error.hpp"
#include "genremap/model_io.hpp"
#include "genremap/rng.hpp"
#include "genremap/synth.hpp"

using namespace genremap;

namespace {

TimeSlice slice(int start, int end, double p = 0.5) {
  TimeSlice s;
  s.start_year = start;
  s.end_year = end;
  s.model = constant_model({"w", "#rel_length", "#rel_position", "#capline_density"}, p);
  return s;
}

TimeSlicedEnsemble three_slices() {
  TimeSlicedEnsemble e;
  e.slices = {slice(1700, 1800, 0.2), slice(1750, 1850, 0.5), slice(1800, 1900, 0.9)};
  return e;
}

}  // namespace

TEST_CASE("triangular slice weights") {
  CHECK(slice_weight(1700, 1800, 1775) == doctest::Approx(0.5));
  CHECK(slice_weight(1700, 1800, 1750) == 1.0);
  CHECK(slice_weight(1700, 1800, 1700) == 0.0);
  CHECK(slice_weight(1700, 1800, 1800) == 0.0);
  CHECK(slice_weight(1700, 1800, 1650) == 0.0);
  for (int d = 0; d <= 60; ++d)
    CHECK(slice_weight(1700, 1800, 1750 - d) == doctest::Approx(slice_weight(1700, 1800, 1750 + d)));
  CHECK(slice_weight(1700, 1800, 1760, Weighting::kUniform) == 1.0);
  CHECK(slice_weight(1700, 1800, 1750, Weighting::kCosine) == doctest::Approx(1.0));
  CHECK(slice_weight(1700, 1800, 1775, Weighting::kCosine) == doctest::Approx(0.5));
  CHECK(parse_weighting("cosine") == Weighting::kCosine);
  CHECK_THROWS_AS(parse_weighting("gaussian"), Error);
}

TEST_CASE("combining slice predictions") {
  TimeSlicedEnsemble two;
  two.slices = {slice(1700, 1800), slice(1800, 1900)};
  const std::vector<double> same = {0.8, 0.8};
  CHECK(combine_slice_predictions(two, same, 1760).probability == doctest::Approx(0.8));
  // At 1750 only the first slice has weight.
  CHECK(combine_slice_predictions(two, std::vector<double>{0.3, 0.9}, 1750).probability ==
        doctest::Approx(0.3));

  TimeSlicedEnsemble overlap;
  overlap.slices = {slice(1700, 1800), slice(1750, 1850)};
  CHECK(combine_slice_predictions(overlap, std::vector<double>{0.2, 0.6}, 1775).probability ==
        doctest::Approx(0.4));
}

TEST_CASE("ensemble output is a convex combination and order-free") {
  Rng rng(10);
  auto e = three_slices();
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> p = {rng.uniform(), rng.uniform(), rng.uniform()};
    const int year = static_cast<int>(rng.uniform_int(1690, 1910));
    const auto out = combine_slice_predictions(e, p, year);
    CHECK(out.probability >= *std::min_element(p.begin(), p.end()) - 1e-15);
    CHECK(out.probability <= *std::max_element(p.begin(), p.end()) + 1e-15);

    TimeSlicedEnsemble r = e;
    std::vector<std::size_t> idx = {2, 0, 1};
    r.slices = {e.slices[2], e.slices[0], e.slices[1]};
    const std::vector<double> rp = {p[2], p[0], p[1]};
    const auto back = combine_slice_predictions(r, rp, year);
    CHECK(back.probability == out.probability);
    CHECK(back.out_of_coverage == out.out_of_coverage);
  }
}

TEST_CASE("single slice reproduces its model") {
  TimeSlicedEnsemble e;
  e.slices = {slice(1700, 1800, 0.37)};
  FeatureVector fv;
  fv.word_freqs = {0.1};
  CHECK(ensemble_predict(e, fv, 1740).probability == predict_proba(e.slices[0].model, fv));
}

TEST_CASE("years outside every slice fall back to the nearest slice") {
  const auto e = three_slices();
  const std::vector<double> p = {0.2, 0.5, 0.9};
  const auto early = combine_slice_predictions(e, p, 1650);
  CHECK(early.out_of_coverage);
  CHECK(early.probability == 0.2);
  const auto late = combine_slice_predictions(e, p, 1950);
  CHECK(late.out_of_coverage);
  CHECK(late.probability == 0.9);
  CHECK_FALSE(combine_slice_predictions(e, p, 1780).out_of_coverage);
  CHECK(e.coverage_start() == 1700);
  CHECK(e.coverage_end() == 1900);

  TimeSlicedEnsemble empty;
  CHECK_THROWS_WITH_AS(combine_slice_predictions(empty, std::vector<double>{}, 1800), "empty ensemble", Error);
}

TEST_CASE("ensemble files round-trip") {
  const auto dir = std::filesystem::temp_directory_path() / "genremap_ensemble_test";
  std::filesystem::create_directories(dir);
  auto e = three_slices();
  for (auto& s : e.slices) {
    s.model_path = "slice_" + std::to_string(s.start_year) + "_" + std::to_string(s.end_year) + ".json";
    save_model(dir / s.model_path, s.model);
  }
  e.weighting = Weighting::kCosine;
  save_ensemble(dir / "ensemble.json", e);
  const auto back = load_ensemble(dir / "ensemble.json");
  REQUIRE(back.slices.size() == 3);
  CHECK(back.weighting == Weighting::kCosine);
  FeatureVector fv;
  fv.word_freqs = {0.0};
  for (int year : {1710, 1790, 1850})
    CHECK(ensemble_predict(back, fv, year).probability == ensemble_predict(e, fv, year).probability);
  std::filesystem::remove_all(dir);
}

TEST_CASE("a model agrees perfectly with itself") {
  auto spec = spec_from_json(point_of_view_spec_json(2));
  spec.n_volumes = 40;
  const auto vols = generate_corpus(spec);
  std::vector<GenreId> labels;
  for (const auto& v : vols) labels.push_back(majority_label(v));
  const auto m = train_volume_classifier(vols, labels, "first-person", {});
  const auto a = model_agreement(m, m, vols);
  CHECK(a.r == doctest::Approx(1.0));
  CHECK(a.volume_ids.size() == 40);
  CHECK(agreement_to_csv(a).rfind("volume_id,p_a,p_b\n", 0) == 0);
  CHECK_THROWS_WITH_AS(model_agreement({"a", "b", "c"}, {0.5, 0.5, 0.5}, {0.1, 0.2, 0.3}), "constant input",
                       Error);
}

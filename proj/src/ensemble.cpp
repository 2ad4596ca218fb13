#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "genremap/ensemble.hpp"
#include "genremap/error.hpp"
#include "genremap/features.hpp"
#include "genremap/model_io.hpp"

namespace genremap {

BinaryModel train_volume_classifier(const std::vector<Volume>& volumes,
                                    std::span<const GenreId> labels, const GenreId& positive,
                                    const VolumeClassifierOptions& options) {
  if (volumes.size() != labels.size()) throw Error("one label per volume required");
  const Vocabulary candidates = build_vocabulary(volumes, options.candidates);

  std::vector<FeatureVector> pos, neg;
  for (std::size_t i = 0; i < volumes.size(); ++i)
    (labels[i] == positive ? pos : neg).push_back(extract_volume_features(volumes[i], candidates));
  if (pos.empty() || neg.empty())
    throw Error("volume classifier needs examples inside and outside class " + positive);

  Vocabulary vocab = candidates;
  if (options.k_per_side > 0) {
    const std::size_t k = std::min(options.k_per_side, candidates.size());
    vocab = Vocabulary(selected_words(select_discriminative_features(pos, neg, candidates, k)));
  }

  std::vector<FeatureVector> fvs;
  fvs.reserve(volumes.size());
  for (const auto& v : volumes) fvs.push_back(extract_volume_features(v, vocab));

  if (options.kind == ClassifierKind::kNaiveBayes) {
    std::vector<CountExample> examples;
    for (std::size_t i = 0; i < volumes.size(); ++i) examples.push_back({fvs[i].word_counts(), labels[i]});
    return train_calibrated_naive_bayes(examples, positive, options.alpha, options.seed,
                                        vocab.features());
  }
  std::vector<std::vector<double>> rows;
  std::vector<int> y;
  for (std::size_t i = 0; i < volumes.size(); ++i) {
    rows.push_back(fvs[i].dense());
    y.push_back(labels[i] == positive);
  }
  return train_logistic(rows, y, options.lambda, dense_feature_names(vocab));
}

double predict_volume(const BinaryModel& model, const Volume& volume) {
  return predict_proba(model, extract_volume_features(volume, model_vocabulary(model)));
}

// ---------------------------------------------------------------------------

Weighting parse_weighting(const std::string& name) {
  if (name == "triangular") return Weighting::kTriangular;
  if (name == "uniform") return Weighting::kUniform;
  if (name == "cosine") return Weighting::kCosine;
  throw Error("unknown weighting: " + name + " (expected triangular, uniform or cosine)");
}

std::string weighting_name(Weighting w) {
  switch (w) {
    case Weighting::kTriangular: return "triangular";
    case Weighting::kUniform: return "uniform";
    case Weighting::kCosine: return "cosine";
  }
  return "triangular";
}

int TimeSlicedEnsemble::coverage_start() const {
  if (slices.empty()) throw Error("empty ensemble");
  int s = slices.front().start_year;
  for (const auto& sl : slices) s = std::min(s, sl.start_year);
  return s;
}

int TimeSlicedEnsemble::coverage_end() const {
  if (slices.empty()) throw Error("empty ensemble");
  int e = slices.front().end_year;
  for (const auto& sl : slices) e = std::max(e, sl.end_year);
  return e;
}

double slice_weight(int start_year, int end_year, int year, Weighting weighting) {
  if (year < start_year || year > end_year) return 0.0;
  const double mid = (static_cast<double>(start_year) + static_cast<double>(end_year)) / 2.0;
  const double half = (static_cast<double>(end_year) - static_cast<double>(start_year)) / 2.0;
  if (half <= 0.0) return year == start_year ? 1.0 : 0.0;
  const double d = std::fabs(static_cast<double>(year) - mid) / half;
  switch (weighting) {
    case Weighting::kTriangular: return std::max(0.0, 1.0 - d);
    case Weighting::kUniform: return 1.0;
    case Weighting::kCosine: return 0.5 * (1.0 + std::cos(M_PI * d));
  }
  return 0.0;
}

double slice_weight(const TimeSlice& slice, int year, Weighting weighting) {
  return slice_weight(slice.start_year, slice.end_year, year, weighting);
}

EnsemblePrediction combine_slice_predictions(const TimeSlicedEnsemble& ensemble,
                                             std::span<const double> slice_probabilities,
                                             int year) {
  const auto& slices = ensemble.slices;
  if (slices.empty()) throw Error("empty ensemble");
  if (slice_probabilities.size() != slices.size()) throw Error("one probability per slice required");

  // Canonical slice order.
  std::vector<std::size_t> order(slices.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (slices[a].start_year != slices[b].start_year) return slices[a].start_year < slices[b].start_year;
    if (slices[a].end_year != slices[b].end_year) return slices[a].end_year < slices[b].end_year;
    return slice_probabilities[a] < slice_probabilities[b];
  });

  double total_w = 0.0, acc = 0.0;
  std::size_t active = 0, last = 0;
  for (std::size_t i : order) {
    const double w = slice_weight(slices[i], year, ensemble.weighting);
    if (w > 0.0) {
      total_w += w;
      acc += w * slice_probabilities[i];
      ++active;
      last = i;
    }
  }
  EnsemblePrediction out;
  if (active == 1) {
    out.probability = slice_probabilities[last];
    return out;
  }
  if (total_w > 0.0) {
    out.probability = acc / total_w;
    return out;
  }

  // Nearest slice by distance to its year range, then to its midpoint.
  out.out_of_coverage = true;
  auto key = [&](std::size_t i) {
    const double s = slices[i].start_year, e = slices[i].end_year, y = year;
    const double gap = y < s ? s - y : (y > e ? y - e : 0.0);
    return std::pair<double, double>{gap, std::fabs(y - (s + e) / 2.0)};
  };
  std::size_t best = order.front();
  for (std::size_t i : order)
    if (key(i) < key(best)) best = i;
  out.probability = slice_probabilities[best];
  return out;
}

EnsemblePrediction ensemble_predict(const TimeSlicedEnsemble& ensemble, const FeatureVector& fv,
                                    int year) {
  if (ensemble.slices.empty()) throw Error("empty ensemble");
  std::vector<double> p;
  for (const auto& s : ensemble.slices) p.push_back(predict_proba(s.model, fv));
  return combine_slice_predictions(ensemble, p, year);
}

EnsemblePrediction ensemble_predict(const TimeSlicedEnsemble& ensemble, const Volume& volume) {
  if (ensemble.slices.empty()) throw Error("empty ensemble");
  std::vector<double> p;
  for (const auto& s : ensemble.slices) p.push_back(predict_volume(s.model, volume));
  return combine_slice_predictions(ensemble, p, volume.year);
}

void save_ensemble(const std::filesystem::path& path, const TimeSlicedEnsemble& ensemble) {
  nlohmann::ordered_json j;
  j["slices"] = nlohmann::json::array();
  for (const auto& s : ensemble.slices)
    j["slices"].push_back({{"start", s.start_year}, {"end", s.end_year}, {"model_path", s.model_path}});
  j["weighting"] = weighting_name(ensemble.weighting);
  write_text_file(path, j.dump(1) + "\n");
}

TimeSlicedEnsemble load_ensemble(const std::filesystem::path& path) {
  const nlohmann::json j = read_json_file(path);
  TimeSlicedEnsemble e;
  try {
    e.weighting = parse_weighting(j.value("weighting", "triangular"));
    for (const auto& s : j.at("slices")) {
      TimeSlice slice;
      slice.start_year = s.at("start").get<int>();
      slice.end_year = s.at("end").get<int>();
      slice.model_path = s.at("model_path").get<std::string>();
      if (slice.start_year >= slice.end_year)
        throw Error("time slice needs start < end: " + std::to_string(slice.start_year) + "-" +
                    std::to_string(slice.end_year));
      std::filesystem::path mp(slice.model_path);
      if (mp.is_relative()) mp = path.parent_path() / mp;
      slice.model = load_model(mp);
      e.slices.push_back(std::move(slice));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw Error("malformed ensemble " + path.string() + ": " + ex.what());
  }
  if (e.slices.empty()) throw Error("empty ensemble");
  return e;
}

// ---------------------------------------------------------------------------

AgreementResult model_agreement(std::vector<std::string> volume_ids, std::vector<double> p_a,
                                std::vector<double> p_b) {
  if (p_a.size() < 3) throw Error("agreement needs at least 3 volumes");
  AgreementResult r;
  r.r = pearson_correlation(p_a, p_b);
  r.volume_ids = std::move(volume_ids);
  r.p_a = std::move(p_a);
  r.p_b = std::move(p_b);
  return r;
}

AgreementResult model_agreement(const BinaryModel& model_a, const BinaryModel& model_b,
                                const std::vector<Volume>& volumes) {
  std::vector<std::string> ids;
  std::vector<double> pa, pb;
  const Vocabulary va = model_vocabulary(model_a), vb = model_vocabulary(model_b);
  for (const auto& v : volumes) {
    ids.push_back(v.volume_id);
    pa.push_back(predict_proba(model_a, extract_volume_features(v, va)));
    pb.push_back(predict_proba(model_b, extract_volume_features(v, vb)));
  }
  return model_agreement(std::move(ids), std::move(pa), std::move(pb));
}

std::string agreement_to_csv(const AgreementResult& result) {
  std::ostringstream out;
  out << "volume_id,p_a,p_b\n" << std::setprecision(17);
  for (std::size_t i = 0; i < result.p_a.size(); ++i)
    out << result.volume_ids[i] << ',' << result.p_a[i] << ',' << result.p_b[i] << '\n';
  return out.str();
}

}  // namespace genremap

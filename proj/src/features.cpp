#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "genremap/error.hpp"
#include "genremap/features.hpp"

namespace genremap {

RankSumCore wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw Error("rank-sum test needs both samples non-empty");
  const std::size_t na = a.size(), nb = b.size(), n = na + nb;

  struct Item {
    double value;
    bool from_a;
  };
  std::vector<Item> pooled;
  pooled.reserve(n);
  for (double v : a) pooled.push_back({v, true});
  for (double v : b) pooled.push_back({v, false});
  std::sort(pooled.begin(), pooled.end(),
            [](const Item& x, const Item& y) { return x.value < y.value; });

  double rank_sum_a = 0.0;
  double tie_term = 0.0;  // sum of t^3 - t over tie groups
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && pooled[j].value == pooled[i].value) ++j;
    const double t = static_cast<double>(j - i);
    const double mid_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k)
      if (pooled[k].from_a) rank_sum_a += mid_rank;
    tie_term += t * t * t - t;
    i = j;
  }

  const double dna = static_cast<double>(na), dnb = static_cast<double>(nb);
  const double dn = static_cast<double>(n);
  RankSumCore out;
  out.u = rank_sum_a - dna * (dna + 1.0) / 2.0;

  const double mean = dna * dnb / 2.0;
  const double variance =
      n > 1 ? dna * dnb / 12.0 * ((dn + 1.0) - tie_term / (dn * (dn - 1.0))) : 0.0;
  if (variance <= 0.0) {
    out.z = 0.0;
    out.degenerate = true;
    return out;
  }
  const double diff = out.u - mean;
  const double corrected = std::max(0.0, std::fabs(diff) - 0.5);
  out.z = std::copysign(corrected, diff) / std::sqrt(variance);
  if (corrected == 0.0) out.z = 0.0;
  return out;
}

FeatureSelection select_discriminative_features(std::span<const FeatureVector> corpus_a,
                                                std::span<const FeatureVector> corpus_b,
                                                const Vocabulary& candidates, std::size_t k) {
  if (corpus_a.empty() || corpus_b.empty()) throw Error("feature selection needs two non-empty corpora");
  if (k < 1) throw Error("k must be at least 1");
  if (k > candidates.size())
    throw Error("k = " + std::to_string(k) + " exceeds candidate count " +
                std::to_string(candidates.size()));
  for (const auto* corpus : {&corpus_a, &corpus_b})
    for (const auto& fv : *corpus)
      if (fv.word_freqs.size() != candidates.size())
        throw Error("feature vector dimension does not match candidate vocabulary");

  const double half = static_cast<double>(corpus_a.size() * corpus_b.size()) / 2.0;
  std::vector<RankSumResult> results(candidates.size());
  std::vector<double> xa(corpus_a.size()), xb(corpus_b.size());
  for (std::size_t w = 0; w < candidates.size(); ++w) {
    for (std::size_t i = 0; i < corpus_a.size(); ++i) xa[i] = corpus_a[i].word_freqs[w];
    for (std::size_t i = 0; i < corpus_b.size(); ++i) xb[i] = corpus_b[i].word_freqs[w];
    const RankSumCore core = wilcoxon_rank_sum(xa, xb);
    results[w] = {candidates.features()[w], core.u, core.z,
                  core.u >= half ? Direction::kAHigher : Direction::kBHigher};
  }

  std::vector<std::size_t> order(results.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (results[x].z_score != results[y].z_score) return results[x].z_score > results[y].z_score;
    return results[x].word < results[y].word;
  });

  FeatureSelection sel;
  for (std::size_t i = 0; i < k; ++i) sel.positive.push_back(results[order[i]]);
  // Most negative z first among the words not already taken for A.
  std::vector<std::size_t> rest(order.begin() + static_cast<long>(k), order.end());
  std::sort(rest.begin(), rest.end(), [&](std::size_t x, std::size_t y) {
    if (results[x].z_score != results[y].z_score) return results[x].z_score < results[y].z_score;
    return results[x].word < results[y].word;
  });
  for (std::size_t i = 0; i < k && i < rest.size(); ++i) sel.negative.push_back(results[rest[i]]);
  return sel;
}

std::vector<std::string> selected_words(const FeatureSelection& selection) {
  std::vector<std::string> words;
  for (const auto& r : selection.positive) words.push_back(r.word);
  for (const auto& r : selection.negative) words.push_back(r.word);
  return words;
}

std::string selection_to_json(const FeatureSelection& selection) {
  nlohmann::ordered_json j;
  j["positive"] = nlohmann::json::array();
  j["negative"] = nlohmann::json::array();
  nlohmann::ordered_json z = nlohmann::ordered_json::object();
  for (const auto& r : selection.positive) {
    j["positive"].push_back(r.word);
    z[r.word] = r.z_score;
  }
  for (const auto& r : selection.negative) {
    j["negative"].push_back(r.word);
    z[r.word] = r.z_score;
  }
  j["z"] = std::move(z);
  return j.dump(1);
}

double pearson_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error("correlation inputs differ in length");
  if (x.size() < 3) throw Error("correlation needs at least 3 observations");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) throw Error("constant input");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<CorrelationRecord> mine_correlations(const std::vector<Volume>& volumes,
                                                 const Vocabulary& vocab,
                                                 std::span<const double> target) {
  if (volumes.size() < 3) throw Error("correlation mining needs at least 3 volumes");
  if (target.size() != volumes.size()) throw Error("target length does not match volume count");

  std::vector<std::vector<double>> freqs;
  freqs.reserve(volumes.size());
  for (const auto& v : volumes) freqs.push_back(extract_volume_features(v, vocab).word_freqs);

  std::vector<CorrelationRecord> out;
  std::vector<double> column(volumes.size());
  for (std::size_t w = 0; w < vocab.size(); ++w) {
    bool varies = false;
    for (std::size_t i = 0; i < volumes.size(); ++i) {
      column[i] = freqs[i][w];
      if (column[i] != column[0]) varies = true;
    }
    if (!varies) continue;
    out.push_back({vocab.features()[w], pearson_correlation(column, target), volumes.size()});
  }
  std::sort(out.begin(), out.end(), [](const CorrelationRecord& a, const CorrelationRecord& b) {
    return a.r != b.r ? a.r > b.r : a.word < b.word;
  });
  return out;
}

std::string correlations_to_csv(const std::vector<CorrelationRecord>& records) {
  std::ostringstream out;
  out << "word,r,n\n" << std::setprecision(17);
  for (const auto& r : records) out << r.word << ',' << r.r << ',' << r.n << '\n';
  return out.str();
}

double pronoun_ratio(const Volume& volume, const PronounLists& lists) {
  const std::unordered_set<std::string> first(lists.first_person.begin(), lists.first_person.end());
  const std::unordered_set<std::string> third(lists.third_person.begin(), lists.third_person.end());
  double n_first = 0.0, n_third = 0.0;
  for (const auto& p : volume.pages)
    for (const auto& t : p.tokens()) {
      if (first.count(t)) n_first += 1.0;
      if (third.count(t)) n_third += 1.0;
    }
  return (n_first + 1.0) / (n_third + 1.0);
}

}  // namespace genremap

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "genremap/error.hpp"
#include "genremap/sequence.hpp"

namespace genremap {

std::size_t HmmModel::state_index(const GenreId& g) const {
  for (std::size_t i = 0; i < states.size(); ++i)
    if (states[i] == g) return i;
  throw Error("state not in HMM: " + g);
}

std::map<GenreId, double> HmmModel::prior_map() const {
  std::map<GenreId, double> out;
  for (std::size_t i = 0; i < states.size(); ++i)
    out[states[i]] = priors.empty() ? 1.0 / static_cast<double>(states.size()) : priors[i];
  return out;
}

HmmModel estimate_transition_matrix(const std::vector<Volume>& labeled,
                                    const GenreTaxonomy& taxonomy, double kappa) {
  if (!(kappa > 0.0)) throw Error("kappa must be positive");
  if (labeled.empty()) throw Error("no labeled volumes");
  const std::size_t s = taxonomy.size();
  HmmModel hmm;
  hmm.states = taxonomy.leaves();
  hmm.kappa = kappa;
  std::vector<double> first(s, 0.0), pages(s, 0.0);
  std::vector<std::vector<double>> counts(s, std::vector<double>(s, 0.0));
  for (const auto& v : labeled) {
    if (!v.gold_labels) throw Error("volume " + v.volume_id + " has no gold labels");
    const auto& labels = *v.gold_labels;
    if (labels.empty()) continue;
    std::size_t prev = taxonomy.index_of(labels[0]);
    first[prev] += 1.0;
    pages[prev] += 1.0;
    for (std::size_t t = 1; t < labels.size(); ++t) {
      const std::size_t cur = taxonomy.index_of(labels[t]);
      counts[prev][cur] += 1.0;
      pages[cur] += 1.0;
      prev = cur;
    }
  }

  const double ds = static_cast<double>(s);
  auto smooth = [&](const std::vector<double>& row) {
    const double total = std::accumulate(row.begin(), row.end(), 0.0);
    std::vector<double> out(row.size());
    for (std::size_t j = 0; j < row.size(); ++j) out[j] = (row[j] + kappa) / (total + kappa * ds);
    return out;
  };
  hmm.initial = smooth(first);
  hmm.priors = smooth(pages);
  hmm.transitions.reserve(s);
  for (const auto& row : counts) hmm.transitions.push_back(smooth(row));
  return hmm;
}

std::vector<double> posteriors_to_emissions(const std::vector<GenreId>& states,
                                            const std::map<GenreId, double>& posteriors,
                                            const std::map<GenreId, double>& class_priors) {
  std::vector<double> e(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    auto p = posteriors.find(states[i]);
    if (p == posteriors.end()) throw Error("missing genre in posteriors: " + states[i]);
    auto q = class_priors.find(states[i]);
    if (q == class_priors.end()) throw Error("missing genre in priors: " + states[i]);
    if (!(q->second > 0.0)) throw Error("prior must be positive for genre: " + states[i]);
    const double post = std::max(p->second, kEmissionFloor);
    e[i] = std::max(post / q->second, kEmissionFloor);
  }
  const double total = std::accumulate(e.begin(), e.end(), 0.0);
  for (double& x : e) x = std::log(x / total);
  return e;
}

DecodedVolume viterbi_decode(const HmmModel& hmm, const std::vector<std::vector<double>>& emissions) {
  const std::size_t s = hmm.states.size();
  const std::size_t t_len = emissions.size();
  if (t_len == 0) throw Error("cannot decode an empty sequence");
  if (hmm.initial.size() != s || hmm.transitions.size() != s) throw Error("malformed HMM");
  for (const auto& e : emissions)
    if (e.size() != s)
      throw Error("dimension mismatch: emission has " + std::to_string(e.size()) + " entries for " +
                  std::to_string(s) + " states");

  // Visit states in id order so strict comparison keeps the smaller id on ties.
  std::vector<std::size_t> by_id(s);
  std::iota(by_id.begin(), by_id.end(), 0);
  std::sort(by_id.begin(), by_id.end(),
            [&](std::size_t a, std::size_t b) { return hmm.states[a] < hmm.states[b]; });

  std::vector<std::vector<double>> log_a(s, std::vector<double>(s));
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < s; ++j) log_a[i][j] = std::log(hmm.transitions[i][j]);

  std::vector<double> delta(s), next(s);
  std::vector<std::vector<std::size_t>> back(t_len, std::vector<std::size_t>(s, 0));
  for (std::size_t j = 0; j < s; ++j) delta[j] = std::log(hmm.initial[j]) + emissions[0][j];
  for (std::size_t t = 1; t < t_len; ++t) {
    for (std::size_t j = 0; j < s; ++j) {
      double best = -INFINITY;
      std::size_t arg = by_id[0];
      for (std::size_t i : by_id) {
        const double v = delta[i] + log_a[i][j];
        if (v > best) {
          best = v;
          arg = i;
        }
      }
      next[j] = best + emissions[t][j];
      back[t][j] = arg;
    }
    delta.swap(next);
  }

  std::size_t last = by_id[0];
  double best = -INFINITY;
  for (std::size_t j : by_id) {
    if (delta[j] > best) {
      best = delta[j];
      last = j;
    }
  }

  DecodedVolume out;
  out.log_probability = best;
  std::vector<std::size_t> path(t_len);
  path[t_len - 1] = last;
  for (std::size_t t = t_len - 1; t > 0; --t) path[t - 1] = back[t][path[t]];
  out.labels.reserve(t_len);
  for (std::size_t t = 0; t < t_len; ++t) {
    out.labels.push_back(hmm.states[path[t]]);
    out.page_scores.push_back(emissions[t][path[t]]);
  }
  return out;
}

double path_log_probability(const HmmModel& hmm, const std::vector<std::vector<double>>& emissions,
                            std::span<const std::size_t> path) {
  if (path.size() != emissions.size() || path.empty()) throw Error("path length mismatch");
  double lp = std::log(hmm.initial[path[0]]) + emissions[0][path[0]];
  for (std::size_t t = 1; t < path.size(); ++t)
    lp += std::log(hmm.transitions[path[t - 1]][path[t]]) + emissions[t][path[t]];
  return lp;
}

SmoothedVolume smooth_posteriors(const HmmModel& hmm, const std::string& volume_id,
                                 const std::vector<PageDecision>& pages) {
  SmoothedVolume out;
  out.volume_id = volume_id;
  const auto priors = hmm.prior_map();
  std::vector<std::vector<double>> emissions;
  emissions.reserve(pages.size());
  for (const auto& d : pages) {
    out.raw_labels.push_back(d.leaf);
    emissions.push_back(posteriors_to_emissions(hmm.states, d.posteriors, priors));
  }
  out.decoded = viterbi_decode(hmm, emissions);
  return out;
}

SmoothedVolume smooth_volume(const GenreClassifierBank& bank, const HmmModel& hmm,
                             const Volume& volume, const Vocabulary& vocab) {
  std::vector<PageDecision> pages;
  pages.reserve(volume.pages.size());
  for (std::size_t i = 0; i < volume.pages.size(); ++i)
    pages.push_back(classify_page_one_vs_all(bank, extract_page_features(volume, i, vocab)));
  return smooth_posteriors(hmm, volume.volume_id, pages);
}

std::string smoothed_to_json_line(const SmoothedVolume& s) {
  nlohmann::ordered_json j;
  j["volume_id"] = s.volume_id;
  j["raw_labels"] = s.raw_labels;
  j["smoothed_labels"] = s.decoded.labels;
  j["logprob"] = s.decoded.log_probability;
  return j.dump();
}

SmoothedVolume smoothed_from_json_line(const std::string& line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
    SmoothedVolume s;
    s.volume_id = j.at("volume_id").get<std::string>();
    s.raw_labels = j.at("raw_labels").get<std::vector<GenreId>>();
    s.decoded.labels = j.at("smoothed_labels").get<std::vector<GenreId>>();
    s.decoded.log_probability = j.at("logprob").get<double>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed decoded record: ") + e.what());
  }
}

}  // namespace genremap

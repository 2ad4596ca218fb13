#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>

#include "genremap/error.hpp"
#include "genremap/eval.hpp"
#include "genremap/parallel.hpp"
#include "genremap/rng.hpp"
#include "genremap/sequence.hpp"

namespace genremap {

ConfusionMatrix::ConfusionMatrix(std::vector<GenreId> classes)
    : classes_(std::move(classes)),
      counts_(classes_.size(), std::vector<std::size_t>(classes_.size(), 0)) {}

ConfusionMatrix::ConfusionMatrix(std::vector<GenreId> classes,
                                 std::vector<std::vector<std::size_t>> counts)
    : classes_(std::move(classes)), counts_(std::move(counts)) {
  if (counts_.size() != classes_.size()) throw Error("confusion matrix must be square");
  for (const auto& row : counts_)
    if (row.size() != classes_.size()) throw Error("confusion matrix must be square");
}

std::size_t ConfusionMatrix::index_of(const GenreId& g) const {
  for (std::size_t i = 0; i < classes_.size(); ++i)
    if (classes_[i] == g) return i;
  throw Error("class not in confusion matrix: " + g);
}

void ConfusionMatrix::add(const GenreId& actual, const GenreId& predicted, std::size_t n) {
  counts_[index_of(actual)][index_of(predicted)] += n;
}

void ConfusionMatrix::merge(const ConfusionMatrix& other) {
  if (other.classes_ != classes_) throw Error("cannot merge confusion matrices over different classes");
  for (std::size_t i = 0; i < classes_.size(); ++i)
    for (std::size_t j = 0; j < classes_.size(); ++j) counts_[i][j] += other.counts_[i][j];
}

std::size_t ConfusionMatrix::total() const {
  std::size_t t = 0;
  for (const auto& row : counts_) t = std::accumulate(row.begin(), row.end(), t);
  return t;
}

const ClassMetrics& MetricsReport::for_class(const GenreId& g) const {
  for (const auto& m : per_class)
    if (m.genre == g) return m;
  throw Error("class not in report: " + g);
}

MetricsReport f1_scores(const ConfusionMatrix& cm) {
  const std::size_t total = cm.total();
  if (total == 0) throw Error("confusion matrix is empty");
  const auto& c = cm.counts();
  const std::size_t n = cm.classes().size();
  MetricsReport r;
  std::size_t trace = 0, present = 0;
  double f1_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t row = 0, col = 0;
    for (std::size_t j = 0; j < n; ++j) {
      row += c[i][j];
      col += c[j][i];
    }
    const double tp = static_cast<double>(c[i][i]);
    trace += c[i][i];
    ClassMetrics m;
    m.genre = cm.classes()[i];
    m.support = row;
    m.present = row > 0;
    m.precision = col > 0 ? tp / static_cast<double>(col) : 0.0;
    m.recall = row > 0 ? tp / static_cast<double>(row) : 0.0;
    m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
    if (m.present) {
      ++present;
      f1_sum += m.f1;
    }
    r.per_class.push_back(std::move(m));
  }
  r.macro_f1 = f1_sum / static_cast<double>(present);
  // Pooled TP/FP/FN: every misclassification is one FP and one FN.
  r.micro_f1 = static_cast<double>(trace) / static_cast<double>(total);
  return r;
}

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

}  // namespace

std::string metrics_to_csv(const MetricsReport& report) {
  std::ostringstream out;
  out << "class,precision,recall,f1\n";
  for (const auto& m : report.per_class)
    if (m.present)
      out << m.genre << ',' << fmt(m.precision) << ',' << fmt(m.recall) << ',' << fmt(m.f1) << '\n';
  out << "macro,,," << fmt(report.macro_f1) << '\n';
  out << "micro,,," << fmt(report.micro_f1) << '\n';
  return out.str();
}

std::string comparison_to_csv(const MetricsReport& raw, const MetricsReport& smoothed) {
  std::ostringstream out;
  out << "class,raw_f1,smoothed_f1\n";
  for (std::size_t i = 0; i < raw.per_class.size(); ++i) {
    const auto& a = raw.per_class[i];
    const auto& b = smoothed.for_class(a.genre);
    if (a.present || b.present) out << a.genre << ',' << fmt(a.f1) << ',' << fmt(b.f1) << '\n';
  }
  out << "macro," << fmt(raw.macro_f1) << ',' << fmt(smoothed.macro_f1) << '\n';
  out << "micro," << fmt(raw.micro_f1) << ',' << fmt(smoothed.micro_f1) << '\n';
  return out.str();
}

std::vector<Fold> kfold_by_volume(std::size_t n_volumes, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw Error("k must be at least 2");
  if (k > n_volumes)
    throw Error("k = " + std::to_string(k) + " exceeds volume count " + std::to_string(n_volumes));
  std::vector<std::size_t> order(n_volumes);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);

  std::vector<Fold> folds(k);
  const std::size_t base = n_volumes / k, extra = n_volumes % k;
  std::size_t pos = 0;
  std::vector<std::size_t> fold_of(n_volumes);
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = base + (f < extra ? 1 : 0);
    for (std::size_t i = 0; i < size; ++i) fold_of[order[pos++]] = f;
  }
  for (std::size_t v = 0; v < n_volumes; ++v)
    for (std::size_t f = 0; f < k; ++f) (fold_of[v] == f ? folds[f].test : folds[f].train).push_back(v);
  return folds;
}

CrossValidationResult crossvalidate_pipeline(const std::vector<Volume>& volumes,
                                             const GenreTaxonomy& taxonomy, std::size_t k,
                                             std::uint64_t seed, const PipelineConfig& config) {
  for (const auto& v : volumes)
    if (!v.gold_labels) throw Error("volume " + v.volume_id + " has no gold labels");
  const auto folds = kfold_by_volume(volumes.size(), k, seed);

  std::vector<ConfusionMatrix> raw(k, ConfusionMatrix(taxonomy.leaves()));
  std::vector<ConfusionMatrix> smooth(k, ConfusionMatrix(taxonomy.leaves()));
  const int fold_jobs = std::max(1, config.jobs);
  parallel_for(k, fold_jobs, [&](std::size_t f) {
    std::vector<Volume> train;
    for (std::size_t i : folds[f].train) train.push_back(volumes[i]);
    const Vocabulary vocab = build_vocabulary(train, config.vocab_size);

    std::vector<FeatureVector> pages;
    std::vector<GenreId> labels;
    for (const auto& v : train) {
      auto fvs = extract_volume_page_features(v, vocab);
      pages.insert(pages.end(), std::make_move_iterator(fvs.begin()), std::make_move_iterator(fvs.end()));
      labels.insert(labels.end(), v.gold_labels->begin(), v.gold_labels->end());
    }
    BankOptions bank_options = config.bank;
    bank_options.seed = derive_seed(seed, f);
    bank_options.jobs = 1;
    const GenreClassifierBank bank = train_bank(pages, labels, taxonomy, vocab, bank_options);
    const HmmModel hmm = estimate_transition_matrix(train, taxonomy, config.kappa);

    for (std::size_t i : folds[f].test) {
      const Volume& v = volumes[i];
      const SmoothedVolume s = smooth_volume(bank, hmm, v, vocab);
      for (std::size_t p = 0; p < v.pages.size(); ++p) {
        raw[f].add((*v.gold_labels)[p], s.raw_labels[p]);
        smooth[f].add((*v.gold_labels)[p], s.decoded.labels[p]);
      }
    }
  });

  CrossValidationResult out{ConfusionMatrix(taxonomy.leaves()), ConfusionMatrix(taxonomy.leaves()), {}, {}};
  for (std::size_t f = 0; f < k; ++f) {
    out.raw.merge(raw[f]);
    out.smoothed.merge(smooth[f]);
  }
  out.raw_report = f1_scores(out.raw);
  out.smoothed_report = f1_scores(out.smoothed);
  return out;
}

VolumeCrossValidation crossvalidate_volume_classifier(const std::vector<Volume>& volumes,
                                                      const GenreId& positive,
                                                      const GenreId& negative_label,
                                                      std::size_t k, std::uint64_t seed,
                                                      const VolumeClassifierOptions& options,
                                                      int jobs) {
  std::vector<GenreId> labels;
  for (const auto& v : volumes) {
    const GenreId g = majority_label(v);
    labels.push_back(g == positive ? positive : negative_label);
  }
  const auto folds = kfold_by_volume(volumes.size(), k, seed);
  std::vector<double> probs(volumes.size(), 0.0);
  parallel_for(k, jobs, [&](std::size_t f) {
    std::vector<Volume> train;
    std::vector<GenreId> train_labels;
    for (std::size_t i : folds[f].train) {
      train.push_back(volumes[i]);
      train_labels.push_back(labels[i]);
    }
    VolumeClassifierOptions opts = options;
    opts.seed = derive_seed(seed, f);
    const BinaryModel model = train_volume_classifier(train, train_labels, positive, opts);
    for (std::size_t i : folds[f].test) probs[i] = predict_volume(model, volumes[i]);
  });

  std::vector<GenreId> classes{positive, negative_label};
  std::sort(classes.begin(), classes.end());
  VolumeCrossValidation out{ConfusionMatrix(classes), {}, probs};
  for (std::size_t i = 0; i < volumes.size(); ++i)
    out.cm.add(labels[i], probs[i] >= 0.5 ? positive : negative_label);
  out.report = f1_scores(out.cm);
  return out;
}

TrendSeries time_binned_means(std::span<const double> values, std::span<const int> years,
                              int bin_width) {
  if (bin_width < 1) throw Error("bin width must be at least 1");
  if (values.size() != years.size()) throw Error("values and years differ in length");
  if (values.empty()) throw Error("no values to bin");
  const int min_year = *std::min_element(years.begin(), years.end());
  std::map<int, std::vector<double>> bins;
  for (std::size_t i = 0; i < values.size(); ++i)
    bins[min_year + ((years[i] - min_year) / bin_width) * bin_width].push_back(values[i]);

  TrendSeries out;
  for (auto& [start, xs] : bins) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const double sd = xs.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    out.bins.push_back({start, xs.size(), mean, sd / std::sqrt(n)});
  }
  return out;
}

std::string trend_to_csv(const TrendSeries& series) {
  std::ostringstream out;
  out << "bin_start,n,mean,stderr\n";
  for (const auto& b : series.bins)
    out << b.start_year << ',' << b.n << ',' << fmt(b.mean) << ',' << fmt(b.std_error) << '\n';
  return out.str();
}

}  // namespace genremap

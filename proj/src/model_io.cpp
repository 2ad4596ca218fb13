#include <fstream>
#include <sstream>

#include "genremap/error.hpp"
#include "genremap/model_io.hpp"

namespace genremap {

using json = nlohmann::json;

namespace {

json logistic_to_json(const LogisticModel& m) {
  return {{"kind", "logistic"},
          {"version", kModelFormatVersion},
          {"feature_names", m.feature_names},
          {"parameters",
           {{"weights", m.weights},
            {"bias", m.bias},
            {"lambda", m.lambda},
            {"means", m.means},
            {"scales", m.scales},
            {"converged", m.converged},
            {"iterations", m.iterations}}}};
}

json naive_bayes_to_json(const CalibratedNaiveBayes& m) {
  return {{"kind", "naive_bayes"},
          {"version", kModelFormatVersion},
          {"feature_names", m.nb.feature_names},
          {"parameters",
           {{"classes", m.nb.classes},
            {"positive", m.positive},
            {"alpha", m.nb.alpha},
            {"log_priors", m.nb.log_priors},
            {"log_likelihoods", m.nb.log_likelihoods},
            {"calibration",
             {{"a", m.calibration.a}, {"b", m.calibration.b}, {"separable", m.calibration.separable}}}}}};
}

void check_header(const json& j, const char* kind) {
  if (!j.is_object()) throw Error("model file is not a JSON object");
  if (j.value("kind", "") != kind) throw Error(std::string("expected model kind ") + kind);
  if (j.value("version", 0) != kModelFormatVersion)
    throw Error("unsupported model version: " + j.value("version", json()).dump());
}

LogisticModel logistic_from_json(const json& j) {
  check_header(j, "logistic");
  const json& p = j.at("parameters");
  LogisticModel m;
  m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  m.weights = p.at("weights").get<std::vector<double>>();
  m.bias = p.at("bias").get<double>();
  m.lambda = p.at("lambda").get<double>();
  m.means = p.at("means").get<std::vector<double>>();
  m.scales = p.at("scales").get<std::vector<double>>();
  m.converged = p.value("converged", true);
  m.iterations = p.value("iterations", 0);
  const std::size_t d = m.weights.size();
  if (m.feature_names.size() != d || m.means.size() != d || m.scales.size() != d)
    throw Error("logistic model arrays differ in length");
  return m;
}

CalibratedNaiveBayes naive_bayes_from_json(const json& j) {
  check_header(j, "naive_bayes");
  const json& p = j.at("parameters");
  CalibratedNaiveBayes m;
  m.nb.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  m.nb.classes = p.at("classes").get<std::vector<GenreId>>();
  m.positive = p.at("positive").get<GenreId>();
  m.nb.alpha = p.at("alpha").get<double>();
  m.nb.log_priors = p.at("log_priors").get<std::vector<double>>();
  m.nb.log_likelihoods = p.at("log_likelihoods").get<std::vector<std::vector<double>>>();
  const json& c = p.at("calibration");
  m.calibration.a = c.at("a").get<double>();
  m.calibration.b = c.at("b").get<double>();
  m.calibration.separable = c.value("separable", false);
  if (m.nb.classes.size() != 2 || m.nb.log_priors.size() != 2 || m.nb.log_likelihoods.size() != 2)
    throw Error("naive Bayes model must have exactly two classes");
  for (const auto& row : m.nb.log_likelihoods)
    if (row.size() != m.nb.feature_names.size())
      throw Error("naive Bayes likelihood rows differ from feature count");
  m.nb.class_index(m.positive);
  return m;
}

}  // namespace

json model_to_json(const BinaryModel& model) {
  if (const auto* lr = std::get_if<LogisticModel>(&model)) return logistic_to_json(*lr);
  return naive_bayes_to_json(std::get<CalibratedNaiveBayes>(model));
}

BinaryModel model_from_json(const json& j) {
  try {
    const std::string kind = j.value("kind", "");
    if (kind == "logistic") return logistic_from_json(j);
    if (kind == "naive_bayes") return naive_bayes_from_json(j);
    throw Error("unknown model kind: " + kind);
  } catch (const json::exception& e) {
    throw Error(std::string("malformed model: ") + e.what());
  }
}

json bank_to_json(const GenreClassifierBank& bank) {
  json taxonomy = json::array();
  json classifiers = json::array();
  for (std::size_t i = 0; i < bank.taxonomy.leaves().size(); ++i) {
    const auto& g = bank.taxonomy.leaves()[i];
    taxonomy.push_back({{"genre", g}, {"superclass", bank.taxonomy.superclass_of(g)}});
    classifiers.push_back({{"genre", g}, {"model", model_to_json(bank.classifiers[i])}});
  }
  return {{"kind", "bank"},
          {"version", kModelFormatVersion},
          {"feature_names", dense_feature_names(bank.vocab)},
          {"parameters", {{"taxonomy", taxonomy}, {"classifiers", classifiers}}}};
}

GenreClassifierBank bank_from_json(const json& j) {
  try {
    check_header(j, "bank");
    GenreClassifierBank bank;
    bank.vocab = vocabulary_from_dense_names(j.at("feature_names").get<std::vector<std::string>>());
    const json& p = j.at("parameters");
    std::vector<GenreTaxonomy::Leaf> leaves;
    for (const auto& leaf : p.at("taxonomy"))
      leaves.push_back({leaf.at("genre").get<std::string>(), leaf.at("superclass").get<std::string>()});
    bank.taxonomy = GenreTaxonomy(std::move(leaves));
    const json& cls = p.at("classifiers");
    if (cls.size() != bank.taxonomy.size()) throw Error("bank needs one classifier per leaf");
    for (std::size_t i = 0; i < cls.size(); ++i) {
      if (cls[i].at("genre").get<std::string>() != bank.taxonomy.leaves()[i])
        throw Error("bank classifiers out of taxonomy order");
      bank.classifiers.push_back(model_from_json(cls[i].at("model")));
    }
    return bank;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed bank: ") + e.what());
  }
}

json hmm_to_json(const HmmModel& hmm) {
  return {{"states", hmm.states},
          {"initial", hmm.initial},
          {"transitions", hmm.transitions},
          {"kappa", hmm.kappa},
          {"priors", hmm.priors}};
}

HmmModel hmm_from_json(const json& j) {
  try {
    HmmModel hmm;
    hmm.states = j.at("states").get<std::vector<GenreId>>();
    hmm.initial = j.at("initial").get<std::vector<double>>();
    hmm.transitions = j.at("transitions").get<std::vector<std::vector<double>>>();
    hmm.kappa = j.at("kappa").get<double>();
    if (j.contains("priors")) hmm.priors = j["priors"].get<std::vector<double>>();
    const std::size_t s = hmm.states.size();
    if (s == 0 || hmm.initial.size() != s || hmm.transitions.size() != s)
      throw Error("HMM arrays do not match the state count");
    for (const auto& row : hmm.transitions)
      if (row.size() != s) throw Error("HMM transition matrix is not square");
    if (!hmm.priors.empty() && hmm.priors.size() != s) throw Error("HMM priors do not match states");
    return hmm;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed HMM: ") + e.what());
  }
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error("malformed JSON in " + path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

void save_model(const std::filesystem::path& path, const BinaryModel& model) {
  write_text_file(path, model_to_json(model).dump() + "\n");
}

BinaryModel load_model(const std::filesystem::path& path) { return model_from_json(read_json_file(path)); }

void save_bank(const std::filesystem::path& path, const GenreClassifierBank& bank) {
  write_text_file(path, bank_to_json(bank).dump() + "\n");
}

GenreClassifierBank load_bank(const std::filesystem::path& path) {
  return bank_from_json(read_json_file(path));
}

void save_hmm(const std::filesystem::path& path, const HmmModel& hmm) {
  write_text_file(path, hmm_to_json(hmm).dump(1) + "\n");
}

HmmModel load_hmm(const std::filesystem::path& path) { return hmm_from_json(read_json_file(path)); }

}  // namespace genremap

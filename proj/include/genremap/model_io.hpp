#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "genremap/classify.hpp"
#include "genremap/sequence.hpp"

namespace genremap {

inline constexpr int kModelFormatVersion = 1;

// Model files: {"kind": naive_bayes | logistic | bank, "version",
// "feature_names", "parameters"}. Doubles are written in shortest
// round-trip form, so finite parameters reload bit-exactly.
nlohmann::json model_to_json(const BinaryModel& model);
BinaryModel model_from_json(const nlohmann::json& j);
nlohmann::json bank_to_json(const GenreClassifierBank& bank);
GenreClassifierBank bank_from_json(const nlohmann::json& j);

// {"states", "initial", "transitions", "kappa", "priors"}
nlohmann::json hmm_to_json(const HmmModel& hmm);
HmmModel hmm_from_json(const nlohmann::json& j);

void save_model(const std::filesystem::path& path, const BinaryModel& model);
BinaryModel load_model(const std::filesystem::path& path);
void save_bank(const std::filesystem::path& path, const GenreClassifierBank& bank);
GenreClassifierBank load_bank(const std::filesystem::path& path);
void save_hmm(const std::filesystem::path& path, const HmmModel& hmm);
HmmModel load_hmm(const std::filesystem::path& path);

// Reads a JSON document, wrapping parse failures in genremap::Error.
nlohmann::json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace genremap

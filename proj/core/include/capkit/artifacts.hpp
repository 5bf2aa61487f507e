#pragma once
// Persistent artifact formats. Prior files are JSONL records
// {"id", "words", "scores", "method", "normalized"} with scores serialized
// as decimal strings of 17 significant digits so round-trips are bit-exact;
// words are stored redundantly so misalignment is detectable at load. Every
// artifact embeds the run configuration and seed in a leading "_meta" line
// (JSONL) or "meta" object (JSON documents); the timestamp lives only there.

#include <string>
#include <vector>

#include <json.hpp>

#include "capkit/evaluation.hpp"
#include "capkit/types.hpp"

namespace capkit {

struct PriorRecord {
    std::string id;
    std::vector<std::string> words;
    std::vector<double> scores;
    AttributionMethod method = AttributionMethod::cap;
    bool normalized = false;
};

struct PriorFile {
    nlohmann::json meta;
    std::vector<PriorRecord> records;
};

// Shortest exact decimal form (17 significant digits).
std::string format_double(double value);
double parse_double(const std::string& text);

// Provenance header carried by every artifact.
nlohmann::json make_meta(const nlohmann::json& run_config, std::uint64_t seed);

void write_priors(const std::string& path, const std::vector<PriorRecord>& records,
                  const nlohmann::json& meta);
PriorFile read_priors(const std::string& path);

void write_dataset(const std::string& path, const std::vector<LabeledExample>& examples,
                   const nlohmann::json& meta);

// Skip records from adversarial generation: (example id, reason).
void write_skips(const std::string& path,
                 const std::vector<std::pair<std::string, std::string>>& skips,
                 const nlohmann::json& meta);

void write_json_document(const std::string& path, const nlohmann::json& document);
nlohmann::json read_json_document(const std::string& path);

void write_matrix_csv(const std::string& path, const OverlapMatrix& matrix);
void write_misclass_csv(const std::string& path,
                        const std::vector<MisclassRecord>& records);

}  // namespace capkit

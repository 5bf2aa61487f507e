#pragma once
// Dataset ingestion (JSONL: one {id, text, label} object per line) and the
// synthetic confusable-class corpus generator used for desk-scale
// experiments: classes come in pairs that share keywords, each class keeps
// at least one discriminative keyword of its own, and fillers pad sentences.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "capkit/oracle.hpp"
#include "capkit/types.hpp"

namespace capkit {

struct Dataset {
    std::vector<LabeledExample> examples;
    LabelSpace labels;
};

// Parses a JSONL dataset; lines holding a single "_meta" object are
// provenance headers and are skipped. Throws IngestError naming the line
// number on a missing field, duplicate id, or empty text. The label space is
// the sorted set of distinct labels.
Dataset ingest_dataset(const std::string& path);

struct SyntheticCorpusSpec {
    std::size_t classes = 8;
    std::size_t confusable_pairs = 4;
    std::size_t shared_per_pair = 3;
    std::size_t disc_per_class = 2;
    std::size_t filler_vocab = 40;
    std::size_t train_per_class = 40;
    std::size_t val_per_class = 10;
    std::size_t test_per_class = 20;
    std::size_t len_min = 5;
    std::size_t len_max = 9;
    double disc_probability = 0.85;  // chance the class keyword appears
    // Shared keywords drawn per sentence; redundancy here diffuses a plain
    // classifier's dependence across interchangeable pair evidence.
    std::size_t shared_per_sentence_min = 1;
    std::size_t shared_per_sentence_max = 2;
    std::uint64_t seed = 0;

    void validate() const;  // throws SpecError on infeasible combinations
};

struct SyntheticCorpus {
    Dataset train;
    Dataset val;
    Dataset test;
    // Ground-truth vocabulary structure, kept for diagnostics and for
    // deriving the scripted oracle.
    std::map<std::string, std::vector<std::string>> discriminative_keywords;
    std::map<std::string, std::vector<std::string>> shared_keywords;
};

// Deterministic for a fixed seed; splits are disjoint by id. Every sentence
// carries at least one shared keyword of its class group; the class's
// discriminative keyword appears with the configured probability.
SyntheticCorpus generate_synthetic(const SyntheticCorpusSpec& spec);

// Scripted oracle rules mirroring the corpus structure: a surviving
// discriminative keyword pins the gold-label probability high, a surviving
// shared keyword keeps it moderate, everything else falls to the default.
ScriptedRules synthetic_oracle_rules(const SyntheticCorpus& corpus);

}  // namespace capkit

#include "capkit/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <json.hpp>

#include "capkit/rng.hpp"

namespace capkit {

namespace {

using nlohmann::json;

std::string two_digits(std::size_t value) {
    std::string out = std::to_string(value);
    return out.size() < 2 ? "0" + out : out;
}

std::string four_digits(std::size_t value) {
    std::string out = std::to_string(value);
    while (out.size() < 4) out.insert(out.begin(), '0');
    return out;
}

}  // namespace

Dataset ingest_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IngestError("cannot open dataset: " + path);
    }
    Dataset dataset;
    std::set<std::string> seen_ids;
    std::set<std::string> labels;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        const json record = json::parse(line, nullptr, false);
        const std::string where = path + ":" + std::to_string(line_number);
        if (record.is_discarded() || !record.is_object()) {
            throw IngestError("malformed JSON at " + where);
        }
        if (record.contains("_meta")) continue;  // provenance header
        for (const char* field : {"id", "text", "label"}) {
            if (!record.contains(field) || !record[field].is_string()) {
                throw IngestError(std::string("missing field '") + field + "' at " +
                                  where);
            }
        }
        LabeledExample example;
        example.id = record["id"].get<std::string>();
        example.text = record["text"].get<std::string>();
        example.label = record["label"].get<std::string>();
        if (example.text.empty() || tokenize(example.text).word_count() == 0) {
            throw IngestError("empty text at " + where);
        }
        if (!seen_ids.insert(example.id).second) {
            throw IngestError("duplicate id '" + example.id + "' at " + where);
        }
        if (record.contains("provenance")) {
            example.provenance =
                provenance_from_string(record["provenance"].get<std::string>());
        }
        if (record.contains("source_class") && record["source_class"].is_string()) {
            example.source_class = record["source_class"].get<std::string>();
        }
        labels.insert(example.label);
        dataset.examples.push_back(std::move(example));
    }
    dataset.labels = LabelSpace({labels.begin(), labels.end()});
    return dataset;
}

void SyntheticCorpusSpec::validate() const {
    if (classes < 2) throw SpecError("synthetic spec: need >= 2 classes");
    if (confusable_pairs * 2 > classes) {
        throw SpecError("synthetic spec: more pair members than classes");
    }
    if (shared_per_pair < 1) {
        throw SpecError("synthetic spec: every pair must share >= 1 keyword");
    }
    if (disc_per_class < 1) {
        throw SpecError("synthetic spec: every class needs >= 1 discriminative keyword");
    }
    if (filler_vocab < 1) throw SpecError("synthetic spec: need filler words");
    if (shared_per_sentence_min < 1 ||
        shared_per_sentence_max < shared_per_sentence_min) {
        throw SpecError("synthetic spec: bad per-sentence shared keyword range");
    }
    if (len_min < shared_per_sentence_max + 2 || len_max < len_min) {
        throw SpecError("synthetic spec: sentence length below keyword requirements");
    }
    if (!(disc_probability >= 0.0 && disc_probability <= 1.0)) {
        throw SpecError("synthetic spec: disc_probability outside [0, 1]");
    }
    if (train_per_class < 1 || test_per_class < 1) {
        throw SpecError("synthetic spec: need train and test sentences");
    }
}

SyntheticCorpus generate_synthetic(const SyntheticCorpusSpec& spec) {
    spec.validate();
    SyntheticCorpus corpus;

    std::vector<std::string> class_names;
    for (std::size_t c = 0; c < spec.classes; ++c) {
        class_names.push_back("cls" + two_digits(c));
    }
    // Paired classes share a keyword group; leftovers get a group of their own.
    std::vector<std::size_t> group_of(spec.classes);
    std::size_t group_count = 0;
    for (std::size_t p = 0; p < spec.confusable_pairs; ++p) {
        group_of[2 * p] = group_count;
        group_of[2 * p + 1] = group_count;
        ++group_count;
    }
    for (std::size_t c = 2 * spec.confusable_pairs; c < spec.classes; ++c) {
        group_of[c] = group_count++;
    }

    std::vector<std::vector<std::string>> group_shared(group_count);
    for (std::size_t g = 0; g < group_count; ++g) {
        for (std::size_t i = 0; i < spec.shared_per_pair; ++i) {
            group_shared[g].push_back("ks" + two_digits(g) + two_digits(i));
        }
    }
    std::vector<std::vector<std::string>> disc(spec.classes);
    for (std::size_t c = 0; c < spec.classes; ++c) {
        for (std::size_t i = 0; i < spec.disc_per_class; ++i) {
            disc[c].push_back("kd" + two_digits(c) + two_digits(i));
        }
        corpus.discriminative_keywords[class_names[c]] = disc[c];
        corpus.shared_keywords[class_names[c]] = group_shared[group_of[c]];
    }
    std::vector<std::string> fillers;
    for (std::size_t i = 0; i < spec.filler_vocab; ++i) {
        fillers.push_back("fw" + four_digits(i));
    }

    const LabelSpace labels(class_names);
    auto make_split = [&](const std::string& split, std::size_t per_class,
                          std::uint64_t stream) {
        Dataset out;
        out.labels = labels;
        Rng rng(derive_seed(spec.seed, stream));
        for (std::size_t c = 0; c < spec.classes; ++c) {
            const auto& shared = group_shared[group_of[c]];
            for (std::size_t s = 0; s < per_class; ++s) {
                const auto length = static_cast<std::size_t>(rng.uniform_int(
                    static_cast<std::int64_t>(spec.len_min),
                    static_cast<std::int64_t>(spec.len_max)));
                const auto shared_count = static_cast<std::size_t>(rng.uniform_int(
                    static_cast<std::int64_t>(spec.shared_per_sentence_min),
                    static_cast<std::int64_t>(spec.shared_per_sentence_max)));
                const bool with_disc = rng.bernoulli(spec.disc_probability);

                std::vector<std::string> words;
                for (std::size_t i = 0; i < shared_count; ++i) {
                    words.push_back(shared[rng.below(shared.size())]);
                }
                if (with_disc) {
                    words.push_back(disc[c][rng.below(disc[c].size())]);
                }
                while (words.size() < length) {
                    words.push_back(fillers[rng.below(fillers.size())]);
                }
                rng.shuffle(words);

                LabeledExample example;
                example.id = split + "-" + class_names[c] + "-" + four_digits(s);
                std::string text;
                for (const auto& word : words) {
                    if (!text.empty()) text.push_back(' ');
                    text += word;
                }
                example.text = std::move(text);
                example.label = class_names[c];
                out.examples.push_back(std::move(example));
            }
        }
        return out;
    };

    corpus.train = make_split("train", spec.train_per_class, 1);
    corpus.val = make_split("val", spec.val_per_class, 2);
    corpus.test = make_split("test", spec.test_per_class, 3);
    return corpus;
}

ScriptedRules synthetic_oracle_rules(const SyntheticCorpus& corpus) {
    ScriptedRules rules;
    rules.default_probability = 0.08;
    // Discriminative keywords dominate; declared first so they win matching.
    for (const auto& [class_name, keywords] : corpus.discriminative_keywords) {
        for (const auto& keyword : keywords) {
            rules.rules.push_back({keyword, class_name, 0.85});
        }
    }
    for (const auto& [class_name, keywords] : corpus.shared_keywords) {
        for (const auto& keyword : keywords) {
            rules.rules.push_back({keyword, class_name, 0.45});
        }
    }
    return rules;
}

}  // namespace capkit

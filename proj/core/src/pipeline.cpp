#include "capkit/pipeline.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "capkit/attribution.hpp"
#include "capkit/rng.hpp"
#include "capkit/scores.hpp"

namespace capkit {

namespace {

using nlohmann::json;

PriorRecord to_record(const LabeledExample& example, const TokenizedSentence& sentence,
                      AttributionVector vector) {
    PriorRecord record;
    record.id = example.id;
    record.words = sentence.words;
    record.scores = std::move(vector.scores);
    record.method = vector.method;
    record.normalized = vector.normalized;
    return record;
}

}  // namespace

std::vector<PriorRecord> extract_cap_priors(const Dataset& dataset,
                                            const CapConfig& base, Oracle& oracle) {
    std::vector<PriorRecord> records;
    records.reserve(dataset.examples.size());
    for (std::size_t i = 0; i < dataset.examples.size(); ++i) {
        const auto& example = dataset.examples[i];
        const auto sentence = tokenize(example.text);
        CapConfig config = base;
        config.seed = derive_seed(base.seed, i);
        auto vector = cap_extract(sentence, example.label, config, oracle);
        vector.sentence_id = example.id;
        records.push_back(to_record(example, sentence, std::move(vector)));
    }
    return records;
}

std::vector<PriorRecord> extract_lime_priors(const Dataset& dataset,
                                             const LimeConfig& base, Oracle& oracle) {
    std::vector<PriorRecord> records;
    records.reserve(dataset.examples.size());
    for (std::size_t i = 0; i < dataset.examples.size(); ++i) {
        const auto& example = dataset.examples[i];
        const auto sentence = tokenize(example.text);
        LimeConfig config = base;
        config.seed = derive_seed(base.seed, i);
        auto vector = lime_extract(sentence, example.label, config, oracle);
        vector.sentence_id = example.id;
        records.push_back(to_record(example, sentence, std::move(vector)));
    }
    return records;
}

std::vector<PriorRecord> extract_ig_priors(const Dataset& dataset,
                                           const ToyClassifier& model,
                                           const IgConfig& config) {
    std::vector<PriorRecord> records;
    records.reserve(dataset.examples.size());
    for (const auto& example : dataset.examples) {
        const auto sentence = tokenize(example.text);
        const std::size_t gold = model.classes.index_of(example.label);
        auto vector =
            self_attribution(model, sentence, gold, config, AttributionMethod::ig);
        vector.sentence_id = example.id;
        records.push_back(to_record(example, sentence, std::move(vector)));
    }
    return records;
}

std::vector<PriorRecord> fuse_priors(const std::vector<std::vector<PriorRecord>>& inputs,
                                     FusionMode mode) {
    if (inputs.size() < 2) {
        throw InvalidInputError("fuse_priors: need at least two prior sets");
    }
    const auto& reference = inputs.front();
    for (const auto& input : inputs) {
        if (input.size() != reference.size()) {
            throw InvalidInputError("fuse_priors: record count mismatch across inputs");
        }
    }
    std::vector<std::vector<const PriorRecord*>> aligned(reference.size());
    for (const auto& input : inputs) {
        std::map<std::string, const PriorRecord*> by_id;
        for (const auto& record : input) {
            by_id[record.id] = &record;
        }
        for (std::size_t i = 0; i < reference.size(); ++i) {
            auto it = by_id.find(reference[i].id);
            if (it == by_id.end()) {
                throw InvalidInputError("fuse_priors: id missing from an input: " +
                                        reference[i].id);
            }
            if (it->second->words != reference[i].words) {
                throw InvalidInputError("fuse_priors: word misalignment for id " +
                                        reference[i].id);
            }
            aligned[i].push_back(it->second);
        }
    }
    std::vector<PriorRecord> fused;
    fused.reserve(reference.size());
    for (std::size_t i = 0; i < reference.size(); ++i) {
        std::vector<AttributionVector> vectors;
        for (const PriorRecord* record : aligned[i]) {
            AttributionVector v;
            v.sentence_id = record->id;
            v.scores = record->scores;
            v.method = record->method;
            v.normalized = record->normalized;
            vectors.push_back(v.normalized ? v : normalized(v));
        }
        AttributionVector hybrid = aggregate_priors(vectors, mode);
        PriorRecord record;
        record.id = reference[i].id;
        record.words = reference[i].words;
        record.scores = std::move(hybrid.scores);
        record.method = AttributionMethod::hybrid;
        record.normalized = true;
        fused.push_back(std::move(record));
    }
    return fused;
}

std::map<std::string, AttributionVector> priors_by_id(
    const std::vector<PriorRecord>& records) {
    std::map<std::string, AttributionVector> out;
    for (const auto& record : records) {
        AttributionVector v;
        v.sentence_id = record.id;
        v.scores = record.scores;
        v.method = record.method;
        v.normalized = record.normalized;
        out[record.id] = v.normalized ? v : normalized(v);
    }
    return out;
}

AdversarialBuildResult build_adversarial(const Dataset& attack_set,
                                         const std::vector<PriorRecord>& train_priors,
                                         const Dataset& train_set,
                                         const AdversarialBuildConfig& config,
                                         Oracle* oracle) {
    std::map<std::string, std::string> label_of;
    std::map<std::string, std::vector<std::string>> class_sentences;
    for (const auto& example : train_set.examples) {
        label_of[example.id] = example.label;
        auto& sentences = class_sentences[example.label];
        if (sentences.size() < 3) {
            sentences.push_back(example.text);  // prompt exemplars
        }
    }

    std::map<std::string, std::vector<ScoredSentence>> per_class;
    for (const auto& record : train_priors) {
        auto it = label_of.find(record.id);
        if (it == label_of.end()) {
            throw InvalidInputError("build_adversarial: prior id not in train set: " +
                                    record.id);
        }
        ScoredSentence scored;
        scored.words = record.words;
        scored.scores = record.normalized ? record.scores : normalize_scores(record.scores);
        per_class[it->second].push_back(std::move(scored));
    }

    AdversarialBuildResult result;
    std::map<std::string, std::set<std::string>> keyword_sets;
    for (const auto& [class_name, scored] : per_class) {
        auto keywords = class_keywords(class_name, scored, config.keywords_k);
        keyword_sets[class_name] = {keywords.keywords.begin(), keywords.keywords.end()};
        result.keywords[class_name] = std::move(keywords);
    }
    result.overlap = keyword_overlap_matrix(keyword_sets);
    result.plan = select_adversarial_targets(result.overlap, config.n_targets,
                                             config.pool, config.seed);

    std::uint64_t stream = 0;
    for (const auto& example : attack_set.examples) {
        auto plan_it = result.plan.targets.find(example.label);
        if (plan_it == result.plan.targets.end()) {
            throw InvalidInputError("build_adversarial: class missing from plan: " +
                                    example.label);
        }
        for (const auto& target_name : plan_it->second) {
            const auto& target = result.keywords.at(target_name);
            const auto& source = result.keywords.at(example.label);
            const auto& exemplars = class_sentences[target_name];
            if (config.addition) {
                auto generated =
                    gen_addition(example, target, config.backend,
                                 derive_seed(config.seed, stream++), oracle, exemplars);
                if (generated.example) {
                    result.examples.push_back(std::move(*generated.example));
                } else {
                    result.skips.emplace_back(example.id, generated.skip_reason);
                }
            }
            if (config.replacement) {
                auto generated = gen_replacement(example, source, target, config.backend,
                                                 derive_seed(config.seed, stream++),
                                                 oracle, exemplars);
                if (generated.example) {
                    result.examples.push_back(std::move(*generated.example));
                } else {
                    result.skips.emplace_back(example.id, generated.skip_reason);
                }
            }
        }
    }
    return result;
}

json evaluate_model(const ToyClassifier& model, const Dataset& dataset,
                    const EvalOptions& options) {
    if (dataset.examples.empty()) {
        throw InvalidInputError("evaluate_model: empty dataset");
    }
    json metrics;
    metrics["examples"] = dataset.examples.size();
    metrics["rationale_ratio"] = options.rationale_ratio;

    std::map<std::string, std::pair<std::size_t, std::size_t>> by_provenance;
    std::size_t correct = 0;
    double com_sum = 0.0, suf_sum = 0.0;
    std::size_t com_count = 0;

    for (const auto& example : dataset.examples) {
        const auto sentence = tokenize(example.text);
        const std::size_t predicted = predict(model, sentence);
        const bool is_correct =
            model.classes.name_of(predicted) == example.label;
        correct += is_correct ? 1 : 0;
        auto& bucket = by_provenance[to_string(example.provenance)];
        bucket.first += is_correct ? 1 : 0;
        bucket.second += 1;

        if (options.with_comprehensiveness || options.with_sufficiency) {
            const auto self_attr =
                self_attribution(model, sentence, predicted, options.ig);
            const auto rationale =
                extract_rationale(self_attr, options.rationale_ratio);
            if (options.with_comprehensiveness) {
                com_sum += comprehensiveness(model, sentence, predicted, rationale);
            }
            if (options.with_sufficiency) {
                suf_sum += sufficiency(model, sentence, predicted, rationale);
            }
            ++com_count;
        }
    }

    if (options.with_accuracy) {
        metrics["accuracy"] =
            static_cast<double>(correct) / static_cast<double>(dataset.examples.size());
        json breakdown;
        for (const auto& [provenance, counts] : by_provenance) {
            breakdown[provenance] = {
                {"accuracy", static_cast<double>(counts.first) /
                                 static_cast<double>(counts.second)},
                {"examples", counts.second},
            };
        }
        metrics["by_provenance"] = breakdown;
    }
    if (options.with_comprehensiveness && com_count > 0) {
        metrics["comprehensiveness"] = com_sum / static_cast<double>(com_count);
    }
    if (options.with_sufficiency && com_count > 0) {
        metrics["sufficiency"] = suf_sum / static_cast<double>(com_count);
    }
    return metrics;
}

std::string render_metrics_table(const json& metrics) {
    std::ostringstream out;
    auto row = [&](const std::string& name, const json& value) {
        out << "  ";
        out << name;
        for (std::size_t i = name.size(); i < 24; ++i) out << ' ';
        if (value.is_number_float()) {
            char buffer[32];
            std::snprintf(buffer, sizeof(buffer), "%.4f", value.get<double>());
            out << buffer;
        } else {
            out << value.dump();
        }
        out << "\n";
    };
    out << "metric                    value\n";
    for (const char* key : {"examples", "accuracy", "comprehensiveness", "sufficiency",
                            "rationale_ratio"}) {
        if (metrics.contains(key)) row(key, metrics[key]);
    }
    if (metrics.contains("by_provenance")) {
        for (const auto& [provenance, entry] : metrics["by_provenance"].items()) {
            row("accuracy[" + provenance + "]", entry["accuracy"]);
        }
    }
    return out.str();
}

}  // namespace capkit

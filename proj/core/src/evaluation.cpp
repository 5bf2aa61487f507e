#include "capkit/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace capkit {

namespace {

std::vector<std::string> words_without(const TokenizedSentence& sentence,
                                       const std::vector<std::size_t>& removed) {
    std::vector<bool> drop(sentence.word_count(), false);
    for (std::size_t idx : removed) {
        drop[idx] = true;
    }
    std::vector<std::string> kept;
    for (std::size_t i = 0; i < sentence.word_count(); ++i) {
        if (!drop[i]) kept.push_back(sentence.words[i]);
    }
    return kept;
}

void check_rationale(const TokenizedSentence& sentence, const Rationale& rationale) {
    std::size_t previous = 0;
    bool first = true;
    for (std::size_t idx : rationale.word_indices) {
        if (idx >= sentence.word_count()) {
            throw InvalidInputError("rationale index out of range");
        }
        if (!first && idx <= previous) {
            throw InvalidInputError("rationale indices must be unique and ascending");
        }
        previous = idx;
        first = false;
    }
}

}  // namespace

Rationale extract_rationale(const AttributionVector& attr, double ratio) {
    if (!(ratio > 0.0 && ratio <= 1.0)) {
        throw InvalidInputError("extract_rationale: ratio must lie in (0, 1]");
    }
    const std::size_t d = attr.scores.size();
    if (d == 0) {
        throw InvalidInputError("extract_rationale: empty attribution vector");
    }
    const auto k = static_cast<std::size_t>(
        std::ceil(ratio * static_cast<double>(d)) + 0.5);
    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return attr.scores[a] > attr.scores[b];  // stable: ties keep lower index first
    });
    Rationale rationale;
    rationale.sentence_id = attr.sentence_id;
    rationale.word_indices.assign(order.begin(), order.begin() + std::min(k, d));
    std::sort(rationale.word_indices.begin(), rationale.word_indices.end());
    return rationale;
}

std::vector<double> probabilities_for_words(const ToyClassifier& model,
                                            const std::vector<std::string>& words) {
    std::vector<std::vector<double>> embeds;
    embeds.reserve(words.size());
    for (const auto& word : words) {
        const std::size_t row = model.vocab.index_of(word);
        std::vector<double> e(model.embed_dim);
        for (std::size_t c = 0; c < model.embed_dim; ++c) {
            e[c] = model.embedding(row, c);
        }
        embeds.push_back(std::move(e));
    }
    return forward_on_embeddings(model, embeds).probs;
}

double comprehensiveness(const ToyClassifier& model, const TokenizedSentence& sentence,
                         std::size_t predicted_class, const Rationale& rationale) {
    check_rationale(sentence, rationale);
    const double full =
        probabilities_for_words(model, sentence.words)[predicted_class];
    const double without =
        probabilities_for_words(model, words_without(sentence, rationale.word_indices))
            [predicted_class];
    return (full - without) / full;
}

double sufficiency(const ToyClassifier& model, const TokenizedSentence& sentence,
                   std::size_t predicted_class, const Rationale& rationale) {
    check_rationale(sentence, rationale);
    if (rationale.word_indices.empty()) {
        throw InvalidInputError("sufficiency: empty rationale");
    }
    std::vector<std::string> kept;
    for (std::size_t idx : rationale.word_indices) {
        kept.push_back(sentence.words[idx]);
    }
    const double full =
        probabilities_for_words(model, sentence.words)[predicted_class];
    const double only = probabilities_for_words(model, kept)[predicted_class];
    return (full - only) / full;
}

std::size_t predict(const ToyClassifier& model, const TokenizedSentence& sentence) {
    const auto probs = forward(model, sentence);
    std::size_t best = 0;
    for (std::size_t j = 1; j < probs.size(); ++j) {
        if (probs[j] > probs[best]) best = j;
    }
    return best;
}

double accuracy(const ToyClassifier& model,
                const std::vector<LabeledExample>& examples) {
    if (examples.empty()) {
        throw InvalidInputError("accuracy: empty example set");
    }
    std::size_t correct = 0;
    for (const auto& example : examples) {
        const auto sentence = tokenize(example.text);
        if (model.classes.name_of(predict(model, sentence)) == example.label) {
            ++correct;
        }
    }
    return static_cast<double>(correct) / static_cast<double>(examples.size());
}

OverlapMatrix keyword_overlap_matrix(
    const std::map<std::string, std::set<std::string>>& class_keywords) {
    if (class_keywords.empty()) {
        throw InvalidInputError("keyword_overlap_matrix: no classes");
    }
    OverlapMatrix out;
    for (const auto& [name, keywords] : class_keywords) {
        if (keywords.empty()) {
            throw InvalidInputError("keyword_overlap_matrix: empty keyword set for " +
                                    name);
        }
        out.class_names.push_back(name);
    }
    const std::size_t n = out.class_names.size();
    out.values = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        out.values(i, i) = 1.0;
        const auto& a = class_keywords.at(out.class_names[i]);
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto& b = class_keywords.at(out.class_names[j]);
            std::size_t intersection = 0;
            for (const auto& word : a) {
                intersection += b.count(word);
            }
            const std::size_t unions = a.size() + b.size() - intersection;
            const double jaccard =
                static_cast<double>(intersection) / static_cast<double>(unions);
            out.values(i, j) = jaccard;
            out.values(j, i) = jaccard;
        }
    }
    return out;
}

std::vector<MisclassRecord> misclass_vs_overlap(const ToyClassifier& model,
                                                const std::vector<LabeledExample>& test_set,
                                                const OverlapMatrix& overlap,
                                                std::size_t levels) {
    if (levels < 1) {
        throw InvalidInputError("misclass_vs_overlap: levels must be >= 1");
    }
    auto overlap_index = [&](const std::string& name) {
        auto it = std::find(overlap.class_names.begin(), overlap.class_names.end(), name);
        if (it == overlap.class_names.end()) {
            throw InvalidInputError("misclass_vs_overlap: class missing from overlap: " +
                                    name);
        }
        return static_cast<std::size_t>(it - overlap.class_names.begin());
    };
    std::vector<MisclassRecord> records;
    for (const auto& example : test_set) {
        const auto sentence = tokenize(example.text);
        const std::string predicted = model.classes.name_of(predict(model, sentence));
        if (predicted == example.label) continue;
        const double value =
            overlap.at(overlap_index(example.label), overlap_index(predicted));
        auto bucket = static_cast<std::size_t>(value * static_cast<double>(levels));
        bucket = std::min(bucket, levels - 1);
        records.push_back({example.label, predicted, bucket});
    }
    return records;
}

OverlapMatrix class_similarity(const ToyClassifier& model,
                               const std::vector<LabeledExample>& dataset) {
    const std::size_t n = model.classes.size();
    std::vector<std::vector<double>> means(n, std::vector<double>(model.embed_dim, 0.0));
    std::vector<std::size_t> counts(n, 0);
    for (const auto& example : dataset) {
        const std::size_t cls = model.classes.index_of(example.label);
        const auto sentence = tokenize(example.text);
        if (sentence.word_count() == 0) continue;
        const auto trace = forward_on_embeddings(model, embeddings_for(model, sentence));
        for (std::size_t c = 0; c < model.embed_dim; ++c) {
            means[cls][c] += trace.pooled[c];
        }
        ++counts[cls];
    }
    for (std::size_t cls = 0; cls < n; ++cls) {
        if (counts[cls] == 0) {
            throw InvalidInputError("class_similarity: class has no examples: " +
                                    model.classes.name_of(cls));
        }
        for (double& x : means[cls]) {
            x /= static_cast<double>(counts[cls]);
        }
    }
    std::vector<double> norms(n, 0.0);
    for (std::size_t cls = 0; cls < n; ++cls) {
        double sum = 0.0;
        for (double x : means[cls]) sum += x * x;
        norms[cls] = std::sqrt(sum);
    }
    OverlapMatrix out;
    out.class_names = model.classes.names();
    out.values = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        out.values(i, i) = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            if (norms[i] == 0.0 || norms[j] == 0.0) {
                throw UndefinedSimilarityError(
                    "class_similarity: zero-vector class mean");
            }
            double dot = 0.0;
            for (std::size_t c = 0; c < model.embed_dim; ++c) {
                dot += means[i][c] * means[j][c];
            }
            const double value = dot / (norms[i] * norms[j]);
            out.values(i, j) = value;
            out.values(j, i) = value;
        }
    }
    return out;
}

}  // namespace capkit

#pragma once
// Accuracy, rationale-based faithfulness metrics (comprehensiveness and
// sufficiency), and the diagnostic analyses: class keyword overlap,
// misclassification-versus-overlap breakdown, and class similarity.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "capkit/linalg.hpp"
#include "capkit/toy_model.hpp"
#include "capkit/types.hpp"

namespace capkit {

struct Rationale {
    std::string sentence_id;
    std::vector<std::size_t> word_indices;  // unique, ascending
};

struct OverlapMatrix {
    std::vector<std::string> class_names;
    Matrix values;  // symmetric, unit diagonal, entries in [0, 1]

    double at(std::size_t i, std::size_t j) const { return values(i, j); }
};

// Top-ceil(ratio * d) words by score, ties broken toward the lower index.
Rationale extract_rationale(const AttributionVector& attr, double ratio);

// Class probabilities for an arbitrary word list; the empty list evaluates
// on the zero pooled vector (the empty-input convention for full-sentence
// rationales).
std::vector<double> probabilities_for_words(const ToyClassifier& model,
                                            const std::vector<std::string>& words);

// (p(y|x) - p(y|x \ r)) / p(y|x): confidence drop when the rationale words
// are deleted. Can be negative when removal raises the probability.
double comprehensiveness(const ToyClassifier& model, const TokenizedSentence& sentence,
                         std::size_t predicted_class, const Rationale& rationale);

// (p(y|x) - p(y|r)) / p(y|x): confidence drop when only the rationale
// remains; lower is better. Throws InvalidInputError on an empty rationale.
double sufficiency(const ToyClassifier& model, const TokenizedSentence& sentence,
                   std::size_t predicted_class, const Rationale& rationale);

// Fraction of argmax predictions equal to gold; argmax ties break toward
// the lower class index.
double accuracy(const ToyClassifier& model, const std::vector<LabeledExample>& examples);

std::size_t predict(const ToyClassifier& model, const TokenizedSentence& sentence);

// Pairwise Jaccard similarity of per-class keyword sets. Throws
// InvalidInputError when a class has an empty set.
OverlapMatrix keyword_overlap_matrix(
    const std::map<std::string, std::set<std::string>>& class_keywords);

struct MisclassRecord {
    std::string gold_class;
    std::string predicted_class;
    std::size_t overlap_level = 0;  // equal-width bucket over [0, 1]
};

// One record per misclassified example, bucketing the gold<->predicted
// overlap into `levels` equal-width bins.
std::vector<MisclassRecord> misclass_vs_overlap(const ToyClassifier& model,
                                                const std::vector<LabeledExample>& test_set,
                                                const OverlapMatrix& overlap,
                                                std::size_t levels);

// Cosine similarity between per-class means of mean-pooled sentence
// embeddings; unit diagonal. Throws UndefinedSimilarityError when a class
// mean is the zero vector, InvalidInputError when a class has no examples.
OverlapMatrix class_similarity(const ToyClassifier& model,
                               const std::vector<LabeledExample>& dataset);

}  // namespace capkit

#pragma once
// Self-contained differentiable text classifier: embedding mean-pool, one
// tanh hidden layer, softmax head. All gradients are derived by hand and
// checked against finite differences in the test suite. Word-level tokens
// align 1:1 with prior words, so attribution alignment is exact here.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "capkit/linalg.hpp"
#include "capkit/types.hpp"

namespace capkit {

// Word -> index map built from the training split. Index 0 is the reserved
// out-of-vocabulary slot; known words are sorted so serialization is stable.
class Vocabulary {
public:
    Vocabulary() = default;

    static Vocabulary build(const std::vector<TokenizedSentence>& corpus);
    static Vocabulary from_words(std::vector<std::string> sorted_words);

    // OOV maps to index 0.
    std::size_t index_of(const std::string& word) const;
    bool knows(const std::string& word) const;

    // Total row count including the OOV slot.
    std::size_t size() const { return sorted_words_.size() + 1; }

    const std::vector<std::string>& known_words() const { return sorted_words_; }

private:
    std::vector<std::string> sorted_words_;
    std::map<std::string, std::size_t> index_;
};

struct ToyClassifier {
    Vocabulary vocab;
    LabelSpace classes;
    std::size_t embed_dim = 32;
    std::size_t hidden_dim = 32;
    Matrix embedding;              // |V| x embed_dim
    Matrix hidden_weights;         // hidden_dim x embed_dim
    std::vector<double> hidden_bias;
    Matrix output_weights;         // C x hidden_dim
    std::vector<double> output_bias;
};

// Parameters drawn uniformly from [-0.1, 0.1]; bit-identical for a fixed seed.
ToyClassifier init_model(const Vocabulary& vocab, const LabelSpace& classes,
                         std::size_t embed_dim, std::uint64_t seed);

// Intermediate activations kept for backward passes.
struct ForwardTrace {
    std::vector<double> pooled;      // g: mean of word embeddings
    std::vector<double> preact;      // u = W_h g + b_h
    std::vector<double> hidden;      // h = tanh(u)
    std::vector<double> logits;      // o = W_o h + b_o
    std::vector<double> probs;       // softmax(o)
};

// Embedding rows for each word of the sentence (OOV words share row 0).
std::vector<std::vector<double>> embeddings_for(const ToyClassifier& model,
                                                const TokenizedSentence& sentence);

// Forward from explicit per-word embeddings (integration paths feed scaled
// embeddings through here). An empty list pools to the zero vector.
ForwardTrace forward_on_embeddings(const ToyClassifier& model,
                                   const std::vector<std::vector<double>>& embeds);

ForwardTrace forward_from_pooled(const ToyClassifier& model,
                                 const std::vector<double>& pooled);

// Class probabilities for a sentence; a valid probability simplex.
std::vector<double> forward(const ToyClassifier& model,
                            const TokenizedSentence& sentence);

// Gradient of probs[target] with respect to the pooled vector g, evaluated
// at the given trace: W_h^T diag(1 - h^2) W_o^T q with q_j = p_t(1[j=t]-p_j).
std::vector<double> grad_probability_wrt_pooled(const ToyClassifier& model,
                                                const ForwardTrace& trace,
                                                std::size_t target);

// Exact gradient of the target-class probability with respect to each
// word's embedding vector. Mean pooling makes all per-word gradients equal
// to the pooled gradient divided by the word count.
std::vector<std::vector<double>> grad_wrt_embeddings(const ToyClassifier& model,
                                                     const TokenizedSentence& sentence,
                                                     std::size_t target);

struct ModelGradients {
    Matrix embedding;
    Matrix hidden_weights;
    std::vector<double> hidden_bias;
    Matrix output_weights;
    std::vector<double> output_bias;
    // Gradient with respect to each word position's embedding input.
    std::vector<std::vector<double>> input_embeddings;
};

ModelGradients zero_gradients(const ToyClassifier& model, std::size_t word_count);

// Exact parameter gradients of the cross-entropy loss -ln p(gold | sentence).
ModelGradients train_step_gradients(const ToyClassifier& model,
                                    const TokenizedSentence& sentence,
                                    const std::string& gold_label);

// Versioned JSON checkpoint with shape metadata and row-major weight arrays;
// round-trips bit-exactly.
std::string model_to_json(const ToyClassifier& model);
ToyClassifier model_from_json(const std::string& text);
void save_model(const ToyClassifier& model, const std::string& path);
ToyClassifier load_model(const std::string& path);

}  // namespace capkit

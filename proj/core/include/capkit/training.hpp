#pragma once
// Explanation-guided learning: mini-batch SGD on L = L_ce + beta * L_a,
// where L_a aligns the model's own integrated-gradients attribution with an
// external prior via MSE. The alignment gradient backpropagates through the
// quadrature's gradient-path sum with the normalization constants detached
// (one extra backward pass per quadrature step).

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "capkit/attribution.hpp"
#include "capkit/toy_model.hpp"
#include "capkit/types.hpp"

namespace capkit {

struct TrainConfig {
    double beta = 1.0;
    double learning_rate = 0.5;
    std::size_t batch_size = 16;
    std::size_t epochs = 50;
    double clip_norm = 1.0;
    std::uint64_t seed = 0;
    IgConfig ig{/*steps=*/8, /*use_absolute=*/true};  // reduced steps while training
    std::size_t early_stop_patience = 10;
    // Floor for the detached normalization range in the alignment backward.
    // Near initialization the attribution spread is ~1e-8 and the raw
    // 1/range factor would let alignment noise swamp the cross-entropy
    // signal; the floor phases the alignment pressure in as attributions
    // gain structure.
    double alignment_range_floor = 0.05;
    // Cross-entropy-only epochs before the alignment term switches on. A
    // freshly initialized model has no attribution structure to align;
    // without the warmup the joint objective settles at chance accuracy.
    // Early stopping starts counting after the warmup.
    std::size_t alignment_warmup_epochs = 25;

    void validate() const;
};

struct EpochStats {
    double total_loss = 0.0;       // accumulated as ce + beta * alignment per batch
    double ce_loss = 0.0;
    double alignment_loss = 0.0;
    double train_accuracy = 0.0;
    std::optional<double> validation_accuracy;
};

struct TrainReport {
    std::vector<EpochStats> epochs;
    std::uint64_t seed = 0;
    std::size_t best_epoch = 0;  // epoch whose model was kept
};

// -ln(probs[gold]) with probabilities floored at 1e-12 before the log.
double cross_entropy(const std::vector<double>& probs, std::size_t gold_index);

// Mean over words of squared differences between two normalized vectors
// over the same sentence. The mean (rather than the plain squared norm)
// decouples beta from sentence length.
double attribution_loss(const AttributionVector& prior,
                        const AttributionVector& self_attr);

// Scales all gradients so their global L2 norm is at most clip_norm;
// returns the pre-clip norm.
double clip_gradients(ModelGradients& grads, double clip_norm);

// Computes L_a for one example and accumulates its parameter gradient
// (times `scale`) into grads: exact differentiation through the quadrature's
// gradient-path sum, with the normalization min/range treated as constants.
// Returns the loss value. Exposed so the second-order backward can be
// checked against finite differences.
double accumulate_alignment_gradients(const ToyClassifier& model,
                                      const TokenizedSentence& sentence,
                                      std::size_t gold, const AttributionVector& prior,
                                      const IgConfig& ig, double scale,
                                      ModelGradients& grads,
                                      double range_floor = 0.05);

// Trains in place. Examples with a prior (keyed by example id) receive the
// alignment term; the rest contribute cross-entropy only. Early stopping
// watches validation accuracy with the configured patience and the
// best-validation model is restored on exit. Fully deterministic for a
// fixed seed.
TrainReport train(ToyClassifier& model, const std::vector<LabeledExample>& train_set,
                  const std::vector<LabeledExample>& val_set,
                  const std::map<std::string, AttributionVector>& priors,
                  const TrainConfig& config);

}  // namespace capkit

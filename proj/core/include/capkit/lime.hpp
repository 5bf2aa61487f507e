#pragma once
// Perturbation-based local-surrogate baseline prior. Reuses the masking and
// ridge machinery with an exponential locality kernel; the prompt
// deliberately omits the label space so the contrast with the class-aware
// extractor is purely the prompt construction.

#include <cstdint>

#include "capkit/masking.hpp"
#include "capkit/oracle.hpp"
#include "capkit/prompt.hpp"
#include "capkit/types.hpp"

namespace capkit {

struct LimeConfig {
    std::size_t n_samples = 100;
    double kernel_width = 0.25;
    double lambda = 0.1;
    std::uint64_t seed = 0;
    PlainTemplate prompt = default_plain_template();
};

// Locality weight w = exp(-f^2 / kernel_width^2) where f is the fraction of
// masked (zero) words; w in (0, 1], strictly decreasing in the zero-count.
double lime_weight(const PerturbationMask& mask, double kernel_width);

// Weighted ridge fit of raw label probabilities (no log transform) over the
// same mask plan construction as the class-aware path. Returns raw scores
// with method = lime; deterministic for fixed seed and scripted oracle.
AttributionVector lime_extract(const TokenizedSentence& sentence,
                               const std::string& gold_label, const LimeConfig& config,
                               Oracle& oracle);

}  // namespace capkit

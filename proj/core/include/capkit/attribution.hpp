#pragma once
// Integrated-gradients self-attribution over the toy classifier: midpoint
// quadrature along the straight-line path from a zero-embedding baseline to
// the input, plus token->word aggregation and normalization for alignment.

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "capkit/toy_model.hpp"
#include "capkit/types.hpp"

namespace capkit {

struct IgConfig {
    std::size_t steps = 64;       // midpoint quadrature resolution
    bool use_absolute = true;     // abs before normalization; signed kept for ablation
};

// Per-word gradients dF/de_i evaluated at a path point.
using PathGradientFn = std::function<std::vector<std::vector<double>>(
    const std::vector<std::vector<double>>& path_point)>;

// Midpoint-rule path integral from the zero baseline: for word i,
// score_i = e_i . mean_k dF/de_i(mu_k * e). Exact for any step count when
// the gradient field is constant (linear F).
std::vector<double> integrated_gradients_path(
    const std::vector<std::vector<double>>& embeds, std::size_t steps,
    const PathGradientFn& gradient_at);

// Per-word raw IG scores of the target-class probability: for word i,
// sum over embedding dims of (e_i - e'_i) times the step-averaged gradient
// along the path. Signed reals; satisfies sum IG = F(e) - F(e') in the
// quadrature limit.
std::vector<double> integrated_gradients(const ToyClassifier& model,
                                         const TokenizedSentence& sentence,
                                         std::size_t target_class,
                                         const IgConfig& config);

// Word score = sum of its tokens' scores; a word with no tokens scores 0.
// Throws AlignmentError when a token maps outside [0, word_count).
std::vector<double> tokens_to_words(const std::vector<double>& token_scores,
                                    const std::vector<std::size_t>& token_to_word,
                                    std::size_t word_count);

// Absolute IG word scores, min-max normalized; method = self unless a
// different tag is requested (extraction of ig-method priors reuses this).
AttributionVector self_attribution(const ToyClassifier& model,
                                   const TokenizedSentence& sentence,
                                   std::size_t target_class, const IgConfig& config,
                                   AttributionMethod method = AttributionMethod::self);

}  // namespace capkit

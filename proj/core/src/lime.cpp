#include "capkit/lime.hpp"

#include <cmath>

#include "capkit/cap_solver.hpp"

namespace capkit {

double lime_weight(const PerturbationMask& mask, double kernel_width) {
    if (!(kernel_width > 0.0)) {
        throw InvalidInputError("lime_weight: kernel_width must be positive");
    }
    if (mask.size() == 0) {
        throw InvalidInputError("lime_weight: empty mask");
    }
    const double masked_fraction =
        static_cast<double>(mask.zeros()) / static_cast<double>(mask.size());
    return std::exp(-(masked_fraction * masked_fraction) /
                    (kernel_width * kernel_width));
}

AttributionVector lime_extract(const TokenizedSentence& sentence,
                               const std::string& gold_label, const LimeConfig& config,
                               Oracle& oracle) {
    if (sentence.word_count() == 0) {
        throw InvalidInputError("lime_extract: empty sentence");
    }
    const MaskPlan plan =
        sample_masks(sentence.word_count(), config.n_samples, config.seed);
    std::vector<double> probabilities;
    std::vector<double> weights;
    probabilities.reserve(plan.masks.size());
    weights.reserve(plan.masks.size());
    for (const auto& mask : plan.masks) {
        const std::string prompt =
            render_plain(config.prompt, apply_mask(sentence, mask));
        probabilities.push_back(oracle.label_probability(prompt, gold_label));
        weights.push_back(lime_weight(mask, config.kernel_width));
    }
    AttributionVector out;
    out.scores = solve_weighted_ridge(plan, probabilities, weights, config.lambda);
    out.method = AttributionMethod::lime;
    out.normalized = false;
    return out;
}

}  // namespace capkit

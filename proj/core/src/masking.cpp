#include "capkit/masking.hpp"

#include <algorithm>

#include "capkit/logging.hpp"
#include "capkit/rng.hpp"

namespace capkit {

std::size_t PerturbationMask::ones() const {
    return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), 1));
}

MaskPlan sample_masks(std::size_t d, std::size_t n, std::uint64_t seed) {
    if (d < 1 || n < 1) {
        throw InvalidInputError("sample_masks: d and n must be >= 1");
    }
    MaskPlan plan;
    plan.seed = seed;
    plan.n_requested = n;

    const std::size_t singles = std::min(d, n);
    if (singles < d) {
        warn("sample_masks: budget n=" + std::to_string(n) +
             " below word count d=" + std::to_string(d) +
             ", truncating single-word block");
    }
    for (std::size_t i = 0; i < singles; ++i) {
        PerturbationMask mask;
        mask.bits.assign(d, 1);
        mask.bits[i] = 0;
        plan.masks.push_back(std::move(mask));
    }
    if (d <= 3 || n <= d) {
        return plan;
    }

    Rng rng(seed);
    const std::size_t s_max = d / 2 + 1;  // floor(d/2) + 1, leaves >= 1 word for d >= 4
    for (std::size_t i = 0; i < n - d; ++i) {
        const auto s = static_cast<std::size_t>(
            rng.uniform_int(2, static_cast<std::int64_t>(s_max)));
        PerturbationMask mask;
        mask.bits.assign(d, 1);
        for (std::size_t pos : rng.sample_without_replacement(d, s)) {
            mask.bits[pos] = 0;
        }
        plan.masks.push_back(std::move(mask));
    }
    return plan;
}

std::string apply_mask(const TokenizedSentence& sentence, const PerturbationMask& mask) {
    if (mask.size() != sentence.word_count()) {
        throw InvalidInputError("apply_mask: mask/sentence length mismatch");
    }
    std::string out;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (!mask.bits[i]) continue;
        if (!out.empty()) out.push_back(' ');
        out += sentence.words[i];
    }
    return out;
}

}  // namespace capkit

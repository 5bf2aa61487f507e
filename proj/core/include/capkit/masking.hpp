#pragma once
// Perturbation masks over sentence words: the rows of the attribution design
// matrix. A mask bit of 1 keeps the word, 0 deletes it.

#include <cstdint>
#include <string>
#include <vector>

#include "capkit/types.hpp"

namespace capkit {

struct PerturbationMask {
    std::vector<std::uint8_t> bits;  // 1 = word included, 0 = word removed

    std::size_t size() const { return bits.size(); }
    std::size_t ones() const;
    std::size_t zeros() const { return bits.size() - ones(); }
};

struct MaskPlan {
    std::vector<PerturbationMask> masks;
    std::uint64_t seed = 0;
    std::size_t n_requested = 0;
};

// Deterministic mask plan for a sentence of d words: first all d single-word
// masks (exactly one zero each, in word order), then max(0, n - d) random
// masks whose zero-count is drawn uniformly from [2, floor(d/2) + 1] with
// zero positions uniform without replacement. For d <= 3 only the
// single-word block is emitted. n < d truncates the single-word block with a
// warning. Random masks may repeat; ridge regularization absorbs the
// collinearity.
MaskPlan sample_masks(std::size_t d, std::size_t n, std::uint64_t seed);

// Deletion semantics: surviving words joined by single spaces.
std::string apply_mask(const TokenizedSentence& sentence, const PerturbationMask& mask);

}  // namespace capkit

#pragma once
// Score normalization, hybrid fusion, and correlation. All pure functions.

#include <vector>

#include "capkit/types.hpp"

namespace capkit {

// Min-max rescaling to [0, 1]. A constant vector (max == min) maps to all
// zeros ("no word is distinguished") and emits a warning; this also covers
// single-word sentences. Throws InvalidInputError on empty or non-finite
// input.
std::vector<double> normalize_scores(const std::vector<double>& values);

// Returns a copy of `raw` with scores min-max normalized and the flag set.
AttributionVector normalized(const AttributionVector& raw);

enum class FusionMode { mean, max };

std::string to_string(FusionMode mode);
FusionMode fusion_mode_from_string(const std::string& name);

// Element-wise mean or max of >= 2 normalized priors over the same sentence.
// The result carries method = hybrid and stays in [0, 1] without
// re-normalization. Throws InvalidInputError on length mismatch, differing
// sentence ids, or unnormalized input.
AttributionVector aggregate_priors(const std::vector<AttributionVector>& priors,
                                   FusionMode mode);

// Standard Pearson correlation coefficient. Throws InvalidInputError on
// length mismatch or length < 2, UndefinedCorrelationError when either
// vector is constant.
double pearson(const std::vector<double>& u, const std::vector<double>& v);

}  // namespace capkit

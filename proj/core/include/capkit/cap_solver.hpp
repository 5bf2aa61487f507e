#pragma once
// Class-aware prior extraction: turn oracle label probabilities over masked
// sentence variants into per-word scores by solving the regularized
// least-squares system (M^T M + lambda I) alpha = M^T z with a Cholesky
// factorization and two triangular substitutions.

#include <cstdint>
#include <vector>

#include "capkit/linalg.hpp"
#include "capkit/masking.hpp"
#include "capkit/oracle.hpp"
#include "capkit/prompt.hpp"
#include "capkit/types.hpp"

namespace capkit {

struct RidgeSystem {
    Matrix design;            // n x d, rows are masks
    std::vector<double> targets;
    double lambda = 0.1;      // > 0 guarantees positive definiteness
};

struct CapConfig {
    std::size_t n = 100;      // mask sample budget
    double lambda = 0.1;
    std::uint64_t seed = 0;
    PromptTemplate prompt;
    // Reconstruction/residual tolerances used by downstream checks.
    double factor_tolerance = 1e-10;
    double stationarity_tolerance = 1e-6;
};

// z = -1 / ln(p); strictly positive and strictly increasing on (0, 1).
// Natural log: any fixed base only rescales z uniformly and the ridge
// solution scales linearly with z, so score ordering is base-invariant.
// Throws InvalidInputError for p outside (0, 1).
double target_score(double probability);

// Normal equations of the ridge fit: A = M^T M + lambda I (symmetric by
// construction, each off-diagonal pair computed once), b = M^T z.
std::pair<Matrix, std::vector<double>> assemble_system(const MaskPlan& plan,
                                                       const std::vector<double>& z,
                                                       double lambda);

// Weighted variant used by locality-kernel extractors: rows and targets are
// scaled by sqrt(w_i) before assembly, then solved over the same
// factorization path. Unit weights reduce to the unweighted system.
std::vector<double> solve_weighted_ridge(const MaskPlan& plan,
                                         const std::vector<double>& targets,
                                         const std::vector<double>& weights,
                                         double lambda);

// Full per-sentence extraction: sample masks, query the oracle for the gold
// label probability of every masked variant, transform to targets, solve.
// Returns raw (unnormalized) scores with method = cap; deterministic for a
// fixed seed and scripted oracle.
AttributionVector cap_extract(const TokenizedSentence& sentence,
                              const std::string& gold_label, const CapConfig& config,
                              Oracle& oracle);

}  // namespace capkit

#include "capkit/cap_solver.hpp"

#include <cmath>

namespace capkit {

double target_score(double probability) {
    if (!(probability > 0.0 && probability < 1.0)) {
        throw InvalidInputError("target_score: probability must lie strictly in (0, 1)");
    }
    return -1.0 / std::log(probability);
}

std::pair<Matrix, std::vector<double>> assemble_system(const MaskPlan& plan,
                                                       const std::vector<double>& z,
                                                       double lambda) {
    if (!(lambda > 0.0)) {
        throw InvalidInputError("assemble_system: lambda must be positive");
    }
    if (plan.masks.empty()) {
        throw InvalidInputError("assemble_system: empty mask plan");
    }
    if (plan.masks.size() != z.size()) {
        throw InvalidInputError("assemble_system: mask/target count mismatch");
    }
    const std::size_t d = plan.masks.front().size();
    Matrix a(d, d);
    std::vector<double> b(d, 0.0);
    for (std::size_t row = 0; row < plan.masks.size(); ++row) {
        const auto& bits = plan.masks[row].bits;
        if (bits.size() != d) {
            throw InvalidInputError("assemble_system: ragged mask plan");
        }
        for (std::size_t i = 0; i < d; ++i) {
            if (!bits[i]) continue;
            b[i] += z[row];
            for (std::size_t j = i; j < d; ++j) {
                if (bits[j]) a(i, j) += 1.0;
            }
        }
    }
    for (std::size_t i = 0; i < d; ++i) {
        a(i, i) += lambda;
        for (std::size_t j = i + 1; j < d; ++j) {
            a(j, i) = a(i, j);  // mirror so A == A^T exactly
        }
    }
    return {std::move(a), std::move(b)};
}

std::vector<double> solve_weighted_ridge(const MaskPlan& plan,
                                         const std::vector<double>& targets,
                                         const std::vector<double>& weights,
                                         double lambda) {
    if (weights.size() != plan.masks.size() || targets.size() != plan.masks.size()) {
        throw InvalidInputError("solve_weighted_ridge: length mismatch");
    }
    // Weights fold into the normal equations directly: sqrt(w)-scaling rows
    // and targets yields A = sum_i w_i m_i m_i^T + lambda I, b = sum_i w_i z_i m_i.
    const std::size_t d = plan.masks.empty() ? 0 : plan.masks.front().size();
    Matrix a(d, d);
    std::vector<double> b(d, 0.0);
    if (!(lambda > 0.0)) {
        throw InvalidInputError("solve_weighted_ridge: lambda must be positive");
    }
    for (std::size_t row = 0; row < plan.masks.size(); ++row) {
        const double w = weights[row];
        if (!(w > 0.0)) {
            throw InvalidInputError("solve_weighted_ridge: weights must be positive");
        }
        const auto& bits = plan.masks[row].bits;
        for (std::size_t i = 0; i < d; ++i) {
            if (!bits[i]) continue;
            b[i] += w * targets[row];
            for (std::size_t j = i; j < d; ++j) {
                if (bits[j]) a(i, j) += w;
            }
        }
    }
    for (std::size_t i = 0; i < d; ++i) {
        a(i, i) += lambda;
        for (std::size_t j = i + 1; j < d; ++j) {
            a(j, i) = a(i, j);
        }
    }
    return solve_with_factor(cholesky_factor(a), b);
}

AttributionVector cap_extract(const TokenizedSentence& sentence,
                              const std::string& gold_label, const CapConfig& config,
                              Oracle& oracle) {
    if (sentence.word_count() == 0) {
        throw InvalidInputError("cap_extract: empty sentence");
    }
    const MaskPlan plan = sample_masks(sentence.word_count(), config.n, config.seed);
    std::vector<double> z;
    z.reserve(plan.masks.size());
    for (const auto& mask : plan.masks) {
        const std::string prompt = render_prompt(config.prompt, apply_mask(sentence, mask));
        z.push_back(target_score(oracle.label_probability(prompt, gold_label)));
    }
    auto [a, b] = assemble_system(plan, z, config.lambda);
    // lambda > 0 makes A positive definite; a failure here is an internal fault.
    const auto alpha = solve_with_factor(cholesky_factor(a), b);

    AttributionVector out;
    out.scores = alpha;
    out.method = AttributionMethod::cap;
    out.normalized = false;
    return out;
}

}  // namespace capkit

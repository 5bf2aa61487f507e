#include "capkit/scores.hpp"

#include <algorithm>
#include <cmath>

#include "capkit/logging.hpp"

namespace capkit {

std::vector<double> normalize_scores(const std::vector<double>& values) {
    if (values.empty()) {
        throw InvalidInputError("normalize_scores: empty input");
    }
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw InvalidInputError("normalize_scores: non-finite entry");
        }
    }
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    if (hi == lo) {
        if (values.size() > 1) {
            warn("normalize_scores: constant vector, returning all zeros");
        }
        return std::vector<double>(values.size(), 0.0);
    }
    std::vector<double> out;
    out.reserve(values.size());
    const double range = hi - lo;
    for (double v : values) {
        out.push_back((v - lo) / range);
    }
    return out;
}

AttributionVector normalized(const AttributionVector& raw) {
    AttributionVector out = raw;
    out.scores = normalize_scores(raw.scores);
    out.normalized = true;
    return out;
}

std::string to_string(FusionMode mode) {
    return mode == FusionMode::mean ? "mean" : "max";
}

FusionMode fusion_mode_from_string(const std::string& name) {
    if (name == "mean") return FusionMode::mean;
    if (name == "max") return FusionMode::max;
    throw InvalidInputError("unknown fusion mode: " + name);
}

AttributionVector aggregate_priors(const std::vector<AttributionVector>& priors,
                                   FusionMode mode) {
    if (priors.size() < 2) {
        throw InvalidInputError("aggregate_priors: need at least two priors");
    }
    const auto& first = priors.front();
    for (const auto& prior : priors) {
        if (!prior.normalized) {
            throw InvalidInputError("aggregate_priors: unnormalized input");
        }
        if (prior.scores.size() != first.scores.size()) {
            throw InvalidInputError("aggregate_priors: length mismatch");
        }
        if (prior.sentence_id != first.sentence_id) {
            throw InvalidInputError("aggregate_priors: sentence id mismatch");
        }
    }
    AttributionVector out;
    out.sentence_id = first.sentence_id;
    out.method = AttributionMethod::hybrid;
    out.normalized = true;
    out.scores.resize(first.scores.size());
    std::vector<double> column(priors.size());
    for (std::size_t i = 0; i < out.scores.size(); ++i) {
        if (mode == FusionMode::mean) {
            // Summing in sorted order makes the mean exactly invariant to
            // the order the priors were supplied in.
            for (std::size_t k = 0; k < priors.size(); ++k) {
                column[k] = priors[k].scores[i];
            }
            std::sort(column.begin(), column.end());
            double sum = 0.0;
            for (double v : column) sum += v;
            out.scores[i] = sum / static_cast<double>(priors.size());
        } else {
            double best = priors.front().scores[i];
            for (const auto& prior : priors) best = std::max(best, prior.scores[i]);
            out.scores[i] = best;
        }
    }
    return out;
}

double pearson(const std::vector<double>& u, const std::vector<double>& v) {
    if (u.size() != v.size()) {
        throw InvalidInputError("pearson: length mismatch");
    }
    if (u.size() < 2) {
        throw InvalidInputError("pearson: need at least two points");
    }
    const double n = static_cast<double>(u.size());
    double mean_u = 0.0, mean_v = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        mean_u += u[i];
        mean_v += v[i];
    }
    mean_u /= n;
    mean_v /= n;
    double cov = 0.0, var_u = 0.0, var_v = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double du = u[i] - mean_u;
        const double dv = v[i] - mean_v;
        cov += du * dv;
        var_u += du * du;
        var_v += dv * dv;
    }
    if (var_u == 0.0 || var_v == 0.0) {
        throw UndefinedCorrelationError("pearson: constant input vector");
    }
    return cov / std::sqrt(var_u * var_v);
}

}  // namespace capkit

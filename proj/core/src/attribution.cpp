#include "capkit/attribution.hpp"

#include <cmath>

#include "capkit/scores.hpp"

namespace capkit {

std::vector<double> integrated_gradients_path(
    const std::vector<std::vector<double>>& embeds, std::size_t steps,
    const PathGradientFn& gradient_at) {
    if (embeds.empty()) {
        throw InvalidInputError("integrated_gradients: empty input");
    }
    if (steps < 1) {
        throw InvalidInputError("integrated_gradients: steps must be >= 1");
    }
    const std::size_t d = embeds.size();
    const std::size_t dims = embeds.front().size();

    std::vector<std::vector<double>> mean_grad(d, std::vector<double>(dims, 0.0));
    std::vector<std::vector<double>> path_point(d, std::vector<double>(dims, 0.0));
    for (std::size_t step = 0; step < steps; ++step) {
        const double mu =
            (static_cast<double>(step) + 0.5) / static_cast<double>(steps);
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t c = 0; c < dims; ++c) {
                path_point[i][c] = mu * embeds[i][c];
            }
        }
        const auto grads = gradient_at(path_point);
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t c = 0; c < dims; ++c) {
                mean_grad[i][c] += grads[i][c];
            }
        }
    }
    const double scale = 1.0 / static_cast<double>(steps);
    std::vector<double> scores(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        double dot = 0.0;
        for (std::size_t c = 0; c < dims; ++c) {
            dot += embeds[i][c] * mean_grad[i][c] * scale;
        }
        scores[i] = dot;
    }
    return scores;
}

std::vector<double> integrated_gradients(const ToyClassifier& model,
                                         const TokenizedSentence& sentence,
                                         std::size_t target_class,
                                         const IgConfig& config) {
    if (sentence.word_count() == 0) {
        throw InvalidInputError("integrated_gradients: empty sentence");
    }
    const std::size_t d = sentence.word_count();
    const auto embeds = embeddings_for(model, sentence);
    return integrated_gradients_path(
        embeds, config.steps, [&](const std::vector<std::vector<double>>& point) {
            // Mean pooling shares one trace per step: every word sees the
            // pooled gradient scaled by 1/d.
            const ForwardTrace trace = forward_on_embeddings(model, point);
            auto pooled = grad_probability_wrt_pooled(model, trace, target_class);
            const double inv = 1.0 / static_cast<double>(d);
            for (double& g : pooled) {
                g *= inv;
            }
            return std::vector<std::vector<double>>(d, pooled);
        });
}

std::vector<double> tokens_to_words(const std::vector<double>& token_scores,
                                    const std::vector<std::size_t>& token_to_word,
                                    std::size_t word_count) {
    if (token_scores.size() != token_to_word.size()) {
        throw InvalidInputError("tokens_to_words: scores/alignment length mismatch");
    }
    std::vector<double> word_scores(word_count, 0.0);
    for (std::size_t t = 0; t < token_scores.size(); ++t) {
        if (token_to_word[t] >= word_count) {
            throw AlignmentError("tokens_to_words: token " + std::to_string(t) +
                                 " maps to no word");
        }
        word_scores[token_to_word[t]] += token_scores[t];
    }
    return word_scores;
}

AttributionVector self_attribution(const ToyClassifier& model,
                                   const TokenizedSentence& sentence,
                                   std::size_t target_class, const IgConfig& config,
                                   AttributionMethod method) {
    auto scores = integrated_gradients(model, sentence, target_class, config);
    if (config.use_absolute) {
        for (double& s : scores) {
            s = std::fabs(s);
        }
    }
    AttributionVector out;
    out.scores = normalize_scores(scores);
    out.method = method;
    out.normalized = true;
    return out;
}

}  // namespace capkit

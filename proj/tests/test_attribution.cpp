#include <doctest.h>

#include <cmath>
#include <numeric>

#include "capkit/attribution.hpp"
#include "capkit/rng.hpp"
#include "capkit/training.hpp"

using namespace capkit;

namespace {

ToyClassifier fixture_model(std::uint64_t seed = 1) {
    const auto vocab =
        Vocabulary::from_words({"alarm", "an", "check", "ring", "set", "the"});
    const LabelSpace classes({"query", "set_alarm", "weather"});
    return init_model(vocab, classes, 6, seed);
}

// A few epochs of plain CE so completeness runs on a trained model.
ToyClassifier trained_model(std::uint64_t seed) {
    auto model = fixture_model(seed);
    std::vector<LabeledExample> examples = {
        {"1", "set an alarm", "set_alarm", Provenance::original, {}},
        {"2", "ring the alarm", "set_alarm", Provenance::original, {}},
        {"3", "check the weather", "weather", Provenance::original, {}},
        {"4", "check the alarm", "query", Provenance::original, {}},
    };
    TrainConfig config;
    config.beta = 0.0;
    config.epochs = 15;
    config.seed = seed;
    train(model, examples, {}, {}, config);
    return model;
}

double total(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0);
}

}  // namespace

TEST_CASE("the path integral is exact for a constant gradient field") {
    // Linear F(e) = w . mean-pool(e): dF/de_i = w/d everywhere, so the
    // integral must equal w . e_i / d for any step count.
    Rng rng(5);
    const std::size_t d = 4, dims = 3;
    std::vector<std::vector<double>> embeds(d, std::vector<double>(dims));
    std::vector<double> w(dims);
    for (auto& e : embeds) {
        for (double& x : e) x = rng.uniform(-2.0, 2.0);
    }
    for (double& x : w) x = rng.uniform(-1.0, 1.0);

    const auto gradient_at = [&](const std::vector<std::vector<double>>&) {
        std::vector<double> per_word(dims);
        for (std::size_t c = 0; c < dims; ++c) {
            per_word[c] = w[c] / static_cast<double>(d);
        }
        return std::vector<std::vector<double>>(d, per_word);
    };

    for (std::size_t steps : {1, 2, 7, 64}) {
        const auto scores = integrated_gradients_path(embeds, steps, gradient_at);
        for (std::size_t i = 0; i < d; ++i) {
            double expected = 0.0;
            for (std::size_t c = 0; c < dims; ++c) {
                expected += w[c] * embeds[i][c] / static_cast<double>(d);
            }
            CHECK(scores[i] == doctest::Approx(expected).epsilon(1e-14));
        }
    }
}

TEST_CASE("input equal to the baseline gives all-zero scores") {
    auto model = fixture_model(3);
    model.embedding = Matrix(model.embedding.rows(), model.embedding.cols());
    const auto scores =
        integrated_gradients(model, tokenize("set an alarm"), 1, IgConfig{});
    for (double s : scores) CHECK(s == 0.0);
}

TEST_CASE("completeness holds within tolerance on trained models") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto model = trained_model(seed);
        const auto sentence = tokenize("set the alarm ring");
        const std::size_t target = 1;
        const auto embeds = embeddings_for(model, sentence);
        const double f_input = forward_on_embeddings(model, embeds).probs[target];
        const double f_baseline =
            forward_on_embeddings(
                model, std::vector<std::vector<double>>(
                           sentence.word_count(),
                           std::vector<double>(model.embed_dim, 0.0)))
                .probs[target];

        const auto fine =
            integrated_gradients(model, sentence, target, IgConfig{256, true});
        const double residual_fine = std::fabs(total(fine) - (f_input - f_baseline));
        CHECK(residual_fine <= 1e-3);

        const auto coarse =
            integrated_gradients(model, sentence, target, IgConfig{16, true});
        const double residual_coarse =
            std::fabs(total(coarse) - (f_input - f_baseline));
        CHECK(residual_fine <= residual_coarse + 1e-12);
    }
}

TEST_CASE("quadrature residual shrinks as steps double") {
    const auto model = trained_model(11);
    const auto sentence = tokenize("check the weather an alarm");
    const std::size_t target = 2;
    const auto embeds = embeddings_for(model, sentence);
    const double f_input = forward_on_embeddings(model, embeds).probs[target];
    const double f_baseline =
        forward_on_embeddings(model,
                              std::vector<std::vector<double>>(
                                  sentence.word_count(),
                                  std::vector<double>(model.embed_dim, 0.0)))
            .probs[target];

    double previous = 1e9;
    for (std::size_t steps : {16, 32, 64, 128, 256}) {
        const auto scores =
            integrated_gradients(model, sentence, target, IgConfig{steps, true});
        const double residual = std::fabs(total(scores) - (f_input - f_baseline));
        CHECK(residual <= previous + 1e-12);
        previous = residual;
    }
}

TEST_CASE("attribution ignores permutations of non-target classes") {
    auto model = fixture_model(17);
    const auto sentence = tokenize("ring the alarm");
    const std::size_t target = 1;
    const auto base = integrated_gradients(model, sentence, target, IgConfig{32, true});

    // Swap classes 0 and 2 in the output layer.
    for (std::size_t k = 0; k < model.hidden_dim; ++k) {
        std::swap(model.output_weights(0, k), model.output_weights(2, k));
    }
    std::swap(model.output_bias[0], model.output_bias[2]);
    const auto permuted =
        integrated_gradients(model, sentence, target, IgConfig{32, true});
    for (std::size_t i = 0; i < base.size(); ++i) {
        CHECK(permuted[i] == doctest::Approx(base[i]).epsilon(1e-12));
    }
}

TEST_CASE("tokens_to_words sums token scores into their words") {
    CHECK(tokens_to_words({0.1, 0.2, 0.3}, {0, 1, 2}, 3) ==
          std::vector<double>{0.1, 0.2, 0.3});
    CHECK(tokens_to_words({0.2, 0.3}, {0, 0}, 1) == std::vector<double>{0.5});
    CHECK(tokens_to_words({0.7}, {1}, 3) == std::vector<double>{0.0, 0.7, 0.0});
}

TEST_CASE("tokens_to_words preserves total mass") {
    Rng rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        const auto tokens = static_cast<std::size_t>(rng.uniform_int(1, 12));
        const auto words = static_cast<std::size_t>(rng.uniform_int(1, 6));
        std::vector<double> scores;
        std::vector<std::size_t> alignment;
        for (std::size_t t = 0; t < tokens; ++t) {
            scores.push_back(rng.uniform(-1.0, 1.0));
            alignment.push_back(rng.below(words));
        }
        const auto word_scores = tokens_to_words(scores, alignment, words);
        CHECK(total(word_scores) == doctest::Approx(total(scores)).epsilon(1e-12));
    }
}

TEST_CASE("tokens_to_words rejects tokens outside the word range") {
    CHECK_THROWS_AS(tokens_to_words({0.5}, {3}, 2), AlignmentError);
    CHECK_THROWS_AS(tokens_to_words({0.5, 0.5}, {0}, 2), InvalidInputError);
}

TEST_CASE("self_attribution takes magnitudes then normalizes") {
    const auto model = trained_model(29);
    const auto sentence = tokenize("set the alarm");
    const auto raw = integrated_gradients(model, sentence, 1, IgConfig{});
    const auto self = self_attribution(model, sentence, 1, IgConfig{});

    REQUIRE(self.scores.size() == raw.size());
    CHECK(self.method == AttributionMethod::self);
    CHECK(self.normalized);
    double lo = std::fabs(raw[0]), hi = std::fabs(raw[0]);
    for (double r : raw) {
        lo = std::min(lo, std::fabs(r));
        hi = std::max(hi, std::fabs(r));
    }
    for (std::size_t i = 0; i < raw.size(); ++i) {
        CHECK(self.scores[i] >= 0.0);
        CHECK(self.scores[i] <= 1.0);
        if (hi > lo) {
            CHECK(self.scores[i] ==
                  doctest::Approx((std::fabs(raw[i]) - lo) / (hi - lo)).epsilon(1e-12));
        }
    }
}

TEST_CASE("constant raw attribution normalizes to zeros") {
    auto model = fixture_model(31);
    model.embedding = Matrix(model.embedding.rows(), model.embedding.cols());
    const auto self = self_attribution(model, tokenize("set an alarm"), 0, IgConfig{});
    CHECK(self.scores == std::vector<double>{0.0, 0.0, 0.0});
}

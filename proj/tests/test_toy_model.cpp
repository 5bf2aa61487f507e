#include <doctest.h>

#include <cmath>

#include "capkit/rng.hpp"
#include "capkit/toy_model.hpp"
#include "support/test_oracles.hpp"

using namespace capkit;

namespace {

ToyClassifier small_model(std::uint64_t seed = 1, std::size_t dim = 5) {
    const auto vocab = Vocabulary::from_words({"alarm", "an", "check", "set", "the"});
    const LabelSpace classes({"query", "set_alarm", "weather"});
    return init_model(vocab, classes, dim, seed);
}

double sum_of(const std::vector<double>& v) {
    double sum = 0.0;
    for (double x : v) sum += x;
    return sum;
}

}  // namespace

TEST_CASE("init_model is seed-deterministic") {
    const auto a = small_model(7);
    const auto b = small_model(7);
    CHECK(a.embedding.data() == b.embedding.data());
    CHECK(a.hidden_weights.data() == b.hidden_weights.data());
    CHECK(a.hidden_bias == b.hidden_bias);
    CHECK(a.output_weights.data() == b.output_weights.data());
    CHECK(a.output_bias == b.output_bias);

    const auto c = small_model(8);
    CHECK(a.embedding.data() != c.embedding.data());
}

TEST_CASE("init_model draws parameters inside [-0.1, 0.1]") {
    const auto model = small_model(3);
    for (double x : model.embedding.data()) {
        CHECK(x >= -0.1);
        CHECK(x <= 0.1);
    }
}

TEST_CASE("forward produces a probability simplex") {
    const auto model = small_model(2);
    Rng rng(5);
    const std::vector<std::string> pool = {"set", "an", "alarm", "check",
                                           "the", "oov1", "oov2"};
    for (int trial = 0; trial < 20; ++trial) {
        std::string text;
        const auto len = static_cast<std::size_t>(rng.uniform_int(1, 6));
        for (std::size_t i = 0; i < len; ++i) {
            if (!text.empty()) text.push_back(' ');
            text += pool[rng.below(pool.size())];
        }
        const auto probs = forward(model, tokenize(text));
        REQUIRE(probs.size() == 3);
        for (double p : probs) CHECK(p >= 0.0);
        CHECK(sum_of(probs) == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("duplicated words pool to the same point as one") {
    const auto model = small_model(4);
    const auto twice = forward(model, tokenize("alarm alarm"));
    const auto once = forward(model, tokenize("alarm"));
    for (std::size_t i = 0; i < once.size(); ++i) {
        CHECK(twice[i] == doctest::Approx(once[i]).epsilon(1e-12));
    }
}

TEST_CASE("a zero embedding table makes the output input-independent") {
    auto model = small_model(9);
    model.embedding = Matrix(model.embedding.rows(), model.embedding.cols());
    const auto a = forward(model, tokenize("set an alarm"));
    const auto b = forward(model, tokenize("check the weather outside"));
    CHECK(a == b);

    // With the hidden path neutral as well, the class scores collapse to the
    // output biases: uniform exactly when those are equal.
    std::fill(model.hidden_bias.begin(), model.hidden_bias.end(), 0.0);
    std::fill(model.output_bias.begin(), model.output_bias.end(), 0.3);
    const auto uniform = forward(model, tokenize("set an alarm"));
    for (double p : uniform) {
        CHECK(p == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    }
    model.output_bias[0] += 0.5;
    const auto skewed = forward(model, tokenize("set an alarm"));
    CHECK(skewed[0] > skewed[1]);
}

TEST_CASE("embedding-input gradients match central finite differences") {
    const auto model = small_model(13);
    const auto sentence = tokenize("check the alarm");
    const std::size_t target = 1;
    const auto analytic = grad_wrt_embeddings(model, sentence, target);
    auto embeds = embeddings_for(model, sentence);
    const double h = 1e-4;
    for (std::size_t word = 0; word < sentence.word_count(); ++word) {
        for (std::size_t c = 0; c < model.embed_dim; ++c) {
            const double numeric = testsupport::central_difference(
                [&](double x) {
                    auto probe = embeds;
                    probe[word][c] = x;
                    return forward_on_embeddings(model, probe).probs[target];
                },
                embeds[word][c], h);
            CHECK(testsupport::relative_error(analytic[word][c], numeric) <= 1e-4);
        }
    }
}

TEST_CASE("per-word gradients coincide under mean pooling") {
    const auto model = small_model(21);
    const auto grads = grad_wrt_embeddings(model, tokenize("set set alarm"), 0);
    for (std::size_t c = 0; c < model.embed_dim; ++c) {
        CHECK(grads[0][c] == grads[1][c]);
        CHECK(grads[1][c] == grads[2][c]);
    }
}

TEST_CASE("gradients die when output weights are zero") {
    auto model = small_model(2);
    model.output_weights = Matrix(model.output_weights.rows(),
                                  model.output_weights.cols());
    const auto grads = grad_wrt_embeddings(model, tokenize("set an alarm"), 1);
    for (const auto& word : grads) {
        for (double g : word) CHECK(g == 0.0);
    }
}

TEST_CASE("parameter gradients match central finite differences") {
    auto model = small_model(31);
    const auto sentence = tokenize("set an alarm");
    const std::string gold = "set_alarm";
    const auto analytic = train_step_gradients(model, sentence, gold);
    const std::size_t gold_idx = model.classes.index_of(gold);
    const double h = 1e-4;

    auto loss_with = [&](ToyClassifier& probe) {
        const auto probs = forward(probe, sentence);
        return -std::log(std::max(probs[gold_idx], 1e-12));
    };

    Rng rng(77);
    for (int probe_idx = 0; probe_idx < 50; ++probe_idx) {
        ToyClassifier probe = model;
        const int block = static_cast<int>(rng.below(5));
        double numeric = 0.0, got = 0.0;
        if (block == 0) {
            const std::size_t r = rng.below(probe.embedding.rows());
            const std::size_t c = rng.below(probe.embedding.cols());
            numeric = testsupport::central_difference(
                [&](double x) {
                    probe.embedding(r, c) = x;
                    return loss_with(probe);
                },
                model.embedding(r, c), h);
            got = analytic.embedding(r, c);
        } else if (block == 1) {
            const std::size_t r = rng.below(probe.hidden_weights.rows());
            const std::size_t c = rng.below(probe.hidden_weights.cols());
            numeric = testsupport::central_difference(
                [&](double x) {
                    probe.hidden_weights(r, c) = x;
                    return loss_with(probe);
                },
                model.hidden_weights(r, c), h);
            got = analytic.hidden_weights(r, c);
        } else if (block == 2) {
            const std::size_t k = rng.below(probe.hidden_bias.size());
            numeric = testsupport::central_difference(
                [&](double x) {
                    probe.hidden_bias[k] = x;
                    return loss_with(probe);
                },
                model.hidden_bias[k], h);
            got = analytic.hidden_bias[k];
        } else if (block == 3) {
            const std::size_t r = rng.below(probe.output_weights.rows());
            const std::size_t c = rng.below(probe.output_weights.cols());
            numeric = testsupport::central_difference(
                [&](double x) {
                    probe.output_weights(r, c) = x;
                    return loss_with(probe);
                },
                model.output_weights(r, c), h);
            got = analytic.output_weights(r, c);
        } else {
            const std::size_t k = rng.below(probe.output_bias.size());
            numeric = testsupport::central_difference(
                [&](double x) {
                    probe.output_bias[k] = x;
                    return loss_with(probe);
                },
                model.output_bias[k], h);
            got = analytic.output_bias[k];
        }
        CHECK(testsupport::relative_error(got, numeric) <= 1e-4);
    }
}

TEST_CASE("gradients vanish at a one-hot prediction on gold") {
    auto model = small_model(4);
    model.output_bias[1] = 40.0;  // saturate the softmax at class 1
    const auto grads =
        train_step_gradients(model, tokenize("set an alarm"), "set_alarm");
    for (double g : grads.output_bias) CHECK(std::fabs(g) <= 1e-9);
    for (double g : grads.embedding.data()) CHECK(std::fabs(g) <= 1e-9);
}

TEST_CASE("gradient norms stay finite on random inputs") {
    const auto model = small_model(6);
    const auto grads = train_step_gradients(model, tokenize("oovword another thing"),
                                            "weather");
    double norm = 0.0;
    for (double g : grads.embedding.data()) norm += g * g;
    for (double g : grads.output_bias) norm += g * g;
    CHECK(std::isfinite(norm));
}

TEST_CASE("checkpoints round-trip bit-exactly") {
    const auto model = small_model(123, 7);
    const auto restored = model_from_json(model_to_json(model));
    CHECK(restored.embed_dim == model.embed_dim);
    CHECK(restored.hidden_dim == model.hidden_dim);
    CHECK(restored.classes.names() == model.classes.names());
    CHECK(restored.vocab.known_words() == model.vocab.known_words());
    CHECK(restored.embedding.data() == model.embedding.data());
    CHECK(restored.hidden_weights.data() == model.hidden_weights.data());
    CHECK(restored.hidden_bias == model.hidden_bias);
    CHECK(restored.output_weights.data() == model.output_weights.data());
    CHECK(restored.output_bias == model.output_bias);
}

TEST_CASE("vocabulary maps unknown words to the reserved slot") {
    const auto vocab = Vocabulary::from_words({"b", "a", "a"});
    CHECK(vocab.size() == 3);  // oov + 2 distinct
    CHECK(vocab.index_of("zzz") == 0);
    CHECK(vocab.index_of("a") == 1);
    CHECK(vocab.index_of("b") == 2);
}

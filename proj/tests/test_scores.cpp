#include <doctest.h>

#include <string>
#include <vector>

#include "capkit/logging.hpp"
#include "capkit/rng.hpp"
#include "capkit/scores.hpp"

using namespace capkit;

namespace {

AttributionVector make_vector(std::vector<double> scores, bool normalized = true,
                              std::string id = "s0") {
    AttributionVector v;
    v.sentence_id = std::move(id);
    v.scores = std::move(scores);
    v.normalized = normalized;
    return v;
}

}  // namespace

TEST_CASE("normalize_scores rescales to the unit interval") {
    CHECK(normalize_scores({2, 4, 6}) == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(normalize_scores({-1, 1}) == std::vector<double>{0.0, 1.0});
    CHECK(normalize_scores({5}) == std::vector<double>{0.0});
}

TEST_CASE("normalize_scores maps constant vectors to zeros with a warning") {
    std::vector<std::string> warnings;
    set_warning_handler([&](std::string_view msg) { warnings.emplace_back(msg); });
    CHECK(normalize_scores({3, 3, 3}) == std::vector<double>{0.0, 0.0, 0.0});
    CHECK(warnings.size() == 1);
    set_warning_handler({});
}

TEST_CASE("normalize_scores rejects bad input") {
    CHECK_THROWS_AS(normalize_scores({}), InvalidInputError);
    CHECK_THROWS_AS(normalize_scores({1.0, std::nan("")}), InvalidInputError);
    CHECK_THROWS_AS(normalize_scores({1.0, 1e308 * 10}), InvalidInputError);
}

TEST_CASE("normalize_scores is idempotent") {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> v;
        const auto len = static_cast<std::size_t>(rng.uniform_int(1, 12));
        for (std::size_t i = 0; i < len; ++i) v.push_back(rng.uniform(-5.0, 5.0));
        const auto once = normalize_scores(v);
        CHECK(normalize_scores(once) == once);
    }
}

TEST_CASE("aggregate_priors mean and max") {
    const auto a = make_vector({0, 1, 0.5});
    const auto b = make_vector({1, 0, 0.5});
    const auto mean = aggregate_priors({a, b}, FusionMode::mean);
    CHECK(mean.scores == std::vector<double>{0.5, 0.5, 0.5});
    CHECK(mean.method == AttributionMethod::hybrid);
    CHECK(mean.normalized);

    const auto mx = aggregate_priors({a, b}, FusionMode::max);
    CHECK(mx.scores == std::vector<double>{1.0, 1.0, 0.5});
}

TEST_CASE("aggregate_priors mean of identical vectors is the vector") {
    const auto v = make_vector({0.2, 0.8, 1.0});
    const auto mean = aggregate_priors({v, v, v}, FusionMode::mean);
    for (std::size_t i = 0; i < v.scores.size(); ++i) {
        CHECK(mean.scores[i] == doctest::Approx(v.scores[i]).epsilon(1e-15));
    }
}

TEST_CASE("aggregate_priors validates inputs") {
    const auto a = make_vector({0, 1});
    CHECK_THROWS_AS(aggregate_priors({a}, FusionMode::mean), InvalidInputError);
    CHECK_THROWS_AS(aggregate_priors({a, make_vector({0, 1, 1})}, FusionMode::mean),
                    InvalidInputError);
    CHECK_THROWS_AS(aggregate_priors({a, make_vector({0, 1}, false)}, FusionMode::mean),
                    InvalidInputError);
    CHECK_THROWS_AS(
        aggregate_priors({a, make_vector({0, 1}, true, "other")}, FusionMode::mean),
        InvalidInputError);
}

TEST_CASE("aggregate_priors max dominates mean and ignores input order") {
    Rng rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        const auto len = static_cast<std::size_t>(rng.uniform_int(1, 8));
        std::vector<AttributionVector> priors;
        for (int k = 0; k < 3; ++k) {
            std::vector<double> scores;
            for (std::size_t i = 0; i < len; ++i) scores.push_back(rng.uniform());
            priors.push_back(make_vector(std::move(scores)));
        }
        const auto mean = aggregate_priors(priors, FusionMode::mean);
        const auto mx = aggregate_priors(priors, FusionMode::max);
        for (std::size_t i = 0; i < len; ++i) {
            CHECK(mx.scores[i] >= mean.scores[i]);
        }
        std::vector<AttributionVector> shuffled = {priors[2], priors[0], priors[1]};
        CHECK(aggregate_priors(shuffled, FusionMode::mean).scores == mean.scores);
        CHECK(aggregate_priors(shuffled, FusionMode::max).scores == mx.scores);
    }
}

TEST_CASE("pearson on the stated examples") {
    const std::vector<double> v{1, 2, 3};
    CHECK(pearson(v, v) == doctest::Approx(1.0));
    const std::vector<double> neg{-1, -2, -3};
    CHECK(pearson(v, neg) == doctest::Approx(-1.0));
    CHECK(pearson({1, 2, 3}, {2, 4, 6}) == doctest::Approx(1.0));
}

TEST_CASE("pearson rejects constant and mismatched input") {
    CHECK_THROWS_AS(pearson({1, 1, 1}, {1, 2, 3}), UndefinedCorrelationError);
    CHECK_THROWS_AS(pearson({1, 2, 3}, {2, 2, 2}), UndefinedCorrelationError);
    CHECK_THROWS_AS(pearson({1}, {2}), InvalidInputError);
    CHECK_THROWS_AS(pearson({1, 2}, {1, 2, 3}), InvalidInputError);
}

TEST_CASE("pearson is symmetric and invariant under positive affine maps") {
    Rng rng(23);
    for (int trial = 0; trial < 40; ++trial) {
        const auto len = static_cast<std::size_t>(rng.uniform_int(2, 10));
        std::vector<double> u, v;
        for (std::size_t i = 0; i < len; ++i) {
            u.push_back(rng.uniform(-3.0, 3.0));
            v.push_back(rng.uniform(-3.0, 3.0));
        }
        u[0] += 1.0;  // avoid accidentally constant vectors
        v[0] -= 1.0;
        const double base = pearson(u, v);
        CHECK(pearson(v, u) == doctest::Approx(base).epsilon(1e-12));
        const double scale = rng.uniform(0.1, 4.0);
        const double shift = rng.uniform(-2.0, 2.0);
        std::vector<double> affine = u;
        for (double& x : affine) x = scale * x + shift;
        CHECK(pearson(affine, v) == doctest::Approx(base).epsilon(1e-9));
    }
}

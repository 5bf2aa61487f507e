#include <doctest.h>

#include <cmath>

#include "capkit/cap_solver.hpp"
#include "capkit/lime.hpp"
#include "support/test_oracles.hpp"

using namespace capkit;

namespace {

Oracle scripted_oracle(ScriptedRules rules) {
    OracleConfig config;
    config.backend = OracleBackendKind::scripted;
    return Oracle(std::move(config), std::move(rules));
}

}  // namespace

TEST_CASE("lime_weight on hand values") {
    PerturbationMask all_ones{{1, 1, 1, 1}};
    CHECK(lime_weight(all_ones, 0.25) == doctest::Approx(1.0));

    PerturbationMask half{{1, 1, 0, 0}};
    CHECK(lime_weight(half, 0.25) ==
          doctest::Approx(0.018315638888734180).epsilon(1e-12));
}

TEST_CASE("lime_weight decreases as more words are masked") {
    double previous = 2.0;
    for (std::size_t zeros = 0; zeros <= 6; ++zeros) {
        PerturbationMask mask{std::vector<std::uint8_t>(6, 1)};
        for (std::size_t i = 0; i < zeros; ++i) mask.bits[i] = 0;
        const double w = lime_weight(mask, 0.25);
        CHECK(w > 0.0);
        CHECK(w <= 1.0);
        CHECK(w < previous);
        previous = w;
    }
}

TEST_CASE("lime ranks the word the oracle depends on") {
    ScriptedRules rules;
    rules.default_probability = 0.15;
    rules.rules.push_back({"transfer", "", 0.8});
    auto oracle = scripted_oracle(rules);

    const auto sentence = tokenize("please transfer my money");
    LimeConfig config;
    config.n_samples = 24;
    config.seed = 11;
    const auto result = lime_extract(sentence, "payments", config, oracle);
    REQUIRE(result.scores.size() == 4);
    CHECK(result.method == AttributionMethod::lime);
    for (std::size_t i = 0; i < 4; ++i) {
        if (i == 1) continue;
        CHECK(result.scores[1] > result.scores[i]);
    }

    // Brute-force weighted least squares over the identical plan.
    const auto plan = sample_masks(4, 24, 11);
    std::vector<double> p, w;
    for (const auto& mask : plan.masks) {
        const std::string prompt =
            render_plain(config.prompt, apply_mask(sentence, mask));
        p.push_back(prompt.find("transfer") != std::string::npos ? 0.8 : 0.15);
        w.push_back(lime_weight(mask, config.kernel_width));
    }
    const auto naive = testsupport::naive_weighted_ridge(plan, p, w, config.lambda);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(result.scores[i] == doctest::Approx(naive[i]).epsilon(1e-9));
    }
}

TEST_CASE("constant oracle probability gives equal lime scores") {
    // Single-mask block only: the weighted design is word-symmetric.
    ScriptedRules rules;
    rules.default_probability = 0.4;
    auto oracle = scripted_oracle(rules);
    LimeConfig config;
    config.n_samples = 5;
    config.seed = 2;
    const auto result =
        lime_extract(tokenize("one two three four five"), "x", config, oracle);
    for (std::size_t i = 1; i < result.scores.size(); ++i) {
        CHECK(result.scores[i] == doctest::Approx(result.scores[0]).epsilon(1e-9));
    }
}

TEST_CASE("uniform weights with transformed targets reproduce the class-aware path") {
    ScriptedRules rules;
    rules.default_probability = 0.2;
    rules.rules.push_back({"alarm", "", 0.75});
    auto oracle = scripted_oracle(rules);

    const auto sentence = tokenize("set an alarm for six");
    CapConfig cap_cfg;
    cap_cfg.n = 25;
    cap_cfg.seed = 8;
    cap_cfg.prompt = default_prompt_template(LabelSpace({"set_alarm", "other"}));
    const auto cap_result = cap_extract(sentence, "set_alarm", cap_cfg, oracle);

    // Same mask plan, z-transformed targets, unit weights, through the
    // weighted path.
    const auto plan = sample_masks(sentence.word_count(), cap_cfg.n, cap_cfg.seed);
    std::vector<double> z, unit;
    for (const auto& mask : plan.masks) {
        const std::string prompt =
            render_prompt(cap_cfg.prompt, apply_mask(sentence, mask));
        z.push_back(target_score(oracle.label_probability(prompt, "set_alarm")));
        unit.push_back(1.0);
    }
    const auto weighted = solve_weighted_ridge(plan, z, unit, cap_cfg.lambda);
    REQUIRE(weighted.size() == cap_result.scores.size());
    for (std::size_t i = 0; i < weighted.size(); ++i) {
        CHECK(weighted[i] == doctest::Approx(cap_result.scores[i]).epsilon(1e-12));
    }
}

TEST_CASE("lime and cap agree on the argmax in the single-keyword scenario") {
    ScriptedRules rules;
    rules.default_probability = 0.1;
    rules.rules.push_back({"balance", "", 0.85});
    auto oracle = scripted_oracle(rules);
    const auto sentence = tokenize("check balance today");

    LimeConfig lime_cfg;
    lime_cfg.n_samples = 20;
    lime_cfg.seed = 4;
    const auto lime_result = lime_extract(sentence, "balance_q", lime_cfg, oracle);

    CapConfig cap_cfg;
    cap_cfg.n = 20;
    cap_cfg.seed = 4;
    cap_cfg.prompt = default_prompt_template(LabelSpace({"balance_q", "other"}));
    const auto cap_result = cap_extract(sentence, "balance_q", cap_cfg, oracle);

    auto argmax = [](const std::vector<double>& v) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < v.size(); ++i) {
            if (v[i] > v[best]) best = i;
        }
        return best;
    };
    CHECK(argmax(lime_result.scores) == 1);
    CHECK(argmax(cap_result.scores) == 1);
}

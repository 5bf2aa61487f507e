#include <doctest.h>

#include <set>

#include "capkit/adversarial.hpp"
#include "capkit/logging.hpp"

using namespace capkit;

namespace {

ClassKeywords keywords_of(std::string name, std::vector<std::string> words) {
    ClassKeywords out;
    out.class_name = std::move(name);
    out.keywords = std::move(words);
    out.scores.assign(out.keywords.size(), 1.0);
    return out;
}

LabeledExample example_of(std::string id, std::string text, std::string label) {
    return {std::move(id), std::move(text), std::move(label), Provenance::original, {}};
}

bool is_subsequence(const std::vector<std::string>& needle,
                    const std::vector<std::string>& haystack) {
    std::size_t i = 0;
    for (const auto& word : haystack) {
        if (i < needle.size() && word == needle[i]) ++i;
    }
    return i == needle.size();
}

Oracle scripted_oracle(ScriptedRules rules) {
    OracleConfig config;
    config.backend = OracleBackendKind::scripted;
    return Oracle(std::move(config), std::move(rules));
}

}  // namespace

TEST_CASE("class_keywords ranks by mean score") {
    const ScoredSentence sentence{{"alarm", "an"}, {0.9, 0.1}};
    const auto top1 = class_keywords("set_alarm", {sentence}, 1);
    CHECK(top1.keywords == std::vector<std::string>{"alarm"});

    const ScoredSentence first{{"pay", "bill"}, {0.4, 0.2}};
    const ScoredSentence second{{"pay", "now"}, {0.6, 0.1}};
    const auto mean = class_keywords("billing", {first, second}, 3);
    REQUIRE(mean.keywords.size() == 3);
    CHECK(mean.keywords[0] == "pay");
    CHECK(mean.scores[0] == doctest::Approx(0.5));

    // K beyond the vocabulary returns the full ranked list without padding.
    const auto all = class_keywords("billing", {first}, 10);
    CHECK(all.keywords.size() == 2);

    // Equal means break toward lexicographic order.
    const ScoredSentence tied{{"zeta", "alpha"}, {0.5, 0.5}};
    const auto lex = class_keywords("c", {tied}, 2);
    CHECK(lex.keywords == std::vector<std::string>{"alpha", "zeta"});

    // Scores arrive non-increasing.
    for (std::size_t i = 1; i < mean.scores.size(); ++i) {
        CHECK(mean.scores[i] <= mean.scores[i - 1]);
    }
}

TEST_CASE("target selection draws from the highest-overlap pool") {
    OverlapMatrix overlap;
    overlap.class_names = {"a", "b", "c"};
    overlap.values = Matrix::identity(3);
    overlap.values(0, 1) = overlap.values(1, 0) = 0.9;
    overlap.values(0, 2) = overlap.values(2, 0) = 0.1;
    overlap.values(1, 2) = overlap.values(2, 1) = 0.5;

    const auto plan = select_adversarial_targets(overlap, 1, 2, 7);
    for (const auto& [source, targets] : plan.targets) {
        REQUIRE(targets.size() == 1);
        CHECK(targets[0] != source);
    }
    const auto again = select_adversarial_targets(overlap, 1, 2, 7);
    CHECK(plan.targets == again.targets);

    // More targets than available classes: every other class is used.
    const auto all = select_adversarial_targets(overlap, 2, 5, 1);
    for (const auto& [source, targets] : all.targets) {
        CHECK(targets.size() == 2);
        CHECK(std::set<std::string>(targets.begin(), targets.end()).size() == 2);
    }

    CHECK_THROWS_AS(select_adversarial_targets(overlap, 0, 2, 1), InvalidInputError);
    CHECK_THROWS_AS(select_adversarial_targets(overlap, 3, 2, 1), InvalidInputError);
}

TEST_CASE("keyword addition preserves the text as a subsequence and the label") {
    const auto example = example_of("e1", "check my alarm", "set_alarm");
    const auto target = keywords_of("billing", {"transfer", "payment"});
    const auto result =
        gen_addition(example, target, GeneratorBackend::rule_based, 5);
    REQUIRE(result.example.has_value());
    const auto& adv = *result.example;
    CHECK(adv.label == "set_alarm");
    CHECK(adv.provenance == Provenance::adversarial_addition);
    CHECK(adv.source_class == "billing");
    CHECK(adv.text.find("transfer") != std::string::npos);

    const auto original_words = tokenize(example.text).words;
    const auto adv_words = tokenize(adv.text).words;
    CHECK(is_subsequence(original_words, adv_words));
    const std::size_t added = adv_words.size() - original_words.size();
    CHECK(added >= 1);
    CHECK(added <= 2);

    // Deterministic for a fixed seed, varies across seeds.
    const auto same = gen_addition(example, target, GeneratorBackend::rule_based, 5);
    CHECK(same.example->text == adv.text);

    CHECK_THROWS_AS(gen_addition(example, keywords_of("set_alarm", {"x"}),
                                 GeneratorBackend::rule_based, 5),
                    InvalidInputError);
}

TEST_CASE("keyword replacement swaps every source keyword and moves the label") {
    const auto example = example_of("e2", "set an alarm for my alarm", "set_alarm");
    const auto source = keywords_of("set_alarm", {"alarm", "set"});
    const auto target = keywords_of("billing", {"transfer", "payment"});
    const auto result = gen_replacement(example, source, target,
                                        GeneratorBackend::rule_based, 9);
    REQUIRE(result.example.has_value());
    const auto& adv = *result.example;
    CHECK(adv.label == "billing");
    CHECK(adv.provenance == Provenance::adversarial_replacement);
    CHECK(adv.source_class == "set_alarm");
    for (const auto& word : tokenize(adv.text).words) {
        CHECK(word != "alarm");
        CHECK(word != "set");
    }
    bool has_target_keyword = false;
    for (const auto& word : tokenize(adv.text).words) {
        if (word == "transfer" || word == "payment") has_target_keyword = true;
    }
    CHECK(has_target_keyword);
}

TEST_CASE("replacement skips examples without a source keyword") {
    const auto example = example_of("e3", "hello there", "set_alarm");
    const auto source = keywords_of("set_alarm", {"alarm"});
    const auto target = keywords_of("billing", {"transfer"});
    const auto result = gen_replacement(example, source, target,
                                        GeneratorBackend::rule_based, 1);
    CHECK_FALSE(result.example.has_value());
    CHECK(!result.skip_reason.empty());
}

TEST_CASE("replacement skips when every target keyword is also a source keyword") {
    const auto example = example_of("e4", "alarm now", "set_alarm");
    const auto source = keywords_of("set_alarm", {"alarm", "transfer"});
    const auto target = keywords_of("billing", {"transfer"});
    const auto result = gen_replacement(example, source, target,
                                        GeneratorBackend::rule_based, 1);
    CHECK_FALSE(result.example.has_value());
}

TEST_CASE("oracle-backed generation uses the completion and falls back on failure") {
    ScriptedRules rules;
    rules.generations.push_back(
        {"Adversarial class: billing", "check my alarm about the transfer fee"});
    auto oracle = scripted_oracle(rules);

    const auto example = example_of("e5", "check my alarm", "set_alarm");
    const auto target = keywords_of("billing", {"transfer"});
    const auto generated = gen_addition(example, target,
                                        GeneratorBackend::oracle_prompted, 3, &oracle);
    REQUIRE(generated.example.has_value());
    CHECK(generated.example->text == "check my alarm about the transfer fee");
    CHECK(generated.example->label == "set_alarm");

    // No generation rule matches the replacement prompt for class "other":
    // the rule-based path must take over, with a warning.
    std::size_t warnings = 0;
    set_warning_handler([&](std::string_view) { ++warnings; });
    const auto fallback =
        gen_addition(example, keywords_of("other", {"oops"}),
                     GeneratorBackend::oracle_prompted, 3, &oracle);
    set_warning_handler({});
    REQUIRE(fallback.example.has_value());
    CHECK(warnings == 1);
    CHECK(fallback.example->text.find("oops") != std::string::npos);
}

TEST_CASE("generation prompts carry all slot values") {
    const auto example = example_of("e6", "check my alarm", "set_alarm");
    const auto target = keywords_of("billing", {"transfer", "payment"});
    const auto prompt = addition_prompt(example, target, {"pay my bill"});
    CHECK(prompt.find("Original text: check my alarm") != std::string::npos);
    CHECK(prompt.find("Original class: set_alarm") != std::string::npos);
    CHECK(prompt.find("Adversarial class: billing") != std::string::npos);
    CHECK(prompt.find("transfer, payment") != std::string::npos);
    CHECK(prompt.find("pay my bill") != std::string::npos);
    CHECK(prompt.find("Add 1-2 keywords") != std::string::npos);

    const auto rep = replacement_prompt(example, target, {});
    CHECK(rep.find("keyword replacement") != std::string::npos);
    CHECK(rep.find("classified into the new target class") != std::string::npos);
}

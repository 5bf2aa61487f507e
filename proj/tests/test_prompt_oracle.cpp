#include <doctest.h>

#include "capkit/oracle.hpp"
#include "capkit/prompt.hpp"

using namespace capkit;

namespace {

PromptTemplate test_template() {
    PromptTemplate tpl;
    tpl.template_text = "{instructions}\nLabels: {labels}\nText: {text}";
    tpl.instructions = "Classify.";
    tpl.labels = LabelSpace({"a", "b"});
    return tpl;
}

Oracle scripted_oracle(ScriptedRules rules, double floor = 1e-6) {
    OracleConfig config;
    config.backend = OracleBackendKind::scripted;
    config.probability_floor = floor;
    return Oracle(std::move(config), std::move(rules));
}

}  // namespace

TEST_CASE("render_prompt substitutes all placeholders") {
    CHECK(render_prompt(test_template(), "hi") == "Classify.\nLabels: a, b\nText: hi");

    auto tpl = test_template();
    tpl.instructions = "";
    CHECK(render_prompt(tpl, "hi") == "\nLabels: a, b\nText: hi");

    CHECK(render_prompt(test_template(), "x") == render_prompt(test_template(), "x"));
}

TEST_CASE("render_prompt rejects malformed templates") {
    auto tpl = test_template();
    tpl.template_text = "Labels: {labels}\nText: {text}";
    CHECK_THROWS_AS(render_prompt(tpl, "hi"), TemplateError);
    tpl.template_text = "{instructions}{instructions}\n{labels} {text}";
    CHECK_THROWS_AS(render_prompt(tpl, "hi"), TemplateError);
}

TEST_CASE("plain template renders only the text slot") {
    CHECK(render_plain(default_plain_template(), "hello") == "Text: hello\nLabel: ");
    CHECK_THROWS_AS(render_plain(PlainTemplate{"no placeholder"}, "x"), TemplateError);
}

TEST_CASE("label probability multiplies per-token probabilities") {
    ScriptedRules rules;
    rules.default_probability = 0.5;
    auto oracle = scripted_oracle(rules);
    // Two whitespace tokens, 0.5 each.
    CHECK(oracle.label_probability("anything", "two tokens") == doctest::Approx(0.25));
    CHECK(oracle.label_probability("anything", "single") == doctest::Approx(0.5));
}

TEST_CASE("label probability is clamped inside the open unit interval") {
    ScriptedRules rules;
    rules.default_probability = 0.999999999;
    auto oracle = scripted_oracle(rules, 1e-4);
    CHECK(oracle.label_probability("p", "l") == doctest::Approx(1.0 - 1e-4));

    ScriptedRules tiny;
    tiny.default_probability = 0.01;
    auto low = scripted_oracle(tiny, 1e-4);
    // Ten tokens at 0.01 underflow the floor.
    CHECK(low.label_probability("p", "a b c d e f g h i j") == doctest::Approx(1e-4));
}

TEST_CASE("scripted rules match on substring and label") {
    ScriptedRules rules;
    rules.default_probability = 0.1;
    rules.rules.push_back({"alarm", "set_alarm", 0.9});
    rules.rules.push_back({"alarm", "", 0.3});
    auto oracle = scripted_oracle(rules);
    CHECK(oracle.label_probability("please set my alarm", "set_alarm") ==
          doctest::Approx(0.9));
    CHECK(oracle.label_probability("please set my alarm", "other") ==
          doctest::Approx(0.3));
    CHECK(oracle.label_probability("no keyword here", "set_alarm") ==
          doctest::Approx(0.1));
}

TEST_CASE("scripted oracle is deterministic and counts calls") {
    ScriptedRules rules;
    rules.default_probability = 0.42;
    auto oracle = scripted_oracle(rules);
    const double first = oracle.label_probability("p", "l");
    const double second = oracle.label_probability("p", "l");
    CHECK(first == second);
    CHECK(oracle.call_count() == 2);
    CHECK(oracle.backend_request_count() == 2);  // scripted path has no cache
}

TEST_CASE("scripted generation matches by substring or reports incapability") {
    ScriptedRules rules;
    rules.generations.push_back({"Adversarial class: billing", "pay my bill now"});
    auto oracle = scripted_oracle(rules);
    CHECK(oracle.generate("... Adversarial class: billing ...") == "pay my bill now");
    CHECK_THROWS_AS(oracle.generate("unmatched"), CapabilityError);
}

TEST_CASE("oracle config validation") {
    OracleConfig config;
    config.backend = OracleBackendKind::scripted;
    config.probability_floor = 0.5;
    CHECK_THROWS_AS(Oracle(config, ScriptedRules{}), InvalidInputError);
    config.probability_floor = 1e-6;
    config.max_in_flight = 0;
    CHECK_THROWS_AS(Oracle(config, ScriptedRules{}), InvalidInputError);
    OracleConfig remote;
    remote.backend = OracleBackendKind::remote;
    CHECK_THROWS_AS(Oracle{remote}, InvalidInputError);  // endpoint missing
}

TEST_CASE("scripted probabilities must lie strictly inside (0, 1)") {
    ScriptedRules rules;
    rules.rules.push_back({"x", "", 1.0});
    CHECK_THROWS_AS(scripted_oracle(rules), InvalidInputError);
}

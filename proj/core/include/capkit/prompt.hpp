#pragma once
// Prompt templating for the label-probability oracle. The class-aware
// template carries task instructions and the full label space; the plain
// template carries only the text and exists for perturbation baselines that
// deliberately omit label enrichment.

#include <string>

#include "capkit/types.hpp"

namespace capkit {

struct PromptTemplate {
    // Must contain each of {instructions}, {labels}, {text} exactly once.
    std::string template_text;
    std::string instructions;
    LabelSpace labels;

    // Throws TemplateError if a placeholder is missing or repeated.
    void validate() const;
};

// Default shipped template; the instruction wording is configurable.
PromptTemplate default_prompt_template(LabelSpace labels);

// Substitutes all placeholders; the label space renders as a comma-separated
// list in declared order. Throws TemplateError on unresolved placeholders.
std::string render_prompt(const PromptTemplate& tpl, const std::string& masked_text);

// A template with only a {text} placeholder (exactly once).
struct PlainTemplate {
    std::string template_text;

    void validate() const;
};

PlainTemplate default_plain_template();

std::string render_plain(const PlainTemplate& tpl, const std::string& masked_text);

}  // namespace capkit

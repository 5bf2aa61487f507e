#include "capkit/prompt.hpp"

#include <cstddef>

#include "capkit/error.hpp"

namespace capkit {

namespace {

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
    std::size_t count = 0;
    std::size_t pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        ++count;
        pos += needle.size();
    }
    return count;
}

void require_exactly_once(const std::string& text, const std::string& placeholder) {
    const std::size_t n = count_occurrences(text, placeholder);
    if (n != 1) {
        throw TemplateError("template must contain " + placeholder +
                            " exactly once, found " + std::to_string(n));
    }
}

std::string replace_once(std::string text, const std::string& placeholder,
                         const std::string& value) {
    const std::size_t pos = text.find(placeholder);
    if (pos == std::string::npos) {
        throw TemplateError("unresolved placeholder " + placeholder);
    }
    text.replace(pos, placeholder.size(), value);
    return text;
}

std::string render_label_list(const LabelSpace& labels) {
    std::string out;
    for (const auto& name : labels.names()) {
        if (!out.empty()) out += ", ";
        out += name;
    }
    return out;
}

}  // namespace

void PromptTemplate::validate() const {
    require_exactly_once(template_text, "{instructions}");
    require_exactly_once(template_text, "{labels}");
    require_exactly_once(template_text, "{text}");
}

PromptTemplate default_prompt_template(LabelSpace labels) {
    PromptTemplate tpl;
    tpl.template_text = "{instructions}\nLabels: {labels}\nText: {text}\nLabel: ";
    tpl.instructions = "Classify the text into exactly one of the labels.";
    tpl.labels = std::move(labels);
    return tpl;
}

std::string render_prompt(const PromptTemplate& tpl, const std::string& masked_text) {
    tpl.validate();
    std::string out = tpl.template_text;
    out = replace_once(out, "{instructions}", tpl.instructions);
    out = replace_once(out, "{labels}", render_label_list(tpl.labels));
    out = replace_once(out, "{text}", masked_text);
    return out;
}

void PlainTemplate::validate() const {
    require_exactly_once(template_text, "{text}");
}

PlainTemplate default_plain_template() {
    return PlainTemplate{"Text: {text}\nLabel: "};
}

std::string render_plain(const PlainTemplate& tpl, const std::string& masked_text) {
    tpl.validate();
    return replace_once(tpl.template_text, "{text}", masked_text);
}

}  // namespace capkit

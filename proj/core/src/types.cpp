#include "capkit/types.hpp"

#include <algorithm>
#include <cctype>

namespace capkit {

void TokenizedSentence::validate() const {
    if (words.size() != spans.size()) {
        throw InvalidInputError("sentence words/spans size mismatch");
    }
    std::size_t cursor = 0;
    for (std::size_t i = 0; i < words.size(); ++i) {
        const auto& span = spans[i];
        if (span.begin < cursor || span.end <= span.begin || span.end > text.size()) {
            throw InvalidInputError("sentence spans not strictly increasing");
        }
        if (text.substr(span.begin, span.end - span.begin) != words[i]) {
            throw InvalidInputError("sentence span does not slice to its word");
        }
        cursor = span.end;
    }
}

TokenizedSentence tokenize(const std::string& text) {
    TokenizedSentence sentence;
    sentence.text.reserve(text.size());
    for (char c : text) {
        sentence.text.push_back(
            static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    const std::string& lowered = sentence.text;
    std::size_t i = 0;
    while (i < lowered.size()) {
        if (std::isspace(static_cast<unsigned char>(lowered[i]))) {
            ++i;
            continue;
        }
        std::size_t begin = i;
        while (i < lowered.size() &&
               !std::isspace(static_cast<unsigned char>(lowered[i]))) {
            ++i;
        }
        sentence.words.push_back(lowered.substr(begin, i - begin));
        sentence.spans.push_back({begin, i});
    }
    return sentence;
}

std::string to_string(AttributionMethod method) {
    switch (method) {
        case AttributionMethod::cap: return "cap";
        case AttributionMethod::lime: return "lime";
        case AttributionMethod::ig: return "ig";
        case AttributionMethod::hybrid: return "hybrid";
        case AttributionMethod::self: return "self";
    }
    throw InvalidInputError("unknown attribution method");
}

AttributionMethod attribution_method_from_string(const std::string& name) {
    if (name == "cap") return AttributionMethod::cap;
    if (name == "lime") return AttributionMethod::lime;
    if (name == "ig") return AttributionMethod::ig;
    if (name == "hybrid") return AttributionMethod::hybrid;
    if (name == "self") return AttributionMethod::self;
    throw InvalidInputError("unknown attribution method: " + name);
}

std::string to_string(Provenance provenance) {
    switch (provenance) {
        case Provenance::original: return "original";
        case Provenance::adversarial_addition: return "adversarial_addition";
        case Provenance::adversarial_replacement: return "adversarial_replacement";
    }
    throw InvalidInputError("unknown provenance");
}

Provenance provenance_from_string(const std::string& name) {
    if (name == "original") return Provenance::original;
    if (name == "adversarial_addition") return Provenance::adversarial_addition;
    if (name == "adversarial_replacement") return Provenance::adversarial_replacement;
    throw InvalidInputError("unknown provenance: " + name);
}

LabelSpace::LabelSpace(std::vector<std::string> names) : names_(std::move(names)) {
    for (std::size_t i = 0; i < names_.size(); ++i) {
        for (std::size_t j = i + 1; j < names_.size(); ++j) {
            if (names_[i] == names_[j]) {
                throw InvalidInputError("duplicate class name: " + names_[i]);
            }
        }
    }
}

bool LabelSpace::contains(const std::string& name) const {
    return std::find(names_.begin(), names_.end(), name) != names_.end();
}

std::size_t LabelSpace::index_of(const std::string& name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) {
        throw InvalidInputError("label not in label space: " + name);
    }
    return static_cast<std::size_t>(it - names_.begin());
}

const std::string& LabelSpace::name_of(std::size_t index) const {
    if (index >= names_.size()) {
        throw InvalidInputError("class index out of range");
    }
    return names_[index];
}

}  // namespace capkit

#pragma once
// Domain types shared by every module. An AttributionVector is the central
// currency: per-word scores over a TokenizedSentence, tagged with the method
// that produced them and whether they have been min-max normalized.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "capkit/error.hpp"

namespace capkit {

// Half-open character range [begin, end) into a sentence's text.
struct WordSpan {
    std::size_t begin = 0;
    std::size_t end = 0;
};

// Ordered word list with the text it was split from. Spans are
// non-overlapping, strictly increasing, and each slices text to its word.
struct TokenizedSentence {
    std::string text;
    std::vector<std::string> words;
    std::vector<WordSpan> spans;

    std::size_t word_count() const { return words.size(); }

    // Throws InvalidInputError if the span/word invariants are violated.
    void validate() const;
};

// Splits on ASCII whitespace after lowercasing. The stored text is the
// lowercased input so that spans slice exactly to their words.
TokenizedSentence tokenize(const std::string& text);

enum class AttributionMethod { cap, lime, ig, hybrid, self };

std::string to_string(AttributionMethod method);
AttributionMethod attribution_method_from_string(const std::string& name);

struct AttributionVector {
    std::string sentence_id;
    std::vector<double> scores;  // one per word
    AttributionMethod method = AttributionMethod::cap;
    bool normalized = false;
};

enum class Provenance { original, adversarial_addition, adversarial_replacement };

std::string to_string(Provenance provenance);
Provenance provenance_from_string(const std::string& name);

struct LabeledExample {
    std::string id;
    std::string text;
    std::string label;
    Provenance provenance = Provenance::original;
    // For adversarial examples, the other class involved in the attack:
    // the keyword donor for additions, the original class for replacements.
    std::optional<std::string> source_class;
};

// Ordered list of distinct class names; index <-> name is bijective.
class LabelSpace {
public:
    LabelSpace() = default;
    explicit LabelSpace(std::vector<std::string> names);

    const std::vector<std::string>& names() const { return names_; }
    std::size_t size() const { return names_.size(); }
    bool contains(const std::string& name) const;

    // Throws InvalidInputError for unknown names.
    std::size_t index_of(const std::string& name) const;
    const std::string& name_of(std::size_t index) const;

private:
    std::vector<std::string> names_;
};

}  // namespace capkit

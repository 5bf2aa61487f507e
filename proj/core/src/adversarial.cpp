#include "capkit/adversarial.hpp"

#include <algorithm>
#include <set>

#include "capkit/logging.hpp"
#include "capkit/rng.hpp"

namespace capkit {

namespace {

std::string join_words(const std::vector<std::string>& words) {
    std::string out;
    for (const auto& word : words) {
        if (!out.empty()) out.push_back(' ');
        out += word;
    }
    return out;
}

std::string render_keyword_list(const ClassKeywords& keywords) {
    std::string out;
    for (const auto& word : keywords.keywords) {
        if (!out.empty()) out += ", ";
        out += word;
    }
    return out;
}

std::string render_example_list(const std::vector<std::string>& sentences) {
    std::string out;
    for (const auto& sentence : sentences) {
        if (!out.empty()) out += " | ";
        out += sentence;
    }
    return out;
}

LabeledExample rule_based_addition(const LabeledExample& example,
                                   const ClassKeywords& target, std::uint64_t seed) {
    Rng rng(seed);
    const auto sentence = tokenize(example.text);
    const std::size_t count = std::min<std::size_t>(
        target.size(), static_cast<std::size_t>(rng.uniform_int(1, 2)));
    const auto boundary = static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(sentence.word_count())));

    std::vector<std::string> words;
    words.reserve(sentence.word_count() + count);
    words.insert(words.end(), sentence.words.begin(),
                 sentence.words.begin() + static_cast<std::ptrdiff_t>(boundary));
    for (std::size_t i = 0; i < count; ++i) {
        words.push_back(target.keywords[i]);
    }
    words.insert(words.end(),
                 sentence.words.begin() + static_cast<std::ptrdiff_t>(boundary),
                 sentence.words.end());

    LabeledExample out;
    out.id = example.id + ":add:" + target.class_name;
    out.text = join_words(words);
    out.label = example.label;  // the true label remains unchanged
    out.provenance = Provenance::adversarial_addition;
    out.source_class = target.class_name;
    return out;
}

}  // namespace

ClassKeywords class_keywords(const std::string& class_name,
                             const std::vector<ScoredSentence>& priors, std::size_t k) {
    if (priors.empty() || k < 1) {
        throw InvalidInputError("class_keywords: need >= 1 prior and K >= 1");
    }
    std::map<std::string, std::pair<double, std::size_t>> sums;  // word -> (sum, count)
    for (const auto& prior : priors) {
        if (prior.words.size() != prior.scores.size()) {
            throw InvalidInputError("class_keywords: words/scores length mismatch");
        }
        for (std::size_t i = 0; i < prior.words.size(); ++i) {
            auto& [sum, count] = sums[prior.words[i]];
            sum += prior.scores[i];
            ++count;
        }
    }
    std::vector<std::pair<std::string, double>> ranked;
    ranked.reserve(sums.size());
    for (const auto& [word, entry] : sums) {
        ranked.emplace_back(word, entry.first / static_cast<double>(entry.second));
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;  // ties toward lexicographic order
    });
    ClassKeywords out;
    out.class_name = class_name;
    for (std::size_t i = 0; i < ranked.size() && i < k; ++i) {
        out.keywords.push_back(ranked[i].first);
        out.scores.push_back(ranked[i].second);
    }
    return out;
}

AttackPlan select_adversarial_targets(const OverlapMatrix& overlap,
                                      std::size_t n_targets, std::size_t pool,
                                      std::uint64_t seed) {
    if (n_targets < 1 || pool < n_targets) {
        throw InvalidInputError(
            "select_adversarial_targets: need n_targets >= 1 and pool >= n_targets");
    }
    const std::size_t n_classes = overlap.class_names.size();
    if (n_classes < 2) {
        throw InvalidInputError("select_adversarial_targets: need >= 2 classes");
    }
    AttackPlan plan;
    plan.n_targets = n_targets;
    plan.seed = seed;
    for (std::size_t source = 0; source < n_classes; ++source) {
        std::vector<std::size_t> others;
        for (std::size_t j = 0; j < n_classes; ++j) {
            if (j != source) others.push_back(j);
        }
        std::stable_sort(others.begin(), others.end(), [&](std::size_t a, std::size_t b) {
            return overlap.at(source, a) > overlap.at(source, b);
        });
        const std::size_t pool_size = std::min(pool, others.size());
        const std::size_t take = std::min(n_targets, pool_size);
        Rng rng(derive_seed(seed, source));
        std::vector<std::string> chosen;
        for (std::size_t pick : rng.sample_without_replacement(pool_size, take)) {
            chosen.push_back(overlap.class_names[others[pick]]);
        }
        plan.targets[overlap.class_names[source]] = std::move(chosen);
    }
    return plan;
}

std::string addition_prompt(const LabeledExample& example, const ClassKeywords& target,
                            const std::vector<std::string>& target_examples) {
    std::string prompt;
    prompt +=
        "Task: Generate a keyword addition adversarial example for the following "
        "text by adding keywords from a adversarial class without changing the "
        "classification result.\n";
    prompt += "Original text: " + example.text + "\n";
    prompt += "Original class: " + example.label + "\n";
    prompt += "Adversarial class: " + target.class_name + "\n";
    prompt += "Adversarial class keywords: " + render_keyword_list(target) + "\n";
    prompt += "Adversarial class example sentences: " +
              render_example_list(target_examples) + "\n";
    prompt += "Requirements:\n";
    prompt += "1. Preserve the original meaning as much as possible\n";
    prompt +=
        "2. Add 1-2 keywords from the source class, but avoid making the intent "
        "overly explicit\n";
    prompt += "3. Ensure the new text is still classified as the target class\n";
    prompt += "4. Ensure the text remains natural and fluent\n";
    prompt += "5. Only return the modified text, nothing else\n";
    prompt += "Adversarial example:";
    return prompt;
}

std::string replacement_prompt(const LabeledExample& example,
                               const ClassKeywords& target,
                               const std::vector<std::string>& target_examples) {
    std::string prompt;
    prompt +=
        "Task: Generate a keyword replacement adversarial example by replacing "
        "original class keywords in the following text with keywords from a "
        "adversarial class.\n";
    prompt += "Original text: " + example.text + "\n";
    prompt += "Original class: " + example.label + "\n";
    prompt += "Adversarial class: " + target.class_name + "\n";
    prompt += "Adversarial class keywords: " + render_keyword_list(target) + "\n";
    prompt += "Adversarial class example sentences: " +
              render_example_list(target_examples) + "\n";
    prompt += "Requirements:\n";
    prompt +=
        "1. Replace target keywords with suitable original-class keywords, and "
        "optionally add new ones\n";
    prompt += "2. Preserve the original sentence structure (e.g., questions, "
              "conjunctions)\n";
    prompt += "3. Ensure the new text remains semantically coherent and realistic\n";
    prompt += "4. Ensure the modified text is classified into the new target class\n";
    prompt += "5. Only return the modified text, nothing else\n";
    prompt += "Adversarial example:";
    return prompt;
}

GenerationResult gen_addition(const LabeledExample& example,
                              const ClassKeywords& target, GeneratorBackend backend,
                              std::uint64_t seed, Oracle* oracle,
                              const std::vector<std::string>& target_examples) {
    if (target.class_name == example.label) {
        throw InvalidInputError("gen_addition: target class equals the example label");
    }
    if (target.size() == 0) {
        throw InvalidInputError("gen_addition: empty target keyword list");
    }
    if (backend == GeneratorBackend::oracle_prompted) {
        if (oracle == nullptr) {
            throw InvalidInputError("gen_addition: oracle_prompted needs an oracle");
        }
        try {
            const std::string text =
                oracle->generate(addition_prompt(example, target, target_examples));
            LabeledExample out;
            out.id = example.id + ":add:" + target.class_name;
            out.text = text;
            out.label = example.label;
            out.provenance = Provenance::adversarial_addition;
            out.source_class = target.class_name;
            return {out, ""};
        } catch (const Error& e) {
            warn(std::string("gen_addition: oracle failed (") + e.what() +
                 "), falling back to rule_based");
        }
    }
    return {rule_based_addition(example, target, seed), ""};
}

GenerationResult gen_replacement(const LabeledExample& example,
                                 const ClassKeywords& source_keywords,
                                 const ClassKeywords& target, GeneratorBackend backend,
                                 std::uint64_t seed, Oracle* oracle,
                                 const std::vector<std::string>& target_examples) {
    if (target.class_name == example.label) {
        throw InvalidInputError("gen_replacement: target class equals the example label");
    }
    if (backend == GeneratorBackend::oracle_prompted) {
        if (oracle == nullptr) {
            throw InvalidInputError("gen_replacement: oracle_prompted needs an oracle");
        }
        try {
            const std::string text =
                oracle->generate(replacement_prompt(example, target, target_examples));
            LabeledExample out;
            out.id = example.id + ":rep:" + target.class_name;
            out.text = text;
            out.label = target.class_name;  // classified into the new target class
            out.provenance = Provenance::adversarial_replacement;
            out.source_class = example.label;
            return {out, ""};
        } catch (const Error& e) {
            warn(std::string("gen_replacement: oracle failed (") + e.what() +
                 "), falling back to rule_based");
        }
    }

    const auto sentence = tokenize(example.text);
    const std::set<std::string> source_set(source_keywords.keywords.begin(),
                                           source_keywords.keywords.end());
    std::vector<std::string> candidates;
    for (const auto& word : target.keywords) {
        if (!source_set.count(word)) candidates.push_back(word);
    }
    if (candidates.empty()) {
        return {std::nullopt, "no target keyword outside the source keyword set"};
    }
    bool replaced_any = false;
    Rng rng(seed);
    std::vector<std::string> words = sentence.words;
    for (auto& word : words) {
        if (!source_set.count(word)) continue;
        word = candidates[rng.below(candidates.size())];
        replaced_any = true;
    }
    if (!replaced_any) {
        return {std::nullopt, "example contains no source-class keyword"};
    }
    LabeledExample out;
    out.id = example.id + ":rep:" + target.class_name;
    out.text = join_words(words);
    out.label = target.class_name;
    out.provenance = Provenance::adversarial_replacement;
    out.source_class = example.label;
    return {out, ""};
}

}  // namespace capkit

#pragma once
// Adversarial test-set construction: keyword addition (inject keywords from
// an adversarial class, label unchanged) and keyword replacement (swap class
// keywords, label moves to the adversarial class). Target classes are drawn
// from the highest-overlap candidates so the attacks concentrate on
// confusable pairs.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "capkit/evaluation.hpp"
#include "capkit/oracle.hpp"
#include "capkit/types.hpp"

namespace capkit {

struct ClassKeywords {
    std::string class_name;
    std::vector<std::string> keywords;  // unique, by non-increasing score
    std::vector<double> scores;

    std::size_t size() const { return keywords.size(); }
};

struct AttackPlan {
    std::map<std::string, std::vector<std::string>> targets;  // source -> targets
    std::size_t n_targets = 1;
    std::uint64_t seed = 0;
};

enum class GeneratorBackend { rule_based, oracle_prompted };

// A prior record paired with the words it scores; class keyword aggregation
// needs both.
struct ScoredSentence {
    std::vector<std::string> words;
    std::vector<double> scores;  // normalized
};

// Per distinct word, the mean normalized score across the class's sentences
// containing it; top-K by that mean, ties toward lexicographic order. K
// larger than the distinct word count returns the full ranked list.
ClassKeywords class_keywords(const std::string& class_name,
                             const std::vector<ScoredSentence>& priors, std::size_t k);

// Per source class: candidate pool = its `pool` highest-overlap other
// classes; n_targets sampled uniformly without replacement, seeded. The pool
// shrinks when fewer classes exist.
AttackPlan select_adversarial_targets(const OverlapMatrix& overlap,
                                      std::size_t n_targets, std::size_t pool,
                                      std::uint64_t seed);

struct GenerationResult {
    std::optional<LabeledExample> example;  // empty = skipped
    std::string skip_reason;                // set when skipped
};

// Keyword addition: insert 1-2 top target-class keywords at a seeded random
// word boundary; the gold label stays unchanged. The oracle-prompted path
// renders the addition prompt and falls back to rule_based with a warning on
// oracle failure.
GenerationResult gen_addition(const LabeledExample& example,
                              const ClassKeywords& target, GeneratorBackend backend,
                              std::uint64_t seed, Oracle* oracle = nullptr,
                              const std::vector<std::string>& target_examples = {});

// Keyword replacement: every source-class keyword occurrence is replaced by
// a seeded choice of target keyword and the gold label moves to the target
// class. Examples without any source keyword produce a skip record on the
// rule_based path.
GenerationResult gen_replacement(const LabeledExample& example,
                                 const ClassKeywords& source_keywords,
                                 const ClassKeywords& target, GeneratorBackend backend,
                                 std::uint64_t seed, Oracle* oracle = nullptr,
                                 const std::vector<std::string>& target_examples = {});

// Prompt builders for the oracle-prompted generation mode.
std::string addition_prompt(const LabeledExample& example, const ClassKeywords& target,
                            const std::vector<std::string>& target_examples);
std::string replacement_prompt(const LabeledExample& example,
                               const ClassKeywords& target,
                               const std::vector<std::string>& target_examples);

}  // namespace capkit

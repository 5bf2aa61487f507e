#pragma once
// Orchestration over the module APIs: batch prior extraction, fusion across
// prior files, adversarial set construction, and model evaluation reports.
// Both the CLI and the acceptance experiments drive the pipeline through
// these calls.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "capkit/adversarial.hpp"
#include "capkit/artifacts.hpp"
#include "capkit/attribution.hpp"
#include "capkit/cap_solver.hpp"
#include "capkit/dataset.hpp"
#include "capkit/lime.hpp"
#include "capkit/scores.hpp"
#include "capkit/toy_model.hpp"

namespace capkit {

// Per-sentence extraction with a seed stream derived from (base seed,
// example index); raw scores, method = cap.
std::vector<PriorRecord> extract_cap_priors(const Dataset& dataset,
                                            const CapConfig& base, Oracle& oracle);

std::vector<PriorRecord> extract_lime_priors(const Dataset& dataset,
                                             const LimeConfig& base, Oracle& oracle);

// Integrated-gradients priors from a trained model (normalized, method = ig).
std::vector<PriorRecord> extract_ig_priors(const Dataset& dataset,
                                           const ToyClassifier& model,
                                           const IgConfig& config);

// Aligns records by id across inputs (words must agree), normalizes any raw
// inputs, and aggregates element-wise. Records present in only some inputs
// are an error.
std::vector<PriorRecord> fuse_priors(const std::vector<std::vector<PriorRecord>>& inputs,
                                     FusionMode mode);

// Normalized attribution vectors keyed by example id, ready for train().
std::map<std::string, AttributionVector> priors_by_id(
    const std::vector<PriorRecord>& records);

struct AdversarialBuildConfig {
    std::size_t keywords_k = 10;
    std::size_t n_targets = 1;
    std::size_t pool = 5;
    std::uint64_t seed = 0;
    GeneratorBackend backend = GeneratorBackend::rule_based;
    bool addition = true;
    bool replacement = true;
};

struct AdversarialBuildResult {
    std::vector<LabeledExample> examples;
    std::vector<std::pair<std::string, std::string>> skips;  // (id, reason)
    std::map<std::string, ClassKeywords> keywords;
    OverlapMatrix overlap;
    AttackPlan plan;
};

// Derives class keyword lists from training priors, quantifies pairwise
// difficulty as keyword overlap, picks adversarial targets, and attacks
// every example of the attack set with the enabled modes.
AdversarialBuildResult build_adversarial(const Dataset& attack_set,
                                         const std::vector<PriorRecord>& train_priors,
                                         const Dataset& train_set,
                                         const AdversarialBuildConfig& config,
                                         Oracle* oracle = nullptr);

struct EvalOptions {
    bool with_accuracy = true;
    bool with_comprehensiveness = true;
    bool with_sufficiency = true;
    double rationale_ratio = 0.2;
    IgConfig ig{/*steps=*/64, /*use_absolute=*/true};
};

// Metrics as a JSON document: overall accuracy plus a per-provenance
// breakdown, and mean comprehensiveness/sufficiency with rationales drawn
// from the model's own attribution at the predicted class.
nlohmann::json evaluate_model(const ToyClassifier& model, const Dataset& dataset,
                              const EvalOptions& options);

// Aligned plain-text rendering of an evaluation document.
std::string render_metrics_table(const nlohmann::json& metrics);

}  // namespace capkit

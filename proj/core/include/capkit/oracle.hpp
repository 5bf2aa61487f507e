#pragma once
// Label-probability oracle over prompted text. Two backends share one
// interface: a remote OpenAI-compatible completions endpoint scored in echo
// mode, and a deterministic scripted backend for offline runs and tests.
// The oracle clamps every probability strictly inside (0, 1) so the
// downstream log transform stays finite.

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <semaphore>
#include <string>
#include <utility>
#include <vector>

#include "capkit/error.hpp"

namespace capkit {

enum class OracleBackendKind { remote, scripted };

struct OracleConfig {
    OracleBackendKind backend = OracleBackendKind::scripted;
    std::string endpoint;    // remote only, e.g. http://host:port/v1
    std::string model_name;
    double probability_floor = 1e-6;  // must lie in (0, 0.5)
    int max_in_flight = 4;
    double timeout_seconds = 30.0;
    int retry_budget = 2;
    std::string cache_path;  // on-disk response cache; empty = in-memory only

    void validate() const;
};

// Environment variable holding the bearer token for the remote backend.
inline constexpr const char* kOracleTokenEnvVar = "CAPKIT_ORACLE_TOKEN";

// First rule whose substring appears in the prompt (and whose label matches,
// empty label = any) wins; otherwise default_probability applies.
struct ScriptedRule {
    std::string contains;
    std::string label;
    double probability = 0.5;
};

// Canned completion for the text-generation mode, matched by substring.
struct ScriptedGeneration {
    std::string contains;
    std::string text;
};

struct ScriptedRules {
    std::vector<ScriptedRule> rules;
    std::vector<ScriptedGeneration> generations;
    double default_probability = 0.5;

    void validate() const;  // all probabilities must lie in (0, 1)
};

class OracleBackend {
public:
    virtual ~OracleBackend() = default;

    // Per-token conditional probabilities of the label as the continuation
    // of the prompt. Throws CapabilityError when the backend cannot report
    // them, OracleUnavailableError on transport failure.
    virtual std::vector<double> token_probabilities(const std::string& prompt,
                                                    const std::string& label) = 0;

    // Free-form completion (adversarial generation mode).
    virtual std::string generate(const std::string& prompt) = 0;
};

class Oracle {
public:
    // Remote backend from config; token read from kOracleTokenEnvVar.
    explicit Oracle(OracleConfig config);

    // Scripted backend; bit-deterministic and lock-free pure.
    Oracle(OracleConfig config, ScriptedRules rules);

    // For tests that need to inject a custom backend.
    Oracle(OracleConfig config, std::unique_ptr<OracleBackend> backend);

    // Probability of the label string as the continuation of the prompt:
    // the raw product of per-token probabilities (no length normalization;
    // the downstream z transform compensates), clamped into
    // [floor, 1 - floor].
    double label_probability(const std::string& prompt, const std::string& label);

    std::string generate(const std::string& prompt);

    const OracleConfig& config() const { return config_; }

    // Number of label_probability invocations (budget accounting).
    std::uint64_t call_count() const;

    // Number of requests that reached the backend (cache misses).
    std::uint64_t backend_request_count() const;

private:
    std::vector<double> cached_token_probabilities(const std::string& prompt,
                                                   const std::string& label);

    OracleConfig config_;
    std::unique_ptr<OracleBackend> backend_;
    bool cache_enabled_ = false;
    std::counting_semaphore<> limiter_;

    mutable std::mutex mutex_;
    std::map<std::pair<std::string, std::string>, std::vector<double>> cache_;
    std::uint64_t calls_ = 0;
    std::uint64_t backend_requests_ = 0;
};

// Stable 64-bit content hash (FNV-1a); names cache records on disk.
std::uint64_t content_hash(const std::string& text);

ScriptedRules scripted_rules_from_json_file(const std::string& path);

}  // namespace capkit

#include "capkit/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "capkit/logging.hpp"

namespace capkit {

namespace {

using nlohmann::json;

struct SemaphoreGuard {
    explicit SemaphoreGuard(std::counting_semaphore<>& sem) : sem_(sem) {
        sem_.acquire();
    }
    ~SemaphoreGuard() { sem_.release(); }
    std::counting_semaphore<>& sem_;
};

std::vector<std::string> whitespace_tokens(const std::string& text) {
    std::vector<std::string> tokens;
    std::istringstream stream(text);
    std::string token;
    while (stream >> token) {
        tokens.push_back(token);
    }
    return tokens;
}

class ScriptedBackend final : public OracleBackend {
public:
    explicit ScriptedBackend(ScriptedRules rules) : rules_(std::move(rules)) {
        rules_.validate();
    }

    std::vector<double> token_probabilities(const std::string& prompt,
                                            const std::string& label) override {
        const auto tokens = whitespace_tokens(label);
        if (tokens.empty()) {
            throw InvalidInputError("scripted oracle: label has no answer tokens");
        }
        double probability = rules_.default_probability;
        for (const auto& rule : rules_.rules) {
            if (!rule.label.empty() && rule.label != label) continue;
            if (prompt.find(rule.contains) == std::string::npos) continue;
            probability = rule.probability;
            break;
        }
        return std::vector<double>(tokens.size(), probability);
    }

    std::string generate(const std::string& prompt) override {
        for (const auto& gen : rules_.generations) {
            if (prompt.find(gen.contains) != std::string::npos) {
                return gen.text;
            }
        }
        throw CapabilityError("scripted oracle: no generation rule matches prompt");
    }

private:
    ScriptedRules rules_;
};

// Splits "http://host:port/prefix" into the client base and the path prefix.
std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
    const auto scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos) {
        throw InvalidInputError("oracle endpoint must carry a scheme: " + endpoint);
    }
    const auto path_start = endpoint.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        return {endpoint, ""};
    }
    std::string prefix = endpoint.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') {
        prefix.pop_back();
    }
    return {endpoint.substr(0, path_start), prefix};
}

class RemoteBackend final : public OracleBackend {
public:
    explicit RemoteBackend(const OracleConfig& config) : config_(config) {
        std::tie(base_url_, path_prefix_) = split_endpoint(config.endpoint);
        if (const char* token = std::getenv(kOracleTokenEnvVar)) {
            bearer_token_ = token;
        }
    }

    std::vector<double> token_probabilities(const std::string& prompt,
                                            const std::string& label) override {
        json request = {
            {"model", config_.model_name},
            {"prompt", prompt + label},
            {"max_tokens", 0},
            {"echo", true},
            {"logprobs", 0},
            {"temperature", 0},
        };
        const json response = post_with_retries("/completions", request);
        return extract_label_probabilities(response, prompt.size());
    }

    std::string generate(const std::string& prompt) override {
        json request = {
            {"model", config_.model_name},
            {"prompt", prompt},
            {"max_tokens", 256},
            {"temperature", 0},
        };
        const json response = post_with_retries("/completions", request);
        if (!response.contains("choices") || response["choices"].empty() ||
            !response["choices"][0].contains("text")) {
            throw CapabilityError("oracle response carries no completion text");
        }
        return response["choices"][0]["text"].get<std::string>();
    }

private:
    json post_with_retries(const std::string& route, const json& request) {
        const std::string body = request.dump();
        std::string last_error;
        for (int attempt = 0; attempt <= config_.retry_budget; ++attempt) {
            httplib::Client client(base_url_);
            const auto timeout_ms =
                static_cast<int>(config_.timeout_seconds * 1000.0);
            client.set_connection_timeout(0, timeout_ms * 1000);
            client.set_read_timeout(timeout_ms / 1000, (timeout_ms % 1000) * 1000);
            httplib::Headers headers;
            if (!bearer_token_.empty()) {
                headers.emplace("Authorization", "Bearer " + bearer_token_);
            }
            auto result = client.Post(path_prefix_ + route, headers, body,
                                      "application/json");
            if (!result) {
                last_error = "transport error: " + httplib::to_string(result.error());
                continue;
            }
            if (result->status == 429 || result->status >= 500) {
                last_error = "server status " + std::to_string(result->status);
                continue;
            }
            if (result->status != 200) {
                throw OracleUnavailableError("oracle rejected request with status " +
                                             std::to_string(result->status));
            }
            try {
                return json::parse(result->body);
            } catch (const json::exception& e) {
                last_error = std::string("malformed response: ") + e.what();
            }
        }
        throw OracleUnavailableError("oracle unreachable after " +
                                     std::to_string(config_.retry_budget + 1) +
                                     " attempts: " + last_error);
    }

    static std::vector<double> extract_label_probabilities(const json& response,
                                                           std::size_t prompt_length) {
        if (!response.contains("choices") || response["choices"].empty()) {
            throw CapabilityError("oracle response carries no choices");
        }
        const json& choice = response["choices"][0];
        if (!choice.contains("logprobs") || choice["logprobs"].is_null()) {
            throw CapabilityError("oracle backend lacks per-token probabilities");
        }
        const json& logprobs = choice["logprobs"];
        if (!logprobs.contains("token_logprobs") || !logprobs.contains("text_offset")) {
            throw CapabilityError("oracle backend lacks per-token probabilities");
        }
        const json& values = logprobs["token_logprobs"];
        const json& offsets = logprobs["text_offset"];
        std::vector<double> probabilities;
        for (std::size_t i = 0; i < values.size() && i < offsets.size(); ++i) {
            if (offsets[i].get<std::size_t>() < prompt_length) continue;
            if (values[i].is_null()) {
                throw CapabilityError(
                    "oracle backend reported a null token log-probability");
            }
            probabilities.push_back(std::exp(values[i].get<double>()));
        }
        if (probabilities.empty()) {
            throw CapabilityError("label tokenizes to no answer tokens under backend");
        }
        return probabilities;
    }

    OracleConfig config_;
    std::string base_url_;
    std::string path_prefix_;
    std::string bearer_token_;
};

}  // namespace

void OracleConfig::validate() const {
    if (!(probability_floor > 0.0 && probability_floor < 0.5)) {
        throw InvalidInputError("probability_floor must lie in (0, 0.5)");
    }
    if (max_in_flight < 1) {
        throw InvalidInputError("max_in_flight must be positive");
    }
    if (retry_budget < 0) {
        throw InvalidInputError("retry_budget must be non-negative");
    }
    if (backend == OracleBackendKind::remote && endpoint.empty()) {
        throw InvalidInputError("remote oracle requires an endpoint");
    }
}

void ScriptedRules::validate() const {
    auto in_open_unit = [](double p) { return p > 0.0 && p < 1.0; };
    if (!in_open_unit(default_probability)) {
        throw InvalidInputError("scripted default probability must lie in (0, 1)");
    }
    for (const auto& rule : rules) {
        if (!in_open_unit(rule.probability)) {
            throw InvalidInputError("scripted rule probability must lie in (0, 1)");
        }
    }
}

Oracle::Oracle(OracleConfig config)
    : config_(std::move(config)), limiter_(0) {
    config_.validate();
    limiter_.release(config_.max_in_flight);
    if (config_.backend != OracleBackendKind::remote) {
        throw InvalidInputError("scripted oracle requires a rule table");
    }
    backend_ = std::make_unique<RemoteBackend>(config_);
    cache_enabled_ = true;
    if (!config_.cache_path.empty()) {
        std::ifstream in(config_.cache_path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const json record = json::parse(line, nullptr, false);
            if (record.is_discarded() || !record.contains("prompt") ||
                !record.contains("label") || !record.contains("probs")) {
                warn("oracle cache: skipping malformed record");
                continue;
            }
            cache_[{record["prompt"].get<std::string>(),
                    record["label"].get<std::string>()}] =
                record["probs"].get<std::vector<double>>();
        }
    }
}

Oracle::Oracle(OracleConfig config, ScriptedRules rules)
    : config_(std::move(config)), limiter_(0) {
    config_.backend = OracleBackendKind::scripted;
    config_.validate();
    limiter_.release(config_.max_in_flight);
    backend_ = std::make_unique<ScriptedBackend>(std::move(rules));
    cache_enabled_ = false;
}

Oracle::Oracle(OracleConfig config, std::unique_ptr<OracleBackend> backend)
    : config_(std::move(config)), backend_(std::move(backend)), limiter_(0) {
    config_.validate();
    limiter_.release(config_.max_in_flight);
    cache_enabled_ = config_.backend == OracleBackendKind::remote;
}

std::vector<double> Oracle::cached_token_probabilities(const std::string& prompt,
                                                       const std::string& label) {
    if (cache_enabled_) {
        std::lock_guard lock(mutex_);
        auto it = cache_.find({prompt, label});
        if (it != cache_.end()) {
            return it->second;
        }
    }

    std::vector<double> probabilities;
    {
        SemaphoreGuard guard(limiter_);
        {
            std::lock_guard lock(mutex_);
            ++backend_requests_;
        }
        probabilities = backend_->token_probabilities(prompt, label);
    }

    if (cache_enabled_) {
        std::lock_guard lock(mutex_);
        cache_[{prompt, label}] = probabilities;
        if (!config_.cache_path.empty()) {
            json record = {
                {"key", content_hash(config_.model_name + '\x1f' + prompt + '\x1f' +
                                     label)},
                {"prompt", prompt},
                {"label", label},
                {"probs", probabilities},
            };
            std::ofstream out(config_.cache_path, std::ios::app);
            out << record.dump() << "\n";
        }
    }
    return probabilities;
}

double Oracle::label_probability(const std::string& prompt, const std::string& label) {
    {
        std::lock_guard lock(mutex_);
        ++calls_;
    }
    const auto probabilities = cached_token_probabilities(prompt, label);
    double product = 1.0;
    for (double p : probabilities) {
        product *= p;
    }
    const double floor = config_.probability_floor;
    return std::clamp(product, floor, 1.0 - floor);
}

std::string Oracle::generate(const std::string& prompt) {
    SemaphoreGuard guard(limiter_);
    return backend_->generate(prompt);
}

std::uint64_t Oracle::call_count() const {
    std::lock_guard lock(mutex_);
    return calls_;
}

std::uint64_t Oracle::backend_request_count() const {
    std::lock_guard lock(mutex_);
    return backend_requests_;
}

std::uint64_t content_hash(const std::string& text) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

ScriptedRules scripted_rules_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidInputError("cannot open scripted oracle rules: " + path);
    }
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw InvalidInputError("malformed scripted oracle rules: " +
                                std::string(e.what()));
    }
    ScriptedRules rules;
    rules.default_probability = doc.value("default_probability", 0.5);
    for (const auto& entry : doc.value("rules", json::array())) {
        ScriptedRule rule;
        rule.contains = entry.at("contains").get<std::string>();
        rule.label = entry.value("label", "");
        rule.probability = entry.at("probability").get<double>();
        rules.rules.push_back(std::move(rule));
    }
    for (const auto& entry : doc.value("generations", json::array())) {
        rules.generations.push_back({entry.at("contains").get<std::string>(),
                                     entry.at("text").get<std::string>()});
    }
    rules.validate();
    return rules;
}

}  // namespace capkit

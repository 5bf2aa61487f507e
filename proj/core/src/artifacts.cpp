#include "capkit/artifacts.hpp"

#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>

namespace capkit {

namespace {

using nlohmann::json;

std::string iso8601_now() {
    std::time_t now = std::time(nullptr);
    char buffer[32];
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buffer;
}

std::ofstream open_for_write(const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw InvalidInputError("cannot write artifact: " + path);
    }
    return out;
}

}  // namespace

std::string format_double(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

double parse_double(const std::string& text) {
    char* end = nullptr;
    const double value = std::strtod(text.c_str(), &end);
    if (end == text.c_str()) {
        throw InvalidInputError("malformed decimal score: " + text);
    }
    return value;
}

json make_meta(const json& run_config, std::uint64_t seed) {
    return json{
        {"run_config", run_config},
        {"seed", seed},
        {"timestamp", iso8601_now()},
        {"tool", "capkit"},
    };
}

void write_priors(const std::string& path, const std::vector<PriorRecord>& records,
                  const json& meta) {
    auto out = open_for_write(path);
    out << json{{"_meta", meta}}.dump() << "\n";
    for (const auto& record : records) {
        json scores = json::array();
        for (double score : record.scores) {
            scores.push_back(format_double(score));
        }
        json line = {
            {"id", record.id},
            {"words", record.words},
            {"scores", scores},
            {"method", to_string(record.method)},
            {"normalized", record.normalized},
        };
        out << line.dump() << "\n";
    }
}

PriorFile read_priors(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidInputError("cannot read priors: " + path);
    }
    PriorFile file;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        const json record = json::parse(line, nullptr, false);
        if (record.is_discarded()) {
            throw InvalidInputError("malformed prior record at " + path + ":" +
                                    std::to_string(line_number));
        }
        if (record.contains("_meta")) {
            file.meta = record["_meta"];
            continue;
        }
        PriorRecord prior;
        prior.id = record.at("id").get<std::string>();
        prior.words = record.at("words").get<std::vector<std::string>>();
        for (const auto& score : record.at("scores")) {
            prior.scores.push_back(parse_double(score.get<std::string>()));
        }
        prior.method = attribution_method_from_string(record.at("method").get<std::string>());
        prior.normalized = record.at("normalized").get<bool>();
        if (prior.words.size() != prior.scores.size()) {
            throw InvalidInputError("prior words/scores misaligned at " + path + ":" +
                                    std::to_string(line_number));
        }
        file.records.push_back(std::move(prior));
    }
    return file;
}

void write_dataset(const std::string& path, const std::vector<LabeledExample>& examples,
                   const json& meta) {
    auto out = open_for_write(path);
    out << json{{"_meta", meta}}.dump() << "\n";
    for (const auto& example : examples) {
        json line = {
            {"id", example.id},
            {"text", example.text},
            {"label", example.label},
            {"provenance", to_string(example.provenance)},
        };
        if (example.source_class) {
            line["source_class"] = *example.source_class;
        }
        out << line.dump() << "\n";
    }
}

void write_skips(const std::string& path,
                 const std::vector<std::pair<std::string, std::string>>& skips,
                 const json& meta) {
    auto out = open_for_write(path);
    out << json{{"_meta", meta}}.dump() << "\n";
    for (const auto& [id, reason] : skips) {
        out << json{{"id", id}, {"reason", reason}}.dump() << "\n";
    }
}

void write_json_document(const std::string& path, const json& document) {
    auto out = open_for_write(path);
    out << document.dump(2) << "\n";
}

json read_json_document(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidInputError("cannot read document: " + path);
    }
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw InvalidInputError("malformed JSON document " + path + ": " + e.what());
    }
    return doc;
}

void write_matrix_csv(const std::string& path, const OverlapMatrix& matrix) {
    auto out = open_for_write(path);
    out << "class";
    for (const auto& name : matrix.class_names) {
        out << "," << name;
    }
    out << "\n";
    for (std::size_t i = 0; i < matrix.class_names.size(); ++i) {
        out << matrix.class_names[i];
        for (std::size_t j = 0; j < matrix.class_names.size(); ++j) {
            out << "," << format_double(matrix.at(i, j));
        }
        out << "\n";
    }
}

void write_misclass_csv(const std::string& path,
                        const std::vector<MisclassRecord>& records) {
    auto out = open_for_write(path);
    out << "gold_class,predicted_class,overlap_level\n";
    for (const auto& record : records) {
        out << record.gold_class << "," << record.predicted_class << ","
            << record.overlap_level << "\n";
    }
}

}  // namespace capkit

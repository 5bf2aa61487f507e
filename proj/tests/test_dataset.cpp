#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "capkit/dataset.hpp"
#include "capkit/evaluation.hpp"
#include "capkit/training.hpp"

using namespace capkit;

namespace {

struct TempFile {
    std::filesystem::path path;
    explicit TempFile(const std::string& contents) {
        path = std::filesystem::temp_directory_path() /
               ("capkit_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++) + ".jsonl");
        std::ofstream out(path);
        out << contents;
    }
    ~TempFile() { std::filesystem::remove(path); }
    static int counter;
};
int TempFile::counter = 0;

}  // namespace

TEST_CASE("ingest sorts the label space and lowercases words") {
    TempFile file(R"({"id": "1", "text": "Set An Alarm", "label": "b"}
{"id": "2", "text": "check weather", "label": "a"}
)");
    const auto dataset = ingest_dataset(file.path.string());
    CHECK(dataset.labels.names() == std::vector<std::string>{"a", "b"});
    REQUIRE(dataset.examples.size() == 2);
    const auto sentence = tokenize(dataset.examples[0].text);
    CHECK(sentence.words == std::vector<std::string>{"set", "an", "alarm"});
}

TEST_CASE("ingest reports schema violations with line numbers") {
    TempFile dup(R"({"id": "1", "text": "a", "label": "x"}
{"id": "1", "text": "b", "label": "x"}
)");
    CHECK_THROWS_WITH_AS(ingest_dataset(dup.path.string()),
                         doctest::Contains(":2"), IngestError);

    TempFile missing(R"({"id": "1", "label": "x"}
)");
    CHECK_THROWS_AS(ingest_dataset(missing.path.string()), IngestError);

    TempFile empty_text(R"({"id": "1", "text": "", "label": "x"}
)");
    CHECK_THROWS_AS(ingest_dataset(empty_text.path.string()), IngestError);

    CHECK_THROWS_AS(ingest_dataset("/nonexistent/file.jsonl"), IngestError);
}

TEST_CASE("ingest skips provenance headers and reads attack metadata") {
    TempFile file(R"({"_meta": {"seed": 3}}
{"id": "1", "text": "pay the bill", "label": "billing", "provenance": "adversarial_replacement", "source_class": "transfers"}
)");
    const auto dataset = ingest_dataset(file.path.string());
    REQUIRE(dataset.examples.size() == 1);
    CHECK(dataset.examples[0].provenance == Provenance::adversarial_replacement);
    CHECK(dataset.examples[0].source_class == "transfers");
}

TEST_CASE("synthetic corpora are deterministic and structurally sound") {
    SyntheticCorpusSpec spec;
    spec.classes = 4;
    spec.confusable_pairs = 2;
    spec.train_per_class = 12;
    spec.val_per_class = 4;
    spec.test_per_class = 6;
    spec.seed = 9;

    const auto a = generate_synthetic(spec);
    const auto b = generate_synthetic(spec);
    REQUIRE(a.train.examples.size() == b.train.examples.size());
    for (std::size_t i = 0; i < a.train.examples.size(); ++i) {
        CHECK(a.train.examples[i].id == b.train.examples[i].id);
        CHECK(a.train.examples[i].text == b.train.examples[i].text);
    }
    CHECK(a.train.examples.size() == 4 * 12);
    CHECK(a.val.examples.size() == 4 * 4);
    CHECK(a.test.examples.size() == 4 * 6);

    // Splits are disjoint by id.
    std::set<std::string> ids;
    for (const auto* split : {&a.train, &a.val, &a.test}) {
        for (const auto& example : split->examples) {
            CHECK(ids.insert(example.id).second);
        }
    }

    // Every sentence carries at least one keyword of its class group.
    for (const auto& example : a.train.examples) {
        const auto& shared = a.shared_keywords.at(example.label);
        const auto sentence = tokenize(example.text);
        bool has_shared = false;
        for (const auto& word : sentence.words) {
            for (const auto& keyword : shared) {
                if (word == keyword) has_shared = true;
            }
        }
        CHECK(has_shared);
    }
    for (const auto& [class_name, keywords] : a.discriminative_keywords) {
        CHECK(!keywords.empty());
    }
}

TEST_CASE("infeasible synthetic specs are rejected") {
    SyntheticCorpusSpec spec;
    spec.classes = 3;
    spec.confusable_pairs = 2;  // 4 pair members > 3 classes
    CHECK_THROWS_AS(generate_synthetic(spec), SpecError);

    SyntheticCorpusSpec tiny;
    tiny.len_min = 2;  // below keyword requirements
    CHECK_THROWS_AS(generate_synthetic(tiny), SpecError);

    SyntheticCorpusSpec no_shared;
    no_shared.shared_per_pair = 0;
    CHECK_THROWS_AS(generate_synthetic(no_shared), SpecError);
}

TEST_CASE("scripted rules from the corpus describe its keyword structure") {
    SyntheticCorpusSpec spec;
    spec.classes = 4;
    spec.confusable_pairs = 2;
    const auto corpus = generate_synthetic(spec);
    const auto rules = synthetic_oracle_rules(corpus);
    CHECK(rules.default_probability < 0.45);
    // Discriminative rules precede shared rules so they win matching.
    bool seen_shared = false;
    for (const auto& rule : rules.rules) {
        const bool is_disc = rule.contains.rfind("kd", 0) == 0;
        if (!is_disc) seen_shared = true;
        if (seen_shared) CHECK_FALSE(is_disc);
    }
}

TEST_CASE("confusable pairs end up more similar after training") {
    SyntheticCorpusSpec spec;
    spec.classes = 4;
    spec.confusable_pairs = 2;
    spec.train_per_class = 25;
    spec.val_per_class = 5;
    spec.test_per_class = 5;
    spec.seed = 31;
    const auto corpus = generate_synthetic(spec);

    std::vector<TokenizedSentence> sentences;
    for (const auto& example : corpus.train.examples) {
        sentences.push_back(tokenize(example.text));
    }
    auto model = init_model(Vocabulary::build(sentences), corpus.train.labels, 16, 1);
    TrainConfig config;
    config.beta = 0.0;
    config.epochs = 20;
    config.seed = 1;
    train(model, corpus.train.examples, {}, {}, config);

    const auto sim = class_similarity(model, corpus.train.examples);
    // Classes are paired (0,1) and (2,3) by construction.
    const double in_pair = (sim.at(0, 1) + sim.at(2, 3)) / 2.0;
    const double cross_pair =
        (sim.at(0, 2) + sim.at(0, 3) + sim.at(1, 2) + sim.at(1, 3)) / 4.0;
    CHECK(in_pair > cross_pair);
}

// capkit: attribution-prior extraction, fusion, explanation-guided training,
// evaluation, diagnostics, and adversarial set construction over JSONL
// datasets. Every artifact embeds the run configuration and seed that
// produced it; commands are deterministic for fixed seeds.

#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "capkit/artifacts.hpp"
#include "capkit/error.hpp"
#include "capkit/pipeline.hpp"
#include "capkit/scores.hpp"
#include "capkit/training.hpp"

using nlohmann::json;

namespace {

// Values resolve as: built-in defaults, then the --config JSON document,
// then explicit flags.
template <typename T>
void merge_config(const CLI::App& cmd, const json& config, const std::string& key,
                  T& value) {
    if (cmd.count("--" + key) == 0 && config.contains(key)) {
        value = config.at(key).get<T>();
    }
}

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    return capkit::read_json_document(path);
}

std::unique_ptr<capkit::Oracle> make_oracle(const std::string& backend,
                                            const std::string& rules_path,
                                            const std::string& endpoint,
                                            const std::string& model_name,
                                            const std::string& cache_path) {
    capkit::OracleConfig config;
    config.cache_path = cache_path;
    if (backend == "scripted") {
        config.backend = capkit::OracleBackendKind::scripted;
        if (rules_path.empty()) {
            throw capkit::InvalidInputError("scripted oracle requires --oracle-rules");
        }
        return std::make_unique<capkit::Oracle>(
            config, capkit::scripted_rules_from_json_file(rules_path));
    }
    if (backend == "remote") {
        config.backend = capkit::OracleBackendKind::remote;
        config.endpoint = endpoint;
        config.model_name = model_name;
        return std::make_unique<capkit::Oracle>(config);
    }
    throw capkit::InvalidInputError("unknown oracle backend: " + backend);
}

std::vector<capkit::TokenizedSentence> tokenize_all(const capkit::Dataset& dataset) {
    std::vector<capkit::TokenizedSentence> sentences;
    sentences.reserve(dataset.examples.size());
    for (const auto& example : dataset.examples) {
        sentences.push_back(capkit::tokenize(example.text));
    }
    return sentences;
}

struct SynthArgs {
    std::string out_dir;
    std::string config_path;
    capkit::SyntheticCorpusSpec spec;
};

void run_synth(const SynthArgs& args) {
    std::filesystem::create_directories(args.out_dir);
    const auto corpus = capkit::generate_synthetic(args.spec);

    const json run_config = {
        {"command", "synth"},
        {"classes", args.spec.classes},
        {"confusable_pairs", args.spec.confusable_pairs},
        {"shared_per_pair", args.spec.shared_per_pair},
        {"disc_per_class", args.spec.disc_per_class},
        {"filler_vocab", args.spec.filler_vocab},
        {"train_per_class", args.spec.train_per_class},
        {"val_per_class", args.spec.val_per_class},
        {"test_per_class", args.spec.test_per_class},
        {"len_min", args.spec.len_min},
        {"len_max", args.spec.len_max},
        {"disc_prob", args.spec.disc_probability},
        {"seed", args.spec.seed},
    };
    const auto meta = capkit::make_meta(run_config, args.spec.seed);
    const auto dir = std::filesystem::path(args.out_dir);
    capkit::write_dataset((dir / "train.jsonl").string(), corpus.train.examples, meta);
    capkit::write_dataset((dir / "val.jsonl").string(), corpus.val.examples, meta);
    capkit::write_dataset((dir / "test.jsonl").string(), corpus.test.examples, meta);

    const auto rules = capkit::synthetic_oracle_rules(corpus);
    json rules_doc;
    rules_doc["meta"] = meta;
    rules_doc["default_probability"] = rules.default_probability;
    rules_doc["rules"] = json::array();
    for (const auto& rule : rules.rules) {
        rules_doc["rules"].push_back({{"contains", rule.contains},
                                      {"label", rule.label},
                                      {"probability", rule.probability}});
    }
    capkit::write_json_document((dir / "oracle_rules.json").string(), rules_doc);
    std::cout << "wrote train/val/test JSONL and oracle_rules.json under "
              << args.out_dir << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"attribution priors and explanation-guided training toolkit"};
    app.require_subcommand(1);

    // synth ------------------------------------------------------------------
    SynthArgs synth;
    auto* synth_cmd =
        app.add_subcommand("synth", "generate a synthetic confusable-class corpus");
    synth_cmd->add_option("--out-dir", synth.out_dir)->required();
    synth_cmd->add_option("--config", synth.config_path);
    synth_cmd->add_option("--classes", synth.spec.classes);
    synth_cmd->add_option("--pairs", synth.spec.confusable_pairs);
    synth_cmd->add_option("--shared", synth.spec.shared_per_pair);
    synth_cmd->add_option("--disc", synth.spec.disc_per_class);
    synth_cmd->add_option("--fillers", synth.spec.filler_vocab);
    synth_cmd->add_option("--train-per-class", synth.spec.train_per_class);
    synth_cmd->add_option("--val-per-class", synth.spec.val_per_class);
    synth_cmd->add_option("--test-per-class", synth.spec.test_per_class);
    synth_cmd->add_option("--len-min", synth.spec.len_min);
    synth_cmd->add_option("--len-max", synth.spec.len_max);
    synth_cmd->add_option("--disc-prob", synth.spec.disc_probability);
    synth_cmd->add_option("--seed", synth.spec.seed);

    // extract-priors ---------------------------------------------------------
    struct {
        std::string dataset, method = "cap", out, config_path;
        std::string oracle = "scripted", oracle_rules, endpoint, model_name, cache;
        std::string model_checkpoint;
        std::size_t n = 100;
        double lambda = 0.1;
        double kernel_width = 0.25;
        std::size_t ig_steps = 64;
        std::uint64_t seed = 0;
    } extract;
    auto* extract_cmd = app.add_subcommand(
        "extract-priors", "extract per-word attribution priors for a dataset");
    extract_cmd->add_option("--dataset", extract.dataset)->required();
    extract_cmd->add_option("--method", extract.method)
        ->check(CLI::IsMember({"cap", "lime", "ig"}));
    extract_cmd->add_option("--out", extract.out)->required();
    extract_cmd->add_option("--config", extract.config_path);
    extract_cmd->add_option("--oracle", extract.oracle)
        ->check(CLI::IsMember({"scripted", "remote"}));
    extract_cmd->add_option("--oracle-rules", extract.oracle_rules);
    extract_cmd->add_option("--endpoint", extract.endpoint);
    extract_cmd->add_option("--model", extract.model_name);
    extract_cmd->add_option("--cache", extract.cache);
    extract_cmd->add_option("--model-checkpoint", extract.model_checkpoint);
    extract_cmd->add_option("--n", extract.n);
    extract_cmd->add_option("--lambda", extract.lambda);
    extract_cmd->add_option("--kernel-width", extract.kernel_width);
    extract_cmd->add_option("--ig-steps", extract.ig_steps);
    extract_cmd->add_option("--seed", extract.seed);

    // fuse ---------------------------------------------------------------
    struct {
        std::vector<std::string> inputs;
        std::string mode = "mean", out, config_path;
    } fuse;
    auto* fuse_cmd =
        app.add_subcommand("fuse", "aggregate prior files into a hybrid prior");
    fuse_cmd->add_option("--inputs", fuse.inputs)->required()->expected(-2);
    fuse_cmd->add_option("--mode", fuse.mode)->check(CLI::IsMember({"mean", "max"}));
    fuse_cmd->add_option("--out", fuse.out)->required();
    fuse_cmd->add_option("--config", fuse.config_path);

    // train --------------------------------------------------------------
    struct {
        std::string train, val, priors, out_model, out_report, config_path;
        double beta = 1.0, lr = 0.5, clip_norm = 1.0;
        std::size_t batch_size = 16, epochs = 50, patience = 10, ig_steps = 8;
        std::size_t embed_dim = 32;
        std::uint64_t seed = 0;
    } train_args;
    auto* train_cmd =
        app.add_subcommand("train", "explanation-guided training of the classifier");
    train_cmd->add_option("--train", train_args.train)->required();
    train_cmd->add_option("--val", train_args.val);
    train_cmd->add_option("--priors", train_args.priors);
    train_cmd->add_option("--out-model", train_args.out_model)->required();
    train_cmd->add_option("--out-report", train_args.out_report);
    train_cmd->add_option("--config", train_args.config_path);
    train_cmd->add_option("--beta", train_args.beta);
    train_cmd->add_option("--lr", train_args.lr);
    train_cmd->add_option("--batch-size", train_args.batch_size);
    train_cmd->add_option("--epochs", train_args.epochs);
    train_cmd->add_option("--clip-norm", train_args.clip_norm);
    train_cmd->add_option("--patience", train_args.patience);
    train_cmd->add_option("--ig-steps", train_args.ig_steps);
    train_cmd->add_option("--embed-dim", train_args.embed_dim);
    train_cmd->add_option("--seed", train_args.seed);

    // evaluate -------------------------------------------------------------
    struct {
        std::string model, dataset, out, metrics = "acc,com,suf", config_path;
        double ratio = 0.2;
        std::size_t ig_steps = 64;
    } eval_args;
    auto* eval_cmd = app.add_subcommand("evaluate", "accuracy and faithfulness metrics");
    eval_cmd->add_option("--model", eval_args.model)->required();
    eval_cmd->add_option("--dataset", eval_args.dataset)->required();
    eval_cmd->add_option("--metrics", eval_args.metrics);
    eval_cmd->add_option("--ratio", eval_args.ratio);
    eval_cmd->add_option("--ig-steps", eval_args.ig_steps);
    eval_cmd->add_option("--out", eval_args.out);
    eval_cmd->add_option("--config", eval_args.config_path);

    // analyze -------------------------------------------------------------
    struct {
        std::string a, b, out;
    } corr_args;
    struct {
        std::string priors, dataset, out;
        std::size_t k = 10;
    } overlap_args;
    struct {
        std::string model, dataset, priors, out;
        std::size_t k = 10, levels = 4;
    } misclass_args;
    struct {
        std::string model, dataset, out;
    } sim_args;
    auto* analyze_cmd = app.add_subcommand("analyze", "diagnostic analyses");
    analyze_cmd->require_subcommand(1);
    auto* corr_cmd = analyze_cmd->add_subcommand(
        "correlation", "Pearson correlation between two prior files");
    corr_cmd->add_option("--a", corr_args.a)->required();
    corr_cmd->add_option("--b", corr_args.b)->required();
    corr_cmd->add_option("--out", corr_args.out);
    auto* overlap_cmd = analyze_cmd->add_subcommand(
        "overlap", "class keyword-overlap matrix from priors");
    overlap_cmd->add_option("--priors", overlap_args.priors)->required();
    overlap_cmd->add_option("--dataset", overlap_args.dataset)->required();
    overlap_cmd->add_option("--k", overlap_args.k);
    overlap_cmd->add_option("--out", overlap_args.out)->required();
    auto* misclass_cmd = analyze_cmd->add_subcommand(
        "misclass", "misclassification counts per overlap level");
    misclass_cmd->add_option("--model", misclass_args.model)->required();
    misclass_cmd->add_option("--dataset", misclass_args.dataset)->required();
    misclass_cmd->add_option("--priors", misclass_args.priors)->required();
    misclass_cmd->add_option("--k", misclass_args.k);
    misclass_cmd->add_option("--levels", misclass_args.levels);
    misclass_cmd->add_option("--out", misclass_args.out)->required();
    auto* sim_cmd = analyze_cmd->add_subcommand(
        "class-sim", "cosine similarity between class embedding means");
    sim_cmd->add_option("--model", sim_args.model)->required();
    sim_cmd->add_option("--dataset", sim_args.dataset)->required();
    sim_cmd->add_option("--out", sim_args.out)->required();

    // gen-adversarial ------------------------------------------------------
    struct {
        std::string dataset, train, priors, out, skips, config_path;
        std::string mode = "both";
        std::string backend = "rule_based";
        std::string oracle_rules, endpoint, model_name, cache;
        std::size_t k = 10, n_targets = 1, pool = 5;
        std::uint64_t seed = 0;
    } adv_args;
    auto* adv_cmd = app.add_subcommand("gen-adversarial",
                                       "construct an adversarial test set");
    adv_cmd->add_option("--dataset", adv_args.dataset)->required();
    adv_cmd->add_option("--train", adv_args.train)->required();
    adv_cmd->add_option("--priors", adv_args.priors)->required();
    adv_cmd->add_option("--out", adv_args.out)->required();
    adv_cmd->add_option("--skips", adv_args.skips);
    adv_cmd->add_option("--mode", adv_args.mode)
        ->check(CLI::IsMember({"addition", "replacement", "both"}));
    adv_cmd->add_option("--backend", adv_args.backend)
        ->check(CLI::IsMember({"rule_based", "oracle_prompted"}));
    adv_cmd->add_option("--oracle-rules", adv_args.oracle_rules);
    adv_cmd->add_option("--endpoint", adv_args.endpoint);
    adv_cmd->add_option("--model", adv_args.model_name);
    adv_cmd->add_option("--cache", adv_args.cache);
    adv_cmd->add_option("--k", adv_args.k);
    adv_cmd->add_option("--n-targets", adv_args.n_targets);
    adv_cmd->add_option("--pool", adv_args.pool);
    adv_cmd->add_option("--seed", adv_args.seed);
    adv_cmd->add_option("--config", adv_args.config_path);

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth_cmd->parsed()) {
            const auto config = load_config(synth.config_path);
            merge_config(*synth_cmd, config, "classes", synth.spec.classes);
            merge_config(*synth_cmd, config, "pairs", synth.spec.confusable_pairs);
            merge_config(*synth_cmd, config, "shared", synth.spec.shared_per_pair);
            merge_config(*synth_cmd, config, "disc", synth.spec.disc_per_class);
            merge_config(*synth_cmd, config, "fillers", synth.spec.filler_vocab);
            merge_config(*synth_cmd, config, "train-per-class",
                         synth.spec.train_per_class);
            merge_config(*synth_cmd, config, "val-per-class", synth.spec.val_per_class);
            merge_config(*synth_cmd, config, "test-per-class",
                         synth.spec.test_per_class);
            merge_config(*synth_cmd, config, "len-min", synth.spec.len_min);
            merge_config(*synth_cmd, config, "len-max", synth.spec.len_max);
            merge_config(*synth_cmd, config, "disc-prob", synth.spec.disc_probability);
            merge_config(*synth_cmd, config, "seed", synth.spec.seed);
            run_synth(synth);
        } else if (extract_cmd->parsed()) {
            const auto config = load_config(extract.config_path);
            merge_config(*extract_cmd, config, "method", extract.method);
            merge_config(*extract_cmd, config, "oracle", extract.oracle);
            merge_config(*extract_cmd, config, "oracle-rules", extract.oracle_rules);
            merge_config(*extract_cmd, config, "endpoint", extract.endpoint);
            merge_config(*extract_cmd, config, "model", extract.model_name);
            merge_config(*extract_cmd, config, "n", extract.n);
            merge_config(*extract_cmd, config, "lambda", extract.lambda);
            merge_config(*extract_cmd, config, "kernel-width", extract.kernel_width);
            merge_config(*extract_cmd, config, "ig-steps", extract.ig_steps);
            merge_config(*extract_cmd, config, "seed", extract.seed);

            const auto dataset = capkit::ingest_dataset(extract.dataset);
            std::vector<capkit::PriorRecord> records;
            if (extract.method == "cap") {
                auto oracle = make_oracle(extract.oracle, extract.oracle_rules,
                                          extract.endpoint, extract.model_name,
                                          extract.cache);
                capkit::CapConfig config_cap;
                config_cap.n = extract.n;
                config_cap.lambda = extract.lambda;
                config_cap.seed = extract.seed;
                config_cap.prompt = capkit::default_prompt_template(dataset.labels);
                records = capkit::extract_cap_priors(dataset, config_cap, *oracle);
            } else if (extract.method == "lime") {
                auto oracle = make_oracle(extract.oracle, extract.oracle_rules,
                                          extract.endpoint, extract.model_name,
                                          extract.cache);
                capkit::LimeConfig config_lime;
                config_lime.n_samples = extract.n;
                config_lime.lambda = extract.lambda;
                config_lime.kernel_width = extract.kernel_width;
                config_lime.seed = extract.seed;
                records = capkit::extract_lime_priors(dataset, config_lime, *oracle);
            } else {
                if (extract.model_checkpoint.empty()) {
                    throw capkit::InvalidInputError(
                        "--method ig requires --model-checkpoint");
                }
                const auto model = capkit::load_model(extract.model_checkpoint);
                records = capkit::extract_ig_priors(
                    dataset, model, capkit::IgConfig{extract.ig_steps, true});
            }
            const json run_config = {
                {"command", "extract-priors"}, {"dataset", extract.dataset},
                {"method", extract.method},    {"oracle", extract.oracle},
                {"n", extract.n},              {"lambda", extract.lambda},
                {"kernel_width", extract.kernel_width},
                {"ig_steps", extract.ig_steps}, {"seed", extract.seed},
            };
            capkit::write_priors(extract.out, records,
                                 capkit::make_meta(run_config, extract.seed));
            std::cout << "wrote " << records.size() << " prior records to "
                      << extract.out << "\n";
        } else if (fuse_cmd->parsed()) {
            const auto config = load_config(fuse.config_path);
            merge_config(*fuse_cmd, config, "mode", fuse.mode);
            std::vector<std::vector<capkit::PriorRecord>> inputs;
            for (const auto& path : fuse.inputs) {
                inputs.push_back(capkit::read_priors(path).records);
            }
            const auto fused =
                capkit::fuse_priors(inputs, capkit::fusion_mode_from_string(fuse.mode));
            const json run_config = {{"command", "fuse"},
                                     {"inputs", fuse.inputs},
                                     {"mode", fuse.mode}};
            capkit::write_priors(fuse.out, fused, capkit::make_meta(run_config, 0));
            std::cout << "wrote " << fused.size() << " hybrid records to " << fuse.out
                      << "\n";
        } else if (train_cmd->parsed()) {
            const auto config = load_config(train_args.config_path);
            merge_config(*train_cmd, config, "beta", train_args.beta);
            merge_config(*train_cmd, config, "lr", train_args.lr);
            merge_config(*train_cmd, config, "batch-size", train_args.batch_size);
            merge_config(*train_cmd, config, "epochs", train_args.epochs);
            merge_config(*train_cmd, config, "clip-norm", train_args.clip_norm);
            merge_config(*train_cmd, config, "patience", train_args.patience);
            merge_config(*train_cmd, config, "ig-steps", train_args.ig_steps);
            merge_config(*train_cmd, config, "embed-dim", train_args.embed_dim);
            merge_config(*train_cmd, config, "seed", train_args.seed);

            const auto train_set = capkit::ingest_dataset(train_args.train);
            capkit::Dataset val_set;
            val_set.labels = train_set.labels;
            if (!train_args.val.empty()) {
                val_set = capkit::ingest_dataset(train_args.val);
            }
            std::map<std::string, capkit::AttributionVector> priors;
            if (!train_args.priors.empty()) {
                priors = capkit::priors_by_id(
                    capkit::read_priors(train_args.priors).records);
            }
            auto model = capkit::init_model(
                capkit::Vocabulary::build(tokenize_all(train_set)), train_set.labels,
                train_args.embed_dim, train_args.seed);
            capkit::TrainConfig config_train;
            config_train.beta = train_args.beta;
            config_train.learning_rate = train_args.lr;
            config_train.batch_size = train_args.batch_size;
            config_train.epochs = train_args.epochs;
            config_train.clip_norm = train_args.clip_norm;
            config_train.early_stop_patience = train_args.patience;
            config_train.ig.steps = train_args.ig_steps;
            config_train.seed = train_args.seed;
            const auto report = capkit::train(model, train_set.examples,
                                              val_set.examples, priors, config_train);

            const json run_config = {
                {"command", "train"},       {"train", train_args.train},
                {"val", train_args.val},    {"priors", train_args.priors},
                {"beta", train_args.beta},  {"lr", train_args.lr},
                {"batch_size", train_args.batch_size},
                {"epochs", train_args.epochs},
                {"clip_norm", train_args.clip_norm},
                {"patience", train_args.patience},
                {"ig_steps", train_args.ig_steps},
                {"embed_dim", train_args.embed_dim},
                {"seed", train_args.seed},
            };
            const auto meta = capkit::make_meta(run_config, train_args.seed);
            json checkpoint = json::parse(capkit::model_to_json(model));
            checkpoint["meta"] = meta;
            capkit::write_json_document(train_args.out_model, checkpoint);
            if (!train_args.out_report.empty()) {
                json report_doc;
                report_doc["meta"] = meta;
                report_doc["seed"] = report.seed;
                report_doc["best_epoch"] = report.best_epoch;
                report_doc["epochs"] = json::array();
                for (const auto& epoch : report.epochs) {
                    json entry = {
                        {"total_loss", epoch.total_loss},
                        {"ce_loss", epoch.ce_loss},
                        {"alignment_loss", epoch.alignment_loss},
                        {"train_accuracy", epoch.train_accuracy},
                    };
                    if (epoch.validation_accuracy) {
                        entry["validation_accuracy"] = *epoch.validation_accuracy;
                    }
                    report_doc["epochs"].push_back(entry);
                }
                capkit::write_json_document(train_args.out_report, report_doc);
            }
            std::cout << "trained " << report.epochs.size()
                      << " epochs; checkpoint at " << train_args.out_model << "\n";
        } else if (eval_cmd->parsed()) {
            const auto config = load_config(eval_args.config_path);
            merge_config(*eval_cmd, config, "metrics", eval_args.metrics);
            merge_config(*eval_cmd, config, "ratio", eval_args.ratio);
            merge_config(*eval_cmd, config, "ig-steps", eval_args.ig_steps);

            const auto model = capkit::load_model(eval_args.model);
            const auto dataset = capkit::ingest_dataset(eval_args.dataset);
            capkit::EvalOptions options;
            options.with_accuracy = eval_args.metrics.find("acc") != std::string::npos;
            options.with_comprehensiveness =
                eval_args.metrics.find("com") != std::string::npos;
            options.with_sufficiency =
                eval_args.metrics.find("suf") != std::string::npos;
            options.rationale_ratio = eval_args.ratio;
            options.ig.steps = eval_args.ig_steps;
            auto metrics = capkit::evaluate_model(model, dataset, options);
            const json run_config = {
                {"command", "evaluate"},        {"model", eval_args.model},
                {"dataset", eval_args.dataset}, {"metrics", eval_args.metrics},
                {"ratio", eval_args.ratio},     {"ig_steps", eval_args.ig_steps},
            };
            json document;
            document["meta"] = capkit::make_meta(run_config, 0);
            document["metrics"] = metrics;
            if (!eval_args.out.empty()) {
                capkit::write_json_document(eval_args.out, document);
            }
            std::cout << capkit::render_metrics_table(metrics);
        } else if (corr_cmd->parsed()) {
            const auto a = capkit::read_priors(corr_args.a);
            const auto b = capkit::read_priors(corr_args.b);
            std::map<std::string, const capkit::PriorRecord*> b_by_id;
            for (const auto& record : b.records) b_by_id[record.id] = &record;
            json per_sentence = json::array();
            double sum = 0.0;
            std::size_t defined = 0;
            for (const auto& record : a.records) {
                auto it = b_by_id.find(record.id);
                if (it == b_by_id.end()) continue;
                json entry = {{"id", record.id}};
                try {
                    const double r =
                        capkit::pearson(record.scores, it->second->scores);
                    entry["pearson"] = r;
                    sum += r;
                    ++defined;
                } catch (const capkit::Error& e) {
                    entry["error"] = e.what();
                }
                per_sentence.push_back(entry);
            }
            if (defined == 0) {
                throw capkit::InvalidInputError(
                    "no sentence pair has a defined correlation");
            }
            json document;
            document["meta"] = capkit::make_meta({{"command", "analyze correlation"},
                                                  {"a", corr_args.a},
                                                  {"b", corr_args.b}},
                                                 0);
            document["mean_pearson"] = sum / static_cast<double>(defined);
            document["defined_pairs"] = defined;
            document["per_sentence"] = per_sentence;
            if (!corr_args.out.empty()) {
                capkit::write_json_document(corr_args.out, document);
            }
            std::cout << "mean pearson over " << defined
                      << " sentences: " << document["mean_pearson"].get<double>()
                      << "\n";
        } else if (overlap_cmd->parsed()) {
            const auto priors = capkit::read_priors(overlap_args.priors);
            const auto dataset = capkit::ingest_dataset(overlap_args.dataset);
            capkit::AdversarialBuildConfig config;
            config.keywords_k = overlap_args.k;
            // Keyword aggregation and overlap only; no attacks generated.
            capkit::Dataset empty_attack;
            empty_attack.labels = dataset.labels;
            const auto result = capkit::build_adversarial(empty_attack, priors.records,
                                                          dataset, config);
            capkit::write_matrix_csv(overlap_args.out, result.overlap);
            std::cout << "wrote overlap matrix for "
                      << result.overlap.class_names.size() << " classes to "
                      << overlap_args.out << "\n";
        } else if (misclass_cmd->parsed()) {
            const auto model = capkit::load_model(misclass_args.model);
            const auto dataset = capkit::ingest_dataset(misclass_args.dataset);
            const auto priors = capkit::read_priors(misclass_args.priors);
            capkit::AdversarialBuildConfig config;
            config.keywords_k = misclass_args.k;
            capkit::Dataset empty_attack;
            empty_attack.labels = dataset.labels;
            const auto built = capkit::build_adversarial(empty_attack, priors.records,
                                                         dataset, config);
            const auto records = capkit::misclass_vs_overlap(
                model, dataset.examples, built.overlap, misclass_args.levels);
            capkit::write_misclass_csv(misclass_args.out, records);
            std::cout << "wrote " << records.size()
                      << " misclassification records to " << misclass_args.out << "\n";
        } else if (sim_cmd->parsed()) {
            const auto model = capkit::load_model(sim_args.model);
            const auto dataset = capkit::ingest_dataset(sim_args.dataset);
            const auto matrix = capkit::class_similarity(model, dataset.examples);
            capkit::write_matrix_csv(sim_args.out, matrix);
            std::cout << "wrote class-similarity matrix to " << sim_args.out << "\n";
        } else if (adv_cmd->parsed()) {
            const auto config = load_config(adv_args.config_path);
            merge_config(*adv_cmd, config, "mode", adv_args.mode);
            merge_config(*adv_cmd, config, "backend", adv_args.backend);
            merge_config(*adv_cmd, config, "k", adv_args.k);
            merge_config(*adv_cmd, config, "n-targets", adv_args.n_targets);
            merge_config(*adv_cmd, config, "pool", adv_args.pool);
            merge_config(*adv_cmd, config, "seed", adv_args.seed);

            const auto attack_set = capkit::ingest_dataset(adv_args.dataset);
            const auto train_set = capkit::ingest_dataset(adv_args.train);
            const auto priors = capkit::read_priors(adv_args.priors);

            capkit::AdversarialBuildConfig build_config;
            build_config.keywords_k = adv_args.k;
            build_config.n_targets = adv_args.n_targets;
            build_config.pool = adv_args.pool;
            build_config.seed = adv_args.seed;
            build_config.addition = adv_args.mode != "replacement";
            build_config.replacement = adv_args.mode != "addition";

            std::unique_ptr<capkit::Oracle> oracle;
            if (adv_args.backend == "oracle_prompted") {
                build_config.backend = capkit::GeneratorBackend::oracle_prompted;
                oracle = make_oracle(
                    adv_args.oracle_rules.empty() ? "remote" : "scripted",
                    adv_args.oracle_rules, adv_args.endpoint, adv_args.model_name,
                    adv_args.cache);
            }
            const auto result = capkit::build_adversarial(
                attack_set, priors.records, train_set, build_config, oracle.get());
            const json run_config = {
                {"command", "gen-adversarial"}, {"dataset", adv_args.dataset},
                {"train", adv_args.train},      {"priors", adv_args.priors},
                {"mode", adv_args.mode},        {"backend", adv_args.backend},
                {"k", adv_args.k},              {"n_targets", adv_args.n_targets},
                {"pool", adv_args.pool},        {"seed", adv_args.seed},
            };
            const auto meta = capkit::make_meta(run_config, adv_args.seed);
            capkit::write_dataset(adv_args.out, result.examples, meta);
            if (!adv_args.skips.empty()) {
                capkit::write_skips(adv_args.skips, result.skips, meta);
            }
            std::cout << "wrote " << result.examples.size()
                      << " adversarial examples (" << result.skips.size()
                      << " skips) to " << adv_args.out << "\n";
        }
    } catch (const std::exception& e) {
        const json error = {
            {"error", {{"type", typeid(e).name()}, {"message", e.what()}}}};
        std::cerr << error.dump() << "\n";
        return 1;
    }
    return 0;
}

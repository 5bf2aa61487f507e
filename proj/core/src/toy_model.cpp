#include "capkit/toy_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

#include "capkit/rng.hpp"

namespace capkit {

namespace {

using nlohmann::json;

constexpr int kCheckpointVersion = 1;

void fill_uniform(Matrix& m, Rng& rng, double lo, double hi) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            m(r, c) = rng.uniform(lo, hi);
        }
    }
}

void fill_uniform(std::vector<double>& v, Rng& rng, double lo, double hi) {
    for (double& x : v) {
        x = rng.uniform(lo, hi);
    }
}

std::vector<double> softmax(const std::vector<double>& logits) {
    const double top = *std::max_element(logits.begin(), logits.end());
    std::vector<double> out(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - top);
        sum += out[i];
    }
    for (double& x : out) {
        x /= sum;
    }
    return out;
}

json matrix_to_json(const Matrix& m) {
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.data()}};
}

Matrix matrix_from_json(const json& j) {
    Matrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
    const auto data = j.at("data").get<std::vector<double>>();
    if (data.size() != m.rows() * m.cols()) {
        throw InvalidInputError("checkpoint matrix shape/data mismatch");
    }
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            m(r, c) = data[r * m.cols() + c];
        }
    }
    return m;
}

}  // namespace

Vocabulary Vocabulary::build(const std::vector<TokenizedSentence>& corpus) {
    std::set<std::string> unique;
    for (const auto& sentence : corpus) {
        unique.insert(sentence.words.begin(), sentence.words.end());
    }
    return from_words({unique.begin(), unique.end()});
}

Vocabulary Vocabulary::from_words(std::vector<std::string> sorted_words) {
    std::sort(sorted_words.begin(), sorted_words.end());
    sorted_words.erase(std::unique(sorted_words.begin(), sorted_words.end()),
                       sorted_words.end());
    Vocabulary vocab;
    vocab.sorted_words_ = std::move(sorted_words);
    for (std::size_t i = 0; i < vocab.sorted_words_.size(); ++i) {
        vocab.index_[vocab.sorted_words_[i]] = i + 1;  // 0 is the OOV slot
    }
    return vocab;
}

std::size_t Vocabulary::index_of(const std::string& word) const {
    auto it = index_.find(word);
    return it == index_.end() ? 0 : it->second;
}

bool Vocabulary::knows(const std::string& word) const {
    return index_.find(word) != index_.end();
}

ToyClassifier init_model(const Vocabulary& vocab, const LabelSpace& classes,
                         std::size_t embed_dim, std::uint64_t seed) {
    if (vocab.size() <= 1 || classes.size() == 0) {
        throw InvalidInputError("init_model: empty vocabulary or label space");
    }
    ToyClassifier model;
    model.vocab = vocab;
    model.classes = classes;
    model.embed_dim = embed_dim;
    model.hidden_dim = embed_dim;
    model.embedding = Matrix(vocab.size(), embed_dim);
    model.hidden_weights = Matrix(model.hidden_dim, embed_dim);
    model.hidden_bias.assign(model.hidden_dim, 0.0);
    model.output_weights = Matrix(classes.size(), model.hidden_dim);
    model.output_bias.assign(classes.size(), 0.0);

    Rng rng(seed);
    fill_uniform(model.embedding, rng, -0.1, 0.1);
    fill_uniform(model.hidden_weights, rng, -0.1, 0.1);
    fill_uniform(model.hidden_bias, rng, -0.1, 0.1);
    fill_uniform(model.output_weights, rng, -0.1, 0.1);
    fill_uniform(model.output_bias, rng, -0.1, 0.1);
    return model;
}

std::vector<std::vector<double>> embeddings_for(const ToyClassifier& model,
                                                const TokenizedSentence& sentence) {
    std::vector<std::vector<double>> embeds;
    embeds.reserve(sentence.word_count());
    for (const auto& word : sentence.words) {
        const std::size_t row = model.vocab.index_of(word);
        std::vector<double> e(model.embed_dim);
        for (std::size_t c = 0; c < model.embed_dim; ++c) {
            e[c] = model.embedding(row, c);
        }
        embeds.push_back(std::move(e));
    }
    return embeds;
}

ForwardTrace forward_from_pooled(const ToyClassifier& model,
                                 const std::vector<double>& pooled) {
    if (pooled.size() != model.embed_dim) {
        throw InvalidInputError("forward_from_pooled: pooled width mismatch");
    }
    ForwardTrace trace;
    trace.pooled = pooled;
    trace.preact.assign(model.hidden_dim, 0.0);
    for (std::size_t k = 0; k < model.hidden_dim; ++k) {
        double sum = model.hidden_bias[k];
        for (std::size_t c = 0; c < model.embed_dim; ++c) {
            sum += model.hidden_weights(k, c) * pooled[c];
        }
        trace.preact[k] = sum;
    }
    trace.hidden.resize(model.hidden_dim);
    for (std::size_t k = 0; k < model.hidden_dim; ++k) {
        trace.hidden[k] = std::tanh(trace.preact[k]);
    }
    trace.logits.assign(model.classes.size(), 0.0);
    for (std::size_t j = 0; j < model.classes.size(); ++j) {
        double sum = model.output_bias[j];
        for (std::size_t k = 0; k < model.hidden_dim; ++k) {
            sum += model.output_weights(j, k) * trace.hidden[k];
        }
        trace.logits[j] = sum;
    }
    trace.probs = softmax(trace.logits);
    return trace;
}

ForwardTrace forward_on_embeddings(const ToyClassifier& model,
                                   const std::vector<std::vector<double>>& embeds) {
    std::vector<double> pooled(model.embed_dim, 0.0);
    if (!embeds.empty()) {
        for (const auto& e : embeds) {
            if (e.size() != model.embed_dim) {
                throw InvalidInputError("forward_on_embeddings: embedding width mismatch");
            }
            for (std::size_t c = 0; c < model.embed_dim; ++c) {
                pooled[c] += e[c];
            }
        }
        const double inv = 1.0 / static_cast<double>(embeds.size());
        for (double& x : pooled) {
            x *= inv;
        }
    }
    return forward_from_pooled(model, pooled);
}

std::vector<double> forward(const ToyClassifier& model,
                            const TokenizedSentence& sentence) {
    if (sentence.word_count() == 0) {
        throw InvalidInputError("forward: empty sentence");
    }
    return forward_on_embeddings(model, embeddings_for(model, sentence)).probs;
}

std::vector<double> grad_probability_wrt_pooled(const ToyClassifier& model,
                                                const ForwardTrace& trace,
                                                std::size_t target) {
    if (target >= model.classes.size()) {
        throw InvalidInputError("grad_probability_wrt_pooled: bad target class");
    }
    const auto& p = trace.probs;
    // q = dp_target/do
    std::vector<double> q(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) {
        q[j] = p[target] * ((j == target ? 1.0 : 0.0) - p[j]);
    }
    // t = W_o^T q
    std::vector<double> t(model.hidden_dim, 0.0);
    for (std::size_t j = 0; j < p.size(); ++j) {
        for (std::size_t k = 0; k < model.hidden_dim; ++k) {
            t[k] += model.output_weights(j, k) * q[j];
        }
    }
    // through tanh
    for (std::size_t k = 0; k < model.hidden_dim; ++k) {
        t[k] *= 1.0 - trace.hidden[k] * trace.hidden[k];
    }
    // s = W_h^T t
    std::vector<double> s(model.embed_dim, 0.0);
    for (std::size_t k = 0; k < model.hidden_dim; ++k) {
        for (std::size_t c = 0; c < model.embed_dim; ++c) {
            s[c] += model.hidden_weights(k, c) * t[k];
        }
    }
    return s;
}

std::vector<std::vector<double>> grad_wrt_embeddings(const ToyClassifier& model,
                                                     const TokenizedSentence& sentence,
                                                     std::size_t target) {
    const auto embeds = embeddings_for(model, sentence);
    const ForwardTrace trace = forward_on_embeddings(model, embeds);
    const auto pooled_grad = grad_probability_wrt_pooled(model, trace, target);
    const double inv = 1.0 / static_cast<double>(sentence.word_count());
    std::vector<double> per_word(model.embed_dim);
    for (std::size_t c = 0; c < model.embed_dim; ++c) {
        per_word[c] = pooled_grad[c] * inv;
    }
    return std::vector<std::vector<double>>(sentence.word_count(), per_word);
}

ModelGradients zero_gradients(const ToyClassifier& model, std::size_t word_count) {
    ModelGradients grads;
    grads.embedding = Matrix(model.embedding.rows(), model.embedding.cols());
    grads.hidden_weights = Matrix(model.hidden_weights.rows(), model.hidden_weights.cols());
    grads.hidden_bias.assign(model.hidden_bias.size(), 0.0);
    grads.output_weights = Matrix(model.output_weights.rows(), model.output_weights.cols());
    grads.output_bias.assign(model.output_bias.size(), 0.0);
    grads.input_embeddings.assign(word_count,
                                  std::vector<double>(model.embed_dim, 0.0));
    return grads;
}

ModelGradients train_step_gradients(const ToyClassifier& model,
                                    const TokenizedSentence& sentence,
                                    const std::string& gold_label) {
    const std::size_t gold = model.classes.index_of(gold_label);
    const auto embeds = embeddings_for(model, sentence);
    const ForwardTrace trace = forward_on_embeddings(model, embeds);
    const std::size_t d = sentence.word_count();

    ModelGradients grads = zero_gradients(model, d);

    // dL/do = p - onehot(gold)
    std::vector<double> obar = trace.probs;
    obar[gold] -= 1.0;

    for (std::size_t j = 0; j < model.classes.size(); ++j) {
        grads.output_bias[j] = obar[j];
        for (std::size_t k = 0; k < model.hidden_dim; ++k) {
            grads.output_weights(j, k) = obar[j] * trace.hidden[k];
        }
    }

    std::vector<double> ubar(model.hidden_dim, 0.0);
    for (std::size_t k = 0; k < model.hidden_dim; ++k) {
        double sum = 0.0;
        for (std::size_t j = 0; j < model.classes.size(); ++j) {
            sum += model.output_weights(j, k) * obar[j];
        }
        ubar[k] = sum * (1.0 - trace.hidden[k] * trace.hidden[k]);
    }

    for (std::size_t k = 0; k < model.hidden_dim; ++k) {
        grads.hidden_bias[k] = ubar[k];
        for (std::size_t c = 0; c < model.embed_dim; ++c) {
            grads.hidden_weights(k, c) = ubar[k] * trace.pooled[c];
        }
    }

    std::vector<double> pooled_bar(model.embed_dim, 0.0);
    for (std::size_t k = 0; k < model.hidden_dim; ++k) {
        for (std::size_t c = 0; c < model.embed_dim; ++c) {
            pooled_bar[c] += model.hidden_weights(k, c) * ubar[k];
        }
    }

    const double inv = 1.0 / static_cast<double>(d);
    for (std::size_t i = 0; i < d; ++i) {
        const std::size_t row = model.vocab.index_of(sentence.words[i]);
        for (std::size_t c = 0; c < model.embed_dim; ++c) {
            const double g = pooled_bar[c] * inv;
            grads.input_embeddings[i][c] = g;
            grads.embedding(row, c) += g;
        }
    }
    return grads;
}

std::string model_to_json(const ToyClassifier& model) {
    json doc;
    doc["format_version"] = kCheckpointVersion;
    doc["embed_dim"] = model.embed_dim;
    doc["hidden_dim"] = model.hidden_dim;
    doc["classes"] = model.classes.names();
    doc["vocab"] = model.vocab.known_words();
    doc["embedding"] = matrix_to_json(model.embedding);
    doc["hidden_weights"] = matrix_to_json(model.hidden_weights);
    doc["hidden_bias"] = model.hidden_bias;
    doc["output_weights"] = matrix_to_json(model.output_weights);
    doc["output_bias"] = model.output_bias;
    return doc.dump(2);
}

ToyClassifier model_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidInputError("malformed checkpoint: " + std::string(e.what()));
    }
    if (doc.value("format_version", -1) != kCheckpointVersion) {
        throw InvalidInputError("unsupported checkpoint format version");
    }
    ToyClassifier model;
    model.embed_dim = doc.at("embed_dim").get<std::size_t>();
    model.hidden_dim = doc.at("hidden_dim").get<std::size_t>();
    model.classes = LabelSpace(doc.at("classes").get<std::vector<std::string>>());
    model.vocab =
        Vocabulary::from_words(doc.at("vocab").get<std::vector<std::string>>());
    model.embedding = matrix_from_json(doc.at("embedding"));
    model.hidden_weights = matrix_from_json(doc.at("hidden_weights"));
    model.hidden_bias = doc.at("hidden_bias").get<std::vector<double>>();
    model.output_weights = matrix_from_json(doc.at("output_weights"));
    model.output_bias = doc.at("output_bias").get<std::vector<double>>();
    if (model.embedding.rows() != model.vocab.size() ||
        model.embedding.cols() != model.embed_dim ||
        model.output_weights.rows() != model.classes.size()) {
        throw InvalidInputError("checkpoint shape metadata inconsistent");
    }
    return model;
}

void save_model(const ToyClassifier& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw InvalidInputError("cannot write checkpoint: " + path);
    }
    out << model_to_json(model) << "\n";
}

ToyClassifier load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidInputError("cannot read checkpoint: " + path);
    }
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return model_from_json(text);
}

}  // namespace capkit

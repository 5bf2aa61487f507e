#include "capkit/training.hpp"

#include <algorithm>
#include <cmath>

#include "capkit/rng.hpp"

namespace capkit {

namespace {

double sign_of(double x) {
    if (x > 0.0) return 1.0;
    if (x < 0.0) return -1.0;
    return 0.0;
}

void add_scaled(Matrix& dst, const Matrix& src, double scale) {
    for (std::size_t r = 0; r < dst.rows(); ++r) {
        for (std::size_t c = 0; c < dst.cols(); ++c) {
            dst(r, c) += scale * src(r, c);
        }
    }
}

void add_scaled(std::vector<double>& dst, const std::vector<double>& src, double scale) {
    for (std::size_t i = 0; i < dst.size(); ++i) {
        dst[i] += scale * src[i];
    }
}

void accumulate(ModelGradients& dst, const ModelGradients& src, double scale) {
    add_scaled(dst.embedding, src.embedding, scale);
    add_scaled(dst.hidden_weights, src.hidden_weights, scale);
    add_scaled(dst.hidden_bias, src.hidden_bias, scale);
    add_scaled(dst.output_weights, src.output_weights, scale);
    add_scaled(dst.output_bias, src.output_bias, scale);
}

double squared_norm(const Matrix& m) {
    double sum = 0.0;
    for (double x : m.data()) sum += x * x;
    return sum;
}

double squared_norm(const std::vector<double>& v) {
    double sum = 0.0;
    for (double x : v) sum += x * x;
    return sum;
}

// Gradient of psi = v^T s(theta), where s is the gradient of the
// target-class probability with respect to the pooled input, evaluated at a
// fixed forward trace. v is treated as a constant. This is the extra
// backward pass that carries the alignment objective through each
// quadrature step of the attribution path.
void accumulate_path_gradient(const ToyClassifier& model, const ForwardTrace& trace,
                              std::size_t target, const std::vector<double>& v,
                              double mu, const std::vector<std::size_t>& word_rows,
                              ModelGradients& grads) {
    const std::size_t hidden = model.hidden_dim;
    const std::size_t classes = model.classes.size();
    const std::size_t dims = model.embed_dim;
    const auto& p = trace.probs;
    const auto& h = trace.hidden;

    // r = W_h v
    std::vector<double> r(hidden, 0.0);
    for (std::size_t k = 0; k < hidden; ++k) {
        for (std::size_t c = 0; c < dims; ++c) {
            r[k] += model.hidden_weights(k, c) * v[c];
        }
    }
    // q = dp_target/do
    std::vector<double> q(classes);
    for (std::size_t j = 0; j < classes; ++j) {
        q[j] = p[target] * ((j == target ? 1.0 : 0.0) - p[j]);
    }
    // t = W_o^T q
    std::vector<double> t(hidden, 0.0);
    for (std::size_t j = 0; j < classes; ++j) {
        for (std::size_t k = 0; k < hidden; ++k) {
            t[k] += model.output_weights(j, k) * q[j];
        }
    }
    std::vector<double> dt(hidden), dr(hidden);
    for (std::size_t k = 0; k < hidden; ++k) {
        const double damp = 1.0 - h[k] * h[k];
        dt[k] = damp * t[k];
        dr[k] = damp * r[k];
    }
    // y = dpsi/dq = W_o (D r)
    std::vector<double> y(classes, 0.0);
    for (std::size_t j = 0; j < classes; ++j) {
        for (std::size_t k = 0; k < hidden; ++k) {
            y[j] += model.output_weights(j, k) * dr[k];
        }
    }
    // obar = dpsi/do through the softmax-derived q
    double s1 = 0.0;
    for (std::size_t j = 0; j < classes; ++j) s1 += y[j] * p[j];
    std::vector<double> obar(classes);
    for (std::size_t m = 0; m < classes; ++m) {
        const double delta_tm = (m == target) ? 1.0 : 0.0;
        obar[m] = p[target] * (y[target] * delta_tm - y[target] * p[m] -
                               delta_tm * s1 - y[m] * p[m] + 2.0 * p[m] * s1);
    }
    // hbar: direct D-path plus the o-path
    std::vector<double> ubar(hidden);
    for (std::size_t k = 0; k < hidden; ++k) {
        double hbar = -2.0 * r[k] * h[k] * t[k];
        for (std::size_t j = 0; j < classes; ++j) {
            hbar += model.output_weights(j, k) * obar[j];
        }
        ubar[k] = hbar * (1.0 - h[k] * h[k]);
    }

    for (std::size_t k = 0; k < hidden; ++k) {
        grads.hidden_bias[k] += ubar[k];
        for (std::size_t c = 0; c < dims; ++c) {
            grads.hidden_weights(k, c) += dt[k] * v[c] + ubar[k] * trace.pooled[c];
        }
    }
    for (std::size_t j = 0; j < classes; ++j) {
        grads.output_bias[j] += obar[j];
        for (std::size_t k = 0; k < hidden; ++k) {
            grads.output_weights(j, k) += q[j] * dr[k] + obar[j] * h[k];
        }
    }
    // gbar = W_h^T ubar; the path point scales each word's embedding by mu/d.
    std::vector<double> gbar(dims, 0.0);
    for (std::size_t k = 0; k < hidden; ++k) {
        for (std::size_t c = 0; c < dims; ++c) {
            gbar[c] += model.hidden_weights(k, c) * ubar[k];
        }
    }
    const double word_scale = mu / static_cast<double>(word_rows.size());
    for (std::size_t row : word_rows) {
        for (std::size_t c = 0; c < dims; ++c) {
            grads.embedding(row, c) += word_scale * gbar[c];
        }
    }
}

double simple_accuracy(const ToyClassifier& model,
                       const std::vector<TokenizedSentence>& sentences,
                       const std::vector<std::size_t>& gold);

}  // namespace

double accumulate_alignment_gradients(const ToyClassifier& model,
                                      const TokenizedSentence& sentence,
                                      std::size_t gold, const AttributionVector& prior,
                                      const IgConfig& ig, double scale,
                                      ModelGradients& grads, double range_floor) {
    const std::size_t d = sentence.word_count();
    const std::size_t steps = std::max<std::size_t>(1, ig.steps);
    const auto embeds = embeddings_for(model, sentence);
    std::vector<std::size_t> rows(d);
    for (std::size_t i = 0; i < d; ++i) {
        rows[i] = model.vocab.index_of(sentence.words[i]);
    }

    std::vector<ForwardTrace> traces;
    traces.reserve(steps);
    std::vector<double> mus(steps);
    std::vector<double> avg_grad(model.embed_dim, 0.0);
    std::vector<std::vector<double>> path_point(
        d, std::vector<double>(model.embed_dim, 0.0));
    for (std::size_t step = 0; step < steps; ++step) {
        mus[step] = (static_cast<double>(step) + 0.5) / static_cast<double>(steps);
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t c = 0; c < model.embed_dim; ++c) {
                path_point[i][c] = mus[step] * embeds[i][c];
            }
        }
        traces.push_back(forward_on_embeddings(model, path_point));
        const auto pooled_grad =
            grad_probability_wrt_pooled(model, traces.back(), gold);
        for (std::size_t c = 0; c < model.embed_dim; ++c) {
            avg_grad[c] += pooled_grad[c];
        }
    }
    const double quad_scale =
        1.0 / (static_cast<double>(steps) * static_cast<double>(d));
    for (double& g : avg_grad) {
        g *= quad_scale;
    }

    std::vector<double> ig_scores(d);
    for (std::size_t i = 0; i < d; ++i) {
        double dot = 0.0;
        for (std::size_t c = 0; c < model.embed_dim; ++c) {
            dot += embeds[i][c] * avg_grad[c];
        }
        ig_scores[i] = dot;
    }

    std::vector<double> magnitudes(d);
    for (std::size_t i = 0; i < d; ++i) {
        magnitudes[i] = ig.use_absolute ? std::fabs(ig_scores[i]) : ig_scores[i];
    }
    const auto [mn_it, mx_it] = std::minmax_element(magnitudes.begin(), magnitudes.end());
    const double range = *mx_it - *mn_it;

    std::vector<double> self_scores(d, 0.0);
    if (range > 0.0) {
        for (std::size_t i = 0; i < d; ++i) {
            self_scores[i] = (magnitudes[i] - *mn_it) / range;
        }
    }
    double loss = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        const double diff = prior.scores[i] - self_scores[i];
        loss += diff * diff;
    }
    loss /= static_cast<double>(d);

    if (range <= 0.0) {
        return loss;  // degenerate normalization: no gradient path
    }

    // c_i = dL_a/dIG_i with the normalization min/range detached; the
    // detached range is floored (see TrainConfig::alignment_range_floor).
    const double graded_range = std::max(range, range_floor);
    std::vector<double> coeff(d);
    for (std::size_t i = 0; i < d; ++i) {
        const double through_abs = ig.use_absolute ? sign_of(ig_scores[i]) : 1.0;
        coeff[i] = (2.0 / static_cast<double>(d)) *
                   (self_scores[i] - prior.scores[i]) * through_abs / graded_range;
    }

    // Direct term: IG_i is linear in word i's embedding row.
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t c = 0; c < model.embed_dim; ++c) {
            grads.embedding(rows[i], c) += scale * coeff[i] * avg_grad[c];
        }
    }

    // Path term: one extra backward pass per quadrature step against
    // v = quad_scale * sum_i coeff_i e_i (held constant).
    std::vector<double> v(model.embed_dim, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t c = 0; c < model.embed_dim; ++c) {
            v[c] += coeff[i] * embeds[i][c];
        }
    }
    for (double& x : v) {
        x *= quad_scale * scale;
    }
    for (std::size_t step = 0; step < steps; ++step) {
        accumulate_path_gradient(model, traces[step], gold, v, mus[step], rows, grads);
    }
    return loss;
}

namespace {

double simple_accuracy(const ToyClassifier& model,
                       const std::vector<TokenizedSentence>& sentences,
                       const std::vector<std::size_t>& gold) {
    if (sentences.empty()) return 0.0;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        const auto probs = forward(model, sentences[i]);
        std::size_t best = 0;
        for (std::size_t j = 1; j < probs.size(); ++j) {
            if (probs[j] > probs[best]) best = j;  // ties stay on the lower index
        }
        if (best == gold[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(sentences.size());
}

void apply_sgd(ToyClassifier& model, const ModelGradients& grads, double lr) {
    add_scaled(model.embedding, grads.embedding, -lr);
    add_scaled(model.hidden_weights, grads.hidden_weights, -lr);
    add_scaled(model.hidden_bias, grads.hidden_bias, -lr);
    add_scaled(model.output_weights, grads.output_weights, -lr);
    add_scaled(model.output_bias, grads.output_bias, -lr);
}

}  // namespace

void TrainConfig::validate() const {
    if (beta < 0.0) throw InvalidInputError("train: beta must be >= 0");
    if (!(clip_norm > 0.0)) throw InvalidInputError("train: clip_norm must be > 0");
    if (batch_size < 1) throw InvalidInputError("train: batch_size must be >= 1");
    if (!(learning_rate > 0.0)) throw InvalidInputError("train: learning_rate must be > 0");
}

double cross_entropy(const std::vector<double>& probs, std::size_t gold_index) {
    if (gold_index >= probs.size()) {
        throw InvalidInputError("cross_entropy: gold index out of range");
    }
    return -std::log(std::max(probs[gold_index], 1e-12));
}

double attribution_loss(const AttributionVector& prior,
                        const AttributionVector& self_attr) {
    if (!prior.normalized || !self_attr.normalized) {
        throw InvalidInputError("attribution_loss: inputs must be normalized");
    }
    if (prior.scores.size() != self_attr.scores.size()) {
        throw InvalidInputError("attribution_loss: length mismatch");
    }
    if (!prior.sentence_id.empty() && !self_attr.sentence_id.empty() &&
        prior.sentence_id != self_attr.sentence_id) {
        throw InvalidInputError("attribution_loss: sentence mismatch");
    }
    double loss = 0.0;
    for (std::size_t i = 0; i < prior.scores.size(); ++i) {
        const double diff = prior.scores[i] - self_attr.scores[i];
        loss += diff * diff;
    }
    return loss / static_cast<double>(prior.scores.size());
}

double clip_gradients(ModelGradients& grads, double clip_norm) {
    double sum = squared_norm(grads.embedding) + squared_norm(grads.hidden_weights) +
                 squared_norm(grads.hidden_bias) + squared_norm(grads.output_weights) +
                 squared_norm(grads.output_bias);
    const double norm = std::sqrt(sum);
    if (norm > clip_norm && norm > 0.0) {
        const double scale = clip_norm / norm;
        auto scale_matrix = [scale](Matrix& m) {
            for (std::size_t r = 0; r < m.rows(); ++r) {
                for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) *= scale;
            }
        };
        scale_matrix(grads.embedding);
        scale_matrix(grads.hidden_weights);
        scale_matrix(grads.output_weights);
        for (double& x : grads.hidden_bias) x *= scale;
        for (double& x : grads.output_bias) x *= scale;
    }
    return norm;
}

TrainReport train(ToyClassifier& model, const std::vector<LabeledExample>& train_set,
                  const std::vector<LabeledExample>& val_set,
                  const std::map<std::string, AttributionVector>& priors,
                  const TrainConfig& config) {
    config.validate();
    if (train_set.empty()) {
        throw InvalidInputError("train: empty training set");
    }

    std::vector<TokenizedSentence> sentences;
    std::vector<std::size_t> gold;
    std::vector<const AttributionVector*> example_priors(train_set.size(), nullptr);
    sentences.reserve(train_set.size());
    gold.reserve(train_set.size());
    for (std::size_t i = 0; i < train_set.size(); ++i) {
        sentences.push_back(tokenize(train_set[i].text));
        gold.push_back(model.classes.index_of(train_set[i].label));
        auto it = priors.find(train_set[i].id);
        if (it == priors.end()) continue;
        if (!it->second.normalized) {
            throw InvalidInputError("train: prior for " + train_set[i].id +
                                    " is not normalized");
        }
        if (it->second.scores.size() != sentences.back().word_count()) {
            throw InvalidInputError("train: prior word count mismatch for " +
                                    train_set[i].id);
        }
        example_priors[i] = &it->second;
    }
    std::vector<TokenizedSentence> val_sentences;
    std::vector<std::size_t> val_gold;
    for (const auto& example : val_set) {
        val_sentences.push_back(tokenize(example.text));
        val_gold.push_back(model.classes.index_of(example.label));
    }

    TrainReport report;
    report.seed = config.seed;

    const std::size_t n = train_set.size();
    double best_val = -1.0;
    ToyClassifier best_model = model;
    std::size_t epochs_since_improvement = 0;

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        Rng shuffle_rng(derive_seed(config.seed, epoch));
        shuffle_rng.shuffle(order);

        const bool align_active =
            config.beta > 0.0 && epoch >= config.alignment_warmup_epochs;
        double epoch_ce = 0.0, epoch_align = 0.0, epoch_total = 0.0;
        for (std::size_t start = 0; start < n; start += config.batch_size) {
            const std::size_t end = std::min(n, start + config.batch_size);
            const double batch_n = static_cast<double>(end - start);
            ModelGradients batch_grads = zero_gradients(model, 0);
            double batch_ce = 0.0, batch_align = 0.0;
            for (std::size_t pos = start; pos < end; ++pos) {
                const std::size_t idx = order[pos];
                const auto probs = forward(model, sentences[idx]);
                batch_ce += cross_entropy(probs, gold[idx]);
                const ModelGradients example_grads =
                    train_step_gradients(model, sentences[idx], train_set[idx].label);
                accumulate(batch_grads, example_grads, 1.0 / batch_n);
                if (align_active && example_priors[idx] != nullptr) {
                    batch_align += accumulate_alignment_gradients(
                        model, sentences[idx], gold[idx], *example_priors[idx],
                        config.ig, config.beta / batch_n, batch_grads,
                        config.alignment_range_floor);
                }
            }
            clip_gradients(batch_grads, config.clip_norm);
            apply_sgd(model, batch_grads, config.learning_rate);

            const double ce_mean = batch_ce / batch_n;
            const double align_mean = batch_align / batch_n;
            epoch_ce += batch_ce;
            epoch_align += batch_align;
            epoch_total += (ce_mean + config.beta * align_mean) * batch_n;
        }

        EpochStats stats;
        stats.ce_loss = epoch_ce / static_cast<double>(n);
        stats.alignment_loss = epoch_align / static_cast<double>(n);
        stats.total_loss = epoch_total / static_cast<double>(n);
        stats.train_accuracy = simple_accuracy(model, sentences, gold);
        if (!val_sentences.empty()) {
            stats.validation_accuracy =
                simple_accuracy(model, val_sentences, val_gold);
        }
        report.epochs.push_back(stats);

        // Early stopping engages once the full objective is active.
        const bool warming_up =
            config.beta > 0.0 && epoch + 1 <= config.alignment_warmup_epochs;
        if (!val_sentences.empty() && !warming_up) {
            // Ties refresh the snapshot: at equal validation accuracy the
            // later model has absorbed more alignment pressure. The patience
            // counter still requires strict improvement.
            if (*stats.validation_accuracy >= best_val) {
                if (*stats.validation_accuracy > best_val) {
                    epochs_since_improvement = 0;
                } else if (++epochs_since_improvement >= config.early_stop_patience) {
                    best_val = *stats.validation_accuracy;
                    best_model = model;
                    report.best_epoch = epoch;
                    break;
                }
                best_val = *stats.validation_accuracy;
                best_model = model;
                report.best_epoch = epoch;
            } else if (++epochs_since_improvement >= config.early_stop_patience) {
                break;
            }
        } else if (val_sentences.empty()) {
            report.best_epoch = epoch;
        }
    }

    if (!val_sentences.empty() && best_val >= 0.0) {
        model = best_model;
    }
    return report;
}

}  // namespace capkit

#include "phaselab/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "phaselab/adam.hpp"
#include "phaselab/metrics.hpp"

namespace phaselab {

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0) || !(learning_rate_stage_b > 0.0)) {
        throw std::invalid_argument("TrainConfig: learning rates must be positive");
    }
    if (epochs < 0) throw std::invalid_argument("TrainConfig: negative epochs");
    if (dropout < 0.0 || dropout >= 1.0) {
        throw std::invalid_argument("TrainConfig: dropout must lie in [0, 1)");
    }
    if (weight_decay < 0.0) throw std::invalid_argument("TrainConfig: negative weight decay");
    if (minibatch < 1) throw std::invalid_argument("TrainConfig: minibatch must be >= 1");
    if (val_interval < 1) throw std::invalid_argument("TrainConfig: val_interval must be >= 1");
}

TrainConfig default_config(Variant v) {
    TrainConfig cfg;
    switch (v) {
        case Variant::m1:
            cfg.learning_rate = 5e-5;
            cfg.epochs = 27;
            cfg.minibatch = 32;
            cfg.weight_decay = 5e-4;
            cfg.dropout = 0.0;
            cfg.hidden_dim = 0;
            break;
        case Variant::m2:
            cfg.learning_rate = 5e-5;
            cfg.epochs = 350;
            cfg.weight_decay = 5e-3;
            cfg.dropout = 0.0;
            cfg.hidden_dim = 0;
            break;
        case Variant::m3:
        case Variant::student:
            cfg.learning_rate = 5e-5;
            cfg.epochs = 350;
            cfg.hidden_dim = 128;
            cfg.dropout = 0.3;
            cfg.weight_decay = 5e-4;
            break;
        case Variant::m4:
        case Variant::m5:
            cfg.learning_rate = 1e-3;
            cfg.learning_rate_stage_b = 1e-4;
            cfg.epochs = 350;
            cfg.hidden_dim = 64;  // per direction, concatenated to 128
            cfg.dropout = 0.4;
            cfg.weight_decay = 5e-4;
            break;
    }
    return cfg;
}

namespace {

void require_labeled(const std::vector<const SequenceRecord*>& records, const char* where) {
    if (records.empty()) throw std::invalid_argument(std::string(where) + ": no records");
    for (const SequenceRecord* rec : records) {
        if (rec == nullptr) throw std::invalid_argument(std::string(where) + ": null record");
        if (!rec->labeled()) {
            throw std::invalid_argument(std::string(where) + ": record " + rec->id +
                                        " carries no labels");
        }
        if (rec->labels.size() != rec->features.size()) {
            throw std::invalid_argument(std::string(where) + ": record " + rec->id +
                                        " has mismatched label/feature lengths");
        }
    }
}

int checked_feature_dim(const std::vector<const SequenceRecord*>& records, const char* where) {
    const std::size_t dim = records.front()->features.front().size();
    for (const SequenceRecord* rec : records) {
        for (const Vector& f : rec->features) {
            if (f.size() != dim) {
                throw std::invalid_argument(std::string(where) +
                                            ": inconsistent feature dimension in " + rec->id);
            }
        }
    }
    return static_cast<int>(dim);
}

// Parameter blocks paired with Adam states in a fixed order.
class Optimizer {
public:
    void add(std::span<double> param, const AdamConfig& cfg, bool decay) {
        AdamConfig c = cfg;
        if (!decay) c.weight_decay = 0.0;
        params_.push_back(param);
        states_.emplace_back(c, param.size());
    }

    void add_lstm(LstmParams& p, const AdamConfig& cfg) {
        add(p.w_in.flat(), cfg, true);
        add(p.w_rec.flat(), cfg, true);
        add(std::span<double>(p.bias), cfg, false);
        add(std::span<double>(p.c0), cfg, false);
        add(std::span<double>(p.h0), cfg, false);
    }

    void add_projection(ProjectionParams& p, const AdamConfig& cfg) {
        add(p.w.flat(), cfg, true);
        add(std::span<double>(p.b), cfg, false);
    }

    void step(const std::vector<std::span<const double>>& grads) {
        if (grads.size() != params_.size()) {
            throw std::invalid_argument("Optimizer: gradient block count mismatch");
        }
        for (std::size_t k = 0; k < params_.size(); ++k) {
            adam_step(params_[k], grads[k], states_[k]);
        }
    }

private:
    std::vector<std::span<double>> params_;
    std::vector<AdamState> states_;
};

void append_lstm_grads(std::vector<std::span<const double>>& out, const LstmGradients& g) {
    out.push_back(g.w_in.flat());
    out.push_back(g.w_rec.flat());
    out.push_back(std::span<const double>(g.bias));
    out.push_back(std::span<const double>(g.c0));
    out.push_back(std::span<const double>(g.h0));
}

void append_projection_grads(std::vector<std::span<const double>>& out,
                             const ProjectionGradients& g) {
    out.push_back(g.w.flat());
    out.push_back(std::span<const double>(g.b));
}

// Mean per-frame cross-entropy and its logit gradients.
double softmax_ce(const LogitSequence& logits, const TagSequence& labels,
                  std::vector<Vector>& d_logits) {
    const double inv_n = 1.0 / static_cast<double>(logits.size());
    double loss = 0.0;
    d_logits.resize(logits.size());
    for (std::size_t t = 0; t < logits.size(); ++t) {
        const Vector& s = logits[t];
        const double m = *std::max_element(s.begin(), s.end());
        double sum = 0.0;
        d_logits[t].resize(s.size());
        for (std::size_t k = 0; k < s.size(); ++k) {
            d_logits[t][k] = std::exp(s[k] - m);
            sum += d_logits[t][k];
        }
        loss -= (s[labels[t]] - m - std::log(sum)) * inv_n;
        for (std::size_t k = 0; k < s.size(); ++k) {
            d_logits[t][k] = (d_logits[t][k] / sum) * inv_n;
        }
        d_logits[t][labels[t]] -= inv_n;
    }
    return loss;
}

// Keeps the highest-validation-F1 snapshot seen so far.
struct BestTracker {
    ModelBundle snapshot;
    double best_f1 = -1.0;
    bool armed = false;

    void observe(const ModelBundle& m, double val_f1) {
        if (val_f1 > best_f1) {
            best_f1 = val_f1;
            snapshot = m;
            armed = true;
        }
    }
    void restore(ModelBundle& m) const {
        if (armed) {
            // History keeps accumulating past the snapshot.
            auto history = m.history;
            m = snapshot;
            m.history = std::move(history);
        }
    }
};

using TrainStep = double (*)(ModelBundle&, const SequenceRecord&, const TrainConfig&,
                             RngStream&, Optimizer&);

double ce_step(ModelBundle& m, const SequenceRecord& rec, const TrainConfig& cfg,
               RngStream& rng, Optimizer& opt) {
    std::vector<Vector> outputs;
    LstmSequenceCache cache;
    BiLstmCache bicache;
    if (m.lstm.has_value()) {
        outputs = lstm_forward(*m.lstm, initial_state(*m.lstm), rec.features, &cache);
    } else {
        outputs = bilstm_forward(*m.bilstm, rec.features, &bicache);
    }

    DropoutPlan plan;
    const LogitSequence logits =
        project_logits(m.projection, outputs, cfg.dropout, &rng, true, &plan);
    std::vector<Vector> d_logits;
    const double loss = softmax_ce(logits, rec.labels, d_logits);

    ProjectionGradients pg(m.projection);
    const std::vector<Vector> d_feat =
        project_backward(m.projection, outputs, plan, d_logits, pg);

    std::vector<std::span<const double>> grads;
    if (m.lstm.has_value()) {
        const LstmGradients g =
            lstm_backward(*m.lstm, rec.features, initial_state(*m.lstm), cache, d_feat);
        append_lstm_grads(grads, g);
        append_projection_grads(grads, pg);
        opt.step(grads);
    } else {
        const BiLstmGradients g = bilstm_backward(*m.bilstm, rec.features, bicache, d_feat);
        append_lstm_grads(grads, g.fwd);
        append_lstm_grads(grads, g.bwd);
        append_projection_grads(grads, pg);
        opt.step(grads);
    }
    return loss;
}

// Joint stage of m5: sequence NLL through the transition matrix.
double crf_joint_step(ModelBundle& m, const SequenceRecord& rec, const TrainConfig& cfg,
                      RngStream& rng, Optimizer& opt) {
    BiLstmCache bicache;
    const std::vector<Vector> outputs = bilstm_forward(*m.bilstm, rec.features, &bicache);
    DropoutPlan plan;
    const LogitSequence logits =
        project_logits(m.projection, outputs, cfg.dropout, &rng, true, &plan);

    const CrfNllResult nll = crf_nll(logits, rec.labels, *m.transitions);

    ProjectionGradients pg(m.projection);
    const std::vector<Vector> d_feat =
        project_backward(m.projection, outputs, plan, nll.d_logits, pg);
    const BiLstmGradients g = bilstm_backward(*m.bilstm, rec.features, bicache, d_feat);

    std::vector<std::span<const double>> grads;
    append_lstm_grads(grads, g.fwd);
    append_lstm_grads(grads, g.bwd);
    append_projection_grads(grads, pg);
    grads.push_back(nll.d_theta.flat());
    opt.step(grads);
    return nll.loss;
}

// One training stage: shuffled sequences, one optimizer step each,
// periodic validation with best-checkpoint selection. Selection spans the
// stage boundary: the incoming model is scored first, so a stage that never
// improves validation returns its input unchanged.
void run_stage(ModelBundle& m, const std::vector<const SequenceRecord*>& train,
               const std::vector<const SequenceRecord*>& val, const TrainConfig& cfg, int epochs,
               RngStream& rng, Optimizer& opt, TrainStep step) {
    BestTracker best;
    if (!val.empty()) best.observe(m, evaluate_macro_f1(m, val));
    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), 0);
    const int first_epoch = m.history.empty() ? 1 : m.history.back().epoch + 1;

    for (int epoch = 0; epoch < epochs; ++epoch) {
        rng.shuffle(order);
        double loss_sum = 0.0;
        for (const std::size_t idx : order) {
            loss_sum += step(m, *train[idx], cfg, rng, opt);
        }
        TrainHistoryEntry entry;
        entry.epoch = first_epoch + epoch;
        entry.loss = loss_sum / static_cast<double>(train.size());
        const bool validate_now =
            !val.empty() && ((epoch + 1) % cfg.val_interval == 0 || epoch + 1 == epochs);
        if (validate_now) {
            entry.val_f1 = evaluate_macro_f1(m, val);
            m.history.push_back(entry);
            best.observe(m, entry.val_f1);
        } else {
            m.history.push_back(entry);
        }
    }
    best.restore(m);
}

}  // namespace

ModelBundle train_framewise(const std::vector<const SequenceRecord*>& train,
                            const std::vector<const SequenceRecord*>& val,
                            const TrainConfig& cfg, int n_classes) {
    cfg.validate();
    require_labeled(train, "train_framewise");
    if (!val.empty()) require_labeled(val, "train_framewise(val)");
    const int feature_dim = checked_feature_dim(train, "train_framewise");

    ModelBundle m = init_model(Variant::m1, n_classes, feature_dim, 0, cfg.seed);
    RngStream rng = RngStream(cfg.seed).child(1);

    struct Frame {
        const Vector* x;
        int y;
    };
    std::vector<Frame> frames;
    for (const SequenceRecord* rec : train) {
        for (std::size_t t = 0; t < rec->features.size(); ++t) {
            if (rec->labels[t] < 0 || rec->labels[t] >= n_classes) {
                throw std::invalid_argument("train_framewise: label out of range in " + rec->id);
            }
            frames.push_back({&rec->features[t], rec->labels[t]});
        }
    }

    AdamConfig adam;
    adam.learning_rate = cfg.learning_rate;
    adam.weight_decay = cfg.weight_decay;
    Optimizer opt;
    opt.add_projection(m.projection, adam);

    BestTracker best;
    std::vector<std::size_t> order(frames.size());
    std::iota(order.begin(), order.end(), 0);
    Vector probs(n_classes);

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        rng.shuffle(order);
        double loss_sum = 0.0;
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(cfg.minibatch)) {
            const std::size_t stop =
                std::min(order.size(), start + static_cast<std::size_t>(cfg.minibatch));
            ProjectionGradients pg(m.projection);
            const double inv_batch = 1.0 / static_cast<double>(stop - start);
            for (std::size_t k = start; k < stop; ++k) {
                const Frame& fr = frames[order[k]];
                Vector logits = m.projection.b;
                matvec_add(m.projection.w, *fr.x, logits);
                const double mx = *std::max_element(logits.begin(), logits.end());
                double sum = 0.0;
                for (int c = 0; c < n_classes; ++c) {
                    probs[c] = std::exp(logits[c] - mx);
                    sum += probs[c];
                }
                loss_sum -= logits[fr.y] - mx - std::log(sum);
                for (int c = 0; c < n_classes; ++c) probs[c] = probs[c] / sum * inv_batch;
                probs[fr.y] -= inv_batch;
                outer_add(pg.w, probs, *fr.x);
                axpy(1.0, probs, pg.b);
            }
            std::vector<std::span<const double>> grads;
            append_projection_grads(grads, pg);
            opt.step(grads);
        }
        TrainHistoryEntry entry;
        entry.epoch = epoch;
        entry.loss = loss_sum / static_cast<double>(frames.size());
        if (!val.empty() && (epoch % cfg.val_interval == 0 || epoch == cfg.epochs)) {
            entry.val_f1 = evaluate_macro_f1(m, val);
            best.observe(m, entry.val_f1);
        }
        m.history.push_back(entry);
    }
    best.restore(m);
    return m;
}

ModelBundle train_temporal(Variant v, const std::vector<const SequenceRecord*>& train,
                           const std::vector<const SequenceRecord*>& val, const TrainConfig& cfg,
                           int n_classes, const ModelBundle* base_m1) {
    cfg.validate();
    if (v == Variant::m1) {
        throw std::invalid_argument("train_temporal: m1 trains with train_framewise");
    }
    require_labeled(train, "train_temporal");
    if (!val.empty()) require_labeled(val, "train_temporal(val)");
    const int feature_dim = checked_feature_dim(train, "train_temporal");
    for (const SequenceRecord* rec : train) {
        for (int y : rec->labels) {
            if (y < 0 || y >= n_classes) {
                throw std::invalid_argument("train_temporal: label out of range in " + rec->id);
            }
        }
    }

    RngStream rng = RngStream(cfg.seed).child(2);
    AdamConfig adam;
    adam.learning_rate = cfg.learning_rate;
    adam.weight_decay = cfg.weight_decay;
    const int epochs_b = cfg.epochs_stage_b > 0 ? cfg.epochs_stage_b : cfg.epochs;

    if (v == Variant::m2) {
        ModelBundle base;
        if (base_m1 == nullptr) {
            TrainConfig m1_cfg = default_config(Variant::m1);
            m1_cfg.seed = cfg.seed;
            m1_cfg.val_interval = cfg.val_interval;
            base = train_framewise(train, val, m1_cfg, n_classes);
            base_m1 = &base;
        }
        if (base_m1->variant != Variant::m1) {
            throw std::invalid_argument("train_temporal: m2 needs an m1 base model");
        }
        if (base_m1->feature_dim != feature_dim) {
            throw std::invalid_argument("train_temporal: m2 base model feature dimension mismatch");
        }

        ModelBundle m = init_model(Variant::m2, n_classes, feature_dim, 0, cfg.seed);
        m.projection = base_m1->projection;  // frozen classifier

        std::vector<LogitSequence> frozen(train.size());
        for (std::size_t k = 0; k < train.size(); ++k) {
            frozen[k] = project_logits(m.projection, train[k]->features, 0.0, nullptr, false, nullptr);
        }

        Optimizer opt;
        opt.add(m.transitions->flat(), adam, true);
        BestTracker best;
        std::vector<std::size_t> order(train.size());
        std::iota(order.begin(), order.end(), 0);
        for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
            rng.shuffle(order);
            double loss_sum = 0.0;
            for (const std::size_t idx : order) {
                const CrfNllResult nll = crf_nll(frozen[idx], train[idx]->labels, *m.transitions);
                loss_sum += nll.loss;
                opt.step({nll.d_theta.flat()});
            }
            TrainHistoryEntry entry;
            entry.epoch = epoch;
            entry.loss = loss_sum / static_cast<double>(train.size());
            if (!val.empty() && (epoch % cfg.val_interval == 0 || epoch == cfg.epochs)) {
                entry.val_f1 = evaluate_macro_f1(m, val);
                best.observe(m, entry.val_f1);
            }
            m.history.push_back(entry);
        }
        best.restore(m);
        return m;
    }

    ModelBundle m = init_model(v, n_classes, feature_dim, cfg.hidden_dim, cfg.seed);

    if (v == Variant::m3 || v == Variant::student) {
        Optimizer opt;
        opt.add_lstm(*m.lstm, adam);
        opt.add_projection(m.projection, adam);
        run_stage(m, train, val, cfg, cfg.epochs, rng, opt, ce_step);
        return m;
    }

    // m4 and m5 stage A: cross-entropy on the biLSTM outputs.
    {
        Optimizer opt;
        opt.add_lstm(m.bilstm->fwd, adam);
        opt.add_lstm(m.bilstm->bwd, adam);
        opt.add_projection(m.projection, adam);
        run_stage(m, train, val, cfg, cfg.epochs, rng, opt, ce_step);
    }
    if (v == Variant::m4) return m;

    // m5 stage B: the transition matrix joins, everything trains on the
    // sequence NLL at the slower rate, warm-started from stage A.
    AdamConfig adam_b = adam;
    adam_b.learning_rate = cfg.learning_rate_stage_b;
    Optimizer opt;
    opt.add_lstm(m.bilstm->fwd, adam_b);
    opt.add_lstm(m.bilstm->bwd, adam_b);
    opt.add_projection(m.projection, adam_b);
    opt.add(m.transitions->flat(), adam_b, true);
    run_stage(m, train, val, cfg, epochs_b, rng, opt, crf_joint_step);
    return m;
}

std::vector<TagSequence> predict_all(const ModelBundle& m,
                                     const std::vector<const SequenceRecord*>& records) {
    std::vector<TagSequence> preds(records.size());
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t k = 0; k < static_cast<std::int64_t>(records.size()); ++k) {
        try {
            preds[k] = model_predict(m, records[k]->features);
        } catch (...) {
#pragma omp critical
            failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return preds;
}

double evaluate_macro_f1(const ModelBundle& m,
                         const std::vector<const SequenceRecord*>& records) {
    require_labeled(records, "evaluate_macro_f1");
    const std::vector<TagSequence> preds = predict_all(m, records);
    std::vector<TagSequence> truths(records.size());
    for (std::size_t k = 0; k < records.size(); ++k) truths[k] = records[k]->labels;
    return metric_report(confusion(preds, truths, static_cast<std::size_t>(m.n_classes))).macro_f1;
}

}  // namespace phaselab

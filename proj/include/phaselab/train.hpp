#ifndef PHASELAB_TRAIN_HPP
#define PHASELAB_TRAIN_HPP

#include <cstdint>
#include <vector>

#include "phaselab/dataset.hpp"
#include "phaselab/model.hpp"

namespace phaselab {

struct TrainConfig {
    double learning_rate = 1e-3;
    double learning_rate_stage_b = 1e-4;  // joint CRF stage of m5
    int epochs = 350;
    int epochs_stage_b = -1;              // -1: same as epochs
    double dropout = 0.0;
    double weight_decay = 0.0;
    int minibatch = 32;                   // framewise trainer only
    int hidden_dim = 128;                 // per direction for m4/m5
    int val_interval = 1;                 // epochs between validation passes
    std::uint64_t seed = 1;

    void validate() const;
};

// Hyperparameter defaults per variant.
TrainConfig default_config(Variant v);

// Per-frame linear classifier trained with minibatched softmax
// cross-entropy. Returns the best-validation checkpoint when `val` is
// nonempty, otherwise the final epoch.
ModelBundle train_framewise(const std::vector<const SequenceRecord*>& train,
                            const std::vector<const SequenceRecord*>& val,
                            const TrainConfig& cfg, int n_classes);

// Temporal variants, one full-sequence optimizer step per sequence with
// untruncated backpropagation through time.
//   m3/student: LSTM + projection, per-frame cross-entropy.
//   m4:         biLSTM + projection, per-frame cross-entropy.
//   m5:         stage A as m4, then the transition matrix joins and the
//               whole model trains on the sequence NLL at the stage-B rate.
//   m2:         logits frozen from `base_m1` (trained here when absent);
//               only the transition matrix trains, on the sequence NLL.
ModelBundle train_temporal(Variant v, const std::vector<const SequenceRecord*>& train,
                           const std::vector<const SequenceRecord*>& val,
                           const TrainConfig& cfg, int n_classes,
                           const ModelBundle* base_m1 = nullptr);

// Macro F1 of model predictions over labeled records (evaluation helper).
double evaluate_macro_f1(const ModelBundle& m, const std::vector<const SequenceRecord*>& records);

// Predictions for every record, in order; sequences evaluated concurrently.
std::vector<TagSequence> predict_all(const ModelBundle& m,
                                     const std::vector<const SequenceRecord*>& records);

}  // namespace phaselab

#endif

#ifndef PHASELAB_MODEL_HPP
#define PHASELAB_MODEL_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "phaselab/crf.hpp"
#include "phaselab/dataset.hpp"
#include "phaselab/lstm.hpp"
#include "phaselab/projection.hpp"

namespace phaselab {

// m1: per-frame linear classifier on the features.
// m2: m1 logits decoded through a transition matrix.
// m3: unidirectional LSTM + projection (online capable).
// m4: bidirectional LSTM + projection.
// m5: bidirectional LSTM + projection + transition matrix (the teacher).
// student: m3 architecture trained on teacher-completed label sets.
enum class Variant { m1, m2, m3, m4, m5, student };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& s);
bool variant_has_crf(Variant v);
bool variant_is_bidirectional(Variant v);
bool variant_is_recurrent(Variant v);

struct TrainHistoryEntry {
    int epoch = 0;
    double loss = 0.0;
    double val_f1 = -1.0;  // negative when no validation ran that epoch
};

// Parameters of one model variant plus the seeds and history needed to
// reproduce it. Checkpoints round-trip bit-exactly.
struct ModelBundle {
    Variant variant = Variant::m1;
    int n_classes = 0;
    int feature_dim = 0;
    int hidden_dim = 0;  // per direction for bidirectional variants
    std::uint64_t init_seed = 0;
    ProjectionParams projection;
    std::optional<LstmParams> lstm;
    std::optional<BiLstmParams> bilstm;
    std::optional<TransitionMatrix> transitions;
    std::vector<TrainHistoryEntry> history;
};

ModelBundle init_model(Variant v, int n_classes, int feature_dim, int hidden_dim,
                       std::uint64_t seed);

// Per-frame logits of a sequence, inference mode (no dropout).
LogitSequence model_logits(const ModelBundle& m, const std::vector<Vector>& features);

// Viterbi when the bundle carries a transition matrix, framewise argmax
// otherwise.
TagSequence model_predict(const ModelBundle& m, const std::vector<Vector>& features);

// Frame-by-frame inference for the online variants (m3/student): carries the
// LSTM state so feeding frames one at a time reproduces the whole-sequence
// prediction exactly.
class OnlineDecoder {
public:
    explicit OnlineDecoder(const ModelBundle& m);
    int step(std::span<const double> frame);

private:
    const ModelBundle& model_;
    LstmState state_;
};

void save_checkpoint(const ModelBundle& m, const std::filesystem::path& path);
ModelBundle load_checkpoint(const std::filesystem::path& path);

}  // namespace phaselab

#endif

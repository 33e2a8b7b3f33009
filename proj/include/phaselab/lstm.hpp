#ifndef PHASELAB_LSTM_HPP
#define PHASELAB_LSTM_HPP

#include <cstddef>
#include <vector>

#include "phaselab/matrix.hpp"
#include "phaselab/rng.hpp"

namespace phaselab {

// One LSTM cell. Gate weights are fused row-wise in the order i, f, g, o:
// w_in is (4H x D), w_rec is (4H x H), bias is 4H with the forget block
// initialized to +1. The initial state (c0, h0) is drawn once at
// construction and trained like any other parameter.
struct LstmParams {
    std::size_t input_dim = 0;
    std::size_t hidden_dim = 0;
    Matrix w_in;
    Matrix w_rec;
    Vector bias;
    Vector c0;
    Vector h0;

    static LstmParams init(std::size_t input_dim, std::size_t hidden_dim, RngStream& rng);
};

struct LstmState {
    Vector c;
    Vector h;
};

inline LstmState initial_state(const LstmParams& p) { return LstmState{p.c0, p.h0}; }

// Post-nonlinearity activations of one step, kept for backprop.
struct LstmStepCache {
    Vector gates;   // 4H: sigma(i), sigma(f), tanh(g), sigma(o)
    Vector c;
    Vector tanh_c;
    Vector h;
};

struct LstmSequenceCache {
    std::vector<LstmStepCache> steps;
};

struct LstmGradients {
    Matrix w_in;
    Matrix w_rec;
    Vector bias;
    Vector c0;
    Vector h0;

    explicit LstmGradients(const LstmParams& p);
};

// One cell application; the returned vector is the step output h_t.
// `cache` may be null outside training.
Vector lstm_cell_forward(const LstmParams& p, std::span<const double> input,
                         const LstmState& prev, LstmState& next, LstmStepCache* cache);

// Left-to-right pass over a whole sequence. Output t depends only on
// inputs 0..t and the initial state.
std::vector<Vector> lstm_forward(const LstmParams& p, const LstmState& initial,
                                 const std::vector<Vector>& inputs, LstmSequenceCache* cache);

// Untruncated backpropagation through time. `upstream_dh[t]` is dL/dh_t;
// gradients accumulate over all timesteps, including the initial state.
LstmGradients lstm_backward(const LstmParams& p, const std::vector<Vector>& inputs,
                            const LstmState& initial, const LstmSequenceCache& cache,
                            const std::vector<Vector>& upstream_dh);

// Two cells sharing the input dimension, one run in each time direction.
struct BiLstmParams {
    LstmParams fwd;
    LstmParams bwd;

    static BiLstmParams init(std::size_t input_dim, std::size_t hidden_per_dir, RngStream& rng);
    std::size_t output_dim() const { return fwd.hidden_dim + bwd.hidden_dim; }
};

struct BiLstmCache {
    LstmSequenceCache fwd;
    LstmSequenceCache bwd;                 // over the reversed sequence
    std::vector<Vector> reversed_inputs;
};

struct BiLstmGradients {
    LstmGradients fwd;
    LstmGradients bwd;

    explicit BiLstmGradients(const BiLstmParams& p) : fwd(p.fwd), bwd(p.bwd) {}
};

// Output t is the concatenation of the forward cell's output at t and the
// backward cell's output at t (the latter computed right-to-left).
std::vector<Vector> bilstm_forward(const BiLstmParams& p, const std::vector<Vector>& inputs,
                                   BiLstmCache* cache);

// `upstream[t]` is the gradient of the loss wrt the concatenated output.
BiLstmGradients bilstm_backward(const BiLstmParams& p, const std::vector<Vector>& inputs,
                                const BiLstmCache& cache, const std::vector<Vector>& upstream);

}  // namespace phaselab

#endif

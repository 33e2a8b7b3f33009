#include "phaselab/lstm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace phaselab {

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Matrix uniform_matrix(std::size_t rows, std::size_t cols, double bound, RngStream& rng) {
    Matrix m(rows, cols);
    for (double& x : m.data) x = rng.uniform(-bound, bound);
    return m;
}

std::vector<Vector> reversed(const std::vector<Vector>& v) {
    return std::vector<Vector>(v.rbegin(), v.rend());
}

}  // namespace

LstmParams LstmParams::init(std::size_t input_dim, std::size_t hidden_dim, RngStream& rng) {
    if (input_dim == 0 || hidden_dim == 0) {
        throw std::invalid_argument("LstmParams::init: dimensions must be positive");
    }
    LstmParams p;
    p.input_dim = input_dim;
    p.hidden_dim = hidden_dim;
    const std::size_t gh = 4 * hidden_dim;
    p.w_in = uniform_matrix(gh, input_dim, 1.0 / std::sqrt(static_cast<double>(input_dim)), rng);
    p.w_rec = uniform_matrix(gh, hidden_dim, 1.0 / std::sqrt(static_cast<double>(hidden_dim)), rng);
    p.bias.assign(gh, 0.0);
    std::fill(p.bias.begin() + hidden_dim, p.bias.begin() + 2 * hidden_dim, 1.0);
    p.c0.resize(hidden_dim);
    p.h0.resize(hidden_dim);
    for (double& x : p.c0) x = rng.uniform(-0.1, 0.1);
    for (double& x : p.h0) x = rng.uniform(-0.1, 0.1);
    return p;
}

LstmGradients::LstmGradients(const LstmParams& p)
    : w_in(p.w_in.rows, p.w_in.cols),
      w_rec(p.w_rec.rows, p.w_rec.cols),
      bias(p.bias.size(), 0.0),
      c0(p.c0.size(), 0.0),
      h0(p.h0.size(), 0.0) {}

Vector lstm_cell_forward(const LstmParams& p, std::span<const double> input,
                         const LstmState& prev, LstmState& next, LstmStepCache* cache) {
    const std::size_t h = p.hidden_dim;
    if (input.size() != p.input_dim) {
        throw std::invalid_argument("lstm_cell_forward: input dimension mismatch");
    }
    if (prev.c.size() != h || prev.h.size() != h) {
        throw std::invalid_argument("lstm_cell_forward: state dimension mismatch");
    }

    Vector pre = p.bias;
    matvec_add(p.w_in, input, pre);
    matvec_add(p.w_rec, prev.h, pre);

    Vector gates(4 * h);
    for (std::size_t k = 0; k < h; ++k) gates[k] = sigmoid(pre[k]);                  // input
    for (std::size_t k = h; k < 2 * h; ++k) gates[k] = sigmoid(pre[k]);              // forget
    for (std::size_t k = 2 * h; k < 3 * h; ++k) gates[k] = std::tanh(pre[k]);        // candidate
    for (std::size_t k = 3 * h; k < 4 * h; ++k) gates[k] = sigmoid(pre[k]);          // output

    next.c.resize(h);
    next.h.resize(h);
    Vector tanh_c(h);
    for (std::size_t k = 0; k < h; ++k) {
        next.c[k] = gates[h + k] * prev.c[k] + gates[k] * gates[2 * h + k];
        tanh_c[k] = std::tanh(next.c[k]);
        next.h[k] = gates[3 * h + k] * tanh_c[k];
    }

    if (cache != nullptr) {
        cache->gates = std::move(gates);
        cache->c = next.c;
        cache->tanh_c = std::move(tanh_c);
        cache->h = next.h;
    }
    return next.h;
}

std::vector<Vector> lstm_forward(const LstmParams& p, const LstmState& initial,
                                 const std::vector<Vector>& inputs, LstmSequenceCache* cache) {
    if (inputs.empty()) throw std::invalid_argument("lstm_forward: empty sequence");
    if (cache != nullptr) {
        cache->steps.clear();
        cache->steps.resize(inputs.size());
    }
    std::vector<Vector> outputs(inputs.size());
    LstmState state = initial;
    LstmState next;
    for (std::size_t t = 0; t < inputs.size(); ++t) {
        LstmStepCache* step = cache != nullptr ? &cache->steps[t] : nullptr;
        outputs[t] = lstm_cell_forward(p, inputs[t], state, next, step);
        std::swap(state, next);
    }
    return outputs;
}

LstmGradients lstm_backward(const LstmParams& p, const std::vector<Vector>& inputs,
                            const LstmState& initial, const LstmSequenceCache& cache,
                            const std::vector<Vector>& upstream_dh) {
    const std::size_t n = inputs.size();
    const std::size_t h = p.hidden_dim;
    if (cache.steps.size() != n || upstream_dh.size() != n) {
        throw std::invalid_argument("lstm_backward: cache/sequence length mismatch");
    }

    LstmGradients g(p);
    Vector dh_rec(h, 0.0);    // dL/dh_t carried from step t+1
    Vector dc_rec(h, 0.0);    // dL/dc_t carried from step t+1
    Vector d_pre(4 * h);      // gradients wrt pre-activations of one step

    for (std::size_t ti = n; ti-- > 0;) {
        const LstmStepCache& step = cache.steps[ti];
        const Vector& prev_c = ti > 0 ? cache.steps[ti - 1].c : initial.c;
        const Vector& prev_h = ti > 0 ? cache.steps[ti - 1].h : initial.h;
        if (upstream_dh[ti].size() != h) {
            throw std::invalid_argument("lstm_backward: upstream gradient dimension mismatch");
        }

        for (std::size_t k = 0; k < h; ++k) {
            const double gi = step.gates[k];
            const double gf = step.gates[h + k];
            const double gg = step.gates[2 * h + k];
            const double go = step.gates[3 * h + k];
            const double tc = step.tanh_c[k];

            const double dh = upstream_dh[ti][k] + dh_rec[k];
            const double dc = dc_rec[k] + dh * go * (1.0 - tc * tc);

            d_pre[k] = dc * gg * gi * (1.0 - gi);
            d_pre[h + k] = dc * prev_c[k] * gf * (1.0 - gf);
            d_pre[2 * h + k] = dc * gi * (1.0 - gg * gg);
            d_pre[3 * h + k] = dh * tc * go * (1.0 - go);

            dc_rec[k] = dc * gf;
        }

        outer_add(g.w_in, d_pre, inputs[ti]);
        outer_add(g.w_rec, d_pre, prev_h);
        axpy(1.0, d_pre, g.bias);

        std::fill(dh_rec.begin(), dh_rec.end(), 0.0);
        matvec_transposed_add(p.w_rec, d_pre, dh_rec);
    }

    g.c0 = dc_rec;
    g.h0 = dh_rec;
    return g;
}

BiLstmParams BiLstmParams::init(std::size_t input_dim, std::size_t hidden_per_dir,
                                RngStream& rng) {
    BiLstmParams p;
    p.fwd = LstmParams::init(input_dim, hidden_per_dir, rng);
    p.bwd = LstmParams::init(input_dim, hidden_per_dir, rng);
    return p;
}

std::vector<Vector> bilstm_forward(const BiLstmParams& p, const std::vector<Vector>& inputs,
                                   BiLstmCache* cache) {
    if (inputs.empty()) throw std::invalid_argument("bilstm_forward: empty sequence");
    if (p.fwd.input_dim != p.bwd.input_dim || p.fwd.hidden_dim != p.bwd.hidden_dim) {
        throw std::invalid_argument("bilstm_forward: cell dimensions disagree");
    }
    const std::size_t n = inputs.size();

    std::vector<Vector> rev = reversed(inputs);
    const std::vector<Vector> out_f =
        lstm_forward(p.fwd, initial_state(p.fwd), inputs, cache != nullptr ? &cache->fwd : nullptr);
    const std::vector<Vector> out_b =
        lstm_forward(p.bwd, initial_state(p.bwd), rev, cache != nullptr ? &cache->bwd : nullptr);

    std::vector<Vector> outputs(n);
    const std::size_t h = p.fwd.hidden_dim;
    for (std::size_t t = 0; t < n; ++t) {
        outputs[t].resize(2 * h);
        std::copy(out_f[t].begin(), out_f[t].end(), outputs[t].begin());
        const Vector& omega = out_b[n - 1 - t];
        std::copy(omega.begin(), omega.end(), outputs[t].begin() + h);
    }
    if (cache != nullptr) cache->reversed_inputs = std::move(rev);
    return outputs;
}

BiLstmGradients bilstm_backward(const BiLstmParams& p, const std::vector<Vector>& inputs,
                                const BiLstmCache& cache, const std::vector<Vector>& upstream) {
    const std::size_t n = inputs.size();
    const std::size_t h = p.fwd.hidden_dim;
    if (upstream.size() != n || cache.fwd.steps.size() != n || cache.bwd.steps.size() != n) {
        throw std::invalid_argument("bilstm_backward: cache/sequence length mismatch");
    }

    std::vector<Vector> d_fwd(n), d_bwd(n);
    for (std::size_t t = 0; t < n; ++t) {
        if (upstream[t].size() != 2 * h) {
            throw std::invalid_argument("bilstm_backward: upstream dimension mismatch");
        }
        d_fwd[t].assign(upstream[t].begin(), upstream[t].begin() + h);
        // The backward cell saw the sequence reversed, so its upstream
        // gradient at reversed position n-1-t is the omega half at t.
        d_bwd[n - 1 - t].assign(upstream[t].begin() + h, upstream[t].end());
    }

    BiLstmGradients g(p);
    g.fwd = lstm_backward(p.fwd, inputs, initial_state(p.fwd), cache.fwd, d_fwd);
    g.bwd = lstm_backward(p.bwd, cache.reversed_inputs, initial_state(p.bwd), cache.bwd, d_bwd);
    return g;
}

}  // namespace phaselab

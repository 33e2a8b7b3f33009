#ifndef PHASELAB_ADAM_HPP
#define PHASELAB_ADAM_HPP

#include <cstdint>
#include <span>

#include "phaselab/matrix.hpp"

namespace phaselab {

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double weight_decay = 0.0;
};

// Moment buffers for one parameter block.
struct AdamState {
    AdamConfig config;
    std::int64_t step = 0;
    Vector m;
    Vector v;

    AdamState(const AdamConfig& cfg, std::size_t n);
};

// One Adam update with decoupled weight decay:
//   param -= lr * m_hat / (sqrt(v_hat) + eps) + lr * weight_decay * param
// The step counter is incremented before bias correction.
void adam_step(std::span<double> param, std::span<const double> grad, AdamState& state);

}  // namespace phaselab

#endif

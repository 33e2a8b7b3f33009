#include "phaselab/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace phaselab {

AdamState::AdamState(const AdamConfig& cfg, std::size_t n)
    : config(cfg), m(n, 0.0), v(n, 0.0) {
    if (cfg.beta1 <= 0.0 || cfg.beta1 >= 1.0 || cfg.beta2 <= 0.0 || cfg.beta2 >= 1.0) {
        throw std::invalid_argument("AdamState: betas must lie in (0, 1)");
    }
    if (cfg.epsilon <= 0.0) throw std::invalid_argument("AdamState: epsilon must be positive");
}

void adam_step(std::span<double> param, std::span<const double> grad, AdamState& state) {
    if (param.size() != grad.size() || param.size() != state.m.size()) {
        throw std::invalid_argument("adam_step: shape mismatch");
    }
    const AdamConfig& cfg = state.config;
    ++state.step;
    const double m_corr = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    const double v_corr = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    for (std::size_t k = 0; k < param.size(); ++k) {
        const double g = grad[k];
        state.m[k] = cfg.beta1 * state.m[k] + (1.0 - cfg.beta1) * g;
        state.v[k] = cfg.beta2 * state.v[k] + (1.0 - cfg.beta2) * g * g;
        const double m_hat = state.m[k] / m_corr;
        const double v_hat = state.v[k] / v_corr;
        param[k] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon) +
                    cfg.learning_rate * cfg.weight_decay * param[k];
    }
}

}  // namespace phaselab

#ifndef PHASELAB_PROJECTION_HPP
#define PHASELAB_PROJECTION_HPP

#include <vector>

#include "phaselab/matrix.hpp"
#include "phaselab/rng.hpp"

namespace phaselab {

// Fully connected layer turning per-timestep feature vectors into logits.
struct ProjectionParams {
    Matrix w;   // (n_classes, feature_dim)
    Vector b;

    static ProjectionParams init(std::size_t n_classes, std::size_t feature_dim, RngStream& rng);
    std::size_t n_classes() const { return w.rows; }
};

struct ProjectionGradients {
    Matrix w;
    Vector b;

    explicit ProjectionGradients(const ProjectionParams& p)
        : w(p.w.rows, p.w.cols), b(p.b.size(), 0.0) {}
};

// Inverted-dropout record of one forward pass: the per-timestep scale mask
// (0 or 1/(1-rate)) and the masked features the projection actually saw.
struct DropoutPlan {
    double rate = 0.0;
    std::vector<Vector> scale;
    std::vector<Vector> masked;
};

// s_t = w * x_t + b. When `training` and rate > 0, inverted dropout is
// applied to x_t first (kept activations scaled by 1/(1-rate)); `plan`
// records what backprop needs.
std::vector<Vector> project_logits(const ProjectionParams& p, const std::vector<Vector>& features,
                                   double dropout_rate, RngStream* rng, bool training,
                                   DropoutPlan* plan);

// Accumulates dL/dw, dL/db and returns dL/dfeatures (through the dropout
// mask of `plan`, which must come from the matching forward pass).
std::vector<Vector> project_backward(const ProjectionParams& p, const std::vector<Vector>& features,
                                     const DropoutPlan& plan,
                                     const std::vector<Vector>& upstream_ds,
                                     ProjectionGradients& grads);

}  // namespace phaselab

#endif

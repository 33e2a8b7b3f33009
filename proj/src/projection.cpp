#include "phaselab/projection.hpp"

#include <cmath>
#include <stdexcept>

namespace phaselab {

ProjectionParams ProjectionParams::init(std::size_t n_classes, std::size_t feature_dim,
                                        RngStream& rng) {
    if (n_classes == 0 || feature_dim == 0) {
        throw std::invalid_argument("ProjectionParams::init: dimensions must be positive");
    }
    ProjectionParams p;
    const double bound = 1.0 / std::sqrt(static_cast<double>(feature_dim));
    p.w = Matrix(n_classes, feature_dim);
    for (double& x : p.w.data) x = rng.uniform(-bound, bound);
    p.b.assign(n_classes, 0.0);
    return p;
}

std::vector<Vector> project_logits(const ProjectionParams& p, const std::vector<Vector>& features,
                                   double dropout_rate, RngStream* rng, bool training,
                                   DropoutPlan* plan) {
    if (dropout_rate < 0.0 || dropout_rate >= 1.0) {
        throw std::invalid_argument("project_logits: dropout rate must lie in [0, 1)");
    }
    const bool drop = training && dropout_rate > 0.0;
    if (drop && rng == nullptr) {
        throw std::invalid_argument("project_logits: dropout requires an rng");
    }
    if (plan != nullptr) {
        plan->rate = drop ? dropout_rate : 0.0;
        plan->scale.clear();
        plan->masked.clear();
    }

    std::vector<Vector> logits(features.size());
    const double keep_scale = drop ? 1.0 / (1.0 - dropout_rate) : 1.0;
    for (std::size_t t = 0; t < features.size(); ++t) {
        const Vector& x = features[t];
        if (x.size() != p.w.cols) {
            throw std::invalid_argument("project_logits: feature dimension mismatch");
        }
        if (drop) {
            Vector scale(x.size());
            Vector masked(x.size());
            for (std::size_t k = 0; k < x.size(); ++k) {
                scale[k] = rng->uniform() < dropout_rate ? 0.0 : keep_scale;
                masked[k] = x[k] * scale[k];
            }
            logits[t] = p.b;
            matvec_add(p.w, masked, logits[t]);
            if (plan != nullptr) {
                plan->scale.push_back(std::move(scale));
                plan->masked.push_back(std::move(masked));
            }
        } else {
            logits[t] = p.b;
            matvec_add(p.w, x, logits[t]);
        }
    }
    return logits;
}

std::vector<Vector> project_backward(const ProjectionParams& p, const std::vector<Vector>& features,
                                     const DropoutPlan& plan,
                                     const std::vector<Vector>& upstream_ds,
                                     ProjectionGradients& grads) {
    if (upstream_ds.size() != features.size()) {
        throw std::invalid_argument("project_backward: sequence length mismatch");
    }
    const bool dropped = plan.rate > 0.0;
    if (dropped && plan.scale.size() != features.size()) {
        throw std::invalid_argument("project_backward: dropout plan does not match sequence");
    }

    std::vector<Vector> d_features(features.size());
    for (std::size_t t = 0; t < features.size(); ++t) {
        const Vector& seen = dropped ? plan.masked[t] : features[t];
        outer_add(grads.w, upstream_ds[t], seen);
        axpy(1.0, upstream_ds[t], grads.b);

        d_features[t].assign(features[t].size(), 0.0);
        matvec_transposed_add(p.w, upstream_ds[t], d_features[t]);
        if (dropped) {
            for (std::size_t k = 0; k < d_features[t].size(); ++k) {
                d_features[t][k] *= plan.scale[t][k];
            }
        }
    }
    return d_features;
}

}  // namespace phaselab

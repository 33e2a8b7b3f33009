#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "phaselab/crf.hpp"
#include "phaselab/gradcheck.hpp"
#include "phaselab/lstm.hpp"
#include "phaselab/projection.hpp"
#include "phaselab/rng.hpp"

using namespace phaselab;

namespace {

std::vector<Vector> random_sequence(std::size_t n, std::size_t dim, RngStream& rng,
                                    double scale = 1.0) {
    std::vector<Vector> seq(n, Vector(dim));
    for (Vector& v : seq) {
        for (double& x : v) x = rng.uniform(-scale, scale);
    }
    return seq;
}

LstmParams zero_params(std::size_t input_dim, std::size_t hidden) {
    RngStream rng(1);
    LstmParams p = LstmParams::init(input_dim, hidden, rng);
    std::fill(p.w_in.data.begin(), p.w_in.data.end(), 0.0);
    std::fill(p.w_rec.data.begin(), p.w_rec.data.end(), 0.0);
    std::fill(p.bias.begin(), p.bias.end(), 0.0);
    std::fill(p.c0.begin(), p.c0.end(), 0.0);
    std::fill(p.h0.begin(), p.h0.end(), 0.0);
    return p;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

TEST_CASE("zero-parameter cell is a fixed point") {
    const LstmParams p = zero_params(3, 4);
    LstmState prev{Vector(4, 0.0), Vector(4, 0.0)};
    LstmState next;
    LstmStepCache cache;
    const Vector out = lstm_cell_forward(p, Vector{1.0, -2.0, 0.5}, prev, next, &cache);
    for (double x : out) CHECK(x == 0.0);
    for (double x : next.c) CHECK(x == 0.0);
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(cache.gates[k] == 0.5);          // input gate
        CHECK(cache.gates[4 + k] == 0.5);      // forget gate
        CHECK(cache.gates[8 + k] == 0.0);      // candidate
        CHECK(cache.gates[12 + k] == 0.5);     // output gate
    }
}

TEST_CASE("zero weights halve the carried cell state") {
    const LstmParams p = zero_params(2, 3);
    const Vector c = {0.4, -1.2, 2.0};
    LstmState prev{c, Vector(3, 0.0)};
    LstmState next;
    const Vector out = lstm_cell_forward(p, Vector{0.0, 0.0}, prev, next, nullptr);
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(next.c[k] == doctest::Approx(0.5 * c[k]).epsilon(1e-15));
        CHECK(out[k] == doctest::Approx(0.5 * std::tanh(0.5 * c[k])).epsilon(1e-15));
    }
}

TEST_CASE("cell validates dimensions") {
    RngStream rng(3);
    const LstmParams p = LstmParams::init(3, 4, rng);
    LstmState prev = initial_state(p);
    LstmState next;
    CHECK_THROWS_AS(lstm_cell_forward(p, Vector{1.0}, prev, next, nullptr),
                    std::invalid_argument);
}

TEST_CASE("lstm_forward equals composed cell steps and honors prefixes") {
    RngStream rng(5);
    const LstmParams p = LstmParams::init(3, 4, rng);
    const auto inputs = random_sequence(6, 3, rng);

    const auto outputs = lstm_forward(p, initial_state(p), inputs, nullptr);

    LstmState state = initial_state(p);
    for (std::size_t t = 0; t < inputs.size(); ++t) {
        LstmState next;
        const Vector h = lstm_cell_forward(p, inputs[t], state, next, nullptr);
        CHECK(h == outputs[t]);
        state = next;
    }

    const std::vector<Vector> prefix(inputs.begin(), inputs.begin() + 3);
    const auto prefix_out = lstm_forward(p, initial_state(p), prefix, nullptr);
    for (std::size_t t = 0; t < prefix.size(); ++t) CHECK(prefix_out[t] == outputs[t]);

    CHECK_THROWS_AS(lstm_forward(p, initial_state(p), {}, nullptr), std::invalid_argument);
}

TEST_CASE("zero-parameter lstm produces zero outputs") {
    const LstmParams p = zero_params(2, 3);
    RngStream rng(7);
    const auto outputs = lstm_forward(p, initial_state(p), random_sequence(5, 2, rng), nullptr);
    for (const Vector& h : outputs) {
        for (double x : h) CHECK(x == 0.0);
    }
}

TEST_CASE("causality: perturbing an input only moves later outputs") {
    RngStream rng(11);
    const LstmParams p = LstmParams::init(3, 5, rng);
    auto inputs = random_sequence(8, 3, rng);
    const auto base = lstm_forward(p, initial_state(p), inputs, nullptr);

    const std::size_t k = 3;
    inputs[k][1] += 0.37;
    const auto bumped = lstm_forward(p, initial_state(p), inputs, nullptr);
    for (std::size_t t = 0; t < k; ++t) CHECK(base[t] == bumped[t]);
    CHECK(base[k] != bumped[k]);
}

TEST_CASE("gate ranges hold on random passes") {
    RngStream rng(13);
    const LstmParams p = LstmParams::init(4, 6, rng);
    const auto inputs = random_sequence(10, 4, rng, 2.0);
    LstmSequenceCache cache;
    lstm_forward(p, initial_state(p), inputs, &cache);
    for (const LstmStepCache& step : cache.steps) {
        for (std::size_t k = 0; k < 6; ++k) {
            CHECK(step.gates[k] > 0.0);
            CHECK(step.gates[k] < 1.0);
            CHECK(step.gates[6 + k] > 0.0);
            CHECK(step.gates[6 + k] < 1.0);
            CHECK(step.gates[12 + k] > -1.0);
            CHECK(step.gates[12 + k] < 1.0);
            CHECK(step.gates[18 + k] > 0.0);
            CHECK(step.gates[18 + k] < 1.0);
            CHECK(std::abs(step.tanh_c[k]) < 1.0);
        }
    }
}

TEST_CASE("zero-parameter bilstm produces zero outputs") {
    BiLstmParams p;
    p.fwd = zero_params(2, 3);
    p.bwd = zero_params(2, 3);
    RngStream rng(15);
    const auto outputs = bilstm_forward(p, random_sequence(4, 2, rng), nullptr);
    for (const Vector& v : outputs) {
        CHECK(v.size() == 6);
        for (double x : v) CHECK(x == 0.0);
    }
}

TEST_CASE("projection rejects mismatched feature dimensions") {
    RngStream rng(16);
    const ProjectionParams p = ProjectionParams::init(3, 4, rng);
    const std::vector<Vector> wrong = {Vector(5, 0.0)};
    CHECK_THROWS_AS(project_logits(p, wrong, 0.0, nullptr, false, nullptr),
                    std::invalid_argument);
}

TEST_CASE("bilstm output stitches the two directions") {
    RngStream rng(17);
    const BiLstmParams p = BiLstmParams::init(3, 4, rng);
    const auto inputs = random_sequence(6, 3, rng);
    const auto outputs = bilstm_forward(p, inputs, nullptr);

    const auto fwd = lstm_forward(p.fwd, initial_state(p.fwd), inputs, nullptr);
    const std::vector<Vector> rev(inputs.rbegin(), inputs.rend());
    const auto bwd = lstm_forward(p.bwd, initial_state(p.bwd), rev, nullptr);
    for (std::size_t t = 0; t < inputs.size(); ++t) {
        for (std::size_t k = 0; k < 4; ++k) {
            CHECK(outputs[t][k] == fwd[t][k]);
            CHECK(outputs[t][4 + k] == bwd[inputs.size() - 1 - t][k]);
        }
    }
}

TEST_CASE("bilstm on a single step applies both cells to the initial states") {
    RngStream rng(19);
    const BiLstmParams p = BiLstmParams::init(3, 4, rng);
    const auto inputs = random_sequence(1, 3, rng);
    const auto outputs = bilstm_forward(p, inputs, nullptr);

    LstmState nf, nb;
    const Vector o0 = lstm_cell_forward(p.fwd, inputs[0], initial_state(p.fwd), nf, nullptr);
    const Vector w0 = lstm_cell_forward(p.bwd, inputs[0], initial_state(p.bwd), nb, nullptr);
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(outputs[0][k] == o0[k]);
        CHECK(outputs[0][4 + k] == w0[k]);
    }
}

TEST_CASE("bilstm anticausality: the omega half only reacts to earlier-or-equal steps") {
    RngStream rng(23);
    const BiLstmParams p = BiLstmParams::init(2, 3, rng);
    auto inputs = random_sequence(7, 2, rng);
    const auto base = bilstm_forward(p, inputs, nullptr);

    const std::size_t k = 4;
    inputs[k][0] += 0.21;
    const auto bumped = bilstm_forward(p, inputs, nullptr);
    for (std::size_t t = 0; t < inputs.size(); ++t) {
        const bool omega_equal =
            std::equal(base[t].begin() + 3, base[t].end(), bumped[t].begin() + 3);
        CHECK(omega_equal == (t > k));
    }
}

TEST_CASE("bilstm reversal symmetry is exact") {
    RngStream rng(29);
    const BiLstmParams p = BiLstmParams::init(3, 4, rng);
    const auto inputs = random_sequence(6, 3, rng);
    const auto outputs = bilstm_forward(p, inputs, nullptr);

    BiLstmParams swapped;
    swapped.fwd = p.bwd;
    swapped.bwd = p.fwd;
    const std::vector<Vector> rev(inputs.rbegin(), inputs.rend());
    const auto rev_out = bilstm_forward(swapped, rev, nullptr);

    const std::size_t n = inputs.size();
    for (std::size_t t = 0; t < n; ++t) {
        for (std::size_t k = 0; k < 4; ++k) {
            CHECK(rev_out[t][k] == outputs[n - 1 - t][4 + k]);
            CHECK(rev_out[t][4 + k] == outputs[n - 1 - t][k]);
        }
    }
}

TEST_CASE("projection with an identity block passes features through") {
    ProjectionParams p;
    p.w = Matrix(3, 5);
    for (std::size_t k = 0; k < 3; ++k) p.w(k, k) = 1.0;
    p.b.assign(3, 0.0);
    const std::vector<Vector> features = {{1.0, 2.0, 3.0, 4.0, 5.0}};
    const auto logits = project_logits(p, features, 0.0, nullptr, false, nullptr);
    CHECK(logits[0] == Vector{1.0, 2.0, 3.0});
}

TEST_CASE("zero dropout behaves identically in both modes") {
    RngStream rng(31);
    ProjectionParams p = ProjectionParams::init(3, 4, rng);
    const auto features = random_sequence(5, 4, rng);
    RngStream drop_rng(1);
    const auto train_mode = project_logits(p, features, 0.0, &drop_rng, true, nullptr);
    const auto infer_mode = project_logits(p, features, 0.0, nullptr, false, nullptr);
    CHECK(train_mode == infer_mode);
}

TEST_CASE("inverted dropout is unbiased") {
    RngStream rng(37);
    ProjectionParams p = ProjectionParams::init(2, 6, rng);
    const std::vector<Vector> features = {Vector{0.9, -1.4, 2.2, 0.6, -0.3, 1.1}};
    const auto reference = project_logits(p, features, 0.0, nullptr, false, nullptr);

    RngStream drop_rng(99);
    Vector mean(2, 0.0);
    const int rounds = 10000;
    for (int r = 0; r < rounds; ++r) {
        const auto logits = project_logits(p, features, 0.3, &drop_rng, true, nullptr);
        for (std::size_t k = 0; k < 2; ++k) mean[k] += logits[0][k];
    }
    for (std::size_t k = 0; k < 2; ++k) {
        mean[k] /= rounds;
        CHECK(std::abs(mean[k] - reference[0][k]) <
              0.02 * std::max(1.0, std::abs(reference[0][k])));
    }
}

TEST_CASE("zero upstream gradients produce zero parameter gradients") {
    RngStream rng(41);
    const LstmParams p = LstmParams::init(3, 4, rng);
    const auto inputs = random_sequence(5, 3, rng);
    LstmSequenceCache cache;
    lstm_forward(p, initial_state(p), inputs, &cache);
    const std::vector<Vector> upstream(5, Vector(4, 0.0));
    const LstmGradients g = lstm_backward(p, inputs, initial_state(p), cache, upstream);
    for (double x : g.w_in.data) CHECK(x == 0.0);
    for (double x : g.w_rec.data) CHECK(x == 0.0);
    for (double x : g.bias) CHECK(x == 0.0);
    for (double x : g.c0) CHECK(x == 0.0);
    for (double x : g.h0) CHECK(x == 0.0);
}

TEST_CASE("single-step backprop matches the hand-derived cell differential") {
    RngStream rng(43);
    const std::size_t d = 2, h = 3;
    const LstmParams p = LstmParams::init(d, h, rng);
    const auto inputs = random_sequence(1, d, rng);
    Vector u(h);
    for (double& x : u) x = rng.uniform(-1.0, 1.0);  // L = sum_k u_k h_k

    LstmSequenceCache cache;
    lstm_forward(p, initial_state(p), inputs, &cache);
    const LstmGradients g = lstm_backward(p, inputs, initial_state(p), cache, {u});

    // Recompute the single application from scratch.
    Vector pre(4 * h);
    for (std::size_t r = 0; r < 4 * h; ++r) {
        double acc = p.bias[r];
        for (std::size_t k = 0; k < d; ++k) acc += p.w_in(r, k) * inputs[0][k];
        for (std::size_t k = 0; k < h; ++k) acc += p.w_rec(r, k) * p.h0[k];
        pre[r] = acc;
    }
    for (std::size_t k = 0; k < h; ++k) {
        const double gi = sigmoid(pre[k]);
        const double gf = sigmoid(pre[h + k]);
        const double gg = std::tanh(pre[2 * h + k]);
        const double go = sigmoid(pre[3 * h + k]);
        const double c = gf * p.c0[k] + gi * gg;
        const double tc = std::tanh(c);

        const double dc = u[k] * go * (1.0 - tc * tc);
        const double da_i = dc * gg * gi * (1.0 - gi);
        const double da_f = dc * p.c0[k] * gf * (1.0 - gf);
        const double da_g = dc * gi * (1.0 - gg * gg);
        const double da_o = u[k] * tc * go * (1.0 - go);

        CHECK(g.bias[k] == doctest::Approx(da_i).epsilon(1e-12));
        CHECK(g.bias[h + k] == doctest::Approx(da_f).epsilon(1e-12));
        CHECK(g.bias[2 * h + k] == doctest::Approx(da_g).epsilon(1e-12));
        CHECK(g.bias[3 * h + k] == doctest::Approx(da_o).epsilon(1e-12));
        for (std::size_t j = 0; j < d; ++j) {
            CHECK(g.w_in(k, j) == doctest::Approx(da_i * inputs[0][j]).epsilon(1e-12));
        }
        CHECK(g.c0[k] == doctest::Approx(dc * gf).epsilon(1e-12));
    }
}

TEST_CASE("lstm gradients pass finite differences over a short sequence") {
    RngStream rng(47);
    LstmParams p = LstmParams::init(3, 4, rng);
    const auto inputs = random_sequence(3, 3, rng);
    auto upstream = random_sequence(3, 4, rng);

    const auto loss = [&] {
        const auto outputs = lstm_forward(p, initial_state(p), inputs, nullptr);
        double total = 0.0;
        for (std::size_t t = 0; t < outputs.size(); ++t) {
            for (std::size_t k = 0; k < outputs[t].size(); ++k) {
                total += upstream[t][k] * outputs[t][k];
            }
        }
        return total;
    };

    LstmSequenceCache cache;
    lstm_forward(p, initial_state(p), inputs, &cache);
    const LstmGradients g = lstm_backward(p, inputs, initial_state(p), cache, upstream);

    CHECK(finite_diff_check(loss, p.w_in.flat(), g.w_in.flat()) < 1e-6);
    CHECK(finite_diff_check(loss, p.w_rec.flat(), g.w_rec.flat()) < 1e-6);
    CHECK(finite_diff_check(loss, p.bias, g.bias) < 1e-6);
    CHECK(finite_diff_check(loss, p.c0, g.c0) < 1e-6);
    CHECK(finite_diff_check(loss, p.h0, g.h0) < 1e-6);
}

TEST_CASE("full model gradients (biLSTM, projection, CRF NLL) pass finite differences") {
    RngStream rng(53);
    const std::size_t d = 3, h = 4, c = 3, n = 6;
    BiLstmParams p = BiLstmParams::init(d, h, rng);
    ProjectionParams proj = ProjectionParams::init(c, 2 * h, rng);
    Matrix theta(c, c);
    for (double& x : theta.data) x = rng.uniform(-0.5, 0.5);
    const auto inputs = random_sequence(n, d, rng);
    TagSequence truth(n);
    for (int& y : truth) y = static_cast<int>(rng.below(c));

    const auto loss = [&] {
        const auto outputs = bilstm_forward(p, inputs, nullptr);
        const auto logits = project_logits(proj, outputs, 0.0, nullptr, false, nullptr);
        return crf_nll(logits, truth, theta).loss;
    };

    BiLstmCache cache;
    const auto outputs = bilstm_forward(p, inputs, &cache);
    const auto logits = project_logits(proj, outputs, 0.0, nullptr, false, nullptr);
    const CrfNllResult nll = crf_nll(logits, truth, theta);
    ProjectionGradients pg(proj);
    const auto d_feat = project_backward(proj, outputs, DropoutPlan{}, nll.d_logits, pg);
    const BiLstmGradients g = bilstm_backward(p, inputs, cache, d_feat);

    CHECK(finite_diff_check(loss, theta.flat(), nll.d_theta.flat()) < 1e-6);
    CHECK(finite_diff_check(loss, proj.w.flat(), pg.w.flat()) < 1e-6);
    CHECK(finite_diff_check(loss, proj.b, pg.b) < 1e-6);
    for (LstmParams* cell : {&p.fwd, &p.bwd}) {
        const LstmGradients& cg = cell == &p.fwd ? g.fwd : g.bwd;
        CHECK(finite_diff_check(loss, cell->w_in.flat(), cg.w_in.flat()) < 1e-6);
        CHECK(finite_diff_check(loss, cell->w_rec.flat(), cg.w_rec.flat()) < 1e-6);
        CHECK(finite_diff_check(loss, cell->bias, cg.bias) < 1e-6);
        CHECK(finite_diff_check(loss, cell->c0, cg.c0) < 1e-6);
        CHECK(finite_diff_check(loss, cell->h0, cg.h0) < 1e-6);
    }
}

TEST_CASE("backprop validates cache lengths") {
    RngStream rng(59);
    const LstmParams p = LstmParams::init(2, 3, rng);
    const auto inputs = random_sequence(4, 2, rng);
    LstmSequenceCache cache;
    lstm_forward(p, initial_state(p), inputs, &cache);
    const std::vector<Vector> short_upstream(3, Vector(3, 0.0));
    CHECK_THROWS_AS(lstm_backward(p, inputs, initial_state(p), cache, short_upstream),
                    std::invalid_argument);
}

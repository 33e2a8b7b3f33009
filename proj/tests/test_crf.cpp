#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "phaselab/crf.hpp"
#include "phaselab/gradcheck.hpp"
#include "phaselab/rng.hpp"

using namespace phaselab;

namespace {

struct RandomInstance {
    LogitSequence logits;
    Matrix theta;
    TagSequence truth;
};

RandomInstance random_instance(std::size_t n_classes, std::size_t n_steps, RngStream& rng,
                               double scale = 2.0) {
    RandomInstance inst;
    inst.logits.assign(n_steps, Vector(n_classes));
    for (Vector& s : inst.logits) {
        for (double& x : s) x = rng.uniform(-scale, scale);
    }
    inst.theta = Matrix(n_classes, n_classes);
    for (double& x : inst.theta.data) x = rng.uniform(-scale, scale);
    inst.truth.resize(n_steps);
    for (int& y : inst.truth) y = static_cast<int>(rng.below(n_classes));
    return inst;
}

double softmax_ce_sum(const LogitSequence& logits, const TagSequence& truth) {
    double total = 0.0;
    for (std::size_t t = 0; t < logits.size(); ++t) {
        total += log_sum_exp(logits[t]) - logits[t][truth[t]];
    }
    return total;
}

}  // namespace

TEST_CASE("crf_score evaluates the emission and transition sums") {
    const Matrix zero_theta(2, 2);
    // All-zero inputs score zero for any tags.
    LogitSequence zeros(4, Vector(2, 0.0));
    CHECK(crf_score(zeros, {0, 1, 1, 0}, zero_theta) == 0.0);

    // Single step: no transition term.
    LogitSequence single = {{0.5, -0.2}};
    Matrix any_theta(2, 2);
    any_theta.data = {9.0, -9.0, 4.0, 4.0};
    CHECK(crf_score(single, {0}, any_theta) == doctest::Approx(0.5).epsilon(1e-15));

    LogitSequence two = {{1.0, 0.0}, {0.0, 1.0}};
    Matrix theta(2, 2);
    theta.data = {0.2, 0.3, 0.1, 0.4};
    CHECK(crf_score(two, {0, 1}, theta) == doctest::Approx(2.3).epsilon(1e-15));
}

TEST_CASE("crf_score validates tags") {
    const LogitSequence s = {{0.0, 0.0}};
    const Matrix theta(2, 2);
    CHECK_THROWS_AS(crf_score(s, {2}, theta), std::invalid_argument);
    CHECK_THROWS_AS(crf_score(s, {0, 0}, theta), std::invalid_argument);
}

TEST_CASE("crf_log_partition on tiny uniform instances") {
    const Matrix theta(2, 2);
    CHECK(crf_log_partition({{0.0, 0.0}}, theta) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(crf_log_partition({{0.0, 0.0}, {0.0, 0.0}}, theta) ==
          doctest::Approx(std::log(4.0)).epsilon(1e-12));
}

TEST_CASE("crf_log_partition matches enumeration") {
    RngStream rng(101);
    for (int round = 0; round < 20; ++round) {
        const auto inst = random_instance(3, 5, rng);
        const auto oracle = brute_force_oracle(inst.logits, inst.theta);
        CHECK(std::abs(crf_log_partition(inst.logits, inst.theta) - oracle.log_partition) < 1e-10);
    }
}

TEST_CASE("crf_nll loss values and the binary logistic reduction") {
    // Uniform instance: loss is the log number of sequences.
    const Matrix theta(3, 3);
    LogitSequence zeros(4, Vector(3, 0.0));
    const auto uniform = crf_nll(zeros, {0, 1, 2, 0}, theta);
    CHECK(uniform.loss == doctest::Approx(4.0 * std::log(3.0)).epsilon(1e-12));

    const double a = 0.7, b = -0.4;
    const Matrix theta2(2, 2);
    const auto binary = crf_nll({{a, b}}, {0}, theta2);
    // d/ds = (marginal - indicator) = (-sigma(b-a), +sigma(b-a)); the two
    // entries cancel because the marginals sum to one.
    const double sig = 1.0 / (1.0 + std::exp(a - b));
    CHECK(binary.loss == doctest::Approx(std::log(1.0 + std::exp(b - a))).epsilon(1e-12));
    CHECK(binary.d_logits[0][0] == doctest::Approx(-sig).epsilon(1e-12));
    CHECK(binary.d_logits[0][1] == doctest::Approx(sig).epsilon(1e-12));
}

TEST_CASE("crf_nll gradients pass finite differences") {
    RngStream rng(103);
    auto inst = random_instance(3, 6, rng);
    const CrfNllResult nll = crf_nll(inst.logits, inst.truth, inst.theta);

    const auto f = [&] { return crf_nll(inst.logits, inst.truth, inst.theta).loss; };
    CHECK(finite_diff_check(f, inst.theta.flat(), nll.d_theta.flat()) < 1e-7);
    for (std::size_t t = 0; t < inst.logits.size(); ++t) {
        CHECK(finite_diff_check(f, inst.logits[t], nll.d_logits[t]) < 1e-7);
    }
}

TEST_CASE("crf_nll properties: nonnegative loss, zero-sum logit gradients") {
    RngStream rng(107);
    for (int round = 0; round < 20; ++round) {
        const auto inst = random_instance(2 + rng.below(3), 1 + rng.below(6), rng);
        const auto nll = crf_nll(inst.logits, inst.truth, inst.theta);
        CHECK(nll.loss >= 0.0);
        for (const Vector& ds : nll.d_logits) {
            double sum = 0.0;
            for (double x : ds) sum += x;
            CHECK(std::abs(sum) < 1e-10);
        }
    }
}

TEST_CASE("viterbi with zero transitions is the framewise argmax") {
    RngStream rng(109);
    const auto inst = random_instance(4, 7, rng);
    const Matrix zero_theta(4, 4);
    const auto result = viterbi_decode(inst.logits, zero_theta);
    for (std::size_t t = 0; t < inst.logits.size(); ++t) {
        const auto& s = inst.logits[t];
        const int arg = static_cast<int>(std::max_element(s.begin(), s.end()) - s.begin());
        CHECK(result.tags[t] == arg);
    }
    CHECK(result.score == doctest::Approx(crf_score(inst.logits, result.tags, zero_theta))
                              .epsilon(1e-12));
}

TEST_CASE("viterbi with forbidding transitions stays in one class") {
    RngStream rng(113);
    const std::size_t c = 3, n = 6;
    auto inst = random_instance(c, n, rng);
    Matrix theta(c, c, -1e6);
    for (std::size_t k = 0; k < c; ++k) theta(k, k) = 0.0;
    const auto result = viterbi_decode(inst.logits, theta);

    Vector totals(c, 0.0);
    for (const Vector& s : inst.logits) {
        for (std::size_t k = 0; k < c; ++k) totals[k] += s[k];
    }
    const int best = static_cast<int>(std::max_element(totals.begin(), totals.end()) -
                                      totals.begin());
    for (int y : result.tags) CHECK(y == best);
}

TEST_CASE("viterbi matches enumeration") {
    RngStream rng(127);
    for (int round = 0; round < 20; ++round) {
        const auto inst = random_instance(3, 7, rng);
        const auto oracle = brute_force_oracle(inst.logits, inst.theta);
        const auto result = viterbi_decode(inst.logits, inst.theta);
        CHECK(std::abs(result.score - oracle.best_score) < 1e-10);
        // Continuous random scores: the maximum is unique, so paths agree.
        CHECK(result.tags == oracle.best);
    }
}

TEST_CASE("viterbi ties break toward the lowest class") {
    // Symmetric instance: every sequence scores identically.
    const LogitSequence s(3, Vector(3, 1.0));
    const Matrix theta(3, 3, 0.5);
    const auto result = viterbi_decode(s, theta);
    CHECK(result.tags == TagSequence{0, 0, 0});
}

TEST_CASE("brute force oracle on factorized chains") {
    RngStream rng(131);
    const auto inst = random_instance(3, 4, rng);
    const Matrix zero_theta(3, 3);
    const auto oracle = brute_force_oracle(inst.logits, zero_theta);
    for (std::size_t t = 0; t < inst.logits.size(); ++t) {
        const double z = log_sum_exp(inst.logits[t]);
        for (std::size_t k = 0; k < 3; ++k) {
            CHECK(oracle.unary[t][k] ==
                  doctest::Approx(std::exp(inst.logits[t][k] - z)).epsilon(1e-10));
        }
    }

    const auto single = brute_force_oracle({inst.logits[0]}, zero_theta);
    CHECK(single.log_partition ==
          doctest::Approx(log_sum_exp(inst.logits[0])).epsilon(1e-12));

    // The best sequence's probability never exceeds one.
    const auto full = brute_force_oracle(inst.logits, inst.theta);
    CHECK(full.best_score - full.log_partition <= 1e-12);
}

TEST_CASE("brute force oracle refuses oversized instances") {
    const LogitSequence s(30, Vector(4, 0.0));
    const Matrix theta(4, 4);
    CHECK_THROWS_AS(brute_force_oracle(s, theta), std::invalid_argument);
}

TEST_CASE("shift invariance of partition, scores and decoding") {
    RngStream rng(137);
    auto inst = random_instance(3, 5, rng);
    const double base_z = crf_log_partition(inst.logits, inst.theta);
    const auto base_best = viterbi_decode(inst.logits, inst.theta);
    const double base_score = crf_score(inst.logits, inst.truth, inst.theta);

    const double c = 7.5;
    const std::size_t shifted_t = 2;
    for (double& x : inst.logits[shifted_t]) x += c;
    CHECK(crf_log_partition(inst.logits, inst.theta) ==
          doctest::Approx(base_z + c).epsilon(1e-12));
    CHECK(crf_score(inst.logits, inst.truth, inst.theta) ==
          doctest::Approx(base_score + c).epsilon(1e-12));
    CHECK(viterbi_decode(inst.logits, inst.theta).tags == base_best.tags);
}

TEST_CASE("marginals normalize and stay consistent") {
    RngStream rng(139);
    for (int round = 0; round < 10; ++round) {
        const auto inst = random_instance(3, 6, rng);
        const auto marg = crf_marginals(inst.logits, inst.theta);
        for (const Vector& u : marg.unary) {
            double sum = 0.0;
            for (double p : u) sum += p;
            CHECK(std::abs(sum - 1.0) < 1e-10);
        }
        // Pairwise marginals collapse to the unary ones on both sides.
        for (std::size_t t = 0; t + 1 < inst.logits.size(); ++t) {
            for (std::size_t i = 0; i < 3; ++i) {
                double row = 0.0, col = 0.0;
                for (std::size_t j = 0; j < 3; ++j) {
                    row += marg.pairwise[t](i, j);
                    col += marg.pairwise[t](j, i);
                }
                CHECK(std::abs(row - marg.unary[t][i]) < 1e-10);
                CHECK(std::abs(col - marg.unary[t + 1][i]) < 1e-10);
            }
        }

        // The decoded path has probability in (0, 1].
        const auto best = viterbi_decode(inst.logits, inst.theta);
        const double p = std::exp(best.score - marg.log_partition);
        CHECK(p > 0.0);
        CHECK(p <= 1.0 + 1e-12);
    }
}

TEST_CASE("zero transitions reduce the NLL to summed softmax cross-entropy") {
    RngStream rng(149);
    for (int round = 0; round < 20; ++round) {
        const auto inst = random_instance(2 + rng.below(3), 1 + rng.below(7), rng);
        const Matrix zero_theta(inst.theta.rows, inst.theta.cols);
        const auto nll = crf_nll(inst.logits, inst.truth, zero_theta);
        CHECK(std::abs(nll.loss - softmax_ce_sum(inst.logits, inst.truth)) < 1e-10);
    }
}

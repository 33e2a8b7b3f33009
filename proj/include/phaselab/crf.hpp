#ifndef PHASELAB_CRF_HPP
#define PHASELAB_CRF_HPP

#include <vector>

#include "phaselab/matrix.hpp"

namespace phaselab {

// Per-timestep logit vectors s_0..s_T, each of length n_classes.
using LogitSequence = std::vector<Vector>;

// Tags y_0..y_T, each in [0, n_classes).
using TagSequence = std::vector<int>;

// Square matrix of transition scores: theta(i, j) scores moving from class
// i at step t to class j at step t+1.
using TransitionMatrix = Matrix;

// Sequence score: sum_t s_t[y_t] + sum_t theta(y_t, y_{t+1}).
double crf_score(const LogitSequence& logits, const TagSequence& tags,
                 const TransitionMatrix& theta);

// log sum over all n_classes^(T+1) tag sequences of exp(score), computed by
// the forward recursion in log space.
double crf_log_partition(const LogitSequence& logits, const TransitionMatrix& theta);

struct CrfMarginals {
    double log_partition = 0.0;
    std::vector<Vector> unary;     // unary[t][k] = P(y_t = k)
    std::vector<Matrix> pairwise;  // pairwise[t](i,j) = P(y_t = i, y_{t+1} = j), t < T
};

CrfMarginals crf_marginals(const LogitSequence& logits, const TransitionMatrix& theta);

struct CrfNllResult {
    double loss = 0.0;                 // log_partition - score(truth)
    std::vector<Vector> d_logits;      // marginal minus truth indicator
    Matrix d_theta;                    // expected minus observed transition counts
};

// Negative log likelihood of the true tags and its exact gradients via
// forward-backward.
CrfNllResult crf_nll(const LogitSequence& logits, const TagSequence& truth,
                     const TransitionMatrix& theta);

struct ViterbiResult {
    TagSequence tags;
    double score = 0.0;
};

// Highest scoring tag sequence by max-product dynamic programming. Ties at
// every decision break toward the lowest class index.
ViterbiResult viterbi_decode(const LogitSequence& logits, const TransitionMatrix& theta);

struct BruteForceResult {
    TagSequence best;
    double best_score = 0.0;
    double second_best_score = 0.0;  // best over all other sequences
    double log_partition = 0.0;
    std::vector<Vector> unary;
    std::vector<Matrix> pairwise;

    bool unique_maximum(double gap = 1e-9) const { return best_score - second_best_score > gap; }
};

// Literal enumeration over every tag sequence; refuses instances with more
// than 10^6 sequences. Testing oracle only, independent of the recursions
// above.
BruteForceResult brute_force_oracle(const LogitSequence& logits, const TransitionMatrix& theta);

}  // namespace phaselab

#endif

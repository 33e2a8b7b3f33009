#include "phaselab/crf.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace phaselab {

namespace {

std::size_t validated_n_classes(const LogitSequence& logits, const TransitionMatrix& theta) {
    if (logits.empty()) throw std::invalid_argument("crf: empty logit sequence");
    if (theta.rows != theta.cols || theta.rows < 2) {
        throw std::invalid_argument("crf: transition matrix must be square with n_classes >= 2");
    }
    const std::size_t c = theta.rows;
    for (const Vector& s : logits) {
        if (s.size() != c) {
            throw std::invalid_argument("crf: logit vector length does not match n_classes");
        }
    }
    return c;
}

void validate_tags(const TagSequence& tags, std::size_t n_steps, std::size_t n_classes) {
    if (tags.size() != n_steps) throw std::invalid_argument("crf: tag/logit length mismatch");
    for (int y : tags) {
        if (y < 0 || static_cast<std::size_t>(y) >= n_classes) {
            throw std::invalid_argument("crf: tag out of range: " + std::to_string(y));
        }
    }
}

// alpha[t][j] = log sum over prefixes ending in class j at step t.
std::vector<Vector> forward_table(const LogitSequence& s, const TransitionMatrix& theta,
                                  std::size_t c) {
    std::vector<Vector> alpha(s.size());
    alpha[0] = s[0];
    Vector tmp(c);
    for (std::size_t t = 1; t < s.size(); ++t) {
        alpha[t].resize(c);
        for (std::size_t j = 0; j < c; ++j) {
            for (std::size_t i = 0; i < c; ++i) tmp[i] = alpha[t - 1][i] + theta(i, j);
            alpha[t][j] = s[t][j] + log_sum_exp(tmp);
        }
    }
    return alpha;
}

// beta[t][i] = log sum over suffixes given class i at step t.
std::vector<Vector> backward_table(const LogitSequence& s, const TransitionMatrix& theta,
                                   std::size_t c) {
    std::vector<Vector> beta(s.size());
    beta.back().assign(c, 0.0);
    Vector tmp(c);
    for (std::size_t t = s.size() - 1; t-- > 0;) {
        beta[t].resize(c);
        for (std::size_t i = 0; i < c; ++i) {
            for (std::size_t j = 0; j < c; ++j) tmp[j] = theta(i, j) + s[t + 1][j] + beta[t + 1][j];
            beta[t][i] = log_sum_exp(tmp);
        }
    }
    return beta;
}

}  // namespace

double crf_score(const LogitSequence& logits, const TagSequence& tags,
                 const TransitionMatrix& theta) {
    const std::size_t c = validated_n_classes(logits, theta);
    validate_tags(tags, logits.size(), c);
    double score = 0.0;
    for (std::size_t t = 0; t < logits.size(); ++t) score += logits[t][tags[t]];
    for (std::size_t t = 0; t + 1 < logits.size(); ++t) score += theta(tags[t], tags[t + 1]);
    return score;
}

double crf_log_partition(const LogitSequence& logits, const TransitionMatrix& theta) {
    const std::size_t c = validated_n_classes(logits, theta);
    Vector alpha = logits[0];
    Vector next(c), tmp(c);
    for (std::size_t t = 1; t < logits.size(); ++t) {
        for (std::size_t j = 0; j < c; ++j) {
            for (std::size_t i = 0; i < c; ++i) tmp[i] = alpha[i] + theta(i, j);
            next[j] = logits[t][j] + log_sum_exp(tmp);
        }
        std::swap(alpha, next);
    }
    return log_sum_exp(alpha);
}

CrfMarginals crf_marginals(const LogitSequence& logits, const TransitionMatrix& theta) {
    const std::size_t c = validated_n_classes(logits, theta);
    const std::size_t n = logits.size();
    const auto alpha = forward_table(logits, theta, c);
    const auto beta = backward_table(logits, theta, c);

    CrfMarginals out;
    out.log_partition = log_sum_exp(alpha.back());
    out.unary.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        out.unary[t].resize(c);
        for (std::size_t k = 0; k < c; ++k) {
            out.unary[t][k] = std::exp(alpha[t][k] + beta[t][k] - out.log_partition);
        }
    }
    out.pairwise.resize(n - 1, Matrix(c, c));
    for (std::size_t t = 0; t + 1 < n; ++t) {
        for (std::size_t i = 0; i < c; ++i) {
            for (std::size_t j = 0; j < c; ++j) {
                out.pairwise[t](i, j) = std::exp(alpha[t][i] + theta(i, j) + logits[t + 1][j] +
                                                 beta[t + 1][j] - out.log_partition);
            }
        }
    }
    return out;
}

CrfNllResult crf_nll(const LogitSequence& logits, const TagSequence& truth,
                     const TransitionMatrix& theta) {
    const std::size_t c = validated_n_classes(logits, theta);
    validate_tags(truth, logits.size(), c);

    const CrfMarginals marg = crf_marginals(logits, theta);
    CrfNllResult out;
    out.loss = marg.log_partition - crf_score(logits, truth, theta);
    out.d_logits = marg.unary;
    for (std::size_t t = 0; t < logits.size(); ++t) out.d_logits[t][truth[t]] -= 1.0;
    out.d_theta = Matrix(c, c);
    for (std::size_t t = 0; t + 1 < logits.size(); ++t) {
        for (std::size_t i = 0; i < c; ++i) {
            for (std::size_t j = 0; j < c; ++j) out.d_theta(i, j) += marg.pairwise[t](i, j);
        }
        out.d_theta(truth[t], truth[t + 1]) -= 1.0;
    }
    return out;
}

ViterbiResult viterbi_decode(const LogitSequence& logits, const TransitionMatrix& theta) {
    const std::size_t c = validated_n_classes(logits, theta);
    const std::size_t n = logits.size();

    Vector best = logits[0];
    Vector next(c);
    std::vector<std::vector<int>> backptr(n, std::vector<int>(c, 0));
    for (std::size_t t = 1; t < n; ++t) {
        for (std::size_t j = 0; j < c; ++j) {
            // Scanning i upward with a strict > keeps the lowest index on ties.
            int arg = 0;
            double top = best[0] + theta(0, j);
            for (std::size_t i = 1; i < c; ++i) {
                const double cand = best[i] + theta(i, j);
                if (cand > top) {
                    top = cand;
                    arg = static_cast<int>(i);
                }
            }
            next[j] = logits[t][j] + top;
            backptr[t][j] = arg;
        }
        std::swap(best, next);
    }

    int last = 0;
    for (std::size_t j = 1; j < c; ++j) {
        if (best[j] > best[last]) last = static_cast<int>(j);
    }

    ViterbiResult out;
    out.score = best[last];
    out.tags.resize(n);
    out.tags[n - 1] = last;
    for (std::size_t t = n - 1; t > 0; --t) out.tags[t - 1] = backptr[t][out.tags[t]];
    return out;
}

BruteForceResult brute_force_oracle(const LogitSequence& logits, const TransitionMatrix& theta) {
    const std::size_t c = validated_n_classes(logits, theta);
    const std::size_t n = logits.size();
    const double count = std::pow(static_cast<double>(c), static_cast<double>(n));
    if (count > 1e6) {
        throw std::invalid_argument("brute_force_oracle: instance too large (" +
                                    std::to_string(count) + " sequences)");
    }
    const std::size_t total = static_cast<std::size_t>(count);

    std::vector<double> scores(total);
    TagSequence tags(n, 0);
    for (std::size_t idx = 0; idx < total; ++idx) {
        double sc = logits[0][tags[0]];
        for (std::size_t t = 1; t < n; ++t) sc += logits[t][tags[t]] + theta(tags[t - 1], tags[t]);
        scores[idx] = sc;
        // Odometer increment, last position fastest.
        for (std::size_t t = n; t-- > 0;) {
            if (++tags[t] < static_cast<int>(c)) break;
            tags[t] = 0;
        }
    }

    BruteForceResult out;
    out.log_partition = log_sum_exp(scores);

    out.unary.assign(n, Vector(c, 0.0));
    out.pairwise.assign(n - 1, Matrix(c, c));
    std::size_t best_idx = 0;
    double second = -std::numeric_limits<double>::infinity();
    tags.assign(n, 0);
    for (std::size_t idx = 0; idx < total; ++idx) {
        if (idx > 0) {
            if (scores[idx] > scores[best_idx]) {
                second = scores[best_idx];
                best_idx = idx;
            } else {
                second = std::max(second, scores[idx]);
            }
        }
        const double w = std::exp(scores[idx] - out.log_partition);
        for (std::size_t t = 0; t < n; ++t) out.unary[t][tags[t]] += w;
        for (std::size_t t = 0; t + 1 < n; ++t) out.pairwise[t](tags[t], tags[t + 1]) += w;
        for (std::size_t t = n; t-- > 0;) {
            if (++tags[t] < static_cast<int>(c)) break;
            tags[t] = 0;
        }
    }

    out.best.resize(n);
    std::size_t rem = best_idx;
    for (std::size_t t = n; t-- > 0;) {
        out.best[t] = static_cast<int>(rem % c);
        rem /= c;
    }
    out.best_score = scores[best_idx];
    out.second_best_score = second;
    return out;
}

}  // namespace phaselab

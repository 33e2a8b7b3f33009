#ifndef PHASELAB_RNG_HPP
#define PHASELAB_RNG_HPP

#include <array>
#include <cstdint>
#include <vector>

namespace phaselab {

// Deterministic random stream: xoshiro256++ seeded through splitmix64.
// The integer and uniform outputs are bit-identical for equal seeds on any
// platform; normal() additionally depends on libm's log/cos rounding.
//
// Every stochastic operation in the toolkit takes one of these explicitly,
// so an experiment replays exactly from its recorded seeds.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed);

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64();

    // Uniform in [0, 1), 53-bit resolution.
    double uniform();
    double uniform(double lo, double hi);

    // Standard normal via Box-Muller (two uniforms per draw, no cached spare).
    double normal();

    // Uniform integer in [0, n). Plain modulo reduction; the bias is
    // below 2^-50 for every n used here.
    std::uint64_t below(std::uint64_t n);

    // Independent stream derived from (seed, tag); does not consume state,
    // so derivation order never matters.
    RngStream child(std::uint64_t tag) const;

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

private:
    std::uint64_t seed_;
    std::array<std::uint64_t, 4> state_;
};

}  // namespace phaselab

#endif

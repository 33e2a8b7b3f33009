#ifndef PHASELAB_SPLIT_HPP
#define PHASELAB_SPLIT_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "phaselab/dataset.hpp"
#include "phaselab/rng.hpp"

namespace phaselab {

struct PoolEntry {
    std::string id;
    std::size_t length = 0;
};

// Frozen test/validation/training-pool assignment plus the sampled
// mini-training sets E_{size, repeat}.
struct SplitPlan {
    std::uint64_t seed = 0;
    std::vector<std::string> test_ids;
    std::vector<std::string> val_ids;
    std::vector<std::string> pool_ids;
    // mini_sets[size][repeat] -> ids; repeats at a fixed size are disjoint.
    std::map<int, std::vector<std::vector<std::string>>> mini_sets;
};

// Duration quartiles by nearest-rank boundaries; a record falls in the
// stratum with boundary_lower <= length < boundary_upper. Returns the
// stratum index (0..3) per pool entry.
std::vector<int> duration_quartiles(const std::vector<PoolEntry>& pool);

// Draws `repeats` pairwise-disjoint mini-training sets of `size` ids from
// the pool, sampling the Q1 / Q2UQ3 / Q4 strata at a 20/60/20 ratio.
// Stratum counts come from largest-remainder rounding (ties resolved
// toward the middle stratum, then the lower one); a size of one always
// draws from the middle stratum.
std::vector<std::vector<std::string>> stratified_sample(const std::vector<PoolEntry>& pool,
                                                        int size, int repeats, RngStream& rng);

// The rounding rule in isolation, used by tests and by stratified_sample.
std::array<int, 3> stratum_allocation(int size);

SplitPlan make_split(const std::vector<PoolEntry>& entries, int n_test, int n_val,
                     const std::vector<int>& sizes, int repeats, std::uint64_t seed);

void save_split(const SplitPlan& plan, const std::filesystem::path& path);
SplitPlan load_split(const std::filesystem::path& path);

}  // namespace phaselab

#endif

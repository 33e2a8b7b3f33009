#include "phaselab/split.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace phaselab {

std::vector<int> duration_quartiles(const std::vector<PoolEntry>& pool) {
    if (pool.size() < 4) throw std::invalid_argument("duration_quartiles: pool smaller than 4");
    std::vector<std::size_t> sorted;
    sorted.reserve(pool.size());
    for (const PoolEntry& e : pool) sorted.push_back(e.length);
    std::sort(sorted.begin(), sorted.end());

    // Nearest-rank boundaries; stratum membership is lower <= length < upper.
    const auto rank = [&](double p) {
        const auto r = static_cast<std::size_t>(
            std::ceil(p * static_cast<double>(sorted.size())));
        return sorted[r - 1];
    };
    const std::size_t q1 = rank(0.25), q2 = rank(0.50), q3 = rank(0.75);

    std::vector<int> strata(pool.size());
    for (std::size_t k = 0; k < pool.size(); ++k) {
        const std::size_t len = pool[k].length;
        strata[k] = len < q1 ? 0 : len < q2 ? 1 : len < q3 ? 2 : 3;
    }
    return strata;
}

std::array<int, 3> stratum_allocation(int size) {
    if (size < 1) throw std::invalid_argument("stratum_allocation: size must be positive");
    if (size == 1) return {0, 1, 0};  // single picks avoid the outer quartiles

    const std::array<double, 3> target = {0.2 * size, 0.6 * size, 0.2 * size};
    std::array<int, 3> alloc{};
    int assigned = 0;
    for (int s = 0; s < 3; ++s) {
        alloc[s] = static_cast<int>(std::floor(target[s]));
        assigned += alloc[s];
    }
    // Largest remainder; ties prefer the middle stratum, then the lower one.
    std::array<int, 3> order = {1, 0, 2};
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return target[a] - alloc[a] > target[b] - alloc[b];
    });
    for (int k = 0; k < size - assigned; ++k) ++alloc[order[k]];
    return alloc;
}

std::vector<std::vector<std::string>> stratified_sample(const std::vector<PoolEntry>& pool,
                                                        int size, int repeats, RngStream& rng) {
    if (size < 1 || repeats < 1) {
        throw std::invalid_argument("stratified_sample: size and repeats must be positive");
    }
    if (pool.size() < static_cast<std::size_t>(size) * repeats) {
        throw std::invalid_argument("stratified_sample: pool too small for " +
                                    std::to_string(repeats) + " disjoint sets of " +
                                    std::to_string(size));
    }

    const std::vector<int> quartile = duration_quartiles(pool);
    // Three strata: Q1, Q2 U Q3, Q4.
    std::array<std::vector<std::string>, 3> available;
    for (std::size_t k = 0; k < pool.size(); ++k) {
        const int s = quartile[k] == 0 ? 0 : quartile[k] == 3 ? 2 : 1;
        available[s].push_back(pool[k].id);
    }

    const std::array<int, 3> alloc = stratum_allocation(size);
    std::vector<std::vector<std::string>> sets(repeats);
    for (int j = 0; j < repeats; ++j) {
        for (int s = 0; s < 3; ++s) {
            for (int k = 0; k < alloc[s]; ++k) {
                if (available[s].empty()) {
                    throw std::invalid_argument(
                        "stratified_sample: stratum " + std::to_string(s) +
                        " exhausted; pool too small or too skewed");
                }
                const std::size_t pick = rng.below(available[s].size());
                sets[j].push_back(available[s][pick]);
                available[s].erase(available[s].begin() + static_cast<std::ptrdiff_t>(pick));
            }
        }
    }
    return sets;
}

SplitPlan make_split(const std::vector<PoolEntry>& entries, int n_test, int n_val,
                     const std::vector<int>& sizes, int repeats, std::uint64_t seed) {
    if (n_test < 0 || n_val < 0 ||
        entries.size() <= static_cast<std::size_t>(n_test + n_val)) {
        throw std::invalid_argument("make_split: not enough records for the requested split");
    }

    SplitPlan plan;
    plan.seed = seed;
    RngStream rng(seed);

    std::vector<PoolEntry> shuffled = entries;
    rng.shuffle(shuffled);
    for (int k = 0; k < n_test; ++k) plan.test_ids.push_back(shuffled[k].id);
    for (int k = 0; k < n_val; ++k) plan.val_ids.push_back(shuffled[n_test + k].id);
    std::vector<PoolEntry> pool(shuffled.begin() + n_test + n_val, shuffled.end());
    for (const PoolEntry& e : pool) plan.pool_ids.push_back(e.id);

    for (int size : sizes) {
        RngStream stream = rng.child(static_cast<std::uint64_t>(size));
        plan.mini_sets[size] = stratified_sample(pool, size, repeats, stream);
    }
    return plan;
}

void save_split(const SplitPlan& plan, const std::filesystem::path& path) {
    nlohmann::json j;
    j["seed"] = plan.seed;
    j["test"] = plan.test_ids;
    j["val"] = plan.val_ids;
    j["pool"] = plan.pool_ids;
    nlohmann::json sets = nlohmann::json::object();
    for (const auto& [size, reps] : plan.mini_sets) sets[std::to_string(size)] = reps;
    j["mini_sets"] = sets;

    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("save_split: cannot open " + path.string());
    os << j.dump(2) << '\n';
}

SplitPlan load_split(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("load_split: cannot open " + path.string());
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("load_split: " + path.string() + ": " + e.what());
    }

    SplitPlan plan;
    plan.seed = j.at("seed").get<std::uint64_t>();
    plan.test_ids = j.at("test").get<std::vector<std::string>>();
    plan.val_ids = j.at("val").get<std::vector<std::string>>();
    plan.pool_ids = j.at("pool").get<std::vector<std::string>>();
    for (const auto& [key, value] : j.at("mini_sets").items()) {
        plan.mini_sets[std::stoi(key)] = value.get<std::vector<std::vector<std::string>>>();
    }
    return plan;
}

}  // namespace phaselab

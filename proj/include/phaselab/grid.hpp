#ifndef PHASELAB_GRID_HPP
#define PHASELAB_GRID_HPP

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "phaselab/dataset.hpp"
#include "phaselab/metrics.hpp"
#include "phaselab/split.hpp"

namespace phaselab {

struct ExperimentPlan {
    std::vector<int> sizes = {1, 3, 5, 10, 20};
    int repeats = 3;
    std::uint64_t seed = 1;
    int workers = 1;
    int n_classes = 7;
    bool full_supervision = true;
    // Epoch overrides; values < 1 keep the per-variant defaults.
    int epochs_framewise = -1;
    int epochs_temporal = -1;
    int val_interval = 1;
    std::filesystem::path out_dir;
};

struct CellResult {
    int size = 0;
    int repeat = 0;
    std::map<std::string, MetricReport> reports;  // variant -> test-set metrics
    std::string error;                            // nonempty when the cell failed
};

struct GridResult {
    std::vector<CellResult> cells;
    std::map<std::string, MetricReport> fullsup;
};

// For every (size, repeat): trains the ablation variants and the teacher on
// E_{size,repeat}, annotates the complement, trains the student and the
// self-learned teacher on the union, and evaluates everything on the fixed
// test split. Writes one directory per cell (checkpoints, synthetic labels,
// metrics.tsv) plus a top-level summary.tsv; failed cells are recorded and
// skipped in the aggregation. Deterministic for a fixed (dataset, plan)
// regardless of the worker count.
GridResult run_experiment_grid(const std::vector<SequenceRecord>& dataset, const SplitPlan& split,
                               const ExperimentPlan& plan);

// Deterministic seed derivation for one grid job.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b, std::uint64_t c);

}  // namespace phaselab

#endif

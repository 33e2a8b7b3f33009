#ifndef PHASELAB_DATASET_HPP
#define PHASELAB_DATASET_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "phaselab/matrix.hpp"
#include "phaselab/rng.hpp"

namespace phaselab {

enum class LabelSource { none, ground_truth, synthetic };

std::string to_string(LabelSource s);
LabelSource label_source_from_string(const std::string& s);

// One "video": a sequence of per-frame feature vectors, optionally labeled
// with one phase index per frame.
struct SequenceRecord {
    std::string id;
    std::vector<Vector> features;
    std::vector<int> labels;              // empty when unlabeled
    LabelSource label_source = LabelSource::none;

    std::size_t length() const { return features.size(); }
    bool labeled() const { return !labels.empty(); }
};

// Phase chain of a synthetic procedure: mostly forward progressing, with a
// configurable chance of swapping the order of the two packaging/cleaning
// phases and optional per-phase skips.
struct WorkflowModel {
    int n_phases = 7;
    double swap_prob = 0.25;                 // visit phase 5 before phase 4
    std::vector<double> skip_probs;          // per phase; empty means none
    std::vector<double> duration_weights;    // relative median durations
    double duration_sigma = 0.35;            // log-normal dispersion

    static WorkflowModel default_model();
    void validate() const;

    // Phase visit order for one procedure (not yet expanded to frames).
    std::vector<int> sample_phase_path(RngStream& rng) const;
};

// Turns a phase sequence into feature vectors: per-phase prototype plus a
// per-sequence offset plus frame noise, smoothed over time.
struct FeatureEmitter {
    int feature_dim = 32;
    std::vector<Vector> prototypes;          // one per phase
    double noise_scale = 1.0;
    double sequence_offset_scale = 0.6;
    double smoothing = 0.85;
    bool noiseless = false;                  // forces noise and offset to zero

    static FeatureEmitter init(int feature_dim, int n_phases, double prototype_scale,
                               RngStream& rng);
    void validate(int n_phases) const;
};

// Samples `n_sequences` labeled records. Deterministic in the rng seed;
// record k only consumes its own child stream.
std::vector<SequenceRecord> generate_dataset(const WorkflowModel& model,
                                             const FeatureEmitter& emitter,
                                             std::size_t n_sequences, std::size_t len_min,
                                             std::size_t len_max, RngStream& rng);

// Generator knobs of the default synthetic benchmark (also the gen-data
// defaults): 120 sequences of 150-600 steps over 7 phases, 32-dim features.
struct GeneratorConfig {
    std::size_t n_sequences = 120;
    std::size_t len_min = 150;
    std::size_t len_max = 600;
    int feature_dim = 32;
    double noise = 1.4;
    double offset = 1.0;
    double smoothing = 0.9;
    double swap_prob = 0.25;
    double prototype_scale = 1.0;
    std::uint64_t seed = 1;
};

std::vector<SequenceRecord> generate_benchmark(const GeneratorConfig& cfg);

// Dataset directory layout: manifest.tsv with one record per line
// (id, length, label_source, features_path, labels_path), feature blocks as
// little-endian 64-bit reals in time-major order, labels as space-separated
// integers on one line. Unlabeled records carry "-" as labels_path.
void write_dataset(const std::vector<SequenceRecord>& records,
                   const std::filesystem::path& dir);
std::vector<SequenceRecord> read_dataset(const std::filesystem::path& dir);

}  // namespace phaselab

#endif

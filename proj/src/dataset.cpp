#include "phaselab/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "phaselab/binio.hpp"

namespace fs = std::filesystem;

namespace phaselab {

std::string to_string(LabelSource s) {
    switch (s) {
        case LabelSource::none: return "none";
        case LabelSource::ground_truth: return "ground_truth";
        case LabelSource::synthetic: return "synthetic";
    }
    return "none";
}

LabelSource label_source_from_string(const std::string& s) {
    if (s == "none") return LabelSource::none;
    if (s == "ground_truth") return LabelSource::ground_truth;
    if (s == "synthetic") return LabelSource::synthetic;
    throw std::runtime_error("unknown label source: " + s);
}

WorkflowModel WorkflowModel::default_model() {
    WorkflowModel m;
    m.n_phases = 7;
    m.swap_prob = 0.25;
    m.skip_probs = {};
    // Dissection phases dominate; preparation and extraction are short.
    m.duration_weights = {0.06, 0.24, 0.10, 0.26, 0.10, 0.14, 0.10};
    m.duration_sigma = 0.35;
    return m;
}

void WorkflowModel::validate() const {
    if (n_phases < 2) throw std::invalid_argument("WorkflowModel: need at least two phases");
    if (swap_prob < 0.0 || swap_prob > 1.0) {
        throw std::invalid_argument("WorkflowModel: swap probability outside [0, 1]");
    }
    if (duration_weights.size() != static_cast<std::size_t>(n_phases)) {
        throw std::invalid_argument("WorkflowModel: need one duration weight per phase");
    }
    for (double w : duration_weights) {
        if (!(w > 0.0)) throw std::invalid_argument("WorkflowModel: duration weights must be positive");
    }
    if (!(duration_sigma >= 0.0) || duration_sigma > 3.0) {
        throw std::invalid_argument("WorkflowModel: degenerate duration dispersion");
    }
    if (!skip_probs.empty()) {
        if (skip_probs.size() != static_cast<std::size_t>(n_phases)) {
            throw std::invalid_argument("WorkflowModel: need one skip probability per phase");
        }
        for (double p : skip_probs) {
            if (p < 0.0 || p >= 1.0) {
                throw std::invalid_argument("WorkflowModel: skip probabilities must lie in [0, 1)");
            }
        }
    }
}

std::vector<int> WorkflowModel::sample_phase_path(RngStream& rng) const {
    std::vector<int> path(n_phases);
    for (int k = 0; k < n_phases; ++k) path[k] = k;
    if (n_phases >= 6 && rng.uniform() < swap_prob) std::swap(path[4], path[5]);
    if (!skip_probs.empty()) {
        std::vector<int> kept;
        for (int phase : path) {
            if (!(rng.uniform() < skip_probs[phase])) kept.push_back(phase);
        }
        if (!kept.empty()) path = std::move(kept);
    }
    return path;
}

FeatureEmitter FeatureEmitter::init(int feature_dim, int n_phases, double prototype_scale,
                                    RngStream& rng) {
    if (feature_dim < 1 || n_phases < 1) {
        throw std::invalid_argument("FeatureEmitter: dimensions must be positive");
    }
    FeatureEmitter e;
    e.feature_dim = feature_dim;
    e.prototypes.resize(n_phases);
    for (Vector& proto : e.prototypes) {
        proto.resize(feature_dim);
        for (double& x : proto) x = prototype_scale * rng.normal();
    }
    return e;
}

void FeatureEmitter::validate(int n_phases) const {
    if (prototypes.size() != static_cast<std::size_t>(n_phases)) {
        throw std::invalid_argument("FeatureEmitter: need one prototype per phase");
    }
    for (const Vector& p : prototypes) {
        if (p.size() != static_cast<std::size_t>(feature_dim)) {
            throw std::invalid_argument("FeatureEmitter: prototype dimension mismatch");
        }
    }
    for (std::size_t a = 0; a < prototypes.size(); ++a) {
        for (std::size_t b = a + 1; b < prototypes.size(); ++b) {
            if (prototypes[a] == prototypes[b]) {
                throw std::invalid_argument("FeatureEmitter: prototypes must be pairwise distinct");
            }
        }
    }
    if (!noiseless && !(noise_scale > 0.0)) {
        throw std::invalid_argument("FeatureEmitter: noise scale must be positive");
    }
    if (smoothing < 0.0 || smoothing >= 1.0) {
        throw std::invalid_argument("FeatureEmitter: smoothing must lie in [0, 1)");
    }
}

namespace {

std::string record_id(std::size_t k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "seq%04zu", k);
    return buf;
}

SequenceRecord generate_record(const WorkflowModel& model, const FeatureEmitter& emitter,
                               std::size_t len_min, std::size_t len_max, std::size_t k,
                               RngStream rng) {
    SequenceRecord rec;
    rec.id = record_id(k);
    rec.label_source = LabelSource::ground_truth;

    const std::vector<int> path = model.sample_phase_path(rng);
    const std::size_t target_len = len_min + rng.below(len_max - len_min + 1);
    double weight_sum = 0.0;
    for (int phase : path) weight_sum += model.duration_weights[phase];

    for (int phase : path) {
        const double median = static_cast<double>(target_len) *
                              model.duration_weights[phase] / weight_sum;
        const double jitter = std::exp(model.duration_sigma * rng.normal());
        const auto steps = static_cast<std::size_t>(
            std::max(1.0, std::round(median * jitter)));
        rec.labels.insert(rec.labels.end(), steps, phase);
    }

    const double noise = emitter.noiseless ? 0.0 : emitter.noise_scale;
    const double offset_scale = emitter.noiseless ? 0.0 : emitter.sequence_offset_scale;
    Vector offset(emitter.feature_dim);
    for (double& x : offset) x = offset_scale * rng.normal();

    rec.features.resize(rec.labels.size());
    Vector target(emitter.feature_dim);
    for (std::size_t t = 0; t < rec.labels.size(); ++t) {
        const Vector& proto = emitter.prototypes[rec.labels[t]];
        for (int d = 0; d < emitter.feature_dim; ++d) {
            target[d] = proto[d] + offset[d] + noise * rng.normal();
        }
        if (t == 0) {
            rec.features[t] = target;
        } else {
            rec.features[t].resize(emitter.feature_dim);
            for (int d = 0; d < emitter.feature_dim; ++d) {
                rec.features[t][d] = emitter.smoothing * rec.features[t - 1][d] +
                                     (1.0 - emitter.smoothing) * target[d];
            }
        }
    }
    return rec;
}

}  // namespace

std::vector<SequenceRecord> generate_dataset(const WorkflowModel& model,
                                             const FeatureEmitter& emitter,
                                             std::size_t n_sequences, std::size_t len_min,
                                             std::size_t len_max, RngStream& rng) {
    model.validate();
    emitter.validate(model.n_phases);
    if (n_sequences == 0) throw std::invalid_argument("generate_dataset: need at least one sequence");
    if (len_min < 2 || len_min > len_max) {
        throw std::invalid_argument("generate_dataset: bad length range");
    }

    std::vector<SequenceRecord> records;
    records.reserve(n_sequences);
    for (std::size_t k = 0; k < n_sequences; ++k) {
        records.push_back(generate_record(model, emitter, len_min, len_max, k, rng.child(k)));
    }
    return records;
}

std::vector<SequenceRecord> generate_benchmark(const GeneratorConfig& cfg) {
    WorkflowModel model = WorkflowModel::default_model();
    model.swap_prob = cfg.swap_prob;

    RngStream proto_rng = RngStream(cfg.seed).child(0x50524f54);
    FeatureEmitter emitter =
        FeatureEmitter::init(cfg.feature_dim, model.n_phases, cfg.prototype_scale, proto_rng);
    emitter.noise_scale = cfg.noise;
    emitter.sequence_offset_scale = cfg.offset;
    emitter.smoothing = cfg.smoothing;
    if (cfg.noise == 0.0) {
        emitter.noiseless = true;
    }

    RngStream rng = RngStream(cfg.seed).child(0x47454e);
    return generate_dataset(model, emitter, cfg.n_sequences, cfg.len_min, cfg.len_max, rng);
}

void write_dataset(const std::vector<SequenceRecord>& records, const fs::path& dir) {
    fs::create_directories(dir / "data");
    std::ostringstream manifest;
    for (const SequenceRecord& rec : records) {
        if (rec.id.empty()) throw std::invalid_argument("write_dataset: record without id");
        const std::string feat_rel = "data/" + rec.id + ".f64";
        std::string label_rel = "-";

        std::ofstream feat(dir / feat_rel, std::ios::binary | std::ios::trunc);
        if (!feat) throw std::runtime_error("write_dataset: cannot open " + (dir / feat_rel).string());
        for (const Vector& frame : rec.features) binio::write_f64_span(feat, frame);
        if (!feat) throw std::runtime_error("write_dataset: write failed for " + rec.id);

        if (rec.labeled()) {
            if (rec.labels.size() != rec.features.size()) {
                throw std::invalid_argument("write_dataset: label/feature length mismatch in " + rec.id);
            }
            label_rel = "data/" + rec.id + ".labels";
            std::ofstream lab(dir / label_rel, std::ios::trunc);
            for (std::size_t t = 0; t < rec.labels.size(); ++t) {
                if (t > 0) lab << ' ';
                lab << rec.labels[t];
            }
            lab << '\n';
            if (!lab) throw std::runtime_error("write_dataset: write failed for " + rec.id);
        }

        manifest << rec.id << '\t' << rec.features.size() << '\t' << to_string(rec.label_source)
                 << '\t' << feat_rel << '\t' << label_rel << '\n';
    }
    // The manifest lands last, once every record is on disk.
    std::ofstream mf(dir / "manifest.tsv", std::ios::trunc);
    mf << manifest.str();
    if (!mf) throw std::runtime_error("write_dataset: cannot write manifest under " + dir.string());
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
    return fields;
}

}  // namespace

std::vector<SequenceRecord> read_dataset(const fs::path& dir) {
    std::ifstream mf(dir / "manifest.tsv");
    if (!mf) throw std::runtime_error("read_dataset: cannot open " + (dir / "manifest.tsv").string());

    std::vector<SequenceRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(mf, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_tabs(line);
        if (fields.size() != 5) {
            throw std::runtime_error("read_dataset: manifest line " + std::to_string(line_no) +
                                     ": expected 5 tab-separated fields, got " +
                                     std::to_string(fields.size()));
        }
        SequenceRecord rec;
        rec.id = fields[0];
        std::size_t length = 0;
        try {
            length = std::stoul(fields[1]);
        } catch (const std::exception&) {
            throw std::runtime_error("read_dataset: manifest line " + std::to_string(line_no) +
                                     ": bad length field '" + fields[1] + "'");
        }
        rec.label_source = label_source_from_string(fields[2]);

        const fs::path feat_path = dir / fields[3];
        std::ifstream feat(feat_path, std::ios::binary);
        if (!feat) throw std::runtime_error("read_dataset: missing feature file for record " + rec.id);
        feat.seekg(0, std::ios::end);
        const auto bytes = static_cast<std::size_t>(feat.tellg());
        feat.seekg(0);
        if (length == 0 || bytes % 8 != 0 || (bytes / 8) % length != 0) {
            throw std::runtime_error("read_dataset: truncated or missized feature file for record " +
                                     rec.id + " (" + std::to_string(bytes) + " bytes for length " +
                                     std::to_string(length) + ")");
        }
        const std::size_t dim = bytes / 8 / length;
        rec.features.resize(length);
        for (std::size_t t = 0; t < length; ++t) {
            rec.features[t].resize(dim);
            for (std::size_t d = 0; d < dim; ++d) rec.features[t][d] = binio::read_f64(feat);
        }

        if (fields[4] != "-") {
            std::ifstream lab(dir / fields[4]);
            if (!lab) throw std::runtime_error("read_dataset: missing label file for record " + rec.id);
            int v = 0;
            while (lab >> v) rec.labels.push_back(v);
            if (rec.labels.size() != length) {
                throw std::runtime_error("read_dataset: label count mismatch for record " + rec.id +
                                         " (" + std::to_string(rec.labels.size()) + " labels, length " +
                                         std::to_string(length) + ")");
            }
            if (rec.label_source == LabelSource::none) {
                throw std::runtime_error("read_dataset: labeled record " + rec.id +
                                         " declares label source 'none'");
            }
        } else if (rec.label_source != LabelSource::none) {
            throw std::runtime_error("read_dataset: record " + rec.id +
                                     " declares labels but carries none");
        }
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace phaselab

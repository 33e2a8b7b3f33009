#include "phaselab/model.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "phaselab/binio.hpp"

namespace phaselab {

namespace {

constexpr char kMagic[] = "PHASELABCKPT";
constexpr std::uint32_t kVersion = 1;

}  // namespace

std::string to_string(Variant v) {
    switch (v) {
        case Variant::m1: return "m1";
        case Variant::m2: return "m2";
        case Variant::m3: return "m3";
        case Variant::m4: return "m4";
        case Variant::m5: return "m5";
        case Variant::student: return "student";
    }
    return "m1";
}

Variant variant_from_string(const std::string& s) {
    if (s == "m1") return Variant::m1;
    if (s == "m2") return Variant::m2;
    if (s == "m3") return Variant::m3;
    if (s == "m4") return Variant::m4;
    if (s == "m5") return Variant::m5;
    if (s == "student") return Variant::student;
    throw std::invalid_argument("unknown model variant: " + s);
}

bool variant_has_crf(Variant v) { return v == Variant::m2 || v == Variant::m5; }

bool variant_is_bidirectional(Variant v) { return v == Variant::m4 || v == Variant::m5; }

bool variant_is_recurrent(Variant v) {
    return v == Variant::m3 || v == Variant::m4 || v == Variant::m5 || v == Variant::student;
}

ModelBundle init_model(Variant v, int n_classes, int feature_dim, int hidden_dim,
                       std::uint64_t seed) {
    if (n_classes < 2) throw std::invalid_argument("init_model: need at least two classes");
    if (feature_dim < 1) throw std::invalid_argument("init_model: feature_dim must be positive");
    if (variant_is_recurrent(v) && hidden_dim < 1) {
        throw std::invalid_argument("init_model: recurrent variants need hidden_dim >= 1");
    }

    ModelBundle m;
    m.variant = v;
    m.n_classes = n_classes;
    m.feature_dim = feature_dim;
    m.hidden_dim = variant_is_recurrent(v) ? hidden_dim : 0;
    m.init_seed = seed;
    RngStream rng(seed);

    const auto nc = static_cast<std::size_t>(n_classes);
    const auto fd = static_cast<std::size_t>(feature_dim);
    const auto hd = static_cast<std::size_t>(hidden_dim);
    switch (v) {
        case Variant::m1:
            m.projection = ProjectionParams::init(nc, fd, rng);
            break;
        case Variant::m2:
            m.projection = ProjectionParams::init(nc, fd, rng);
            m.transitions = Matrix(nc, nc);
            break;
        case Variant::m3:
        case Variant::student:
            m.lstm = LstmParams::init(fd, hd, rng);
            m.projection = ProjectionParams::init(nc, hd, rng);
            break;
        case Variant::m4:
            m.bilstm = BiLstmParams::init(fd, hd, rng);
            m.projection = ProjectionParams::init(nc, 2 * hd, rng);
            break;
        case Variant::m5:
            m.bilstm = BiLstmParams::init(fd, hd, rng);
            m.projection = ProjectionParams::init(nc, 2 * hd, rng);
            m.transitions = Matrix(nc, nc);
            break;
    }
    return m;
}

LogitSequence model_logits(const ModelBundle& m, const std::vector<Vector>& features) {
    if (features.empty()) throw std::invalid_argument("model_logits: empty sequence");
    if (features.front().size() != static_cast<std::size_t>(m.feature_dim)) {
        throw std::invalid_argument("model_logits: feature dimension mismatch");
    }
    if (m.lstm.has_value()) {
        const auto outputs = lstm_forward(*m.lstm, initial_state(*m.lstm), features, nullptr);
        return project_logits(m.projection, outputs, 0.0, nullptr, false, nullptr);
    }
    if (m.bilstm.has_value()) {
        const auto outputs = bilstm_forward(*m.bilstm, features, nullptr);
        return project_logits(m.projection, outputs, 0.0, nullptr, false, nullptr);
    }
    return project_logits(m.projection, features, 0.0, nullptr, false, nullptr);
}

namespace {

int argmax(const Vector& v) {
    return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

TagSequence model_predict(const ModelBundle& m, const std::vector<Vector>& features) {
    const LogitSequence logits = model_logits(m, features);
    if (m.transitions.has_value()) return viterbi_decode(logits, *m.transitions).tags;
    TagSequence tags(logits.size());
    for (std::size_t t = 0; t < logits.size(); ++t) tags[t] = argmax(logits[t]);
    return tags;
}

OnlineDecoder::OnlineDecoder(const ModelBundle& m) : model_(m) {
    if (!m.lstm.has_value()) {
        throw std::invalid_argument("OnlineDecoder: only unidirectional variants run online");
    }
    state_ = initial_state(*m.lstm);
}

int OnlineDecoder::step(std::span<const double> frame) {
    LstmState next;
    const Vector h = lstm_cell_forward(*model_.lstm, frame, state_, next, nullptr);
    state_ = std::move(next);
    Vector logits = model_.projection.b;
    matvec_add(model_.projection.w, h, logits);
    return argmax(logits);
}

namespace {

void write_block(std::ostream& os, const std::string& name, std::size_t rows, std::size_t cols,
                 std::span<const double> data) {
    binio::write_string(os, name);
    binio::write_u32(os, static_cast<std::uint32_t>(rows));
    binio::write_u32(os, static_cast<std::uint32_t>(cols));
    binio::write_f64_span(os, data);
}

void write_lstm(std::ostream& os, const std::string& prefix, const LstmParams& p) {
    write_block(os, prefix + ".w_in", p.w_in.rows, p.w_in.cols, p.w_in.flat());
    write_block(os, prefix + ".w_rec", p.w_rec.rows, p.w_rec.cols, p.w_rec.flat());
    write_block(os, prefix + ".bias", p.bias.size(), 1, p.bias);
    write_block(os, prefix + ".c0", p.c0.size(), 1, p.c0);
    write_block(os, prefix + ".h0", p.h0.size(), 1, p.h0);
}

struct BlockReader {
    std::istream& is;

    void expect(const std::string& name, std::size_t rows, std::size_t cols,
                std::span<double> dest) {
        const std::string got = binio::read_string(is);
        if (got != name) {
            throw std::runtime_error("checkpoint: expected block '" + name + "', found '" + got + "'");
        }
        const std::uint32_t r = binio::read_u32(is);
        const std::uint32_t c = binio::read_u32(is);
        if (r != rows || c != cols) {
            throw std::runtime_error("checkpoint: block '" + name + "' has unexpected shape");
        }
        for (double& x : dest) x = binio::read_f64(is);
    }

    void read_lstm(const std::string& prefix, LstmParams& p) {
        expect(prefix + ".w_in", p.w_in.rows, p.w_in.cols, p.w_in.flat());
        expect(prefix + ".w_rec", p.w_rec.rows, p.w_rec.cols, p.w_rec.flat());
        expect(prefix + ".bias", p.bias.size(), 1, p.bias);
        expect(prefix + ".c0", p.c0.size(), 1, p.c0);
        expect(prefix + ".h0", p.h0.size(), 1, p.h0);
    }
};

}  // namespace

void save_checkpoint(const ModelBundle& m, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("save_checkpoint: cannot open " + path.string());
    os.write(kMagic, sizeof kMagic - 1);
    binio::write_u32(os, kVersion);
    binio::write_string(os, to_string(m.variant));
    binio::write_u32(os, static_cast<std::uint32_t>(m.n_classes));
    binio::write_u32(os, static_cast<std::uint32_t>(m.feature_dim));
    binio::write_u32(os, static_cast<std::uint32_t>(m.hidden_dim));
    binio::write_u64(os, m.init_seed);

    binio::write_u32(os, static_cast<std::uint32_t>(m.history.size()));
    for (const TrainHistoryEntry& e : m.history) {
        binio::write_u32(os, static_cast<std::uint32_t>(e.epoch));
        binio::write_f64(os, e.loss);
        binio::write_f64(os, e.val_f1);
    }

    write_block(os, "proj.w", m.projection.w.rows, m.projection.w.cols, m.projection.w.flat());
    write_block(os, "proj.b", m.projection.b.size(), 1, m.projection.b);
    if (m.lstm.has_value()) write_lstm(os, "lstm", *m.lstm);
    if (m.bilstm.has_value()) {
        write_lstm(os, "bilstm.fwd", m.bilstm->fwd);
        write_lstm(os, "bilstm.bwd", m.bilstm->bwd);
    }
    if (m.transitions.has_value()) {
        write_block(os, "theta", m.transitions->rows, m.transitions->cols, m.transitions->flat());
    }
    if (!os) throw std::runtime_error("save_checkpoint: write failed for " + path.string());
}

ModelBundle load_checkpoint(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_checkpoint: cannot open " + path.string());
    char magic[sizeof kMagic - 1];
    is.read(magic, sizeof magic);
    if (!is || std::string(magic, sizeof magic) != kMagic) {
        throw std::runtime_error("load_checkpoint: not a checkpoint file: " + path.string());
    }
    if (binio::read_u32(is) != kVersion) {
        throw std::runtime_error("load_checkpoint: unsupported version in " + path.string());
    }

    const Variant v = variant_from_string(binio::read_string(is));
    const auto n_classes = static_cast<int>(binio::read_u32(is));
    const auto feature_dim = static_cast<int>(binio::read_u32(is));
    const auto hidden_dim = static_cast<int>(binio::read_u32(is));
    const std::uint64_t seed = binio::read_u64(is);

    ModelBundle m = init_model(v, n_classes, feature_dim, hidden_dim, seed);

    const std::uint32_t n_history = binio::read_u32(is);
    m.history.resize(n_history);
    for (TrainHistoryEntry& e : m.history) {
        e.epoch = static_cast<int>(binio::read_u32(is));
        e.loss = binio::read_f64(is);
        e.val_f1 = binio::read_f64(is);
    }

    BlockReader reader{is};
    reader.expect("proj.w", m.projection.w.rows, m.projection.w.cols, m.projection.w.flat());
    reader.expect("proj.b", m.projection.b.size(), 1, m.projection.b);
    if (m.lstm.has_value()) reader.read_lstm("lstm", *m.lstm);
    if (m.bilstm.has_value()) {
        reader.read_lstm("bilstm.fwd", m.bilstm->fwd);
        reader.read_lstm("bilstm.bwd", m.bilstm->bwd);
    }
    if (m.transitions.has_value()) {
        reader.expect("theta", m.transitions->rows, m.transitions->cols, m.transitions->flat());
    }
    return m;
}

}  // namespace phaselab

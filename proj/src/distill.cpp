#include "phaselab/distill.hpp"

#include <set>
#include <stdexcept>

#include "phaselab/train.hpp"

namespace phaselab {

std::vector<SequenceRecord> annotate(const ModelBundle& teacher,
                                     const std::vector<const SequenceRecord*>& records) {
    for (const SequenceRecord* rec : records) {
        if (rec == nullptr || rec->features.empty()) {
            throw std::invalid_argument("annotate: empty record");
        }
        if (rec->features.front().size() != static_cast<std::size_t>(teacher.feature_dim)) {
            throw std::invalid_argument("annotate: record " + rec->id +
                                        " does not match the teacher's feature dimension");
        }
    }
    const std::vector<TagSequence> preds = predict_all(teacher, records);
    std::vector<SequenceRecord> out(records.size());
    for (std::size_t k = 0; k < records.size(); ++k) {
        out[k].id = records[k]->id;
        out[k].features = records[k]->features;
        out[k].labels = preds[k];
        out[k].label_source = LabelSource::synthetic;
    }
    return out;
}

std::vector<SequenceRecord> assemble_training_union(
    const std::vector<const SequenceRecord*>& ground_truth_set,
    const std::vector<SequenceRecord>& synthetic_set,
    const std::vector<std::string>& pool_ids) {
    std::set<std::string> pool(pool_ids.begin(), pool_ids.end());
    if (pool.size() != pool_ids.size()) {
        throw std::runtime_error("assemble_training_union: duplicate pool id");
    }

    std::vector<SequenceRecord> g;
    g.reserve(pool_ids.size());
    std::set<std::string> seen;
    for (const SequenceRecord* rec : ground_truth_set) {
        if (!rec->labeled() || rec->label_source != LabelSource::ground_truth) {
            throw std::runtime_error("assemble_training_union: record " + rec->id +
                                     " lacks ground-truth labels");
        }
        if (!pool.contains(rec->id)) {
            throw std::runtime_error("assemble_training_union: record " + rec->id +
                                     " is not in the pool");
        }
        if (!seen.insert(rec->id).second) {
            throw std::runtime_error("assemble_training_union: duplicate record " + rec->id);
        }
        g.push_back(*rec);
    }
    for (const SequenceRecord& rec : synthetic_set) {
        if (rec.label_source != LabelSource::synthetic) {
            throw std::runtime_error("assemble_training_union: record " + rec.id +
                                     " is not synthetically labeled");
        }
        if (!pool.contains(rec.id)) {
            throw std::runtime_error("assemble_training_union: record " + rec.id +
                                     " is not in the pool");
        }
        if (!seen.insert(rec.id).second) {
            throw std::runtime_error("assemble_training_union: sets overlap on record " + rec.id);
        }
        g.push_back(rec);
    }
    if (seen.size() != pool.size()) {
        throw std::runtime_error("assemble_training_union: union does not cover the pool (" +
                                 std::to_string(seen.size()) + " of " +
                                 std::to_string(pool.size()) + " ids)");
    }
    return g;
}

}  // namespace phaselab

#ifndef PHASELAB_DISTILL_HPP
#define PHASELAB_DISTILL_HPP

#include <vector>

#include "phaselab/dataset.hpp"
#include "phaselab/model.hpp"

namespace phaselab {

// Synthetic annotations: the teacher's decoded tags become the labels,
// marked as synthetic. Existing labels are ignored.
std::vector<SequenceRecord> annotate(const ModelBundle& teacher,
                                     const std::vector<const SequenceRecord*>& records);

// G = E u F. E keeps its ground-truth labels, F its synthetic ones; the two
// must be disjoint and cover the pool exactly.
std::vector<SequenceRecord> assemble_training_union(
    const std::vector<const SequenceRecord*>& ground_truth_set,
    const std::vector<SequenceRecord>& synthetic_set,
    const std::vector<std::string>& pool_ids);

}  // namespace phaselab

#endif

#ifndef PHASELAB_GRADCHECK_HPP
#define PHASELAB_GRADCHECK_HPP

#include <functional>
#include <span>

namespace phaselab {

// Central-difference check of an analytic gradient. `f` must evaluate the
// loss at the current contents of `param`; the routine perturbs each
// coordinate in place and restores it. Returns the worst coordinate's
//   |central_difference - analytic| / max(1, |analytic|).
double finite_diff_check(const std::function<double()>& f, std::span<double> param,
                         std::span<const double> analytic, double h = 1e-5);

}  // namespace phaselab

#endif

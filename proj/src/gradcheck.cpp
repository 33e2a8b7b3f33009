#include "phaselab/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace phaselab {

double finite_diff_check(const std::function<double()>& f, std::span<double> param,
                         std::span<const double> analytic, double h) {
    if (param.size() != analytic.size()) {
        throw std::invalid_argument("finite_diff_check: gradient shape mismatch");
    }
    if (h <= 0.0) throw std::invalid_argument("finite_diff_check: h must be positive");

    double worst = 0.0;
    for (std::size_t k = 0; k < param.size(); ++k) {
        const double saved = param[k];
        param[k] = saved + h;
        const double f_plus = f();
        param[k] = saved - h;
        const double f_minus = f();
        param[k] = saved;
        if (!std::isfinite(f_plus) || !std::isfinite(f_minus)) {
            throw std::runtime_error("finite_diff_check: non-finite loss at coordinate " +
                                     std::to_string(k));
        }
        const double central = (f_plus - f_minus) / (2.0 * h);
        const double err = std::abs(central - analytic[k]) / std::max(1.0, std::abs(analytic[k]));
        worst = std::max(worst, err);
    }
    return worst;
}

}  // namespace phaselab

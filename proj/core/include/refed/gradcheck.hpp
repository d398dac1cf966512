#pragma once

#include <cmath>
#include <functional>
#include <vector>

namespace refed {

/// Compares analytic gradients against central finite differences.
/// `loss` must recompute the full forward pass from the current parameter
/// values; `get`/`set` give flat access to the checked parameters.
/// Returns the maximum relative error max(|a-f| / max(|a|,|f|,floor)).
inline double max_grad_rel_error(const std::function<double()>& loss,
                                 const std::function<std::vector<double>()>& get,
                                 const std::function<void(const std::vector<double>&)>& set,
                                 const std::vector<double>& analytic,
                                 double eps = 1e-5, double floor = 1e-6) {
    std::vector<double> p = get();
    double worst = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        double orig = p[i];
        p[i] = orig + eps;
        set(p);
        double lp = loss();
        p[i] = orig - eps;
        set(p);
        double lm = loss();
        p[i] = orig;
        set(p);
        double fd = (lp - lm) / (2.0 * eps);
        double denom = std::max({std::fabs(fd), std::fabs(analytic[i]), floor});
        worst = std::max(worst, std::fabs(fd - analytic[i]) / denom);
    }
    return worst;
}

}  // namespace refed

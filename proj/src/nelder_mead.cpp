#include "pfraud/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace pfraud::optim {

namespace {

double safe_eval(const Objective& f, std::span<const double> x) {
    double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
}

}  // namespace

NelderMeadResult nelder_mead(const Objective& f, std::span<const double> x0, std::span<const double> steps,
                             const NelderMeadOptions& options) {
    const std::size_t n = x0.size();
    if (n == 0 || steps.size() != n) throw std::invalid_argument("nelder_mead: bad dimensions");

    std::vector<std::vector<double>> simplex(n + 1, std::vector<double>(x0.begin(), x0.end()));
    for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += steps[i];
    std::vector<double> values(n + 1);
    for (std::size_t i = 0; i <= n; ++i) values[i] = safe_eval(f, simplex[i]);

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), trial(n), trial2(n);

    auto sort_simplex = [&] {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
    };
    auto diameter = [&] {
        const auto& best = simplex[order[0]];
        double d = 0.0;
        for (std::size_t k = 1; k <= n; ++k) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double diff = simplex[order[k]][i] - best[i];
                s += diff * diff;
            }
            d = std::max(d, std::sqrt(s));
        }
        return d;
    };
    auto along = [&](double coef, std::vector<double>& out) {
        const auto& worst = simplex[order[n]];
        for (std::size_t i = 0; i < n; ++i) out[i] = centroid[i] + coef * (worst[i] - centroid[i]);
    };

    NelderMeadResult result;
    sort_simplex();
    int it = 0;
    for (; it < options.max_iterations; ++it) {
        if (diameter() < options.diameter_tol) {
            result.converged = true;
            break;
        }
        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[order[k]][i];
        for (double& c : centroid) c /= static_cast<double>(n);

        const std::size_t worst = order[n];
        const double f_best = values[order[0]];
        const double f_second = values[order[n - 1]];
        const double f_worst = values[worst];

        along(-1.0, trial);
        const double f_reflect = safe_eval(f, trial);
        if (f_reflect < f_best) {
            along(-2.0, trial2);
            const double f_expand = safe_eval(f, trial2);
            if (f_expand < f_reflect) {
                simplex[worst] = trial2;
                values[worst] = f_expand;
            } else {
                simplex[worst] = trial;
                values[worst] = f_reflect;
            }
        } else if (f_reflect < f_second) {
            simplex[worst] = trial;
            values[worst] = f_reflect;
        } else {
            const bool outside = f_reflect < f_worst;
            along(outside ? -0.5 : 0.5, trial2);
            const double f_contract = safe_eval(f, trial2);
            if (f_contract < (outside ? f_reflect : f_worst)) {
                simplex[worst] = trial2;
                values[worst] = f_contract;
            } else {
                const auto best = simplex[order[0]];
                for (std::size_t k = 1; k <= n; ++k) {
                    auto& v = simplex[order[k]];
                    for (std::size_t i = 0; i < n; ++i) v[i] = best[i] + 0.5 * (v[i] - best[i]);
                    values[order[k]] = safe_eval(f, v);
                }
            }
        }
        sort_simplex();
    }

    result.x = simplex[order[0]];
    result.value = values[order[0]];
    result.iterations = it;
    return result;
}

}  // namespace pfraud::optim

#include <algorithm>
#include <cmath>

#include "pfraud/kernels.hpp"

namespace pfraud::kernels::scalar {

void evaluate(Poly p, std::span<const double> t, std::span<double> out) {
    for (std::size_t i = 0; i < t.size(); ++i) out[i] = p.a + t[i] * (p.b + t[i] * p.c);
}

double sum_log_intensity(Poly p, std::span<const double> t, double floor) {
    double sum = 0.0;
    for (double ti : t) sum += std::log(std::max(p.a + ti * (p.b + ti * p.c), floor));
    return sum;
}

void compensator_increments(Poly p, std::span<const double> from, std::span<const double> to,
                            std::span<double> out) {
    const double half_b = 0.5 * p.b;
    const double third_c = p.c / 3.0;
    for (std::size_t i = 0; i < from.size(); ++i) {
        const double s = from[i];
        const double e = to[i];
        out[i] = (e - s) * (p.a + half_b * (e + s) + third_c * (e * e + e * s + s * s));
    }
}

void feasible_mask(std::span<const double> a, std::span<const double> b, std::span<const double> c,
                   double inv_horizon, double tol, std::span<std::uint8_t> mask) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        const bool ok = a[i] >= -tol && c[i] >= -tol && b[i] + a[i] * inv_horizon >= -tol;
        mask[i] = ok ? 1 : 0;
    }
}

}  // namespace pfraud::kernels::scalar

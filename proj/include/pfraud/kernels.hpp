#pragma once

// Data-parallel inner loops over event times.
//
// Every kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant. The public entry points dispatch at runtime to the best variant
// the CPU supports; the per-ISA namespaces stay callable so tests can check
// the variants against each other.

#include <cstdint>
#include <span>
#include <string_view>

namespace pfraud::kernels {

/// Coefficients of lambda(t) = a + b t + c t^2. Constant and linear
/// intensities leave the higher terms at zero.
struct Poly {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
};

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa) noexcept;

/// True when `isa` was compiled in and the running CPU supports it.
bool isa_available(Isa isa) noexcept;

/// The variant used by the dispatching entry points. Chosen on first use:
/// AVX2 when available, unless PFRAUD_ISA=scalar is set in the environment.
Isa active_isa() noexcept;

/// Overrides the dispatch choice. Throws if `isa` is unavailable.
void set_active_isa(Isa isa);

// out[i] = lambda(t[i])
void evaluate(Poly p, std::span<const double> t, std::span<double> out);

// sum_i log(max(lambda(t[i]), floor)). Inputs must be finite; floor > 0.
double sum_log_intensity(Poly p, std::span<const double> t, double floor);

// out[i] = A(to[i]) - A(from[i]) with A(t) = a t + b t^2/2 + c t^3/3, computed
// in the factored form (to - from) * (a + b (to + from)/2 + c (to^2 + to from + from^2)/3).
void compensator_increments(Poly p, std::span<const double> from, std::span<const double> to,
                            std::span<double> out);

// mask[i] = 1 iff a[i] >= -tol, c[i] >= -tol and b[i] + a[i] * inv_horizon >= -tol.
// Pass c = 0 lanes for the linear family.
void feasible_mask(std::span<const double> a, std::span<const double> b, std::span<const double> c,
                   double inv_horizon, double tol, std::span<std::uint8_t> mask);

namespace scalar {
void evaluate(Poly p, std::span<const double> t, std::span<double> out);
double sum_log_intensity(Poly p, std::span<const double> t, double floor);
void compensator_increments(Poly p, std::span<const double> from, std::span<const double> to,
                            std::span<double> out);
void feasible_mask(std::span<const double> a, std::span<const double> b, std::span<const double> c,
                   double inv_horizon, double tol, std::span<std::uint8_t> mask);
}  // namespace scalar

#if defined(PFRAUD_HAVE_AVX2)
namespace avx2 {
void evaluate(Poly p, std::span<const double> t, std::span<double> out);
double sum_log_intensity(Poly p, std::span<const double> t, double floor);
void compensator_increments(Poly p, std::span<const double> from, std::span<const double> to,
                            std::span<double> out);
void feasible_mask(std::span<const double> a, std::span<const double> b, std::span<const double> c,
                   double inv_horizon, double tol, std::span<std::uint8_t> mask);
}  // namespace avx2
#endif

}  // namespace pfraud::kernels

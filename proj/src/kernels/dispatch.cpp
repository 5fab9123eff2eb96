#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "pfraud/kernels.hpp"

namespace pfraud::kernels {

namespace {

bool cpu_has_avx2() noexcept {
#if defined(PFRAUD_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Isa detect() noexcept {
    if (const char* env = std::getenv("PFRAUD_ISA"); env != nullptr && std::string(env) == "scalar")
        return Isa::Scalar;
    return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<Isa>& current() {
    static std::atomic<Isa> isa{detect()};
    return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
    }
    return "unknown";
}

bool isa_available(Isa isa) noexcept {
    return isa == Isa::Scalar || (isa == Isa::Avx2 && cpu_has_avx2());
}

Isa active_isa() noexcept { return current().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
    if (!isa_available(isa))
        throw std::invalid_argument("ISA '" + std::string(isa_name(isa)) + "' is not available on this CPU");
    current().store(isa, std::memory_order_relaxed);
}

#if defined(PFRAUD_HAVE_AVX2)
#define PFRAUD_DISPATCH(fn, ...) \
    return active_isa() == Isa::Avx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__)
#else
#define PFRAUD_DISPATCH(fn, ...) return scalar::fn(__VA_ARGS__)
#endif

void evaluate(Poly p, std::span<const double> t, std::span<double> out) {
    if (out.size() < t.size()) throw std::invalid_argument("evaluate: output too small");
    PFRAUD_DISPATCH(evaluate, p, t, out);
}

double sum_log_intensity(Poly p, std::span<const double> t, double floor) {
    PFRAUD_DISPATCH(sum_log_intensity, p, t, floor);
}

void compensator_increments(Poly p, std::span<const double> from, std::span<const double> to,
                            std::span<double> out) {
    if (to.size() != from.size() || out.size() < from.size())
        throw std::invalid_argument("compensator_increments: size mismatch");
    PFRAUD_DISPATCH(compensator_increments, p, from, to, out);
}

void feasible_mask(std::span<const double> a, std::span<const double> b, std::span<const double> c,
                   double inv_horizon, double tol, std::span<std::uint8_t> mask) {
    if (b.size() != a.size() || c.size() != a.size() || mask.size() < a.size())
        throw std::invalid_argument("feasible_mask: size mismatch");
    PFRAUD_DISPATCH(feasible_mask, a, b, c, inv_horizon, tol, mask);
}

#undef PFRAUD_DISPATCH

}  // namespace pfraud::kernels

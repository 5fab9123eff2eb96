#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "pfraud/kernels.hpp"

namespace pfraud {

/// Deterministic intensity shapes: lambda, a + b t, a + b t + c t^2.
enum class Family { Constant, Linear, Quadratic };

std::string_view family_name(Family f) noexcept;
/// Accepts "constant", "linear", "quadratic" in any case.
Family parse_family(std::string_view name);
std::size_t parameter_count(Family f) noexcept;

/// Absolute slack allowed on each feasibility constraint.
inline constexpr double kFeasibilityTolerance = 1e-10;

/// Whether an evaluation may leave the fitted window [0, horizon].
enum class Range { Observed, Extrapolate };

/// Nonnegativity constraints on [0, T]:
///   Constant:  lambda >= 0
///   Linear:    a >= 0, b + a/T >= 0
///   Quadratic: a >= 0, c >= 0, b + a/T >= 0   (sufficient, not necessary)
/// With T = 0 only the value at the origin is constrained (a >= 0, c >= 0).
/// Throws std::invalid_argument for T < 0 or a wrong parameter count.
bool feasible(Family family, std::span<const double> params, double horizon);

/// A feasible intensity on [0, horizon]. Constructors throw
/// std::invalid_argument for infeasible parameters.
class IntensityModel {
public:
    IntensityModel(Family family, std::span<const double> params, double horizon);

    static IntensityModel constant(double rate, double horizon);
    static IntensityModel linear(double a, double b, double horizon);
    static IntensityModel quadratic(double a, double b, double c, double horizon);
    static IntensityModel zero(Family family, double horizon);

    Family family() const noexcept { return family_; }
    double horizon() const noexcept { return horizon_; }
    std::span<const double> params() const noexcept { return {params_.data(), parameter_count(family_)}; }
    kernels::Poly poly() const noexcept { return {params_[0], params_[1], params_[2]}; }
    bool is_zero() const noexcept { return params_[0] == 0.0 && params_[1] == 0.0 && params_[2] == 0.0; }

    /// lambda(t). Throws std::out_of_range outside [0, horizon] unless extrapolating.
    double evaluate(double t, Range range = Range::Observed) const;

    /// A(t) = integral of lambda over [0, t]. Throws std::out_of_range for
    /// t < 0, and for t > horizon unless extrapolating.
    double compensator(double t, Range range = Range::Observed) const;

    /// A(to) - A(from), computed without cancellation. Requires from <= to.
    double increment(double from, double to, Range range = Range::Observed) const;

    friend bool operator==(const IntensityModel&, const IntensityModel&) = default;

private:
    void check_range(double t, Range range) const;

    Family family_ = Family::Constant;
    std::array<double, 3> params_{};
    double horizon_ = 0.0;
};

struct RegionSpec {
    double a_max = 10.0;
    double b_max = 100.0;
    double c_max = 1.0;          ///< Quadratic only: c slices span [-c_max, c_max].
    std::size_t resolution = 201;  ///< Points per a and b axis.
    std::size_t c_resolution = 3;  ///< Quadratic only.
};

/// Feasibility over the lattice a in [0, a_max], b in [-b_max, b_max] (and c
/// slices for Quadratic). The Constant family yields a single axis
/// lambda in [-a_max, a_max].
struct RegionGrid {
    Family family = Family::Linear;
    double horizon = 0.0;
    std::vector<double> a_values;
    std::vector<double> b_values;  ///< {0} for Constant.
    std::vector<double> c_values;  ///< {0} unless Quadratic.
    std::vector<std::uint8_t> mask;  ///< Indexed by index(ia, ib, ic).

    std::size_t index(std::size_t ia, std::size_t ib, std::size_t ic = 0) const noexcept {
        return (ic * a_values.size() + ia) * b_values.size() + ib;
    }
    bool at(std::size_t ia, std::size_t ib, std::size_t ic = 0) const { return mask.at(index(ia, ib, ic)) != 0; }
};

RegionGrid feasible_region_grid(Family family, double horizon, const RegionSpec& spec = {});

/// Columns: lambda,feasible | a,b,feasible | a,b,c,feasible.
void write_region_csv(std::ostream& out, const RegionGrid& grid);

}  // namespace pfraud

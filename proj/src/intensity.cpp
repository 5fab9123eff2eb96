#include "pfraud/intensity.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

namespace pfraud {

std::string_view family_name(Family f) noexcept {
    switch (f) {
        case Family::Constant: return "constant";
        case Family::Linear: return "linear";
        case Family::Quadratic: return "quadratic";
    }
    return "unknown";
}

Family parse_family(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "constant") return Family::Constant;
    if (lower == "linear") return Family::Linear;
    if (lower == "quadratic") return Family::Quadratic;
    throw std::invalid_argument("unknown intensity family '" + std::string(name) + "'");
}

std::size_t parameter_count(Family f) noexcept {
    switch (f) {
        case Family::Constant: return 1;
        case Family::Linear: return 2;
        case Family::Quadratic: return 3;
    }
    return 0;
}

bool feasible(Family family, std::span<const double> params, double horizon) {
    if (!(horizon >= 0.0)) throw std::invalid_argument("feasible: horizon must be >= 0");
    if (params.size() != parameter_count(family))
        throw std::invalid_argument("feasible: wrong parameter count for " + std::string(family_name(family)));
    if (!std::all_of(params.begin(), params.end(), [](double v) { return std::isfinite(v); })) return false;

    constexpr double tol = kFeasibilityTolerance;
    const double a = params[0];
    if (a < -tol) return false;
    if (family == Family::Constant) return true;
    if (family == Family::Quadratic && params[2] < -tol) return false;
    if (horizon == 0.0) return true;
    // Same operation order as kernels::feasible_mask so grids agree pointwise.
    return params[1] + a * (1.0 / horizon) >= -tol;
}

IntensityModel::IntensityModel(Family family, std::span<const double> params, double horizon)
    : family_(family), horizon_(horizon) {
    if (!std::isfinite(horizon)) throw std::invalid_argument("intensity horizon must be finite");
    if (!feasible(family, params, horizon))
        throw std::invalid_argument("infeasible " + std::string(family_name(family)) + " intensity parameters");
    std::copy(params.begin(), params.end(), params_.begin());
}

IntensityModel IntensityModel::constant(double rate, double horizon) {
    const double p[] = {rate};
    return {Family::Constant, p, horizon};
}

IntensityModel IntensityModel::linear(double a, double b, double horizon) {
    const double p[] = {a, b};
    return {Family::Linear, p, horizon};
}

IntensityModel IntensityModel::quadratic(double a, double b, double c, double horizon) {
    const double p[] = {a, b, c};
    return {Family::Quadratic, p, horizon};
}

IntensityModel IntensityModel::zero(Family family, double horizon) {
    const std::array<double, 3> p{};
    return {family, std::span<const double>(p.data(), parameter_count(family)), horizon};
}

void IntensityModel::check_range(double t, Range range) const {
    if (!(t >= 0.0)) throw std::out_of_range("intensity evaluated before time 0");
    if (range == Range::Observed && t > horizon_)
        throw std::out_of_range("intensity evaluated beyond its horizon " + std::to_string(horizon_));
}

double IntensityModel::evaluate(double t, Range range) const {
    check_range(t, range);
    return params_[0] + t * (params_[1] + t * params_[2]);
}

double IntensityModel::compensator(double t, Range range) const {
    check_range(t, range);
    return t * (params_[0] + t * (0.5 * params_[1] + t * (params_[2] / 3.0)));
}

double IntensityModel::increment(double from, double to, Range range) const {
    check_range(from, range);
    check_range(to, range);
    if (to < from) throw std::invalid_argument("compensator increment needs from <= to");
    const double s = from, e = to;
    return (e - s) * (params_[0] + 0.5 * params_[1] * (e + s) + (params_[2] / 3.0) * (e * e + e * s + s * s));
}

namespace {

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = i + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

}  // namespace

RegionGrid feasible_region_grid(Family family, double horizon, const RegionSpec& spec) {
    if (!(horizon > 0.0)) throw std::invalid_argument("region: horizon must be > 0");
    if (!(spec.a_max > 0.0)) throw std::invalid_argument("region: a_max must be > 0");
    if (family != Family::Constant && !(spec.b_max > 0.0)) throw std::invalid_argument("region: b_max must be > 0");
    if (spec.resolution < 2) throw std::invalid_argument("region: resolution must be >= 2");

    RegionGrid grid;
    grid.family = family;
    grid.horizon = horizon;
    if (family == Family::Constant) {
        grid.a_values = linspace(-spec.a_max, spec.a_max, spec.resolution);
        grid.b_values = {0.0};
        grid.c_values = {0.0};
    } else {
        grid.a_values = linspace(0.0, spec.a_max, spec.resolution);
        grid.b_values = linspace(-spec.b_max, spec.b_max, spec.resolution);
        if (family == Family::Quadratic) {
            if (!(spec.c_max > 0.0)) throw std::invalid_argument("region: c_max must be > 0");
            if (spec.c_resolution < 2) throw std::invalid_argument("region: c_resolution must be >= 2");
            grid.c_values = linspace(-spec.c_max, spec.c_max, spec.c_resolution);
        } else {
            grid.c_values = {0.0};
        }
    }

    const std::size_t n = grid.a_values.size() * grid.b_values.size() * grid.c_values.size();
    std::vector<double> a(n), b(n), c(n);
    for (std::size_t ic = 0; ic < grid.c_values.size(); ++ic)
        for (std::size_t ia = 0; ia < grid.a_values.size(); ++ia)
            for (std::size_t ib = 0; ib < grid.b_values.size(); ++ib) {
                const std::size_t k = grid.index(ia, ib, ic);
                a[k] = grid.a_values[ia];
                b[k] = grid.b_values[ib];
                c[k] = grid.c_values[ic];
            }
    grid.mask.resize(n);
    // The constant family has no slope constraint: a zero inverse horizon
    // with b = 0 leaves only lambda >= 0.
    const double inv_h = family == Family::Constant ? 0.0 : 1.0 / horizon;
    kernels::feasible_mask(a, b, c, inv_h, kFeasibilityTolerance, grid.mask);
    return grid;
}

void write_region_csv(std::ostream& out, const RegionGrid& grid) {
    out.precision(17);
    switch (grid.family) {
        case Family::Constant: out << "lambda,feasible\n"; break;
        case Family::Linear: out << "a,b,feasible\n"; break;
        case Family::Quadratic: out << "a,b,c,feasible\n"; break;
    }
    for (std::size_t ic = 0; ic < grid.c_values.size(); ++ic)
        for (std::size_t ia = 0; ia < grid.a_values.size(); ++ia)
            for (std::size_t ib = 0; ib < grid.b_values.size(); ++ib) {
                out << grid.a_values[ia];
                if (grid.family != Family::Constant) out << ',' << grid.b_values[ib];
                if (grid.family == Family::Quadratic) out << ',' << grid.c_values[ic];
                out << ',' << int(grid.at(ia, ib, ic)) << '\n';
            }
}

}  // namespace pfraud

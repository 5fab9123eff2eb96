#pragma once

#include <functional>
#include <span>
#include <vector>

namespace pfraud::optim {

struct NelderMeadOptions {
    /// Stop once every vertex lies within this Euclidean distance of the best one.
    double diameter_tol = 1e-8;
    int max_iterations = 5000;
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

/// Derivative-free minimization (reflection 1, expansion 2, contraction 1/2,
/// shrink 1/2). The initial simplex is x0 plus steps[i] along each axis.
/// The best vertex never gets worse, so the result is no worse than x0.
NelderMeadResult nelder_mead(const Objective& f, std::span<const double> x0, std::span<const double> steps,
                             const NelderMeadOptions& options = {});

}  // namespace pfraud::optim

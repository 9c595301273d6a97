#pragma once

#include <functional>
#include <vector>

namespace cvlambda {

struct BoxBound {
    double lo = 0.0;
    double hi = 1.0;
    /// Search in log10 coordinates; needs lo > 0.
    bool log = false;
};

struct NelderMeadOptions {
    /// Stop when every simplex edge spans less than this fraction of its box side.
    double tolerance = 1e-6;
    int max_iterations = 500;
    /// Initial simplex edge as a fraction of each box side.
    double initial_step = 0.05;
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
};

using ScalarObjective = std::function<double(const std::vector<double>&)>;

/// Box-constrained Nelder–Mead. Points are clamped to the box; non-finite
/// objective values count as +inf. The returned value never exceeds f(x0).
NelderMeadResult nelder_mead(const ScalarObjective& f, const std::vector<double>& x0,
                             const std::vector<BoxBound>& bounds,
                             const NelderMeadOptions& options = {});

}  // namespace cvlambda

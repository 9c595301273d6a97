#pragma once

#include "cvlambda/correlation.hpp"
#include "cvlambda/model.hpp"
#include "cvlambda/optimize.hpp"

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace cvlambda {

enum class Parameter { delta, gamma12, omega, alpha };
enum class Spacing { linear, log };

std::string to_string(Parameter p);
Parameter parameter_from_string(const std::string& name);
std::string to_string(Spacing s);
Spacing spacing_from_string(const std::string& name);

/// Sets one swept parameter on a copy of `base`. `omega` sets |omega_in| and keeps its phase.
ModelParams with_parameter(ModelParams base, Parameter p, double value);
double get_parameter(const ModelParams& params, Parameter p);

struct SweepAxis {
    Parameter name = Parameter::delta;
    std::vector<double> values;
    Spacing spacing = Spacing::linear;

    static SweepAxis linear(Parameter name, double lo, double hi, std::size_t n);
    static SweepAxis logarithmic(Parameter name, double lo, double hi, std::size_t n);

    /// Throws InvalidParams unless values are strictly increasing (and positive for log).
    void validate() const;
};

struct GridPoint {
    std::vector<double> coords;  ///< one entry per axis, in axis order
    double value = 0.0;
};

struct PointFailure {
    std::size_t index = 0;
    std::vector<double> coords;
    std::string kind;
    std::string message;
};

struct SweepResult {
    std::vector<SweepAxis> axes;
    /// Row-major, last axis fastest. NaN marks a failed point.
    std::vector<double> v_table;
    GridPoint argmin;
    GridPoint refined_min;
    std::vector<PointFailure> failures;

    std::vector<std::size_t> shape() const;
    std::vector<double> coords(std::size_t flat_index) const;
};

using ParamsObjective = std::function<double(const ModelParams&)>;

struct SweepOptions {
    /// 0 selects the hardware concurrency.
    unsigned workers = 0;
    bool refine = true;
    /// Throw when more than half of the grid points fail.
    bool fail_on_majority = true;
    NelderMeadOptions simplex;
    PropagationOptions propagation;
};

/// V at ξ = 1 for every grid point (1 to 3 axes).
SweepResult grid_sweep(const std::vector<SweepAxis>& axes, const ModelParams& fixed,
                       PropagationMode mode, const SweepOptions& options = {});

/// Same, with an arbitrary objective in place of V.
SweepResult grid_sweep(const std::vector<SweepAxis>& axes, const ModelParams& fixed,
                       const ParamsObjective& objective, const SweepOptions& options = {});

struct ParameterBound {
    Parameter name = Parameter::delta;
    double lo = 0.0;
    double hi = 1.0;
    bool log = true;
};

struct OptimizeOptions {
    unsigned workers = 0;
    /// Coarse seeding grid per bounded parameter.
    std::size_t seeds_per_axis = 7;
    /// Number of best seeds refined by the simplex.
    std::size_t refine_top = 3;
    NelderMeadOptions simplex;
    PropagationOptions propagation;
};

struct OptimizeResult {
    ModelParams params;
    double v = 0.0;
    double best_seed_value = 0.0;
    std::vector<double> x;  ///< optimum in bound order
    int evaluations = 0;
};

OptimizeResult optimize_v(const std::vector<ParameterBound>& bounds, const ModelParams& fixed,
                          PropagationMode mode, const OptimizeOptions& options = {});

OptimizeResult optimize_v(const std::vector<ParameterBound>& bounds, const ModelParams& fixed,
                          const ParamsObjective& objective, const OptimizeOptions& options = {});

/// Runs fn(i) for i in [0, n) on up to `workers` threads.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn);

}  // namespace cvlambda

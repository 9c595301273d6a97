#include "cvlambda/sweep.hpp"

#include "cvlambda/errors.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>
#include <thread>

namespace cvlambda {

std::string to_string(Parameter p) {
    switch (p) {
        case Parameter::delta: return "delta";
        case Parameter::gamma12: return "gamma12";
        case Parameter::omega: return "omega";
        case Parameter::alpha: return "alpha";
    }
    return "?";
}

Parameter parameter_from_string(const std::string& name) {
    if (name == "delta") return Parameter::delta;
    if (name == "gamma12") return Parameter::gamma12;
    if (name == "omega" || name == "omega_in") return Parameter::omega;
    if (name == "alpha") return Parameter::alpha;
    throw ConfigError("unknown sweep parameter '" + name + "'");
}

std::string to_string(Spacing s) { return s == Spacing::log ? "log" : "linear"; }

Spacing spacing_from_string(const std::string& name) {
    if (name == "log") return Spacing::log;
    if (name == "linear") return Spacing::linear;
    throw ConfigError("unknown spacing '" + name + "'");
}

ModelParams with_parameter(ModelParams base, Parameter p, double value) {
    switch (p) {
        case Parameter::delta: base.delta = value; break;
        case Parameter::gamma12: base.gamma12 = value; break;
        case Parameter::alpha: base.alpha = value; break;
        case Parameter::omega: {
            const double mag = std::abs(base.omega_in);
            base.omega_in = mag == 0.0 ? cd(value, 0.0) : base.omega_in * (value / mag);
            break;
        }
    }
    return base;
}

double get_parameter(const ModelParams& params, Parameter p) {
    switch (p) {
        case Parameter::delta: return params.delta;
        case Parameter::gamma12: return params.gamma12;
        case Parameter::alpha: return params.alpha;
        case Parameter::omega: return std::abs(params.omega_in);
    }
    return 0.0;
}

SweepAxis SweepAxis::linear(Parameter name, double lo, double hi, std::size_t n) {
    SweepAxis a{name, {}, Spacing::linear};
    for (std::size_t i = 0; i < n; ++i)
        a.values.push_back(n == 1 ? lo : lo + (hi - lo) * double(i) / double(n - 1));
    return a;
}

SweepAxis SweepAxis::logarithmic(Parameter name, double lo, double hi, std::size_t n) {
    SweepAxis a{name, {}, Spacing::log};
    const double l0 = std::log10(lo), l1 = std::log10(hi);
    for (std::size_t i = 0; i < n; ++i)
        a.values.push_back(n == 1 ? lo : std::pow(10.0, l0 + (l1 - l0) * double(i) / double(n - 1)));
    return a;
}

void SweepAxis::validate() const {
    if (values.empty()) throw InvalidParams("axis '" + to_string(name) + "' has no values");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i]))
            throw InvalidParams("axis '" + to_string(name) + "' has a non-finite value");
        if (i > 0 && !(values[i] > values[i - 1]))
            throw InvalidParams("axis '" + to_string(name) + "' values must be strictly increasing");
        if (spacing == Spacing::log && !(values[i] > 0.0))
            throw InvalidParams("log axis '" + to_string(name) + "' needs positive values");
    }
}

std::vector<std::size_t> SweepResult::shape() const {
    std::vector<std::size_t> s;
    for (const auto& a : axes) s.push_back(a.values.size());
    return s;
}

std::vector<double> SweepResult::coords(std::size_t flat) const {
    std::vector<double> c(axes.size());
    for (std::size_t k = axes.size(); k-- > 0;) {
        const std::size_t n = axes[k].values.size();
        c[k] = axes[k].values[flat % n];
        flat /= n;
    }
    return c;
}

void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

namespace {

// Lexicographic tie-break on (delta, gamma12, omega, alpha).
std::array<double, 4> tie_key(const std::vector<SweepAxis>& axes, const std::vector<double>& c) {
    std::array<double, 4> key{0.0, 0.0, 0.0, 0.0};
    for (std::size_t k = 0; k < axes.size(); ++k) key[static_cast<int>(axes[k].name)] = c[k];
    return key;
}

ModelParams apply_axes(ModelParams p, const std::vector<SweepAxis>& axes,
                       const std::vector<double>& c) {
    for (std::size_t k = 0; k < axes.size(); ++k) p = with_parameter(p, axes[k].name, c[k]);
    return p;
}

ParamsObjective v_objective(PropagationMode mode, const PropagationOptions& prop) {
    return [mode, prop](const ModelParams& p) { return entanglement_at_exit(p, mode, prop); };
}

}  // namespace

SweepResult grid_sweep(const std::vector<SweepAxis>& axes, const ModelParams& fixed,
                       PropagationMode mode, const SweepOptions& options) {
    return grid_sweep(axes, fixed, v_objective(mode, options.propagation), options);
}

SweepResult grid_sweep(const std::vector<SweepAxis>& axes, const ModelParams& fixed,
                       const ParamsObjective& objective, const SweepOptions& options) {
    if (axes.empty() || axes.size() > 3) throw InvalidParams("a sweep needs 1 to 3 axes");
    for (const auto& a : axes) a.validate();
    for (std::size_t i = 0; i < axes.size(); ++i)
        for (std::size_t j = i + 1; j < axes.size(); ++j)
            if (axes[i].name == axes[j].name)
                throw InvalidParams("axis '" + to_string(axes[i].name) + "' appears twice");

    SweepResult res;
    res.axes = axes;
    std::size_t total = 1;
    for (const auto& a : axes) total *= a.values.size();
    res.v_table.assign(total, std::numeric_limits<double>::quiet_NaN());

    std::vector<std::optional<PointFailure>> failed(total);
    parallel_for(total, options.workers, [&](std::size_t i) {
        const auto c = res.coords(i);
        try {
            res.v_table[i] = objective(apply_axes(fixed, axes, c));
            if (!std::isfinite(res.v_table[i])) throw NonPhysical("non-finite value");
        } catch (const Error& e) {
            res.v_table[i] = std::numeric_limits<double>::quiet_NaN();
            failed[i] = PointFailure{i, c, e.kind(), e.what()};
        }
    });
    for (auto& f : failed)
        if (f) res.failures.push_back(std::move(*f));

    if (options.fail_on_majority && 2 * res.failures.size() > total) {
        std::ostringstream msg;
        msg << res.failures.size() << " of " << total << " grid points failed";
        if (!res.failures.empty()) {
            msg << "; first at (";
            for (std::size_t k = 0; k < axes.size(); ++k)
                msg << (k ? ", " : "") << to_string(axes[k].name) << "="
                    << res.failures.front().coords[k];
            msg << "): " << res.failures.front().message;
        }
        throw Error("SweepFailed", msg.str());
    }

    std::size_t best = total;
    for (std::size_t i = 0; i < total; ++i) {
        const double v = res.v_table[i];
        if (std::isnan(v)) continue;
        if (best == total || v < res.v_table[best] ||
            (v == res.v_table[best] &&
             tie_key(axes, res.coords(i)) < tie_key(axes, res.coords(best)))) {
            best = i;
        }
    }
    if (best == total) {
        res.argmin = {{}, std::numeric_limits<double>::quiet_NaN()};
        res.refined_min = res.argmin;
        return res;
    }
    res.argmin = {res.coords(best), res.v_table[best]};
    res.refined_min = res.argmin;

    if (options.refine) {
        std::vector<BoxBound> box;
        for (const auto& a : axes)
            box.push_back({a.values.front(), a.values.back(), a.spacing == Spacing::log});
        auto f = [&](const std::vector<double>& x) {
            try {
                return objective(apply_axes(fixed, axes, x));
            } catch (const Error&) {
                return std::numeric_limits<double>::infinity();
            }
        };
        const auto nm = nelder_mead(f, res.argmin.coords, box, options.simplex);
        if (nm.value < res.argmin.value) res.refined_min = {nm.x, nm.value};
    }
    return res;
}

OptimizeResult optimize_v(const std::vector<ParameterBound>& bounds, const ModelParams& fixed,
                          PropagationMode mode, const OptimizeOptions& options) {
    return optimize_v(bounds, fixed, v_objective(mode, options.propagation), options);
}

OptimizeResult optimize_v(const std::vector<ParameterBound>& bounds, const ModelParams& fixed,
                          const ParamsObjective& objective, const OptimizeOptions& options) {
    if (bounds.empty()) throw InvalidParams("optimize_v needs at least one bound");
    std::vector<SweepAxis> axes;
    std::vector<BoxBound> box;
    for (const auto& b : bounds) {
        if (!(b.hi >= b.lo)) throw InvalidParams("bound for '" + to_string(b.name) + "' is empty");
        const std::size_t n = b.hi > b.lo ? std::max<std::size_t>(options.seeds_per_axis, 1) : 1;
        axes.push_back(b.log ? SweepAxis::logarithmic(b.name, b.lo, b.hi, n)
                             : SweepAxis::linear(b.name, b.lo, b.hi, n));
        box.push_back({b.lo, b.hi, b.log});
    }

    std::atomic<int> evaluations{0};
    auto counted = [&](const ModelParams& p) {
        ++evaluations;
        return objective(p);
    };

    SweepOptions sweep_opt;
    sweep_opt.workers = options.workers;
    sweep_opt.refine = false;
    sweep_opt.fail_on_majority = false;
    const SweepResult seeds = grid_sweep(axes, fixed, counted, sweep_opt);
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < seeds.v_table.size(); ++i)
        if (!std::isnan(seeds.v_table[i])) order.push_back(i);
    if (order.empty()) throw NoImprovement("every seed evaluation failed");
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return seeds.v_table[a] < seeds.v_table[b]; });
    order.resize(std::min(order.size(), std::max<std::size_t>(options.refine_top, 1)));

    std::vector<NelderMeadResult> refined(order.size());
    parallel_for(order.size(), options.workers, [&](std::size_t k) {
        auto f = [&](const std::vector<double>& x) {
            try {
                ModelParams p = fixed;
                for (std::size_t d = 0; d < bounds.size(); ++d) p = with_parameter(p, bounds[d].name, x[d]);
                return counted(p);
            } catch (const Error&) {
                return std::numeric_limits<double>::infinity();
            }
        };
        refined[k] = nelder_mead(f, seeds.coords(order[k]), box, options.simplex);
    });

    OptimizeResult out;
    out.best_seed_value = seeds.v_table[order.front()];
    out.x = seeds.coords(order.front());
    out.v = out.best_seed_value;
    for (const auto& r : refined) {
        if (r.value < out.v) {
            out.v = r.value;
            out.x = r.x;
        }
    }
    out.params = fixed;
    for (std::size_t d = 0; d < bounds.size(); ++d)
        out.params = with_parameter(out.params, bounds[d].name, out.x[d]);
    out.evaluations = evaluations.load();
    return out;
}

}  // namespace cvlambda

#pragma once

// Adaptive Dormand–Prince 5(4) stepper for Eigen-valued states.

#include "cvlambda/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <utility>

#include <Eigen/Core>

namespace cvlambda {

struct OdeOptions {
    double rtol = 1e-9;
    double atol = 1e-12;
    double initial_step = 1e-4;
    double max_step = 0.05;
    std::size_t max_steps = 2'000'000;
};

struct OdeStats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
};

namespace detail {

template <class State>
double scaled_error(const State& err, const State& y0, const State& y1, const OdeOptions& opt) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
        const double scale =
            opt.atol + opt.rtol * std::max(std::abs(y0.data()[i]), std::abs(y1.data()[i]));
        const double e = std::abs(err.data()[i]) / scale;
        if (!(e <= worst)) worst = e;  // propagates NaN
    }
    return worst;
}

}  // namespace detail

/// Integrates y' = rhs(x, y) from x0 to x1 in place. `after_step(x, y)` runs
/// after each accepted step and may project y (e.g. re-hermitize).
/// Throws IntegrationFailure when the step size underflows or max_steps is hit.
template <class State, class Rhs, class AfterStep>
OdeStats integrate_dopri5(Rhs&& rhs, State& y, double x0, double x1, const OdeOptions& opt,
                          AfterStep&& after_step) {
    // Butcher tableau.
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                     b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    OdeStats stats;
    if (x1 <= x0) return stats;

    double x = x0;
    double h = std::min({opt.initial_step, opt.max_step, x1 - x0});
    State k1 = rhs(x, y);
    while (x < x1) {
        if (stats.accepted + stats.rejected >= opt.max_steps) {
            std::ostringstream msg;
            msg << "step budget exhausted at xi=" << x;
            throw IntegrationFailure(msg.str());
        }
        const bool last = x + h >= x1;
        if (last) h = x1 - x;

        const State k2 = rhs(x + c2 * h, State(y + h * (a21 * k1)));
        const State k3 = rhs(x + c3 * h, State(y + h * (a31 * k1 + a32 * k2)));
        const State k4 = rhs(x + c4 * h, State(y + h * (a41 * k1 + a42 * k2 + a43 * k3)));
        const State k5 =
            rhs(x + c5 * h, State(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
        const State k6 = rhs(
            x + h, State(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
        State y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const State k7 = rhs(x + h, y_new);
        const State err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        const double err_norm = detail::scaled_error(err, y, y_new, opt);
        if (!std::isfinite(err_norm) || !y_new.allFinite()) {
            std::ostringstream msg;
            msg << "non-finite state at xi=" << x;
            throw IntegrationFailure(msg.str());
        }
        if (err_norm <= 1.0) {
            x = last ? x1 : x + h;
            y = std::move(y_new);
            after_step(x, y);
            k1 = last ? k7 : rhs(x, y);  // after_step may have moved y
            ++stats.accepted;
            const double grow = err_norm == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(err_norm, -0.2));
            h = std::min(h * grow, opt.max_step);
        } else {
            ++stats.rejected;
            h *= std::max(0.2, 0.9 * std::pow(err_norm, -0.2));
            if (h < 1e-14 * std::max(1.0, std::abs(x))) {
                std::ostringstream msg;
                msg << "step size underflow at xi=" << x;
                throw IntegrationFailure(msg.str());
            }
        }
    }
    return stats;
}

template <class State, class Rhs>
OdeStats integrate_dopri5(Rhs&& rhs, State& y, double x0, double x1, const OdeOptions& opt) {
    return integrate_dopri5(std::forward<Rhs>(rhs), y, x0, x1, opt, [](double, State&) {});
}

}  // namespace cvlambda

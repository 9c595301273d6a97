#include "cvlambda/correlation.hpp"

#include "cvlambda/errors.hpp"
#include "cvlambda/fluctuation.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace cvlambda {

namespace {

void hermitize(Mat4& p) { p = (0.5 * (p + p.adjoint())).eval(); }

struct Rhs {
    const LyapunovCoefficients& coefficients;
    std::optional<std::pair<Mat4, Mat4>> fixed;

    Mat4 operator()(double xi, const Mat4& p) const {
        if (fixed) return lyap(fixed->first, fixed->second, p);
        const auto cz = coefficients(xi);
        return lyap(cz.first, cz.second, p);
    }

    static Mat4 lyap(const Mat4& c, const Mat4& z, const Mat4& p) {
        return c * p + p * c.adjoint() + z;
    }
};

}  // namespace

CorrelationState vacuum_initial_correlations() {
    CorrelationState s;
    s.xi = 0.0;
    s.corr = Mat4::Zero();
    s.corr(0, 0) = 1.0;
    s.corr(2, 2) = 1.0;
    return s;
}

std::vector<CorrelationState> propagate_lyapunov_sampled(const LyapunovCoefficients& coefficients,
                                                         const Mat4& initial,
                                                         const std::vector<double>& xi_points,
                                                         const OdeOptions& options,
                                                         bool constant) {
    Rhs rhs{coefficients, std::nullopt};
    if (constant) rhs.fixed = coefficients(0.0);

    std::vector<CorrelationState> out;
    out.reserve(xi_points.size());
    Mat4 p = initial;
    double x = 0.0;
    for (double target : xi_points) {
        if (target < x) throw InvalidParams("sample points must be nondecreasing and >= 0");
        integrate_dopri5(rhs, p, x, target, options, [](double, Mat4& y) { hermitize(y); });
        x = target;
        out.push_back({target, p});
    }
    return out;
}

CorrelationState propagate_lyapunov(const LyapunovCoefficients& coefficients, const Mat4& initial,
                                    double xi_end, const OdeOptions& options, bool constant) {
    return propagate_lyapunov_sampled(coefficients, initial, {xi_end}, options, constant).front();
}

LyapunovCoefficients model_coefficients(const ModelParams& params, PropagationMode mode,
                                        double g) {
    if (mode == PropagationMode::stable) {
        const auto m = assemble(params, stable_fields(params), g);
        const std::pair<Mat4, Mat4> cz{m.drift, m.noise};
        return [cz](double) { return cz; };
    }
    return [params, g](double xi) {
        const auto m = assemble(params, propagate_mean_field(params, xi), g);
        return std::pair<Mat4, Mat4>{m.drift, m.noise};
    };
}

std::vector<CorrelationState> propagate_correlations_sampled(const ModelParams& params,
                                                             const std::vector<double>& xi_points,
                                                             PropagationMode mode,
                                                             const PropagationOptions& options) {
    params.validate();
    for (double x : xi_points) {
        if (!(x >= 0.0 && x <= 1.0)) {
            std::ostringstream msg;
            msg << "xi must lie in [0, 1], got " << x;
            throw InvalidParams(msg.str());
        }
    }
    const Mat4 initial = options.initial.value_or(vacuum_initial_correlations().corr);
    return propagate_lyapunov_sampled(model_coefficients(params, mode, options.g), initial,
                                      xi_points, options.ode, mode == PropagationMode::stable);
}

CorrelationState propagate_correlations(const ModelParams& params, double xi_end,
                                        PropagationMode mode, const PropagationOptions& options) {
    if (!(xi_end > 0.0 && xi_end <= 1.0)) {
        std::ostringstream msg;
        msg << "xi_end must lie in (0, 1], got " << xi_end;
        throw InvalidParams(msg.str());
    }
    return propagate_correlations_sampled(params, {xi_end}, mode, options).front();
}

EntanglementResult dgcz_value(const Mat4& corr) {
    EntanglementResult r;
    r.n_s = corr(1, 1).real();
    r.n_c = corr(3, 3).real();
    r.cross = corr(0, 3);
    r.v = 4.0 * (1.0 + r.n_s + r.n_c - 2.0 * std::abs(r.cross));
    r.theta_opt = 0.5 * std::arg(r.cross) + 0.5 * std::numbers::pi;
    if (r.v < -1e-8 || !std::isfinite(r.v)) {
        std::ostringstream msg;
        msg << "DGCZ value " << r.v << " is not physical";
        throw NonPhysical(msg.str());
    }
    return r;
}

EntanglementResult dgcz_value(const CorrelationState& state) { return dgcz_value(state.corr); }

double dgcz_theta(const Mat4& corr, double theta) {
    const double n_s = corr(1, 1).real();
    const double n_c = corr(3, 3).real();
    const cd cross = corr(0, 3);
    return 4.0 * (1.0 + n_s + n_c + 2.0 * (cross * std::exp(cd(0.0, -2.0 * theta))).real());
}

double dgcz_theta(const CorrelationState& state, double theta) {
    return dgcz_theta(state.corr, theta);
}

double entanglement_at_exit(const ModelParams& params, PropagationMode mode,
                            const PropagationOptions& options) {
    return dgcz_value(propagate_correlations(params, 1.0, mode, options)).v;
}

}  // namespace cvlambda

#include "cvlambda/analytic.hpp"

#include "cvlambda/errors.hpp"

#include <cmath>
#include <iostream>

namespace cvlambda {

namespace {

void require_domain(const ModelParams& p) {
    if (std::abs(p.omega_in) == 0.0) throw DomainError("analytic approximation needs omega_in != 0");
    if (p.gamma12 != 0.0) throw DomainError("analytic approximation needs gamma12 = 0");
}

// e^{-λ} cosh λ without overflow for large positive λ.
double damped_cosh(double lambda) {
    if (lambda >= 0.0) return 0.5 * (1.0 + std::exp(-2.0 * lambda));
    return std::exp(-lambda) * std::cosh(lambda);
}

}  // namespace

ApproxCoefficients approx_coefficients(const ModelParams& p) {
    require_domain(p);
    const double d = p.delta / p.gamma;
    const double w = std::abs(p.omega_in) / p.gamma;
    const double a = p.alpha;
    const double w4 = std::pow(w, 4);
    const cd m = cd(d, -1.0);  // −i + δ
    const cd i = kI;

    ApproxCoefficients c;
    c.p1 = -2.0 * i * a * d * d / (m * m * m * w4);
    c.s1 = -c.p1;
    c.r2 = 2.0 * i * a * d * d * cd(d, 1.0) / (m * m * m * m * w4);
    c.q2 = 2.0 * a * d * d * cd(1.0, -d) / (m * m * m * m * w4);
    return c;
}

AnalyticApprox analytic_v(const ModelParams& p) {
    const auto coeffs = approx_coefficients(p);
    const double d = p.delta / p.gamma;
    const double w = std::abs(p.omega_in) / p.gamma;
    const double d2 = d * d;

    AnalyticApprox r;
    r.p1 = coeffs.p1;
    r.s1 = coeffs.s1;
    r.r2 = coeffs.r2;
    r.q2 = coeffs.q2;
    r.zeta = d * (-1.0 + d2);
    r.eta = 1.0 - 6.0 * d2 + d2 * d2;
    r.lambda = 4.0 * p.alpha * d2 * r.eta / (std::pow(1.0 + d2, 4) * std::pow(w, 4));
    if (d == 0.0) return r;

    const double lam = r.lambda;
    const double z2 = 16.0 * r.zeta * r.zeta;
    const double e2 = r.eta * r.eta;
    const double damp = std::exp(-lam);
    const double cs = std::cos(d * lam), sn = std::sin(d * lam);
    const double ch = damped_cosh(lam);  // e^{-λ} cosh λ

    // e^{-λ}(cos δλ − cosh λ) = −2e^{-λ}sin²(δλ/2) − (1 − e^{-λ})²/2, free of cancellation
    const double half = std::sin(0.5 * d * lam);
    const double em1 = std::expm1(-lam);
    const double diff = -2.0 * damp * half * half - 0.5 * em1 * em1;
    r.second_term = -4.0 * std::pow(1.0 + d2, 4) * diff / e2;

    // e^{-2λ} times the printed radicand, with e^{-λ} absorbed into each factor.
    const double bracket = (e2 - z2) * damp * cs + (z2 + e2) * ch + 8.0 * r.zeta * r.eta * damp * sn;
    double rad = (z2 + e2) * (-diff) * bracket;
    r.radicand = rad;
    if (rad < 0.0) {
        const double scale = (z2 + e2) * std::abs(diff) * std::abs(bracket);
        if (rad < -1e-12 * std::max(scale, 1.0)) {
            std::cerr << "analytic_v: radicand " << rad << " clamped to 0 at delta=" << p.delta
                      << '\n';
        }
        rad = 0.0;
        r.radicand_clamped = true;
    }
    r.third_term = -4.0 * std::sqrt(rad) / e2;
    r.nu = 4.0 + r.second_term + r.third_term;
    return r;
}

ScalingEstimates coefficient_scaling_estimates(const ModelParams& p, double xi) {
    const double w = std::abs(p.omega_in);
    if (w == 0.0) throw DomainError("scaling estimates need omega_in != 0");
    const double g = p.gamma, a = p.alpha;
    ScalingEstimates s;
    s.two_photon_estimate =
        a * g * std::abs(p.delta) / (2.0 * w * w) * std::exp(g * g * a * xi / (g * g + p.delta * p.delta));
    s.relaxation_estimate = a * p.gamma12 / (4.0 * w * w) *
                            std::exp(a * (2.0 * g + p.gamma12) * xi / (g + p.gamma12));
    return s;
}

}  // namespace cvlambda

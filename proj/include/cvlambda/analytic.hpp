#pragma once

#include "cvlambda/model.hpp"

namespace cvlambda {

/// Closed-form small-δ approximation of the two-photon-detuning scheme.
struct AnalyticApprox {
    double lambda = 0.0;
    double zeta = 0.0;
    double eta = 0.0;
    double nu = 4.0;
    /// The two correction terms, nu = 4 + second_term + third_term.
    double second_term = 0.0;
    double third_term = 0.0;
    /// Scaled radicand before clamping; negative values were clamped to zero.
    double radicand = 0.0;
    bool radicand_clamped = false;
    cd p1, s1, r2, q2;
};

struct ApproxCoefficients {
    cd p1, s1, r2, q2;
};

struct ScalingEstimates {
    double two_photon_estimate = 0.0;
    double relaxation_estimate = 0.0;
};

/// Approximate drift coefficients P1, S1, R2, Q2. Requires gamma12 = 0 and Ω ≠ 0.
ApproxCoefficients approx_coefficients(const ModelParams& params);

/// ν at the medium exit. Same domain as approx_coefficients.
AnalyticApprox analytic_v(const ModelParams& params);

/// Exponential magnitude estimates of the cross-coupling for the δ and Γ12 schemes.
ScalingEstimates coefficient_scaling_estimates(const ModelParams& params, double xi);

}  // namespace cvlambda

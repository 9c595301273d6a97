#pragma once

#include "cvlambda/model.hpp"
#include "cvlambda/ode.hpp"
#include "cvlambda/types.hpp"

#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace cvlambda {

/// Second moments ⟨a a†⟩ with a = (a_s, a_s†, a_c, a_c†).
struct CorrelationState {
    double xi = 0.0;
    Mat4 corr = Mat4::Zero();

    /// ⟨a_s a_s†⟩ − ⟨a_s† a_s⟩; 1 when the bosonic commutator is preserved.
    double commutator_s() const { return (corr(0, 0) - corr(1, 1)).real(); }
    double commutator_c() const { return (corr(2, 2) - corr(3, 3)).real(); }
    double hermiticity_defect() const { return (corr - corr.adjoint()).cwiseAbs().maxCoeff(); }
};

struct EntanglementResult {
    double v = 0.0;
    double n_s = 0.0;
    double n_c = 0.0;
    cd cross;  ///< ⟨a_s a_c⟩
    double theta_opt = 0.0;
};

struct PropagationOptions {
    OdeOptions ode;
    /// Input correlations at ξ = 0; vacuum when unset.
    std::optional<Mat4> initial;
    double g = 1.0;
};

/// Drift C and noise Z at position ξ.
using LyapunovCoefficients = std::function<std::pair<Mat4, Mat4>(double xi)>;

CorrelationState vacuum_initial_correlations();

/// Integrates dP/dξ = C P + P C† + Z from `initial` at ξ = 0, re-hermitizing after
/// every accepted step. When `constant` is set the coefficients are queried once.
CorrelationState propagate_lyapunov(const LyapunovCoefficients& coefficients, const Mat4& initial,
                                    double xi_end, const OdeOptions& options = {},
                                    bool constant = false);

/// States at each of the (increasing, positive) sample points.
std::vector<CorrelationState> propagate_lyapunov_sampled(const LyapunovCoefficients& coefficients,
                                                         const Mat4& initial,
                                                         const std::vector<double>& xi_points,
                                                         const OdeOptions& options = {},
                                                         bool constant = false);

/// C(ξ), Z(ξ) for the Λ medium in the chosen mode.
LyapunovCoefficients model_coefficients(const ModelParams& params, PropagationMode mode,
                                        double g = 1.0);

CorrelationState propagate_correlations(const ModelParams& params, double xi_end,
                                        PropagationMode mode,
                                        const PropagationOptions& options = {});

std::vector<CorrelationState> propagate_correlations_sampled(
    const ModelParams& params, const std::vector<double>& xi_points, PropagationMode mode,
    const PropagationOptions& options = {});

/// V = 4(1 + n_s + n_c − 2|⟨a_s a_c⟩|). Throws NonPhysical below −1e-8.
EntanglementResult dgcz_value(const Mat4& corr);
EntanglementResult dgcz_value(const CorrelationState& state);

/// Quadrature-angle resolved V(θ) = 4[1 + n_s + n_c + 2 Re(⟨a_s a_c⟩ e^{−2iθ})].
double dgcz_theta(const Mat4& corr, double theta);
double dgcz_theta(const CorrelationState& state, double theta);

/// Convenience: V at ξ = 1.
double entanglement_at_exit(const ModelParams& params, PropagationMode mode,
                            const PropagationOptions& options = {});

}  // namespace cvlambda

#pragma once

#include "cvlambda/types.hpp"

#include <optional>

namespace cvlambda {

/// Which detuning enters the ground-state coherence damping γ̃12.
enum class GroundDetuning {
    two_photon,       ///< (Γ12/2 + γφ) − iδ, from the ŝ_g2g1 equation of motion
    printed_control,  ///< (Γ12/2 + γφ) − iΔc, as printed alongside M1
};

/// Physical parameters of the Λ medium. Rates, detunings and Rabi
/// frequencies are in units of Γ; the medium length L is 1.
struct ModelParams {
    double gamma = 1.0;
    double gamma1 = 0.5;
    double gamma2 = 0.5;
    double gamma12 = 0.0;
    double gamma_phi = 0.0;
    double delta = 0.0;
    /// Single-photon detunings; when unset, Δs = −Δc = δ/2.
    std::optional<double> delta_s;
    std::optional<double> delta_c;
    double alpha = 50.0;
    cd c1{M_SQRT1_2, 0.0};
    cd c2{M_SQRT1_2, 0.0};
    cd omega_in{0.1, 0.0};
    GroundDetuning ground_detuning = GroundDetuning::two_photon;

    double detuning_s() const { return delta_s.value_or(0.5 * delta); }
    double detuning_c() const { return delta_c.value_or(-0.5 * delta); }
    double pop1() const { return std::norm(c1); }
    double pop2() const { return std::norm(c2); }

    /// Throws InvalidParams when an invariant is violated.
    void validate() const;
};

struct FieldState {
    double xi = 0.0;
    cd omega_c;
    cd omega_s;
    cd beta1;
    cd beta2;
    cd w_const;
};

/// Mean-field atomic quantities under the weak-field approximation.
struct MeanFieldCoherences {
    cd sigma_g1e;
    cd sigma_g2e;
    double sigma_g1g1 = 0.0;
    double sigma_g2g2 = 0.0;
    double sigma_ee = 0.0;
    cd sigma_g1g2;  ///< c1* c2

    cd sigma_eg1() const { return std::conj(sigma_g1e); }
    cd sigma_eg2() const { return std::conj(sigma_g2e); }
    cd sigma_g2g1() const { return std::conj(sigma_g1g2); }
};

struct PropagationConstants {
    cd beta1;
    cd beta2;
    cd w_const;
};

PropagationConstants beta_coefficients(const ModelParams& params);

/// Closed-form mean fields at ξ for Ω_c(0) = Ω, Ω_s(0) = 0.
FieldState propagate_mean_field(const ModelParams& params, double xi);

/// Same fields obtained by integrating the coupled first-order propagation
/// equations numerically; used to cross-check the closed form.
FieldState integrate_mean_field(const ModelParams& params, double xi, double rtol = 1e-12,
                                double atol = 1e-14);

/// Stably transmitted fields reached once the entrance losses are over.
FieldState stable_fields(const ModelParams& params);

MeanFieldCoherences mean_field_coherences(const ModelParams& params, const FieldState& fields);

}  // namespace cvlambda

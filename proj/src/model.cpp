#include "cvlambda/model.hpp"

#include "cvlambda/errors.hpp"
#include "cvlambda/ode.hpp"

#include <cmath>
#include <sstream>

namespace cvlambda {

void ModelParams::validate() const {
    auto fail = [](const std::string& what) { throw InvalidParams(what); };
    if (!(gamma > 0.0)) fail("gamma must be positive");
    if (std::abs(gamma1 + gamma2 - gamma) > 1e-12) fail("gamma1 + gamma2 must equal gamma");
    if (gamma1 < 0.0 || gamma2 < 0.0) fail("branch decay rates must be nonnegative");
    if (!(alpha > 0.0)) fail("alpha must be positive");
    if (gamma12 < 0.0) fail("gamma12 must be nonnegative");
    if (gamma_phi < 0.0) fail("gamma_phi must be nonnegative");
    if (std::abs(std::norm(c1) + std::norm(c2) - 1.0) > 1e-12) {
        std::ostringstream msg;
        msg << "|c1|^2 + |c2|^2 = " << std::norm(c1) + std::norm(c2) << ", expected 1";
        fail(msg.str());
    }
    const double values[] = {gamma, gamma1, gamma2, gamma12, gamma_phi, delta,
                             detuning_s(), detuning_c(), alpha, omega_in.real(),
                             omega_in.imag(), c1.real(), c1.imag(), c2.real(), c2.imag()};
    for (double v : values) {
        if (!std::isfinite(v)) fail("non-finite parameter value");
    }
}

PropagationConstants beta_coefficients(const ModelParams& p) {
    const double g = p.gamma;
    PropagationConstants out;
    out.beta1 = g * p.alpha / (2.0 * cd(2.0 * p.detuning_s(), g));
    out.beta2 = g * p.alpha / (2.0 * cd(2.0 * p.detuning_c(), g + p.gamma12));
    out.w_const = out.beta1 * p.pop1() + out.beta2 * p.pop2();
    return out;
}

FieldState propagate_mean_field(const ModelParams& p, double xi) {
    const auto b = beta_coefficients(p);
    const cd decay = std::exp(-kI * b.w_const * xi);
    FieldState f;
    f.xi = xi;
    f.beta1 = b.beta1;
    f.beta2 = b.beta2;
    f.w_const = b.w_const;
    f.omega_c = p.omega_in / b.w_const * (b.beta2 * p.pop2() * decay + b.beta1 * p.pop1());
    f.omega_s = p.omega_in / b.w_const * std::conj(p.c1) * p.c2 * b.beta1 * (decay - 1.0);
    return f;
}

FieldState integrate_mean_field(const ModelParams& p, double xi, double rtol, double atol) {
    const auto b = beta_coefficients(p);
    const cd c12 = p.c1 * std::conj(p.c2);
    const cd c21 = std::conj(p.c1) * p.c2;
    // y = (Ω_s, Ω_c)
    auto rhs = [&](double, const Vec2& y) -> Vec2 {
        Vec2 d;
        d(0) = -kI * b.beta1 * (p.pop1() * y(0) + c21 * y(1));
        d(1) = -kI * b.beta2 * (c12 * y(0) + p.pop2() * y(1));
        return d;
    };
    Vec2 y(cd(0.0), p.omega_in);
    OdeOptions opt;
    opt.rtol = rtol;
    opt.atol = atol * std::max(1.0, std::abs(p.omega_in));
    opt.initial_step = 1e-6;
    integrate_dopri5(rhs, y, 0.0, xi, opt);

    FieldState f;
    f.xi = xi;
    f.beta1 = b.beta1;
    f.beta2 = b.beta2;
    f.w_const = b.w_const;
    f.omega_s = y(0);
    f.omega_c = y(1);
    return f;
}

FieldState stable_fields(const ModelParams& p) {
    const auto b = beta_coefficients(p);
    FieldState f;
    f.xi = 1.0;
    f.beta1 = b.beta1;
    f.beta2 = b.beta2;
    f.w_const = b.w_const;
    f.omega_c = p.omega_in / b.w_const * b.beta1 * p.pop1();
    f.omega_s = -p.omega_in / b.w_const * b.beta1 * std::conj(p.c1) * p.c2;
    return f;
}

MeanFieldCoherences mean_field_coherences(const ModelParams& p, const FieldState& f) {
    MeanFieldCoherences s;
    s.sigma_g1g1 = p.pop1();
    s.sigma_g2g2 = p.pop2();
    s.sigma_ee = 0.0;
    s.sigma_g1g2 = std::conj(p.c1) * p.c2;
    // Steady state of the optical coherences with the weak-field populations.
    s.sigma_g1e = -(p.pop1() * f.omega_s + std::conj(p.c1) * p.c2 * f.omega_c) /
                  cd(2.0 * p.detuning_s(), p.gamma);
    s.sigma_g2e = -(p.c1 * std::conj(p.c2) * f.omega_s + p.pop2() * f.omega_c) /
                  cd(2.0 * p.detuning_c(), p.gamma + p.gamma12);
    return s;
}

}  // namespace cvlambda

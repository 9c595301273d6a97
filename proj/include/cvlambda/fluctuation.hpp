#pragma once

#include "cvlambda/model.hpp"
#include "cvlambda/types.hpp"

namespace cvlambda {

/// Linearized atomic-fluctuation system and the field-fluctuation drift and
/// noise it induces at one position ξ.
///
/// Atomic ordering y = (s_eg1, s_eg2, s_g2g1, s_g1g1, s_g2g2, s_ee, s_g1g2, s_g2e, s_g1e),
/// field ordering a = (a_s, a_s†, a_c, a_c†).
struct FluctuationMatrices {
    Mat9 m1;
    Mat94 m2;
    Mat9 t;      ///< −M1⁻¹
    Mat4 drift;  ///< C
    Mat4 noise;  ///< Z
    cd gamma_t13;
    cd gamma_t23;
    cd gamma_t12;

    // Named drift entries.
    cd p1() const { return drift(0, 0); }
    cd q1() const { return drift(0, 1); }
    cd r1() const { return drift(0, 2); }
    cd s1() const { return drift(0, 3); }
    cd p2() const { return drift(2, 0); }
    cd q2() const { return drift(2, 1); }
    cd r2() const { return drift(2, 2); }
    cd s2() const { return drift(2, 3); }
};

struct EffectiveRates {
    cd gamma_t13;
    cd gamma_t23;
    cd gamma_t12;
};

EffectiveRates effective_rates(const ModelParams& params);

Mat9 build_m1(const ModelParams& params, const FieldState& fields);

/// `g` is the atom-field coupling; it cancels in C and Z.
Mat94 build_m2(const ModelParams& params, const MeanFieldCoherences& coh, double g = 1.0);

/// Hermitian diffusion matrix of the atomic Langevin forces, weak-field populations.
Mat9 diffusion_matrix(const ModelParams& params, const MeanFieldCoherences& coh);

/// T = −M1⁻¹. Throws SingularSystem when M1 is numerically singular, except for
/// the zero-field case where the optical block decouples and is inverted alone.
Mat9 invert_m1(const Mat9& m1);

/// Drift C from T and M2, with prefactor iΓα/(2g).
Mat4 drift_matrix(const ModelParams& params, const Mat9& t, const Mat94& m2, double g = 1.0);

Mat4 drift_matrix(const ModelParams& params, const FieldState& fields,
                  const MeanFieldCoherences& coh, double g = 1.0);

Mat4 noise_matrix(const ModelParams& params, const MeanFieldCoherences& coh, const Mat9& t);

/// Everything above at once for the given mean fields.
FluctuationMatrices assemble(const ModelParams& params, const FieldState& fields,
                             double g = 1.0);

}  // namespace cvlambda

#include "cvlambda/fluctuation.hpp"

#include "cvlambda/errors.hpp"

#include <array>
#include <sstream>

namespace cvlambda {

namespace {

constexpr std::array<int, 4> kOptical{0, 1, 7, 8};
constexpr std::array<int, 5> kGround{2, 3, 4, 5, 6};
constexpr double kRcondGuard = 1e-12;

template <int N>
Eigen::Matrix<cd, N, N> guarded_inverse(const Eigen::Matrix<cd, N, N>& m, bool& ok) {
    Eigen::PartialPivLU<Eigen::Matrix<cd, N, N>> lu(m);
    const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
    const double rc = lu.rcond();
    ok = pivots.minCoeff() > kRcondGuard * pivots.maxCoeff() && std::isfinite(rc) &&
         rc >= kRcondGuard;
    if (!ok) return Eigen::Matrix<cd, N, N>::Zero();
    Eigen::Matrix<cd, N, N> inv = lu.inverse();
    ok = inv.allFinite();
    return ok ? inv : Eigen::Matrix<cd, N, N>::Zero();
}

bool optical_block_decoupled(const Mat9& m1) {
    for (int i : kOptical) {
        for (int j : kGround) {
            if (m1(i, j) != cd(0.0) || m1(j, i) != cd(0.0)) return false;
        }
    }
    return true;
}

}  // namespace

EffectiveRates effective_rates(const ModelParams& p) {
    EffectiveRates r;
    r.gamma_t13 = cd(0.5 * p.gamma, -p.detuning_s());
    r.gamma_t23 = cd(0.5 * (p.gamma + p.gamma12), -p.detuning_c());
    const double ground_detuning =
        p.ground_detuning == GroundDetuning::two_photon ? p.delta : p.detuning_c();
    r.gamma_t12 = cd(0.5 * p.gamma12 + p.gamma_phi, -ground_detuning);
    return r;
}

Mat9 build_m1(const ModelParams& p, const FieldState& f) {
    const auto r = effective_rates(p);
    const cd oc = f.omega_c, os = f.omega_s;
    const cd occ = std::conj(oc), osc = std::conj(os);
    const cd h = 0.5 * kI;

    Mat9 m = Mat9::Zero();
    m(0, 0) = -std::conj(r.gamma_t13);
    m(0, 2) = -h * occ;
    m(0, 3) = -h * osc;
    m(0, 5) = h * osc;

    m(1, 1) = -std::conj(r.gamma_t23);
    m(1, 4) = -h * occ;
    m(1, 5) = h * occ;
    m(1, 6) = -h * osc;

    m(2, 0) = -h * oc;
    m(2, 2) = -std::conj(r.gamma_t12);
    m(2, 7) = h * osc;

    m(3, 0) = -h * os;
    m(3, 4) = p.gamma12;
    m(3, 5) = p.gamma1;
    m(3, 8) = h * osc;

    m(4, 1) = -h * oc;
    m(4, 4) = -p.gamma12;
    m(4, 5) = p.gamma2;
    m(4, 7) = h * occ;

    m(5, 3) = 1.0;
    m(5, 4) = 1.0;
    m(5, 5) = 1.0;

    m(6, 1) = -h * os;
    m(6, 6) = -r.gamma_t12;
    m(6, 8) = h * occ;

    m(7, 2) = h * os;
    m(7, 4) = h * oc;
    m(7, 5) = -h * oc;
    m(7, 7) = -r.gamma_t23;

    m(8, 3) = h * os;
    m(8, 5) = -h * os;
    m(8, 6) = h * oc;
    m(8, 8) = -r.gamma_t13;
    return m;
}

Mat94 build_m2(const ModelParams& p, const MeanFieldCoherences& s, double g) {
    const double a1 = p.pop1(), a2 = p.pop2();
    const cd c12 = p.c1 * std::conj(p.c2);
    const cd c21 = std::conj(p.c1) * p.c2;
    const cd i = kI;

    Mat94 m = Mat94::Zero();
    m(0, 1) = -i * a1;
    m(0, 3) = -i * c12;
    m(1, 1) = -i * c21;
    m(1, 3) = -i * a2;
    m(2, 1) = i * s.sigma_g2e;
    m(2, 2) = -i * s.sigma_eg1();
    m(3, 0) = -i * s.sigma_eg1();
    m(3, 1) = i * s.sigma_g1e;
    m(4, 2) = -i * s.sigma_eg2();
    m(4, 3) = i * s.sigma_g2e;
    m(6, 0) = -i * s.sigma_eg2();
    m(6, 3) = i * s.sigma_g1e;
    m(7, 0) = i * c12;
    m(7, 2) = i * a2;
    m(8, 0) = i * a1;
    m(8, 2) = i * c21;
    return 0.5 * g * m;
}

Mat9 diffusion_matrix(const ModelParams& p, const MeanFieldCoherences& s) {
    const double g = p.gamma, g1 = p.gamma1, g2 = p.gamma2, g12 = p.gamma12, gp = p.gamma_phi;
    const double see = s.sigma_ee, s1 = s.sigma_g1g1, s2 = s.sigma_g2g2;
    const cd s12 = s.sigma_g1g2, s21 = s.sigma_g2g1();
    const cd eg1 = s.sigma_eg1(), eg2 = s.sigma_eg2();
    const cd g1e = s.sigma_g1e, g2e = s.sigma_g2e;

    Mat9 d = Mat9::Zero();
    d(0, 2) = gp * eg2;
    d(2, 0) = gp * g2e;

    d(1, 1) = g12 * see;
    d(1, 3) = -g12 * eg2;
    d(1, 4) = g12 * eg2;
    d(1, 6) = (g12 + gp) * eg1;

    d(2, 2) = g2 * see + 2.0 * gp * s2;

    d(3, 1) = -g12 * g2e;
    d(3, 3) = g1 * see + g12 * s2;
    d(3, 4) = -g12 * s2;
    d(3, 6) = -g12 * s21;
    d(3, 7) = -g1 * eg2;
    d(3, 8) = -g1 * eg1;

    d(4, 1) = g12 * g2e;
    d(4, 3) = -g12 * s2;
    d(4, 4) = g2 * see + g12 * s2;
    d(4, 6) = g12 * s21;
    d(4, 7) = -g2 * eg2;
    d(4, 8) = -g2 * eg1;

    d(6, 1) = (g12 + gp) * g1e;
    d(6, 3) = -g12 * s12;
    d(6, 4) = g12 * s12;
    d(6, 6) = g1 * see + g12 * s2 + (g12 + 2.0 * gp) * s1;

    d(7, 3) = -g1 * g2e;
    d(7, 4) = -g2 * g2e;
    d(7, 7) = g2 * see + g * s2;
    d(7, 8) = (g - gp) * s21;

    d(8, 3) = -g1 * g1e;
    d(8, 4) = -g2 * g1e;
    d(8, 7) = (g - gp) * s12;
    d(8, 8) = g1 * see + g12 * s2 + g * s1;
    return d;
}

Mat9 invert_m1(const Mat9& m1) {
    bool ok = false;
    Mat9 inv = guarded_inverse<9>(m1, ok);
    if (ok) return -inv;

    if (optical_block_decoupled(m1)) {
        Eigen::Matrix<cd, 4, 4> opt;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) opt(i, j) = m1(kOptical[i], kOptical[j]);
        Eigen::Matrix<cd, 5, 5> gr;
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) gr(i, j) = m1(kGround[i], kGround[j]);

        bool opt_ok = false, gr_ok = false;
        const auto opt_inv = guarded_inverse<4>(opt, opt_ok);
        if (opt_ok) {
            const auto gr_inv = guarded_inverse<5>(gr, gr_ok);
            Mat9 t = Mat9::Zero();
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) t(kOptical[i], kOptical[j]) = -opt_inv(i, j);
            for (int i = 0; i < 5; ++i)
                for (int j = 0; j < 5; ++j) t(kGround[i], kGround[j]) = -gr_inv(i, j);
            return t;
        }
    }
    std::ostringstream msg;
    msg << "M1 is singular (rcond < " << kRcondGuard << ")";
    throw SingularSystem(msg.str());
}

Mat4 drift_matrix(const ModelParams& p, const Mat9& t, const Mat94& m2, double g) {
    const Mat94 tm = t * m2;
    const cd a1 = tm(8, 0), b1 = tm(8, 1), c1 = tm(8, 2), d1 = tm(8, 3);
    const cd a2 = tm(7, 0), b2 = tm(7, 1), c2 = tm(7, 2), d2 = tm(7, 3);
    const cd pre = kI * p.gamma * p.alpha / (2.0 * g);

    Mat4 c;
    c.row(0) << pre * a1, pre * b1, pre * c1, pre * d1;
    c.row(2) << pre * a2, pre * b2, pre * c2, pre * d2;
    // Rows 2 and 4 are the conjugate partners of rows 1 and 3.
    c.row(1) << std::conj(c(0, 1)), std::conj(c(0, 0)), std::conj(c(0, 3)), std::conj(c(0, 2));
    c.row(3) << std::conj(c(2, 1)), std::conj(c(2, 0)), std::conj(c(2, 3)), std::conj(c(2, 2));
    return c;
}

Mat4 drift_matrix(const ModelParams& p, const FieldState& f, const MeanFieldCoherences& coh,
                  double g) {
    return drift_matrix(p, invert_m1(build_m1(p, f)), build_m2(p, coh, g), g);
}

Mat4 noise_matrix(const ModelParams& p, const MeanFieldCoherences& coh, const Mat9& t) {
    Mat49 v;
    v.row(0) = t.row(8);
    v.row(1) = -t.row(0);
    v.row(2) = t.row(7);
    v.row(3) = -t.row(1);
    const Mat9 d = diffusion_matrix(p, coh);
    Mat4 z = (p.gamma * p.alpha / 4.0) * (v * d * v.adjoint());
    return 0.5 * (z + z.adjoint());
}

FluctuationMatrices assemble(const ModelParams& p, const FieldState& f, double g) {
    const auto coh = mean_field_coherences(p, f);
    const auto r = effective_rates(p);
    FluctuationMatrices out;
    out.m1 = build_m1(p, f);
    out.m2 = build_m2(p, coh, g);
    out.t = invert_m1(out.m1);
    out.drift = drift_matrix(p, out.t, out.m2, g);
    out.noise = noise_matrix(p, coh, out.t);
    out.gamma_t13 = r.gamma_t13;
    out.gamma_t23 = r.gamma_t23;
    out.gamma_t12 = r.gamma_t12;
    return out;
}

}  // namespace cvlambda

#pragma once

// Independent reference computations used only by the tests.

#include "cvlambda/fluctuation.hpp"
#include "cvlambda/model.hpp"
#include "cvlambda/types.hpp"
#include "cvlambda/vortex.hpp"

#include <boost/math/tools/minima.hpp>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numbers>
#include <random>

namespace oracle {

using cvlambda::cd;
using cvlambda::Mat4;

/// P(ξ) for dP/dξ = C P + P C† + Z with constant C, Z, via the exponential of the
/// augmented vectorized generator [[I⊗C + C̄⊗I, vec Z], [0, 0]].
inline Mat4 lyapunov_expm(const Mat4& c, const Mat4& z, const Mat4& p0, double xi) {
    using Mat17 = Eigen::Matrix<cd, 17, 17>;
    const Eigen::Matrix<cd, 16, 16> l =
        Eigen::kroneckerProduct(Mat4::Identity(), c) + Eigen::kroneckerProduct(c.conjugate(), Mat4::Identity());
    Mat17 a = Mat17::Zero();
    a.topLeftCorner<16, 16>() = l * xi;
    a.topRightCorner<16, 1>() = Eigen::Map<const Eigen::Matrix<cd, 16, 1>>(z.data()) * xi;
    const Mat17 e = a.exp();
    const Eigen::Matrix<cd, 16, 1> vec =
        e.topLeftCorner<16, 16>() * Eigen::Map<const Eigen::Matrix<cd, 16, 1>>(p0.data()) + e.topRightCorner<16, 1>();
    return Eigen::Map<const Mat4>(vec.data());
}

/// Drift C by solving M1 y = −M2 a column by column (no explicit inverse).
inline Mat4 drift_by_linear_solve(const cvlambda::ModelParams& p, const cvlambda::FieldState& f,
                                  double g = 1.0) {
    const auto coh = cvlambda::mean_field_coherences(p, f);
    const cvlambda::Mat9 m1 = cvlambda::build_m1(p, f);
    const cvlambda::Mat94 m2 = cvlambda::build_m2(p, coh, g);
    const cvlambda::Mat94 y = m1.fullPivHouseholderQr().solve(-m2);
    const cd pre = cd(0.0, 1.0) * p.gamma * p.alpha / (2.0 * g);
    Mat4 c;
    for (int j = 0; j < 4; ++j) {
        c(0, j) = pre * y(8, j);
        c(2, j) = pre * y(7, j);
    }
    // −B*, −A*, −D*, −C* pattern
    const int swap[4] = {1, 0, 3, 2};
    for (int j = 0; j < 4; ++j) {
        c(1, j) = pre * -std::conj(y(8, swap[j]));
        c(3, j) = pre * -std::conj(y(7, swap[j]));
    }
    return c;
}

inline double v_theta(const Mat4& corr, double theta) {
    const double n = corr(1, 1).real() + corr(3, 3).real();
    return 4.0 * (1.0 + n + 2.0 * (corr(0, 3) * std::polar(1.0, -2.0 * theta)).real());
}

/// min over θ ∈ [0, π) by a dense scan refined with Brent's method.
inline double theta_scan_min(const Mat4& corr, int n = 720) {
    const double pi = std::numbers::pi;
    int best = 0;
    double best_v = v_theta(corr, 0.0);
    for (int k = 1; k < n; ++k) {
        const double v = v_theta(corr, pi * k / n);
        if (v < best_v) {
            best_v = v;
            best = k;
        }
    }
    const double lo = pi * (best - 1) / n, hi = pi * (best + 1) / n;
    const auto r = boost::math::tools::brent_find_minima(
        [&](double t) { return v_theta(corr, t); }, lo, hi, std::numeric_limits<double>::digits);
    return std::min(best_v, r.second);
}

/// argmax of the LG amplitude over a uniform grid on [0, 4w].
inline double lg_argmax_grid(const cvlambda::VortexProfile& prof, int n) {
    double best_r = 0.0, best = -1.0;
    for (int k = 0; k <= n; ++k) {
        const double r = 4.0 * prof.waist * k / n;
        const double a = cvlambda::lg_amplitude(prof, r);
        if (a > best) {
            best = a;
            best_r = r;
        }
    }
    return best_r;
}

/// Bogoliubov maps on (a_s, a_s†, a_c, a_c†).
inline Mat4 two_mode_squeeze(double r, double phi) {
    const double ch = std::cosh(r), sh = std::sinh(r);
    const cd e = std::polar(1.0, phi);
    Mat4 k = Mat4::Zero();
    k(0, 0) = ch;
    k(0, 3) = e * sh;
    k(2, 2) = ch;
    k(2, 1) = e * sh;
    k(1, 1) = ch;
    k(1, 2) = std::conj(e) * sh;
    k(3, 3) = ch;
    k(3, 0) = std::conj(e) * sh;
    return k;
}

inline Mat4 single_mode_squeeze(double r1, double phi1, double r2, double phi2) {
    Mat4 k = Mat4::Zero();
    auto block = [&](int i, double r, double phi) {
        const cd e = std::polar(1.0, phi);
        k(i, i) = std::cosh(r);
        k(i, i + 1) = e * std::sinh(r);
        k(i + 1, i + 1) = std::cosh(r);
        k(i + 1, i) = std::conj(e) * std::sinh(r);
    };
    block(0, r1, phi1);
    block(2, r2, phi2);
    return k;
}

inline Mat4 beam_splitter(double theta, double phi) {
    const double c = std::cos(theta), s = std::sin(theta);
    const cd e = std::polar(1.0, phi);
    Mat4 k = Mat4::Zero();
    k(0, 0) = c;
    k(0, 2) = e * s;
    k(2, 0) = -std::conj(e) * s;
    k(2, 2) = c;
    k(1, 1) = c;
    k(1, 3) = std::conj(e) * s;
    k(3, 1) = -e * s;
    k(3, 3) = c;
    return k;
}

/// Hand-rolled generators for property tests.
struct Gen {
    std::mt19937_64 rng;
    explicit Gen(std::uint64_t seed) : rng(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
    double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }

    std::pair<cd, cd> amplitudes() {
        const double t = uniform(0.05, 0.5 * std::numbers::pi - 0.05);
        return {std::polar(std::cos(t), uniform(-3.1, 3.1)), std::polar(std::sin(t), uniform(-3.1, 3.1))};
    }

    /// Any valid parameter point, including general detunings and dephasing.
    cvlambda::ModelParams general_params() {
        cvlambda::ModelParams p;
        p.gamma1 = uniform(0.1, 0.9);
        p.gamma2 = 1.0 - p.gamma1;
        p.gamma12 = uniform(0.0, 1.0);
        p.gamma_phi = uniform(0.0, 0.5);
        p.delta = uniform(-1.0, 1.0);
        if (uniform(0, 1) < 0.3) {
            p.delta_s = uniform(-1.0, 1.0);
            p.delta_c = uniform(-1.0, 1.0);
        }
        p.alpha = uniform(10.0, 200.0);
        std::tie(p.c1, p.c2) = amplitudes();
        p.omega_in = std::polar(uniform(0.01, 1.0), uniform(-3.1, 3.1));
        return p;
    }

    /// Points in the regime of the entanglement figures.
    cvlambda::ModelParams figure_params() {
        cvlambda::ModelParams p;
        p.delta = uniform(0, 1) < 0.5 ? log_uniform(1e-5, 1e-2) : 0.0;
        p.gamma12 = uniform(0, 1) < 0.5 ? log_uniform(1e-5, 1e-2) : 0.0;
        p.alpha = uniform(10.0, 200.0);
        p.omega_in = std::polar(uniform(0.05, 0.5), uniform(-3.1, 3.1));
        return p;
    }

    /// Correlations of a Gaussian state: squeezed thermal inputs through random passive
    /// and active maps.
    Mat4 physical_corr() {
        Mat4 in = Mat4::Zero();
        const double n1 = uniform(0.0, 2.0), n2 = uniform(0.0, 2.0);
        in(0, 0) = 1.0 + n1;
        in(1, 1) = n1;
        in(2, 2) = 1.0 + n2;
        in(3, 3) = n2;
        const Mat4 k = two_mode_squeeze(uniform(0.0, 1.5), uniform(-3.1, 3.1)) *
                       beam_splitter(uniform(0.0, 1.5), uniform(-3.1, 3.1)) *
                       single_mode_squeeze(uniform(0.0, 1.0), uniform(-3.1, 3.1), uniform(0.0, 1.0),
                                           uniform(-3.1, 3.1));
        return k * in * k.adjoint();
    }
};

}  // namespace oracle

#include "cvlambda/correlation.hpp"
#include "cvlambda/errors.hpp"
#include "cvlambda/fluctuation.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <numbers>

using namespace cvlambda;

namespace {

Mat4 squeeze_drift(double s, bool two_mode) {
    Mat4 c = Mat4::Zero();
    if (two_mode) {
        c(0, 3) = c(1, 2) = c(2, 1) = c(3, 0) = s;  // S1 = Q2 = s
    } else {
        c(0, 1) = c(1, 0) = c(2, 3) = c(3, 2) = s;  // Q1 = S2 = s
    }
    return c;
}

LyapunovCoefficients constant(const Mat4& c, const Mat4& z) {
    return [c, z](double) { return std::pair<Mat4, Mat4>{c, z}; };
}

Mat4 two_mode_squeezed(double s) {
    Mat4 p = Mat4::Zero();
    const double sh = std::sinh(s), ch = std::cosh(s);
    p(0, 0) = p(2, 2) = ch * ch;
    p(1, 1) = p(3, 3) = sh * sh;
    p(0, 3) = p(3, 0) = p(2, 1) = p(1, 2) = ch * sh;
    return p;
}

}  // namespace

TEST_CASE("vacuum input") {
    const auto v = vacuum_initial_correlations();
    CHECK(v.xi == 0.0);
    CHECK(v.corr(0, 0) == cd(1.0));
    CHECK(v.corr(1, 1) == cd(0.0));
    CHECK(v.corr(2, 2) == cd(1.0));
    CHECK(v.corr(3, 3) == cd(0.0));
    CHECK((v.corr - Mat4(v.corr.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0);
    const auto e = dgcz_value(v);
    CHECK(e.v == 4.0);
    for (double t : {0.0, 0.4, 1.3, 2.9}) CHECK(dgcz_theta(v, t) == 4.0);
}

TEST_CASE("identity dynamics") {
    oracle::Gen gen(3);
    const Mat4 p0 = gen.physical_corr();
    const auto out = propagate_lyapunov(constant(Mat4::Zero(), Mat4::Zero()), p0, 1.0);
    CHECK((out.corr - p0).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("squeeze-law oracles") {
    const std::vector<double> xs = {0.1, 0.25, 0.5, 0.75, 1.0};
    for (double s : {0.1, 0.5, 1.0}) {
        CAPTURE(s);
        const auto two = propagate_lyapunov_sampled(constant(squeeze_drift(s, true), Mat4::Zero()),
                                                    vacuum_initial_correlations().corr, xs, {}, true);
        const auto one = propagate_lyapunov_sampled(constant(squeeze_drift(s, false), Mat4::Zero()),
                                                    vacuum_initial_correlations().corr, xs, {}, true);
        for (std::size_t k = 0; k < xs.size(); ++k) {
            CHECK(std::abs(dgcz_value(two[k]).v - 4.0 * std::exp(-2.0 * s * xs[k])) < 1e-8);
            CHECK(std::abs(dgcz_value(one[k]).v - 4.0 * std::cosh(2.0 * s * xs[k])) < 1e-8);
            CHECK(std::abs(two[k].commutator_s() - 1.0) < 1e-9);
            CHECK(std::abs(two[k].commutator_c() - 1.0) < 1e-9);
            CHECK(std::abs(one[k].commutator_s() - 1.0) < 1e-9);
        }
    }
}

TEST_CASE("DGCZ value") {
    SUBCASE("two-mode squeezed state") {
        for (double s : {0.1, 0.5, 1.2}) {
            const auto e = dgcz_value(two_mode_squeezed(s));
            CHECK(e.v == doctest::Approx(4.0 * std::exp(-2.0 * s)).epsilon(1e-12));
            CHECK(std::abs(oracle::theta_scan_min(two_mode_squeezed(s)) - e.v) < 1e-10);
        }
    }
    SUBCASE("no cross term means no entanglement") {
        Mat4 p = Mat4::Zero();
        p(0, 0) = 1.3;
        p(1, 1) = 0.3;
        p(2, 2) = 1.7;
        p(3, 3) = 0.7;
        CHECK(dgcz_value(p).v == doctest::Approx(4.0 * 2.0));
    }
    SUBCASE("unphysical input is rejected") {
        Mat4 p = two_mode_squeezed(0.5);
        p(0, 3) *= 3.0;
        CHECK_THROWS_AS(dgcz_value(p), NonPhysical);
    }
    SUBCASE("theta at zero for the squeezed state") {
        const Mat4 p = two_mode_squeezed(0.5);
        CHECK(dgcz_theta(p, 0.0) == doctest::Approx(oracle::v_theta(p, 0.0)).epsilon(1e-14));
        CHECK(dgcz_theta(p, std::numbers::pi / 2) == doctest::Approx(4.0 * std::exp(-1.0)).epsilon(1e-12));
    }
    SUBCASE("closed-form angle hits the minimum") {
        oracle::Gen gen(17);
        for (int k = 0; k < 100; ++k) {
            const Mat4 p = gen.physical_corr();
            const auto e = dgcz_value(p);
            CHECK(std::abs(dgcz_theta(p, e.theta_opt) - e.v) < 1e-10);
            CHECK(std::abs(oracle::theta_scan_min(p) - e.v) < 1e-10);
        }
    }
}

TEST_CASE("stable mode matches the matrix-exponential solution") {
    oracle::Gen gen(71);
    for (int k = 0; k < 20; ++k) {
        const auto p = gen.figure_params();
        const auto m = assemble(p, stable_fields(p));
        const Mat4 p0 = vacuum_initial_correlations().corr;
        const double xi = gen.uniform(0.2, 1.0);
        const auto ode = propagate_correlations(p, xi, PropagationMode::stable);
        const Mat4 ref = oracle::lyapunov_expm(m.drift, m.noise, p0, xi);
        const double scale = std::max(1.0, ref.cwiseAbs().maxCoeff());
        CHECK((ode.corr - ref).cwiseAbs().maxCoeff() <= 1e-8 * scale);
    }
}

TEST_CASE("null test: no entanglement at two-photon resonance without relaxation") {
    oracle::Gen gen(5);
    for (int k = 0; k < 10; ++k) {
        ModelParams p;
        p.omega_in = gen.uniform(0.01, 0.5);
        p.alpha = gen.uniform(10.0, 200.0);
        const auto st = propagate_correlations(p, 1.0, PropagationMode::stable);
        CHECK(std::abs(dgcz_value(st).v - 4.0) < 1e-6);
    }
}

TEST_CASE("propagated states keep Hermiticity and the theta identity") {
    oracle::Gen gen(9);
    for (int k = 0; k < 10; ++k) {
        const auto p = gen.figure_params();
        for (auto mode : {PropagationMode::stable, PropagationMode::full}) {
            const auto states = propagate_correlations_sampled(p, {0.01, 0.1, 0.5, 1.0}, mode);
            for (const auto& s : states) {
                CHECK(s.hermiticity_defect() < 1e-9);
                for (int i = 0; i < 4; ++i) CHECK(s.corr(i, i).real() >= -1e-12);
                const auto e = dgcz_value(s);
                CHECK(std::abs(oracle::theta_scan_min(s.corr) - e.v) < 1e-10 * std::max(1.0, e.v));
            }
        }
    }
}

TEST_CASE("sampled propagation agrees with a single endpoint") {
    ModelParams p;
    p.delta = 2e-4;
    p.alpha = 100.0;
    const auto sampled = propagate_correlations_sampled(p, {0.2, 0.6, 1.0}, PropagationMode::full);
    const auto direct = propagate_correlations(p, 1.0, PropagationMode::full);
    CHECK((sampled.back().corr - direct.corr).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("configurable input state") {
    ModelParams p;
    p.delta = 2e-4;
    PropagationOptions opt;
    opt.initial = vacuum_initial_correlations().corr;
    const auto a = propagate_correlations(p, 1.0, PropagationMode::stable, opt);
    const auto b = propagate_correlations(p, 1.0, PropagationMode::stable);
    CHECK(a.corr == b.corr);
}

TEST_CASE("argument checks") {
    ModelParams p;
    CHECK_THROWS_AS(propagate_correlations(p, 0.0, PropagationMode::stable), InvalidParams);
    CHECK_THROWS_AS(propagate_correlations(p, 1.5, PropagationMode::stable), InvalidParams);
    p.alpha = -1.0;
    CHECK_THROWS_AS(propagate_correlations(p, 1.0, PropagationMode::stable), InvalidParams);
}

TEST_CASE("integrator reports failure on blow-up") {
    Mat4 c = Mat4::Identity() * 1e6;
    CHECK_THROWS_AS(propagate_lyapunov(constant(c, Mat4::Zero()), Mat4::Identity(), 1.0), IntegrationFailure);
}

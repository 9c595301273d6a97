#include "cvlambda/optimize.hpp"

#include "cvlambda/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cvlambda {

namespace {

struct Box {
    std::vector<BoxBound> bounds;

    double to_u(std::size_t i, double x) const { return bounds[i].log ? std::log10(x) : x; }
    double from_u(std::size_t i, double u) const { return bounds[i].log ? std::pow(10.0, u) : u; }
    double lo(std::size_t i) const { return to_u(i, bounds[i].lo); }
    double hi(std::size_t i) const { return to_u(i, bounds[i].hi); }
    double side(std::size_t i) const { return std::max(hi(i) - lo(i), 1e-300); }

    std::vector<double> clamp(std::vector<double> u) const {
        for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::clamp(u[i], lo(i), hi(i));
        return u;
    }
    std::vector<double> to_x(const std::vector<double>& u) const {
        std::vector<double> x(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) x[i] = from_u(i, u[i]);
        return x;
    }
};

}  // namespace

NelderMeadResult nelder_mead(const ScalarObjective& f, const std::vector<double>& x0,
                             const std::vector<BoxBound>& bounds,
                             const NelderMeadOptions& opt) {
    const std::size_t n = x0.size();
    if (n == 0 || bounds.size() != n) throw InvalidParams("nelder_mead: dimension mismatch");
    for (const auto& b : bounds) {
        if (!(b.hi >= b.lo) || (b.log && !(b.lo > 0.0)))
            throw InvalidParams("nelder_mead: invalid bounds");
    }
    const Box box{bounds};

    NelderMeadResult res;
    auto eval = [&](const std::vector<double>& u) {
        ++res.evaluations;
        const double v = f(box.to_x(u));
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };

    std::vector<double> u0(n);
    for (std::size_t i = 0; i < n; ++i) u0[i] = box.to_u(i, x0[i]);
    u0 = box.clamp(u0);

    std::vector<std::vector<double>> simplex{u0};
    for (std::size_t i = 0; i < n; ++i) {
        auto u = u0;
        const double step = opt.initial_step * box.side(i);
        u[i] = u[i] + step <= box.hi(i) ? u[i] + step : u[i] - step;
        simplex.push_back(box.clamp(u));
    }
    std::vector<double> fv(simplex.size());
    for (std::size_t k = 0; k < simplex.size(); ++k) fv[k] = eval(simplex[k]);

    std::vector<std::size_t> order(n + 1);
    auto sort_simplex = [&] {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        std::vector<std::vector<double>> s;
        std::vector<double> v;
        for (auto k : order) {
            s.push_back(simplex[k]);
            v.push_back(fv[k]);
        }
        simplex = std::move(s);
        fv = std::move(v);
    };
    auto diameter = [&] {
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double mn = simplex[0][i], mx = simplex[0][i];
            for (const auto& p : simplex) {
                mn = std::min(mn, p[i]);
                mx = std::max(mx, p[i]);
            }
            worst = std::max(worst, (mx - mn) / box.side(i));
        }
        return worst;
    };
    auto affine = [&](const std::vector<double>& c, const std::vector<double>& w, double t) {
        std::vector<double> u(n);
        for (std::size_t i = 0; i < n; ++i) u[i] = c[i] + t * (w[i] - c[i]);
        return box.clamp(u);
    };

    sort_simplex();
    while (res.iterations < opt.max_iterations) {
        if (diameter() < opt.tolerance) {
            res.converged = true;
            break;
        }
        ++res.iterations;

        std::vector<double> centroid(n, 0.0);
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[k][i] / double(n);

        const auto& worst = simplex[n];
        const auto xr = affine(centroid, worst, -1.0);
        const double fr = eval(xr);
        if (fr < fv[0]) {
            const auto xe = affine(centroid, worst, -2.0);
            const double fe = eval(xe);
            if (fe < fr) {
                simplex[n] = xe;
                fv[n] = fe;
            } else {
                simplex[n] = xr;
                fv[n] = fr;
            }
        } else if (fr < fv[n - 1]) {
            simplex[n] = xr;
            fv[n] = fr;
        } else {
            const bool outside = fr < fv[n];
            const auto xc = affine(centroid, outside ? xr : worst, 0.5);
            const double fc = eval(xc);
            if (fc < std::min(fr, fv[n])) {
                simplex[n] = xc;
                fv[n] = fc;
            } else {
                for (std::size_t k = 1; k <= n; ++k) {
                    simplex[k] = affine(simplex[0], simplex[k], 0.5);
                    fv[k] = eval(simplex[k]);
                }
            }
        }
        sort_simplex();
    }
    if (!res.converged && diameter() < opt.tolerance) res.converged = true;

    res.x = box.to_x(simplex[0]);
    res.value = fv[0];
    return res;
}

}  // namespace cvlambda

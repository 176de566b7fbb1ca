#pragma once

// Adaptive Gauss-Kronrod (G7/K15) quadrature on finite intervals, plus a
// semi-infinite wrapper. Used by the two-branch convolution check and by
// the test oracles that cross-validate the closed forms.

#include <cmath>
#include <functional>
#include <stdexcept>

namespace fsoegc {

namespace detail {

// 15-point Kronrod nodes/weights on [-1,1] (QUADPACK dqk15 constants)
inline constexpr double KRONROD_X[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0000000000000000};
inline constexpr double KRONROD_W[8] = {
    0.0229353220105292, 0.0630920926299786, 0.1047900103222502,
    0.1406532597155259, 0.1690047266392679, 0.1903505780647854,
    0.2044329400752989, 0.2094821410847278};
inline constexpr double GAUSS_W[4] = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189,
    0.4179591836734694};

template <class F>
inline void gk15(const F& f, double lo, double hi, double& result, double& err) {
    const double c = 0.5 * (lo + hi);
    const double h = 0.5 * (hi - lo);
    const double fc = f(c);
    double resg = fc * GAUSS_W[3];
    double resk = fc * KRONROD_W[7];
    for (int i = 0; i < 7; ++i) {
        const double dx = h * KRONROD_X[i];
        const double fsum = f(c - dx) + f(c + dx);
        resk += KRONROD_W[i] * fsum;
        if (i % 2 == 1) resg += GAUSS_W[i / 2] * fsum;
    }
    result = resk * h;
    err = std::fabs((resk - resg) * h);
}

template <class F>
inline double adaptive_rec(const F& f, double lo, double hi, double tol,
                           int depth) {
    double res, err;
    gk15(f, lo, hi, res, err);
    if (err <= tol || depth >= 50) return res;
    const double mid = 0.5 * (lo + hi);
    return adaptive_rec(f, lo, mid, tol * 0.5, depth + 1) +
           adaptive_rec(f, mid, hi, tol * 0.5, depth + 1);
}

}  // namespace detail

// integrate f over [lo, hi] to roughly abs_tol + rel_tol * |I|
inline double integrate(const std::function<double(double)>& f, double lo,
                        double hi, double rel_tol = 1e-10,
                        double abs_tol = 1e-300) {
    if (!(hi >= lo)) throw std::domain_error("integrate: bad interval");
    if (hi == lo) return 0.0;
    double res, err;
    detail::gk15(f, lo, hi, res, err);
    double tol = std::max(abs_tol, rel_tol * std::fabs(res));
    if (err <= tol) return res;
    return detail::adaptive_rec(f, lo, hi, std::max(tol, abs_tol), 0);
}

// integrate f over [lo, infinity) via x = lo + t/(1-t)
inline double integrate_to_inf(const std::function<double(double)>& f,
                               double lo, double rel_tol = 1e-10) {
    auto g = [&](double t) {
        const double om = 1.0 - t;
        const double x = lo + t / om;
        return f(x) / (om * om);
    };
    return integrate(g, 0.0, 1.0, rel_tol);
}

}  // namespace fsoegc

#pragma once

// Scalar special functions: log-gamma, beta, erf, incomplete gamma
// (including negative order), Gauss-Laguerre rules.

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fsoegc/dd.hpp"
#include "fsoegc/errors.hpp"

namespace fsoegc {

inline double ln_gamma(double x) {
    if (!(x > 0.0)) {
        throw std::domain_error("ln_gamma: argument must be positive, got " +
                                std::to_string(x));
    }
    return std::lgamma(x);
}

// ln |Gamma(x)| with sign, defined for all non-pole reals.
// sign == 0 flags a pole (non-positive integer argument).
struct LogGammaSigned {
    double log;
    int sign;
};

inline LogGammaSigned ln_gamma_signed(double x) {
    if (x > 0.0) return {std::lgamma(x), +1};
    double nearest = std::round(x);
    if (std::fabs(x - nearest) < 1e-13) {
        return {std::numeric_limits<double>::infinity(), 0};
    }
    // reflection: Gamma(x) = pi / (sin(pi x) Gamma(1-x))
    double s = std::sin(M_PI * (x - 2.0 * std::floor(x / 2.0)));
    double lg = std::log(M_PI) - std::log(std::fabs(s)) - std::lgamma(1.0 - x);
    return {lg, s < 0.0 ? -1 : +1};
}

inline double log_beta(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) {
        throw std::domain_error("beta: arguments must be positive");
    }
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

inline double beta(double a, double b) { return std::exp(log_beta(a, b)); }

inline double erf(double x) { return std::erf(x); }

namespace detail {

// regularized lower incomplete gamma P(s,x), s > 0, by series
inline double gamma_p_series(double s, double x) {
    double term = 1.0 / s;
    double sum = term;
    double sk = s;
    for (int k = 0; k < 10000; ++k) {
        sk += 1.0;
        term *= x / sk;
        sum += term;
        if (std::fabs(term) < 1e-17 * std::fabs(sum)) {
            return sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
        }
    }
    throw NonConvergenceError("incomplete gamma series did not converge");
}

// regularized upper incomplete gamma Q(s,x), s > 0, x > s+1, Lentz CF
inline double gamma_q_cf(double s, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - s;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 10000; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - s);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) {
            return h * std::exp(-x + s * std::log(x) - std::lgamma(s));
        }
    }
    throw NonConvergenceError("incomplete gamma continued fraction did not converge");
}

}  // namespace detail

// regularized lower incomplete gamma P(s,x) = gamma(s,x)/Gamma(s), s > 0
inline double lower_inc_gamma_reg(double s, double x) {
    if (!(s > 0.0)) throw std::domain_error("lower_inc_gamma_reg: s must be positive");
    if (x < 0.0) throw std::domain_error("lower_inc_gamma_reg: x must be non-negative");
    if (x == 0.0) return 0.0;
    if (x < s + 1.0) return detail::gamma_p_series(s, x);
    return 1.0 - detail::gamma_q_cf(s, x);
}

// upper incomplete gamma Gamma(s,x); s may be negative non-integer when x > 0
inline double upper_inc_gamma(double s, double x) {
    if (x <= 0.0) {
        if (s > 0.0 && x == 0.0) return std::tgamma(s);
        throw std::domain_error("upper_inc_gamma: x must be positive for s <= 0");
    }
    if (s > 0.0) {
        double lg = std::lgamma(s);
        if (x < s + 1.0) {
            return std::exp(lg) * (1.0 - detail::gamma_p_series(s, x));
        }
        return std::exp(lg) * detail::gamma_q_cf(s, x);
    }
    // downward recurrence from a positive anchor:
    // Gamma(s,x) = (Gamma(s+1,x) - x^s e^{-x}) / s
    int steps = static_cast<int>(std::ceil(-s)) + 1;
    double s0 = s + steps;  // anchor in (0, 2]
    double g = upper_inc_gamma(s0, x);
    double lx = std::log(x);
    for (int k = 1; k <= steps; ++k) {
        double sk = s0 - k;  // descending: s0-1, ..., s
        g = (g - std::exp((sk) * lx - x)) / sk;
    }
    return g;
}

// Gauss-Laguerre rule for weight e^{-x}: nodes ascending, weights sum to 1
inline std::pair<std::vector<double>, std::vector<double>> gauss_laguerre(int L) {
    if (L < 1 || L > 64) throw std::domain_error("gauss_laguerre: L must be in [1,64]");
    std::vector<double> t(L), w(L);
    auto eval = [L](double x, double& p, double& dp) {
        // Laguerre recurrence; also derivative via L'_n = n (L_n - L_{n-1}) / x
        double p0 = 1.0, p1 = 1.0 - x;
        if (L == 1) {
            p = p1;
            dp = -1.0;
            return p0;  // returns L_{n-1}
        }
        for (int n = 2; n <= L; ++n) {
            double p2 = ((2.0 * n - 1.0 - x) * p1 - (n - 1.0) * p0) / n;
            p0 = p1;
            p1 = p2;
        }
        p = p1;
        dp = L * (p1 - p0) / x;
        return p0;
    };
    double z = 0.0;
    for (int i = 0; i < L; ++i) {
        // standard initial guesses (Stroud & Secrest style)
        if (i == 0) {
            z = 3.0 / (1.0 + 2.4 * L);
        } else if (i == 1) {
            z += 15.0 / (1.0 + 2.5 * L);
        } else {
            double ai = i - 1;
            z += ((1.0 + 2.55 * ai) / (1.9 * ai)) * (z - t[i - 2]);
        }
        double p = 0.0, dp = 0.0, pm1 = 0.0;
        int it = 0;
        for (; it < 100; ++it) {
            pm1 = eval(z, p, dp);
            double dz = p / dp;
            z -= dz;
            if (std::fabs(dz) < 1e-14 * std::max(1.0, std::fabs(z))) break;
        }
        if (it >= 100) {
            throw NonConvergenceError("gauss_laguerre: Newton iteration stalled");
        }
        pm1 = eval(z, p, dp);
        t[i] = z;
        w[i] = z / ((L + 1.0) * (L + 1.0) * [&] {
                   // L_{n+1}(z) via one more recurrence step
                   double next = ((2.0 * L + 1.0 - z) * p - L * pm1) / (L + 1.0);
                   return next * next;
               }());
    }
    return {t, w};
}

}  // namespace fsoegc

#pragma once

// Meijer G-function evaluation for the three parameter classes the
// combined-SNR formulas need, via Slater-type residue expansions:
//   - ascending expansion over the left-half-plane pole families for
//     small/moderate argument, carried in double-double precision because
//     the hypergeometric series cancel internally by ~e^x;
//   - the reflection G^{m,n}_{p,q}(x|a;b) = G^{n,m}_{q,p}(1/x|1-b;1-a) for
//     large argument, whose expansion terminates or is asymptotic with
//     smallest-term truncation;
//   - logarithmic (integer-spaced) cases by epsilon-perturbation plus
//     Richardson extrapolation.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "fsoegc/dd.hpp"
#include "fsoegc/errors.hpp"

namespace fsoegc {

struct MeijerSpec {
    int m, n, p, q;
    std::vector<double> a;  // p upper parameters
    std::vector<double> b;  // q lower parameters

    MeijerSpec(int m_, int n_, int p_, int q_, std::vector<double> a_,
               std::vector<double> b_)
        : m(m_), n(n_), p(p_), q(q_), a(std::move(a_)), b(std::move(b_)) {
        const bool supported = (m == 2 && n == 0 && p == 1 && q == 2) ||
                               (m == 2 && n == 1 && p == 2 && q == 3) ||
                               (m == 3 && n == 2 && p == 3 && q == 4);
        if (!supported) {
            throw std::domain_error(
                "MeijerSpec: unsupported class (m,n,p,q) = (" + std::to_string(m) +
                "," + std::to_string(n) + "," + std::to_string(p) + "," +
                std::to_string(q) + ")");
        }
        if (static_cast<int>(a.size()) != p || static_cast<int>(b.size()) != q) {
            throw std::domain_error("MeijerSpec: parameter list lengths do not match (p,q)");
        }
    }
};

struct MeijerOptions {
    int max_terms = 10000;
    double rel_tol = 1e-9;
};

namespace detail {

struct SlaterResult {
    double value = 0.0;
    double abs_err = 0.0;  // estimated
};

// Slater expansion of G^{m,n}_{p,q}(x) over the m pole families b_h - k.
// Works for any small parameter block, including reflected ones where the
// series is asymptotic (p > q) and gets smallest-term truncation.
inline SlaterResult slater_expansion(int m, int n, int p, int q,
                                     const std::vector<double>& a,
                                     const std::vector<double>& b, double x,
                                     int max_terms) {
    const bool asymptotic = p > q;
    const double sigma = ((p - m - n) % 2 == 0) ? 1.0 : -1.0;
    const DD ddx{x};
    const DD lnx = dd_log(ddx);

    DD total{0.0};
    double err = 0.0;
    for (int h = 0; h < m; ++h) {
        const DD bh{b[h]};
        // prefactor: products of Gammas, assembled in log domain (dd)
        DD logpref{0.0};
        int sign = 1;
        bool zero_family = false;
        auto mul_gamma = [&](const DD& arg, bool numerator) {
            SignedLog g = dd_lngamma_signed(arg);
            if (g.sign == 0) {
                if (numerator) {
                    throw NonConvergenceError(
                        "meijer_g: numerator Gamma at a pole (unseparated parameters)");
                }
                zero_family = true;  // reciprocal of Gamma at a pole is 0
                return;
            }
            logpref = numerator ? add(logpref, g.log) : sub(logpref, g.log);
            sign *= g.sign;
        };
        for (int j = 0; j < m && !zero_family; ++j) {
            if (j == h) continue;
            mul_gamma(sub(DD{b[j]}, bh), true);  // Gamma(b_j - b_h)
        }
        for (int j = 0; j < n && !zero_family; ++j) {
            mul_gamma(sub(add(DD{1.0}, bh), DD{a[j]}), true);  // Gamma(1+b_h-a_j)
        }
        for (int j = m; j < q && !zero_family; ++j) {
            mul_gamma(sub(add(DD{1.0}, bh), DD{b[j]}), false);  // 1/Gamma(1+b_h-b_j)
        }
        for (int j = n; j < p && !zero_family; ++j) {
            mul_gamma(sub(DD{a[j]}, bh), false);  // 1/Gamma(a_j - b_h)
        }
        if (zero_family) continue;

        // series bases: numerators (1+b_h-a_j), denominators (1+b_h-b_j), j != h
        std::vector<DD> num_base, den_base;
        num_base.reserve(p);
        den_base.reserve(q);
        for (int j = 0; j < p; ++j) num_base.push_back(sub(add(DD{1.0}, bh), DD{a[j]}));
        for (int j = 0; j < q; ++j) {
            if (j == h) continue;
            den_base.push_back(sub(add(DD{1.0}, bh), DD{b[j]}));
        }

        const DD sx = mul(DD{sigma}, ddx);
        DD term{1.0};
        DD sum{1.0};
        double maxmag = 1.0;
        double prev_mag = 1.0;
        double trunc_mag = 0.0;
        bool converged = false;
        for (int k = 0; k < max_terms; ++k) {
            DD ratio = sx;
            bool terminated = false;
            for (const DD& nb : num_base) {
                DD f = add(nb, DD{static_cast<double>(k)});
                if (std::fabs(f.hi + f.lo) < 1e-11) {
                    terminated = true;
                    break;
                }
                ratio = mul(ratio, f);
            }
            if (terminated) {
                converged = true;
                break;
            }
            for (const DD& db : den_base) {
                ratio = div(ratio, add(db, DD{static_cast<double>(k)}));
            }
            ratio = div(ratio, DD{static_cast<double>(k + 1)});
            term = mul(term, ratio);
            double mag = std::fabs(term.hi);
            if (asymptotic && k > 2 && mag > prev_mag) {
                trunc_mag = prev_mag;  // smallest-term truncation
                converged = true;
                break;
            }
            sum = add(sum, term);
            maxmag = std::max(maxmag, mag);
            if (k > 2 && mag < 1e-35 * std::max(maxmag, std::fabs(sum.hi))) {
                converged = true;
                break;
            }
            prev_mag = mag;
        }
        if (!converged) {
            throw NonConvergenceError("meijer_g: series exceeded the term budget");
        }

        DD fam = mul(dd_exp(add(logpref, mul(bh, lnx))), sum);
        if (sign < 0) fam = neg(fam);
        total = add(total, fam);

        double scale = std::fabs(dd_exp(add(logpref, mul(bh, lnx))).hi);
        err += (maxmag * 1e-31 + trunc_mag) * scale + std::fabs(fam.hi) * 1e-30;
    }
    return {static_cast<double>(total), err};
}

// G^{2,0}_{1,2}(x | a; b1,b2) = x^{b1} e^{-x} U(a-b2, 1+b1-b2, x); for large x
// use the asymptotic series of Kummer's U with smallest-term truncation.
inline SlaterResult g2012_large_x(const std::vector<double>& a,
                                  const std::vector<double>& b, double x,
                                  int max_terms) {
    const double alpha1 = a[0] - b[1];
    const double alpha2 = a[0] - b[0];
    double term = 1.0, sum = 1.0, prev = 1.0, trunc = 0.0;
    for (int k = 0; k < max_terms; ++k) {
        term *= (alpha1 + k) * (alpha2 + k) / ((k + 1.0) * (-x));
        double mag = std::fabs(term);
        if (k > 1 && mag > prev) {
            trunc = prev;
            break;
        }
        sum += term;
        prev = mag;
    }
    double pref = std::exp((b[0] + b[1] - a[0]) * std::log(x) - x);
    return {pref * sum, pref * (trunc + 1e-16 * std::fabs(sum))};
}

inline SlaterResult meijer_eval_branch(const MeijerSpec& s, double x,
                                       int max_terms) {
    const bool exp_class = (s.m == 2 && s.n == 0);
    if (exp_class) {
        if (x <= 25.0) return slater_expansion(s.m, s.n, s.p, s.q, s.a, s.b, x, max_terms);
        return g2012_large_x(s.a, s.b, x, max_terms);
    }
    auto reflected = [&](double arg) {
        std::vector<double> ra(s.q), rb(s.p);
        for (int j = 0; j < s.q; ++j) ra[j] = 1.0 - s.b[j];
        for (int j = 0; j < s.p; ++j) rb[j] = 1.0 - s.a[j];
        SlaterResult r =
            slater_expansion(s.n, s.m, s.q, s.p, ra, rb, 1.0 / arg, max_terms);
        // neglected exponentially-small part of the large-argument expansion
        double bmax = *std::max_element(s.b.begin(), s.b.begin() + s.m);
        r.abs_err += 3.0 * std::exp(-arg + bmax * std::log(arg));
        return r;
    };
    if (x <= 32.0) {
        SlaterResult asc = slater_expansion(s.m, s.n, s.p, s.q, s.a, s.b, x, max_terms);
        if (asc.abs_err > 1e-7 * std::fabs(asc.value) && x > 3.0) {
            SlaterResult ref = reflected(x);
            if (ref.abs_err < asc.abs_err) return ref;
        }
        return asc;
    }
    return reflected(x);
}

// Coincident pole families arise from integer-spaced parameters among the
// first m lower parameters (ascending side) or the first n upper parameters
// (which become pole families after reflection).
inline bool find_pole_collision(const MeijerSpec& s, bool& in_a, int& kk) {
    for (int j = 0; j < s.m; ++j) {
        for (int k = j + 1; k < s.m; ++k) {
            double d = s.b[j] - s.b[k];
            if (std::fabs(d - std::round(d)) < 1e-7) {
                in_a = false;
                kk = k;
                return true;
            }
        }
    }
    for (int j = 0; j < s.n; ++j) {
        for (int k = j + 1; k < s.n; ++k) {
            double d = s.a[j] - s.a[k];
            if (std::fabs(d - std::round(d)) < 1e-7) {
                in_a = true;
                kk = k;
                return true;
            }
        }
    }
    return false;
}

}  // namespace detail

inline double meijer_g(const MeijerSpec& spec, double x,
                       const MeijerOptions& opt = {}) {
    if (!(x > 0.0)) throw std::domain_error("meijer_g: argument must be positive");

    bool in_a = false;
    int k = 0;
    detail::SlaterResult r;
    if (detail::find_pole_collision(spec, in_a, k)) {
        // logarithmic case: perturb the second colliding parameter by eps and
        // eps/2, Richardson-extrapolate 2 f(eps/2) - f(eps)
        const double eps = 1e-6;
        auto eval_pert = [&](double d) {
            MeijerSpec ps = spec;
            (in_a ? ps.a[k] : ps.b[k]) += d;
            bool a2;
            int k2;
            if (detail::find_pole_collision(ps, a2, k2)) {
                throw PoleCollisionError(
                    "meijer_g: epsilon-perturbation cannot separate coincident poles");
            }
            return detail::meijer_eval_branch(ps, x, opt.max_terms);
        };
        detail::SlaterResult r1 = eval_pert(eps);
        detail::SlaterResult r2 = eval_pert(eps / 2.0);
        r.value = 2.0 * r2.value - r1.value;
        r.abs_err = 2.0 * r2.abs_err + r1.abs_err +
                    std::fabs(r2.value - r1.value);  // extrapolation residual scale
    } else {
        r = detail::meijer_eval_branch(spec, x, opt.max_terms);
    }
    if (std::fabs(r.value) > 0.0 && r.abs_err > 1e-5 * std::fabs(r.value)) {
        throw NonConvergenceError(
            "meijer_g: estimated relative error " +
            std::to_string(r.abs_err / std::fabs(r.value)) +
            " exceeds the accuracy floor at x = " + std::to_string(x));
    }
    return r.value;
}

}  // namespace fsoegc

#pragma once

// N-branch equal-gain-combining SNR statistics under mixture-Gamma fading
// with zero-boresight pointing errors: PDF, CDF, moments, scintillation
// index, outage, ABER, high-SNR asymptote, diversity order.
//
// Convention: the combined SNR is gamma = (gbar * z)^2 with z the sum of the
// per-branch amplitude-times-attenuation products; the closed forms below
// are one self-consistent family under that reading and the Monte Carlo
// module samples the same quantity.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "fsoegc/errors.hpp"
#include "fsoegc/meijer.hpp"
#include "fsoegc/mixture.hpp"
#include "fsoegc/pointing.hpp"
#include "fsoegc/quadrature.hpp"
#include "fsoegc/specfun.hpp"

namespace fsoegc {

struct ModulationParams {
    double p_param = 0.5;  // coherent BPSK defaults
    double q_param = 1.0;
};

// one multi-index (i_1..i_N), 1-based per-branch term choices
struct TermIndex {
    std::vector<int> indices;
};

struct EgcLink {
    std::vector<MixtureGamma> branches;
    PointingModel pointing;

    EgcLink(std::vector<MixtureGamma> branches_, PointingModel pointing_,
            bool strict_validity = false)
        : branches(std::move(branches_)), pointing(pointing_) {
        if (branches.empty()) throw std::invalid_argument("EgcLink: needs at least one branch");
        for (const auto& br : branches) br.validate();
        if (pointing.no_pointing_error) {
            throw ValidityError(
                "EgcLink: the closed forms require a finite xi; use the Monte Carlo "
                "path for the no-pointing-error limit");
        }
        const double xi2 = pointing.xi2();
        const std::size_t first_checked = strict_validity ? 0 : 1;
        for (std::size_t j = first_checked; j < branches.size(); ++j) {
            for (std::size_t i = 0; i < branches[j].terms.size(); ++i) {
                const double b = branches[j].terms[i].b;
                if (!(xi2 > b)) {
                    throw ValidityError(
                        "validity condition violated: xi^2 = " + std::to_string(xi2) +
                        " <= b = " + std::to_string(b) + " (branch " +
                        std::to_string(j + 1) + ", term " + std::to_string(i + 1) + ")");
                }
            }
        }
    }

    int n_branches() const { return static_cast<int>(branches.size()); }
};

namespace detail {

struct TermData {
    double log_coef;  // log-magnitude of the Eq-family coefficient
    int sign;
    double s_exp;   // sum_{l>=2} b_{i_l} + xi^2
    double sum_b;   // sum of all b_{i_l}
    double nu;      // b_{i_1} - xi^2
    double c1;      // rate of the first-branch term
};

// Enumerate the multi-index space lexicographically (first branch outermost)
// and hand each term's assembled coefficient data to fn. delta_b1 optionally
// shifts the first-branch shape (used by the asymptote's pole perturbation).
template <class Fn>
inline void for_each_term(const EgcLink& link, double delta_b1, Fn&& fn) {
    const int N = link.n_branches();
    const double xi2 = link.pointing.xi2();
    const double ln_a0 = std::log(link.pointing.a0);
    const double base_log = 2.0 * N * std::log(link.pointing.xi) - N * xi2 * ln_a0;

    std::vector<int> idx(N, 0);
    while (true) {
        double log_mag = base_log;
        int sign = 1;
        double sum_b = 0.0;
        double s_exp = xi2;
        bool skip = false;
        for (int j = 0; j < N; ++j) {
            const MgTerm& t = link.branches[j].terms[idx[j]];
            double bj = t.b + (j == 0 ? delta_b1 : 0.0);
            if (t.a == 0.0) {
                skip = true;
                break;
            }
            log_mag += std::log(std::fabs(t.a));
            if (t.a < 0.0) sign = -sign;
            if (j > 0) {
                log_mag += log_beta(sum_b, bj);
                // Psi factor A0^(xi^2 - b) / (xi^2 - b)
                const double d = xi2 - bj;
                if (d <= 0.0) {
                    throw ValidityError("validity condition violated in term evaluation");
                }
                log_mag += d * ln_a0 - std::log(d);
            }
            sum_b += bj;
            if (j > 0) s_exp += bj;
        }
        if (!skip) {
            const MgTerm& t1 = link.branches[0].terms[idx[0]];
            const double b1 = t1.b + delta_b1;
            log_mag += (xi2 - b1) * std::log(t1.c);
            fn(TermData{log_mag, sign, s_exp, sum_b, b1 - xi2, t1.c});
        }
        int j = N - 1;
        for (; j >= 0; --j) {
            if (++idx[j] < static_cast<int>(link.branches[j].terms.size())) break;
            idx[j] = 0;
        }
        if (j < 0) break;
    }
}

struct KahanSum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double v) {
        double y = v - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

}  // namespace detail

// coefficient of a single multi-index term (log magnitude, sign)
inline std::pair<double, int> term_log_coefficient(const EgcLink& link,
                                                   const TermIndex& t) {
    if (static_cast<int>(t.indices.size()) != link.n_branches()) {
        throw std::invalid_argument("term_log_coefficient: index arity mismatch");
    }
    std::vector<int> want(t.indices.size());
    for (std::size_t j = 0; j < t.indices.size(); ++j) {
        int i = t.indices[j];
        if (i < 1 || i > static_cast<int>(link.branches[j].terms.size())) {
            throw std::invalid_argument("term_log_coefficient: index out of range");
        }
        want[j] = i - 1;
    }
    double log_mag = 0.0;
    int sign = 0;
    int pos = 0;
    const int N = link.n_branches();
    std::vector<int> strides(N, 1);
    for (int j = N - 2; j >= 0; --j) {
        strides[j] = strides[j + 1] * static_cast<int>(link.branches[j + 1].terms.size());
    }
    int target = 0;
    for (int j = 0; j < N; ++j) target += want[j] * strides[j];
    detail::for_each_term(link, 0.0, [&](const detail::TermData& td) {
        if (pos++ == target) {
            log_mag = td.log_coef;
            sign = td.sign;
        }
    });
    if (sign == 0) throw std::invalid_argument("term_log_coefficient: zero-coefficient term");
    return {log_mag, sign};
}

inline double snr_pdf(const EgcLink& link, double gbar, double g) {
    if (!(gbar > 0.0) || !(g > 0.0)) {
        throw std::domain_error("snr_pdf: gbar and g must be positive");
    }
    const double ln_g = std::log(g);
    const double ln_gbar = std::log(gbar);
    const double sqrt_g = std::sqrt(g);
    const double a0 = link.pointing.a0;
    detail::KahanSum acc;
    detail::for_each_term(link, 0.0, [&](const detail::TermData& t) {
        const double x = t.c1 * sqrt_g / (gbar * a0);
        const double gam = upper_inc_gamma(t.nu, x);
        if (gam <= 0.0) return;
        const double lv = t.log_coef - M_LN2 + (0.5 * t.s_exp - 1.0) * ln_g -
                          t.s_exp * ln_gbar + std::log(gam);
        acc.add(t.sign * std::exp(lv));
    });
    return acc.sum;
}

struct CdfResult {
    double clamped;  // in [0,1]
    double raw;      // diagnostic: the unclamped term sum
};

inline CdfResult snr_cdf_full(const EgcLink& link, double gbar, double g) {
    if (!(gbar > 0.0)) throw std::domain_error("snr_cdf: gbar must be positive");
    if (g < 0.0) throw std::domain_error("snr_cdf: g must be non-negative");
    if (g == 0.0) return {0.0, 0.0};
    const double ln_g = std::log(g);
    const double ln_gbar = std::log(gbar);
    const double sqrt_g = std::sqrt(g);
    const double a0 = link.pointing.a0;
    detail::KahanSum acc;
    detail::for_each_term(link, 0.0, [&](const detail::TermData& t) {
        const double x = t.c1 * sqrt_g / (gbar * a0);
        MeijerSpec spec(2, 1, 2, 3, {1.0 - t.s_exp, 1.0},
                        {0.0, t.nu, -t.s_exp});
        const double gval = meijer_g(spec, x);
        const double lmag = t.log_coef + 0.5 * t.s_exp * ln_g - t.s_exp * ln_gbar;
        acc.add(t.sign * std::exp(lmag) * gval);
    });
    return {std::min(1.0, std::max(0.0, acc.sum)), acc.sum};
}

inline double snr_cdf(const EgcLink& link, double gbar, double g) {
    return snr_cdf_full(link, gbar, g).clamped;
}

// n-th raw moment of the SNR. Because gamma = (gbar z)^2, the n-th SNR
// moment is the printed amplitude-moment family evaluated at order 2n.
inline double snr_moment(const EgcLink& link, double gbar, double n) {
    if (!(gbar > 0.0) || n < 0.0) {
        throw std::domain_error("snr_moment: gbar must be positive, n non-negative");
    }
    const double ln_gbar = std::log(gbar);
    const double ln_a0 = std::log(link.pointing.a0);
    const double m = 2.0 * n;
    detail::KahanSum acc;
    detail::for_each_term(link, 0.0, [&](const detail::TermData& t) {
        const double lv = t.log_coef + std::lgamma(t.sum_b + m) -
                          t.s_exp * ln_gbar - std::log(t.s_exp + m) -
                          (t.s_exp + m) * (std::log(t.c1) - ln_gbar - ln_a0);
        acc.add(t.sign * std::exp(lv));
    });
    return acc.sum;
}

inline double scintillation_index(const EgcLink& link, double gbar) {
    const double m1 = snr_moment(link, gbar, 1.0);
    const double m2 = snr_moment(link, gbar, 2.0);
    return m2 / (m1 * m1) - 1.0;
}

inline double outage_probability(const EgcLink& link, double gbar, double g_th) {
    if (!(g_th > 0.0)) throw std::domain_error("outage_probability: g_th must be positive");
    return snr_cdf(link, gbar, g_th);
}

inline double aber(const EgcLink& link, double gbar, const ModulationParams& mod) {
    if (!(mod.p_param > 0.0) || !(mod.q_param > 0.0)) {
        throw std::domain_error("aber: modulation parameters must be positive");
    }
    if (!(gbar > 0.0)) throw std::domain_error("aber: gbar must be positive");
    const double a0 = link.pointing.a0;
    const double P = mod.p_param, Q = mod.q_param;
    const double lg2q = std::log(gbar * gbar * Q);
    detail::KahanSum acc;
    detail::for_each_term(link, 0.0, [&](const detail::TermData& t) {
        const double x = t.c1 * t.c1 / (4.0 * Q * gbar * gbar * a0 * a0);
        const double half_s = 0.5 * t.s_exp;
        MeijerSpec spec(3, 2, 3, 4,
                        {1.0 - P - half_s, 1.0 - half_s, 1.0},
                        {0.0, 0.5 * t.nu, 0.5 * (t.nu + 1.0), -half_s});
        const double gval = meijer_g(spec, x);
        const double lmag = t.log_coef + (t.nu - 3.0) * M_LN2 -
                            0.5 * std::log(M_PI) - std::lgamma(P) - half_s * lg2q;
        acc.add(t.sign * std::exp(lmag) * gval);
    });
    return acc.sum;
}

namespace detail {

inline double outage_asymptotic_impl(const EgcLink& link, double gbar,
                                     double g_th, double delta) {
    const double ln_gbar = std::log(gbar);
    const double ln_gth = std::log(g_th);
    const double ln_a0 = std::log(link.pointing.a0);
    KahanSum acc;
    for_each_term(link, delta, [&](const TermData& t) {
        const double S = t.s_exp;
        const double nu = t.nu;
        // h = 1 (phi_h = 0): Gamma(nu) Gamma(S) / Gamma(1+S)
        LogGammaSigned gnu = ln_gamma_signed(nu);
        {
            const double lv = t.log_coef + gnu.log + std::lgamma(S) -
                              std::lgamma(1.0 + S) + 0.5 * S * ln_gth -
                              S * ln_gbar;
            acc.add(t.sign * gnu.sign * std::exp(lv));
        }
        // h = 2 (phi_h = nu): Gamma(-nu) Gamma(S+nu) / (Gamma(1+nu+S) Gamma(1-nu))
        LogGammaSigned gmnu = ln_gamma_signed(-nu);
        LogGammaSigned gsnu = ln_gamma_signed(S + nu);
        LogGammaSigned g1ns = ln_gamma_signed(1.0 + nu + S);
        LogGammaSigned g1mn = ln_gamma_signed(1.0 - nu);
        if (gmnu.sign != 0 && gsnu.sign != 0 && g1ns.sign != 0 && g1mn.sign != 0) {
            const double lv = t.log_coef + gmnu.log + gsnu.log - g1ns.log -
                              g1mn.log + nu * (std::log(t.c1) - ln_a0) +
                              0.5 * (S + nu) * ln_gth - (S + nu) * ln_gbar;
            acc.add(t.sign * gmnu.sign * gsnu.sign * g1ns.sign * g1mn.sign *
                    std::exp(lv));
        }
    });
    return acc.sum;
}

}  // namespace detail

// two-term high-SNR residue approximation of the outage probability
inline double outage_asymptotic(const EgcLink& link, double gbar, double g_th) {
    if (!(g_th > 0.0) || !(gbar > 0.0)) {
        throw std::domain_error("outage_asymptotic: gbar and g_th must be positive");
    }
    // the two kept pole families coincide when nu = b1 - xi^2 is an integer
    bool collision = false;
    const double xi2 = link.pointing.xi2();
    for (const auto& t : link.branches[0].terms) {
        const double nu = t.b - xi2;
        if (std::fabs(nu - std::round(nu)) < 1e-7) collision = true;
    }
    if (!collision) return detail::outage_asymptotic_impl(link, gbar, g_th, 0.0);
    const double eps = 1e-6;
    const double f1 = detail::outage_asymptotic_impl(link, gbar, g_th, eps);
    const double f2 = detail::outage_asymptotic_impl(link, gbar, g_th, eps / 2.0);
    const double v = 2.0 * f2 - f1;
    if (!std::isfinite(v)) {
        throw PoleCollisionError("outage_asymptotic: perturbation failed to separate poles");
    }
    return v;
}

// Eq-family diversity order N * min(alpha, beta); for branches without a
// Gamma-Gamma origin, falls back to the branch's minimum mixture shape.
inline double diversity_order(const EgcLink& link) {
    double d = 0.0;
    for (const auto& br : link.branches) {
        if (br.origin) {
            d += std::min(br.origin->alpha, br.origin->beta);
        } else {
            double bmin = br.terms.front().b;
            for (const auto& t : br.terms) bmin = std::min(bmin, t.b);
            d += bmin;
        }
    }
    return d;
}

// Conditional two-branch convolution: closed-form term sum vs brute-force
// numerical convolution (test-surface operation).
struct ConvolutionCheck {
    double closed;
    double numeric;
};

inline ConvolutionCheck appendix_convolution_check(const MixtureGamma& branch1,
                                                   const MixtureGamma& branch2,
                                                   double y1, double y2,
                                                   double z) {
    if (!(y1 > 0.0) || !(y2 > 0.0) || !(z > 0.0)) {
        throw std::domain_error("appendix_convolution_check: y1, y2, z must be positive");
    }
    double closed = 0.0;
    for (const auto& t1 : branch1.terms) {
        for (const auto& t2 : branch2.terms) {
            closed += t1.a * t2.a * beta(t1.b, t2.b) *
                      std::exp((t1.b + t2.b - 1.0) * std::log(z) -
                               t1.b * std::log(y1) - t2.b * std::log(y2) -
                               t1.c * z / y1);
        }
    }
    auto cond_pdf = [](const MixtureGamma& mg, double x, double y) {
        double s = 0.0;
        for (const auto& t : mg.terms) {
            s += t.a * std::pow(y, -t.b) * std::pow(x, t.b - 1.0) *
                 std::exp(-t.c * x / y);
        }
        return s;
    };
    // x = z sin^2(theta) softens the endpoint power singularities
    auto integrand = [&](double th) {
        const double s = std::sin(th), c = std::cos(th);
        const double x = z * s * s;
        const double zx = z * c * c;
        if (x <= 0.0 || zx <= 0.0) return 0.0;
        return cond_pdf(branch1, x, y1) * cond_pdf(branch2, zx, y2) * 2.0 * z * s * c;
    };
    const double numeric = integrate(integrand, 0.0, M_PI / 2.0, 1e-10);
    return {closed, numeric};
}

}  // namespace fsoegc

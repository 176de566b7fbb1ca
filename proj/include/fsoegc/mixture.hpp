#pragma once

// Mixture-Gamma representation of the turbulence fading amplitude and the
// Gauss-Laguerre fit from Gamma-Gamma shape parameters.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "fsoegc/specfun.hpp"

namespace fsoegc {

struct GammaGammaParams {
    double alpha;  // small-scale shape
    double beta;   // large-scale shape
};

struct MgTerm {
    double a;  // coefficient
    double b;  // shape
    double c;  // rate
};

struct MixtureGamma {
    std::vector<MgTerm> terms;
    // set when the mixture was fitted from Gamma-Gamma shapes; used for the
    // diversity-order formula
    std::optional<GammaGammaParams> origin;

    void validate() const {
        if (terms.empty()) throw std::invalid_argument("MixtureGamma: needs at least one term");
        double norm = 0.0;
        for (const auto& t : terms) {
            if (!(t.b > 0.0) || !(t.c > 0.0)) {
                throw std::invalid_argument("MixtureGamma: shapes and rates must be positive");
            }
            norm += t.a * std::exp(std::lgamma(t.b) - t.b * std::log(t.c));
        }
        if (std::fabs(norm - 1.0) > 1e-9) {
            throw std::invalid_argument("MixtureGamma: total probability " +
                                        std::to_string(norm) + " is not 1");
        }
    }
};

// Gauss-Laguerre fit of a unit-mean Gamma-Gamma channel to L mixture terms:
// b_i = alpha, c_i = alpha*beta / t_i, a_i from the quadrature weights, with
// a final rescale that makes the normalization exact.
inline MixtureGamma fit_gamma_gamma(const GammaGammaParams& gg, int L) {
    if (!(gg.alpha > 0.0) || !(gg.beta > 0.0)) {
        throw std::domain_error("fit_gamma_gamma: shapes must be positive");
    }
    auto [t, w] = gauss_laguerre(L);
    const double al = gg.alpha, be = gg.beta;
    MixtureGamma mg;
    mg.terms.resize(L);
    const double lgab = al * std::log(al * be) - std::lgamma(al) - std::lgamma(be);
    for (int i = 0; i < L; ++i) {
        mg.terms[i].b = al;
        mg.terms[i].c = al * be / t[i];
        mg.terms[i].a =
            std::exp(std::log(w[i]) + (be - 1.0 - al) * std::log(t[i]) + lgab);
    }
    double norm = 0.0;
    for (const auto& term : mg.terms) {
        norm += term.a * std::exp(std::lgamma(term.b) - term.b * std::log(term.c));
    }
    for (auto& term : mg.terms) term.a /= norm;
    mg.origin = gg;
    return mg;
}

inline double mg_pdf(const MixtureGamma& mg, double x) {
    if (!(x > 0.0)) throw std::domain_error("mg_pdf: x must be positive");
    const double lx = std::log(x);
    double sum = 0.0, comp = 0.0;
    for (const auto& t : mg.terms) {
        double v = t.a * std::exp((t.b - 1.0) * lx - t.c * x);
        double y = v - comp;
        double s = sum + y;
        comp = (s - sum) - y;
        sum = s;
    }
    return sum;
}

inline double mg_cdf(const MixtureGamma& mg, double x) {
    if (x <= 0.0) return 0.0;
    double sum = 0.0;
    for (const auto& t : mg.terms) {
        double weight = t.a * std::exp(std::lgamma(t.b) - t.b * std::log(t.c));
        sum += weight * lower_inc_gamma_reg(t.b, t.c * x);
    }
    return sum;
}

inline double mg_moment(const MixtureGamma& mg, double n) {
    if (n < 0.0) throw std::domain_error("mg_moment: order must be non-negative");
    double sum = 0.0;
    for (const auto& t : mg.terms) {
        sum += t.a * std::exp(std::lgamma(t.b + n) - (t.b + n) * std::log(t.c));
    }
    return sum;
}

inline void to_json(nlohmann::json& j, const MixtureGamma& mg) {
    j = nlohmann::json{{"terms", nlohmann::json::array()}};
    for (const auto& t : mg.terms) {
        j["terms"].push_back({{"a", t.a}, {"b", t.b}, {"c", t.c}});
    }
    if (mg.origin) {
        j["origin"] = {{"alpha", mg.origin->alpha}, {"beta", mg.origin->beta}};
    }
}

inline void from_json(const nlohmann::json& j, MixtureGamma& mg) {
    mg.terms.clear();
    for (const auto& t : j.at("terms")) {
        mg.terms.push_back({t.at("a").get<double>(), t.at("b").get<double>(),
                            t.at("c").get<double>()});
    }
    if (j.contains("origin")) {
        mg.origin = GammaGammaParams{j["origin"].at("alpha").get<double>(),
                                     j["origin"].at("beta").get<double>()};
    }
    mg.validate();
}

}  // namespace fsoegc

#pragma once

// Zero-boresight pointing-error model: power-law attenuation on [0, A0].

#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "fsoegc/specfun.hpp"

namespace fsoegc {

inline double a0_from_geometry(double r, double wz) {
    if (!(r > 0.0) || !(wz > 0.0)) {
        throw std::domain_error("a0_from_geometry: r and w_z must be positive");
    }
    const double e = erf(std::sqrt(M_PI) * r / (std::sqrt(2.0) * wz));
    return e * e;
}

struct PointingModel {
    double xi = 1.0;
    double a0 = 1.0;
    // xi -> infinity limit: deterministic attenuation at A0 (forced to 1),
    // so downstream formulas can short-circuit instead of evaluating
    // near-singular xi^2 factors
    bool no_pointing_error = false;

    PointingModel() = default;

    PointingModel(double xi_, double a0_) : xi(xi_), a0(a0_) {
        if (std::isinf(xi_)) {
            no_pointing_error = true;
            a0 = 1.0;
            return;
        }
        if (!(xi > 0.0)) throw std::domain_error("PointingModel: xi must be positive");
        if (!(a0 > 0.0) || a0 > 1.0) {
            throw std::domain_error("PointingModel: A0 must lie in (0, 1]");
        }
    }

    static PointingModel from_geometry(double xi, double r, double wz) {
        return PointingModel(xi, a0_from_geometry(r, wz));
    }

    double xi2() const { return xi * xi; }
};

inline double pointing_pdf(const PointingModel& pm, double y) {
    if (pm.no_pointing_error) {
        throw std::domain_error("pointing_pdf: degenerate (no pointing error) model");
    }
    if (y <= 0.0 || y > pm.a0) return 0.0;
    const double x2 = pm.xi2();
    return x2 / std::pow(pm.a0, x2) * std::pow(y, x2 - 1.0);
}

// closed-form mean A0 xi^2 / (xi^2 + 1)
inline double pointing_mean(const PointingModel& pm) {
    if (pm.no_pointing_error) return pm.a0;
    const double x2 = pm.xi2();
    return pm.a0 * x2 / (x2 + 1.0);
}

// inverse-CDF sample: y = A0 u^{1/xi^2}
inline double sample_pointing(const PointingModel& pm, double u) {
    if (u < 0.0 || u > 1.0) throw std::domain_error("sample_pointing: u must be in [0,1]");
    if (pm.no_pointing_error) return pm.a0;
    return pm.a0 * std::pow(u, 1.0 / pm.xi2());
}

inline void to_json(nlohmann::json& j, const PointingModel& pm) {
    j = nlohmann::json{{"xi", pm.xi}, {"a0", pm.a0}};
}

inline void from_json(const nlohmann::json& j, PointingModel& pm) {
    const double xi = j.at("xi").get<double>();
    if (j.contains("a0")) {
        pm = PointingModel(xi, j.at("a0").get<double>());
    } else {
        pm = PointingModel::from_geometry(xi, j.at("r").get<double>(),
                                          j.at("wz").get<double>());
    }
}

}  // namespace fsoegc

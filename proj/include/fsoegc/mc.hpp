#pragma once

// Seeded Monte Carlo oracle for the combined-SNR statistics: samples the
// composite channel and estimates outage, ABER, scintillation index, and
// moments with confidence intervals.
//
// Determinism contract: results are a pure function of (seed, n_samples).
// Work is split into fixed-size internal blocks, each with its own RNG
// substream, and block partials are reduced in block order — so estimates
// are bit-identical for any thread count and any chunk size.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "fsoegc/egc.hpp"
#include "fsoegc/mixture.hpp"
#include "fsoegc/pointing.hpp"
#include "fsoegc/rng.hpp"
#include "fsoegc/specfun.hpp"

namespace fsoegc {

inline double sample_gamma_gamma(const GammaGammaParams& gg, Rng& rng) {
    // product of two independent unit-mean Gamma variates
    return rng.gamma(gg.alpha) / gg.alpha * (rng.gamma(gg.beta) / gg.beta);
}

inline double sample_mixture_gamma(const MixtureGamma& mg, Rng& rng) {
    double u = rng.uniform();
    double acc = 0.0;
    std::size_t pick = mg.terms.size() - 1;
    for (std::size_t i = 0; i < mg.terms.size(); ++i) {
        const auto& t = mg.terms[i];
        acc += t.a * std::exp(std::lgamma(t.b) - t.b * std::log(t.c));
        if (u <= acc) {
            pick = i;
            break;
        }
    }
    const auto& t = mg.terms[pick];
    return rng.gamma(t.b) / t.c;
}

using BranchDist = std::variant<GammaGammaParams, MixtureGamma>;

struct SimChannel {
    std::vector<BranchDist> branches;
    PointingModel pointing;
};

struct SimConfig {
    std::uint64_t n_samples = 1000000;
    std::uint64_t seed = 1;
    std::uint64_t chunk_size = 1000000;  // scheduling granularity only
    std::vector<double> gbar_grid;       // linear mean-SNR values
    double g_th = 1.0;
    ModulationParams mod;
};

struct SimRow {
    double gbar;  // linear
    double outage;
    double outage_ci;  // 95% half-width
    double aber;
    double aber_ci;
    double si;
    double m1;  // first raw SNR moment
    double m2;
    std::uint64_t n_samples;
};

struct SimResult {
    std::vector<SimRow> rows;
    std::uint64_t n_samples = 0;
};

inline unsigned worker_count() {
    if (const char* env = std::getenv("FSO_EGC_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? hc : 1;
}

namespace detail {

constexpr std::uint64_t SIM_BLOCK = 4096;

struct BlockAccum {
    // per gbar: outage count, ber sum, ber^2 sum; plus z-moment sums
    std::vector<double> outage_cnt;
    std::vector<double> ber_sum;
    std::vector<double> ber_sq_sum;
    double z2 = 0.0;
    double z4 = 0.0;
};

inline double sample_z(const SimChannel& ch, Rng& rng) {
    double z = 0.0;
    for (const auto& br : ch.branches) {
        const double x = std::holds_alternative<GammaGammaParams>(br)
                             ? sample_gamma_gamma(std::get<GammaGammaParams>(br), rng)
                             : sample_mixture_gamma(std::get<MixtureGamma>(br), rng);
        const double y = sample_pointing(ch.pointing, rng.uniform());
        z += x * y;
    }
    return z;
}

}  // namespace detail

// draw n combined-amplitude samples z = sum_j x_j y_j (deterministic in seed)
inline std::vector<double> draw_z_samples(const SimChannel& ch, std::uint64_t n,
                                          std::uint64_t seed) {
    std::vector<double> out(n);
    const std::uint64_t blocks = (n + detail::SIM_BLOCK - 1) / detail::SIM_BLOCK;
    for (std::uint64_t b = 0; b < blocks; ++b) {
        Rng rng = substream(seed, b);
        const std::uint64_t lo = b * detail::SIM_BLOCK;
        const std::uint64_t hi = std::min(n, lo + detail::SIM_BLOCK);
        for (std::uint64_t i = lo; i < hi; ++i) out[i] = detail::sample_z(ch, rng);
    }
    return out;
}

inline SimResult simulate_egc(const SimChannel& ch, const SimConfig& cfg) {
    if (cfg.n_samples < 1) throw std::invalid_argument("simulate_egc: n_samples must be >= 1");
    if (cfg.gbar_grid.empty()) throw std::invalid_argument("simulate_egc: empty gbar grid");
    const std::size_t ng = cfg.gbar_grid.size();
    const std::uint64_t n = cfg.n_samples;
    const std::uint64_t blocks = (n + detail::SIM_BLOCK - 1) / detail::SIM_BLOCK;
    const std::uint64_t blocks_per_task =
        std::max<std::uint64_t>(1, cfg.chunk_size / detail::SIM_BLOCK);

    const double P = cfg.mod.p_param, Q = cfg.mod.q_param;
    const bool bpsk = std::fabs(P - 0.5) < 1e-12 && std::fabs(Q - 1.0) < 1e-12;
    const double lg_p = std::lgamma(P);
    // outage threshold on z: gamma = (gbar z)^2 < g_th  <=>  z < sqrt(g_th)/gbar
    std::vector<double> z_thresh(ng);
    for (std::size_t i = 0; i < ng; ++i) z_thresh[i] = std::sqrt(cfg.g_th) / cfg.gbar_grid[i];

    std::vector<detail::BlockAccum> partials(blocks);
    std::atomic<std::uint64_t> next_task{0};
    auto work = [&]() {
        for (;;) {
            const std::uint64_t task = next_task.fetch_add(1);
            const std::uint64_t b0 = task * blocks_per_task;
            if (b0 >= blocks) return;
            const std::uint64_t b1 = std::min(blocks, b0 + blocks_per_task);
            for (std::uint64_t b = b0; b < b1; ++b) {
                detail::BlockAccum& acc = partials[b];
                acc.outage_cnt.assign(ng, 0.0);
                acc.ber_sum.assign(ng, 0.0);
                acc.ber_sq_sum.assign(ng, 0.0);
                Rng rng = substream(cfg.seed, b);
                const std::uint64_t lo = b * detail::SIM_BLOCK;
                const std::uint64_t hi = std::min(n, lo + detail::SIM_BLOCK);
                for (std::uint64_t i = lo; i < hi; ++i) {
                    const double z = detail::sample_z(ch, rng);
                    const double z2 = z * z;
                    acc.z2 += z2;
                    acc.z4 += z2 * z2;
                    for (std::size_t gi = 0; gi < ng; ++gi) {
                        if (z < z_thresh[gi]) acc.outage_cnt[gi] += 1.0;
                        const double snr = cfg.gbar_grid[gi] * cfg.gbar_grid[gi] * z2;
                        double ber;
                        if (bpsk) {
                            ber = 0.5 * std::erfc(cfg.gbar_grid[gi] * z);
                        } else {
                            // Gamma(P, Q snr) / (2 Gamma(P))
                            ber = 0.5 * std::exp(std::log(upper_inc_gamma(P, Q * snr)) - lg_p);
                        }
                        acc.ber_sum[gi] += ber;
                        acc.ber_sq_sum[gi] += ber * ber;
                    }
                }
            }
        }
    };

    const unsigned workers = worker_count();
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < workers; ++i) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    // ordered reduction over blocks (independent of scheduling)
    std::vector<detail::KahanSum> out_cnt(ng), ber(ng), ber_sq(ng);
    detail::KahanSum z2s, z4s;
    for (const auto& acc : partials) {
        for (std::size_t gi = 0; gi < ng; ++gi) {
            out_cnt[gi].add(acc.outage_cnt[gi]);
            ber[gi].add(acc.ber_sum[gi]);
            ber_sq[gi].add(acc.ber_sq_sum[gi]);
        }
        z2s.add(acc.z2);
        z4s.add(acc.z4);
    }

    const double dn = static_cast<double>(n);
    const double ez2 = z2s.sum / dn;
    const double ez4 = z4s.sum / dn;
    const double si = ez4 / (ez2 * ez2) - 1.0;

    SimResult res;
    res.n_samples = n;
    res.rows.resize(ng);
    for (std::size_t gi = 0; gi < ng; ++gi) {
        SimRow& r = res.rows[gi];
        const double gb = cfg.gbar_grid[gi];
        r.gbar = gb;
        r.n_samples = n;
        const double p = out_cnt[gi].sum / dn;
        r.outage = p;
        // continuity-corrected Wald half-width: the 1/(2n) term keeps the
        // interval nondegenerate when every sample lands on one side (p = 0, 1)
        r.outage_ci = 1.959963984540054 * std::sqrt(std::max(0.0, p * (1.0 - p)) / dn) +
                      0.5 / dn;
        const double bm = ber[gi].sum / dn;
        const double bvar = std::max(0.0, ber_sq[gi].sum / dn - bm * bm);
        r.aber = bm;
        r.aber_ci = 1.959963984540054 * std::sqrt(bvar / dn);
        r.si = si;
        r.m1 = gb * gb * ez2;
        r.m2 = gb * gb * gb * gb * ez4;
    }
    return res;
}

struct Histogram {
    std::vector<double> edges;    // nbins + 1
    std::vector<double> density;  // normalized to unit mass
    std::vector<double> stderr_;  // per-bin standard error of the density
};

inline Histogram empirical_pdf(const std::vector<double>& samples, int nbins) {
    if (samples.size() < 1000) {
        throw std::invalid_argument("empirical_pdf: needs at least 1000 samples");
    }
    if (nbins < 1) throw std::invalid_argument("empirical_pdf: needs at least one bin");
    double lo = samples[0], hi = samples[0];
    for (double s : samples) {
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    if (!(hi > lo)) throw std::invalid_argument("empirical_pdf: degenerate sample range");
    Histogram h;
    h.edges.resize(nbins + 1);
    for (int i = 0; i <= nbins; ++i) {
        h.edges[i] = lo + (hi - lo) * static_cast<double>(i) / nbins;
    }
    std::vector<std::uint64_t> counts(nbins, 0);
    const double w = (hi - lo) / nbins;
    for (double s : samples) {
        int bin = static_cast<int>((s - lo) / w);
        if (bin >= nbins) bin = nbins - 1;
        ++counts[bin];
    }
    const double dn = static_cast<double>(samples.size());
    h.density.resize(nbins);
    h.stderr_.resize(nbins);
    for (int i = 0; i < nbins; ++i) {
        const double p = counts[i] / dn;
        h.density[i] = p / w;
        h.stderr_[i] = std::sqrt(p * (1.0 - p) / dn) / w;
    }
    return h;
}

}  // namespace fsoegc

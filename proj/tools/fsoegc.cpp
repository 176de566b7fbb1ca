// fsoegc: closed-form and Monte Carlo performance metrics for N-branch
// equal-gain-combining free-space optical links under mixture-Gamma fading
// with zero-boresight pointing errors.
//
// Verbs:
//   fit       fit a mixture-Gamma model to Gamma-Gamma shapes, write JSON
//   run       evaluate closed-form metric sweeps (plus MC columns if a sim
//             block is present in the config)
//   simulate  Monte Carlo sweep only
//   compare   closed forms and Monte Carlo side by side with relative errors
//
// Exit codes: 0 success, 2 config/schema error, 3 validity-condition
// violation, 4 numerical non-convergence. Failures also emit a
// machine-readable JSON error report on stderr.

#include <cinttypes>
#include <clocale>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fsoegc/fsoegc.hpp"

using nlohmann::json;

namespace {

constexpr int EXIT_SCHEMA = 2;
constexpr int EXIT_VALIDITY = 3;
constexpr int EXIT_NONCONVERGENCE = 4;

struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

[[noreturn]] void fail(int code, const std::string& message) {
    json err = {{"error", {{"code", code}, {"message", message}}}};
    std::fprintf(stderr, "%s\n", err.dump().c_str());
    std::exit(code);
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

// ---------------------------------------------------------------------------
// config

struct ResolvedModel {
    std::vector<fsoegc::MixtureGamma> branches;  // one per combining branch
    fsoegc::PointingModel pointing;
    int n;  // branch count
};

struct RunConfig {
    json raw;                    // effective config (after CLI overrides)
    std::vector<ResolvedModel> models;  // one per requested N
    std::vector<double> gbar_db;
    std::vector<std::string> metrics;
    fsoegc::ModulationParams mod;
    double g_th = 1.0;
    std::optional<fsoegc::SimConfig> sim;
    std::string out_stem = "out";
    std::string format = "csv";
    bool strict_validity = false;
};

fsoegc::PointingModel parse_pointing(const json& model) {
    if (!model.contains("xi")) throw SchemaError("model.xi is required");
    const double xi = model.at("xi").get<double>();
    if (model.contains("a0")) {
        return fsoegc::PointingModel(xi, model.at("a0").get<double>());
    }
    if (model.contains("r") && model.contains("wz")) {
        return fsoegc::PointingModel::from_geometry(xi, model.at("r").get<double>(),
                                                    model.at("wz").get<double>());
    }
    throw SchemaError("model needs either a0 or the (r, wz) geometry pair");
}

RunConfig parse_config(const json& cfg, bool strict_validity, bool need_metrics,
                       bool need_sim) {
    RunConfig rc;
    rc.raw = cfg;
    rc.strict_validity = strict_validity;
    if (!cfg.contains("model")) throw SchemaError("missing model block");
    const json& model = cfg.at("model");
    fsoegc::PointingModel pm = parse_pointing(model);

    std::vector<fsoegc::MixtureGamma> proto_branches;
    std::vector<int> n_values;
    if (model.contains("branches")) {
        for (const json& br : model.at("branches")) {
            if (br.contains("terms")) {
                proto_branches.push_back(br.get<fsoegc::MixtureGamma>());
            } else {
                const int L = br.value("L", model.value("L", 10));
                proto_branches.push_back(fsoegc::fit_gamma_gamma(
                    {br.at("alpha").get<double>(), br.at("beta").get<double>()}, L));
            }
        }
        if (proto_branches.empty()) throw SchemaError("model.branches is empty");
        n_values.push_back(static_cast<int>(proto_branches.size()));
        for (int n : n_values) {
            ResolvedModel m{proto_branches, pm, n};
            rc.models.push_back(std::move(m));
        }
    } else {
        if (!model.contains("alpha") || !model.contains("beta")) {
            throw SchemaError("model needs (alpha, beta) or an explicit branches list");
        }
        const int L = model.value("L", 10);
        fsoegc::MixtureGamma mg = fsoegc::fit_gamma_gamma(
            {model.at("alpha").get<double>(), model.at("beta").get<double>()}, L);
        const json& nj = model.contains("N") ? model.at("N") : json(1);
        if (nj.is_array()) {
            for (const json& v : nj) n_values.push_back(v.get<int>());
        } else {
            n_values.push_back(nj.get<int>());
        }
        for (int n : n_values) {
            if (n < 1) throw SchemaError("model.N must be >= 1");
            ResolvedModel m{std::vector<fsoegc::MixtureGamma>(n, mg), pm, n};
            rc.models.push_back(std::move(m));
        }
    }

    if (!cfg.contains("sweep")) throw SchemaError("missing sweep block");
    const json& sweep = cfg.at("sweep");
    if (sweep.contains("gbar_db") && sweep.at("gbar_db").is_array()) {
        for (const json& v : sweep.at("gbar_db")) rc.gbar_db.push_back(v.get<double>());
    } else {
        const json& g = sweep.contains("gbar_db") ? sweep.at("gbar_db") : sweep;
        const double lo = g.at("min").get<double>();
        const double hi = g.at("max").get<double>();
        const double step = g.at("step").get<double>();
        if (!(step > 0.0) || hi < lo) throw SchemaError("sweep range is empty or inverted");
        for (double db = lo; db <= hi + 1e-9; db += step) rc.gbar_db.push_back(db);
    }
    if (rc.gbar_db.empty()) throw SchemaError("sweep produced no gbar points");

    if (need_metrics) {
        if (!cfg.contains("metrics") || !cfg.at("metrics").is_array() ||
            cfg.at("metrics").empty()) {
            throw SchemaError("metrics block is missing or empty");
        }
        for (const json& m : cfg.at("metrics")) {
            const std::string name = m.get<std::string>();
            static const char* known[] = {"pdf", "cdf", "moments", "si",
                                          "outage", "aber", "asympt"};
            bool ok = false;
            for (const char* k : known) ok = ok || name == k;
            if (!ok) throw SchemaError("unknown metric '" + name + "'");
            rc.metrics.push_back(name);
        }
    }

    if (cfg.contains("mod")) {
        rc.mod.p_param = cfg.at("mod").value("P", 0.5);
        rc.mod.q_param = cfg.at("mod").value("Q", 1.0);
        if (!(rc.mod.p_param > 0.0) || !(rc.mod.q_param > 0.0)) {
            throw SchemaError("mod.P and mod.Q must be positive");
        }
    }
    if (cfg.contains("outage")) rc.g_th = cfg.at("outage").value("g_th", 1.0);
    if (!(rc.g_th > 0.0)) throw SchemaError("outage.g_th must be positive");

    if (cfg.contains("sim")) {
        const json& s = cfg.at("sim");
        fsoegc::SimConfig sc;
        sc.n_samples = s.value("n_samples", std::uint64_t{1000000});
        sc.seed = s.value("seed", std::uint64_t{1});
        sc.chunk_size = s.value("chunk_size", std::uint64_t{1000000});
        if (sc.n_samples < 1 || sc.chunk_size < 1) {
            throw SchemaError("sim.n_samples and sim.chunk_size must be >= 1");
        }
        sc.g_th = rc.g_th;
        sc.mod = rc.mod;
        rc.sim = sc;
    } else if (need_sim) {
        throw SchemaError("this verb requires a sim block in the config");
    }

    if (cfg.contains("output")) {
        const json& o = cfg.at("output");
        rc.format = o.value("format", std::string("csv"));
        std::string path = o.value("path", std::string("out"));
        const auto dot = path.find_last_of('.');
        const auto slash = path.find_last_of('/');
        if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) {
            path = path.substr(0, dot);
        }
        rc.out_stem = path;
    }
    if (rc.format != "csv" && rc.format != "json") {
        throw SchemaError("output.format must be csv or json");
    }
    return rc;
}

// ---------------------------------------------------------------------------
// output tables

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

void write_table(const Table& t, const std::string& path, const std::string& format,
                 const std::string& hash_hex) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(EXIT_SCHEMA, "cannot open output file " + path);
    if (format == "csv") {
        out << "# fsoegc " << FSOEGC_VERSION << "\n";
        out << "# config_hash fnv1a64:" << hash_hex << "\n";
        for (std::size_t i = 0; i < t.columns.size(); ++i) {
            out << (i ? "," : "") << t.columns[i];
        }
        out << "\n";
        for (const auto& row : t.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                out << (i ? "," : "") << fmt(row[i]);
            }
            out << "\n";
        }
    } else {
        json doc;
        doc["meta"] = {{"version", FSOEGC_VERSION},
                       {"config_hash", "fnv1a64:" + hash_hex}};
        doc["columns"] = t.columns;
        json rows = json::array();
        for (const auto& row : t.rows) {
            json r = json::array();
            for (double v : row) r.push_back(json::parse(fmt(v)));
            rows.push_back(std::move(r));
        }
        doc["rows"] = std::move(rows);
        out << doc.dump(1) << "\n";
    }
}

json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot read config file " + path);
    json cfg;
    try {
        in >> cfg;
    } catch (const json::exception& e) {
        throw SchemaError(std::string("config parse error: ") + e.what());
    }
    return cfg;
}

// ---------------------------------------------------------------------------
// sweep evaluation

struct SweepData {
    // per model: closed-form rows and optional MC rows, aligned with gbar grid
    std::vector<fsoegc::SimResult> sim;  // empty if no simulation requested
};

int run_sweep(const RunConfig& rc, bool closed_forms, bool want_sim) {
    const std::string hash_hex = [&] {
        // hash only the result-determining part of the effective config;
        // where the tables land must not change what they say
        json hashed = rc.raw;
        hashed.erase("output");
        char buf[20];
        std::snprintf(buf, sizeof(buf), "%016" PRIx64, fnv1a64(hashed.dump()));
        return std::string(buf);
    }();

    // Monte Carlo pass (one full-grid run per model)
    std::vector<fsoegc::SimResult> sims;
    if (want_sim) {
        for (const ResolvedModel& m : rc.models) {
            fsoegc::SimChannel ch;
            for (const auto& br : m.branches) {
                if (br.origin) {
                    ch.branches.emplace_back(*br.origin);
                } else {
                    ch.branches.emplace_back(br);
                }
            }
            ch.pointing = m.pointing;
            fsoegc::SimConfig sc = *rc.sim;
            for (double db : rc.gbar_db) sc.gbar_grid.push_back(db_to_linear(db));
            sims.push_back(fsoegc::simulate_egc(ch, sc));
        }
    }

    std::vector<std::string> written;
    auto emit = [&](const std::string& metric, const Table& t) {
        const std::string path = rc.out_stem + "_" + metric + "." + rc.format;
        write_table(t, path, rc.format, hash_hex);
        written.push_back(path);
    };

    if (!closed_forms) {
        // simulate verb: one table with the raw Monte Carlo estimates
        Table t;
        t.columns = {"gbar_db", "n_branches", "outage", "outage_ci", "aber",
                     "aber_ci", "si", "m1", "m2", "n_samples"};
        for (std::size_t mi = 0; mi < rc.models.size(); ++mi) {
            for (std::size_t gi = 0; gi < rc.gbar_db.size(); ++gi) {
                const fsoegc::SimRow& r = sims[mi].rows[gi];
                t.rows.push_back({rc.gbar_db[gi],
                                  static_cast<double>(rc.models[mi].n), r.outage,
                                  r.outage_ci, r.aber, r.aber_ci, r.si, r.m1, r.m2,
                                  static_cast<double>(r.n_samples)});
            }
        }
        emit("sim", t);
    } else {
        std::vector<fsoegc::EgcLink> links;
        for (const ResolvedModel& m : rc.models) {
            links.emplace_back(m.branches, m.pointing, rc.strict_validity);
        }
        auto rel_err = [](double cf, double mc) {
            return mc != 0.0 ? std::fabs(cf - mc) / std::fabs(mc) : 0.0;
        };
        for (const std::string& metric : rc.metrics) {
            Table t;
            const bool mc = want_sim &&
                            (metric == "outage" || metric == "aber" ||
                             metric == "si" || metric == "moments");
            if (metric == "pdf" || metric == "cdf") {
                t.columns = {"gbar_db", "n_branches", "g", metric};
            } else if (metric == "moments") {
                t.columns = {"gbar_db", "n_branches", "m1", "m2"};
                if (mc) {
                    t.columns.insert(t.columns.end(),
                                     {"mc_m1", "mc_m2", "rel_err_m1", "rel_err_m2"});
                }
            } else {
                t.columns = {"gbar_db", "n_branches",
                             metric == "asympt" ? "outage_asympt" : metric};
                if (mc && metric == "si") {
                    t.columns.insert(t.columns.end(), {"mc_si", "rel_err"});
                } else if (mc) {
                    t.columns.insert(t.columns.end(),
                                     {"mc_" + metric, "mc_" + metric + "_ci", "rel_err"});
                }
            }
            for (std::size_t mi = 0; mi < rc.models.size(); ++mi) {
                const fsoegc::EgcLink& link = links[mi];
                for (std::size_t gi = 0; gi < rc.gbar_db.size(); ++gi) {
                    const double gbar = db_to_linear(rc.gbar_db[gi]);
                    std::vector<double> row = {rc.gbar_db[gi],
                                               static_cast<double>(rc.models[mi].n)};
                    if (metric == "pdf") {
                        row.push_back(rc.g_th);
                        row.push_back(fsoegc::snr_pdf(link, gbar, rc.g_th));
                    } else if (metric == "cdf") {
                        row.push_back(rc.g_th);
                        row.push_back(fsoegc::snr_cdf(link, gbar, rc.g_th));
                    } else if (metric == "moments") {
                        const double m1 = fsoegc::snr_moment(link, gbar, 1.0);
                        const double m2 = fsoegc::snr_moment(link, gbar, 2.0);
                        row.push_back(m1);
                        row.push_back(m2);
                        if (mc) {
                            const fsoegc::SimRow& s = sims[mi].rows[gi];
                            row.insert(row.end(), {s.m1, s.m2, rel_err(m1, s.m1),
                                                   rel_err(m2, s.m2)});
                        }
                    } else if (metric == "si") {
                        const double si = fsoegc::scintillation_index(link, gbar);
                        row.push_back(si);
                        if (mc) {
                            const fsoegc::SimRow& s = sims[mi].rows[gi];
                            row.insert(row.end(), {s.si, rel_err(si, s.si)});
                        }
                    } else if (metric == "outage") {
                        const double p = fsoegc::outage_probability(link, gbar, rc.g_th);
                        row.push_back(p);
                        if (mc) {
                            const fsoegc::SimRow& s = sims[mi].rows[gi];
                            row.insert(row.end(),
                                       {s.outage, s.outage_ci, rel_err(p, s.outage)});
                        }
                    } else if (metric == "aber") {
                        const double p = fsoegc::aber(link, gbar, rc.mod);
                        row.push_back(p);
                        if (mc) {
                            const fsoegc::SimRow& s = sims[mi].rows[gi];
                            row.insert(row.end(),
                                       {s.aber, s.aber_ci, rel_err(p, s.aber)});
                        }
                    } else {  // asympt
                        row.push_back(fsoegc::outage_asymptotic(link, gbar, rc.g_th));
                    }
                    t.rows.push_back(std::move(row));
                }
            }
            emit(metric, t);
        }
    }

    for (const std::string& p : written) std::printf("wrote %s\n", p.c_str());
    return 0;
}

int cmd_fit(double alpha, double beta, int L, const std::string& out_path) {
    fsoegc::MixtureGamma mg = fsoegc::fit_gamma_gamma({alpha, beta}, L);
    json j = mg;
    std::ofstream out(out_path, std::ios::binary);
    if (!out) fail(EXIT_SCHEMA, "cannot open output file " + out_path);
    out << j.dump(1) << "\n";
    std::printf("wrote %s\n", out_path.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    std::setlocale(LC_ALL, "C");
    CLI::App app{"EGC free-space-optical link metrics: mixture-Gamma fading "
                 "with pointing errors"};
    app.require_subcommand(1);

    double alpha = 2.0, beta = 1.0;
    int L = 10;
    std::string fit_out = "mg.json";
    CLI::App* fit = app.add_subcommand("fit", "fit a mixture-Gamma model");
    fit->add_option("--alpha", alpha, "small-scale shape")->required();
    fit->add_option("--beta", beta, "large-scale shape")->required();
    fit->add_option("--L", L, "number of mixture terms");
    fit->add_option("--out", fit_out, "output JSON path");

    std::string config_path, out_override, format_override;
    std::optional<std::uint64_t> seed_override;
    bool strict_validity = false;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file")->required();
        sub->add_option("--seed", seed_override, "override sim.seed");
        sub->add_option("--out", out_override, "override output path stem");
        sub->add_option("--format", format_override, "override output format (csv|json)");
        sub->add_flag("--strict-validity", strict_validity,
                      "require xi^2 > b on every branch, including the first");
    };
    CLI::App* run = app.add_subcommand("run", "closed-form metric sweep");
    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo sweep");
    CLI::App* compare = app.add_subcommand("compare",
                                           "closed forms vs Monte Carlo");
    add_common(run);
    add_common(simulate);
    add_common(compare);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (fit->parsed()) return cmd_fit(alpha, beta, L, fit_out);

        json cfg = load_config_file(config_path);
        if (seed_override) cfg["sim"]["seed"] = *seed_override;
        if (!out_override.empty()) cfg["output"]["path"] = out_override;
        if (!format_override.empty()) cfg["output"]["format"] = format_override;

        const bool is_sim = simulate->parsed();
        const bool is_cmp = compare->parsed();
        RunConfig rc = parse_config(cfg, strict_validity,
                                    /*need_metrics=*/!is_sim,
                                    /*need_sim=*/is_sim || is_cmp);
        const bool want_sim = rc.sim.has_value();
        return run_sweep(rc, /*closed_forms=*/!is_sim, want_sim);
    } catch (const SchemaError& e) {
        fail(EXIT_SCHEMA, e.what());
    } catch (const json::exception& e) {
        fail(EXIT_SCHEMA, std::string("config schema error: ") + e.what());
    } catch (const fsoegc::ValidityError& e) {
        fail(EXIT_VALIDITY, e.what());
    } catch (const fsoegc::NonConvergenceError& e) {
        fail(EXIT_NONCONVERGENCE, e.what());
    } catch (const fsoegc::PoleCollisionError& e) {
        fail(EXIT_NONCONVERGENCE, e.what());
    } catch (const std::exception& e) {
        fail(EXIT_SCHEMA, e.what());
    }
    return 0;
}

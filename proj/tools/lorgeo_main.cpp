// lorgeo - command-line front end
//
// Subcommands: trace, length-table, recover, boundary-jet, rigidity.
// Each takes one JSON config (--config) plus a few flag overrides and writes
// CSV/JSON artifacts. Exit codes: 0 success, 1 config/parse error,
// 2 integration error, 3 recovery failure, 4 rigidity failure.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "lorgeo/length.hpp"
#include "lorgeo/random.hpp"
#include "lorgeo/recovery.hpp"
#include "lorgeo/report_io.hpp"
#include "lorgeo/rigidity.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lorgeo;

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<double> rtol;
    std::optional<double> atol;
    bool quiet = false;
};

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError("config '" + path + "': " + e.what());
    }
}

// A metric slot may be an inline object or a path string.
json resolve_metric_node(const json& node, const fs::path& base) {
    if (node.is_string()) {
        fs::path p = node.get<std::string>();
        if (p.is_relative()) p = base / p;
        return load_json_file(p.string());
    }
    if (node.is_object()) return node;
    throw ConfigError("metric must be an inline object or a path string");
}

MetricField metric_from_node(const json& node, const fs::path& base) {
    return MetricField::from_json(resolve_metric_node(node, base).dump());
}

fs::path out_path(const CommonFlags& flags, const json& cfg, const char* key,
                  const std::string& fallback) {
    fs::path p = cfg.value(key, fallback);
    if (p.is_relative()) p = fs::path(flags.out_dir) / p;
    fs::create_directories(p.parent_path().empty() ? "." : p.parent_path());
    return p;
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p);
    if (!out) throw ConfigError("cannot write '" + p.string() + "'");
    out << content;
}

IntegratorTolerances tolerances_from(const json& cfg, const CommonFlags& flags,
                                     IntegratorTolerances base = {}) {
    IntegratorTolerances tol = base;
    if (cfg.contains("rtol")) tol.rtol = cfg.at("rtol").get<double>();
    if (cfg.contains("atol")) tol.atol = cfg.at("atol").get<double>();
    if (flags.rtol) tol.rtol = *flags.rtol;
    if (flags.atol) tol.atol = *flags.atol;
    return tol;
}

Vector vec_from_json(const json& arr, const char* what) {
    if (!arr.is_array() || arr.empty()) {
        throw ConfigError(std::string(what) + " must be a nonempty array");
    }
    Vector v(static_cast<int>(arr.size()));
    for (int i = 0; i < v.size(); ++i) v[i] = arr[static_cast<size_t>(i)].get<double>();
    return v;
}

Covector covector_from(const json& cfg, int n) {
    const double eta0 = cfg.at("eta0").get<double>();
    const Vector eta = vec_from_json(cfg.at("eta"), "eta");
    if (eta.size() != n) throw ConfigError("eta has wrong dimension");
    return Covector(eta0, eta);
}

// The resolved config (metric inlined, overrides applied) embedded in reports.
std::string resolved_config(json cfg, const CommonFlags& flags, const fs::path& base,
                            std::initializer_list<const char*> metric_keys) {
    for (const char* key : metric_keys) {
        if (cfg.contains(key)) cfg[key] = resolve_metric_node(cfg.at(key), base);
    }
    if (flags.seed) cfg["seed"] = *flags.seed;
    if (flags.rtol) cfg["rtol"] = *flags.rtol;
    if (flags.atol) cfg["atol"] = *flags.atol;
    return cfg.dump();
}

std::vector<Vector> points_from(const json& cfg, int n) {
    std::vector<Vector> points;
    if (cfg.contains("points")) {
        for (const auto& p : cfg.at("points")) {
            Vector v = vec_from_json(p, "point");
            if (v.size() != n) throw ConfigError("point has wrong dimension");
            points.push_back(std::move(v));
        }
    } else if (cfg.contains("grid")) {
        // axes: [{lo, hi, count}, ...] -> tensor grid
        const auto& axes = cfg.at("grid").at("axes");
        if (static_cast<int>(axes.size()) != n) {
            throw ConfigError("grid must define one axis per dimension");
        }
        std::vector<std::vector<double>> ticks;
        for (const auto& ax : axes) {
            const double lo = ax.at("lo").get<double>();
            const double hi = ax.at("hi").get<double>();
            const int count = ax.at("count").get<int>();
            if (count < 1) throw ConfigError("grid axis count must be >= 1");
            std::vector<double> t;
            for (int i = 0; i < count; ++i) {
                t.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
            }
            ticks.push_back(std::move(t));
        }
        std::vector<int> idx(static_cast<size_t>(n), 0);
        while (true) {
            Vector v(n);
            for (int i = 0; i < n; ++i) v[i] = ticks[static_cast<size_t>(i)][static_cast<size_t>(idx[static_cast<size_t>(i)])];
            points.push_back(v);
            int axis = n - 1;
            while (axis >= 0) {
                if (++idx[static_cast<size_t>(axis)] <
                    static_cast<int>(ticks[static_cast<size_t>(axis)].size())) break;
                idx[static_cast<size_t>(axis)] = 0;
                --axis;
            }
            if (axis < 0) break;
        }
    } else {
        throw ConfigError("config needs 'points' or 'grid'");
    }
    if (points.empty()) throw ConfigError("empty point set");
    return points;
}

LengthOracle oracle_from(const json& cfg, const CommonFlags& flags, const fs::path& base) {
    const auto& oc = cfg.at("oracle");
    const std::string mode = oc.at("mode").get<std::string>();
    if (mode == "closed_form") {
        return LengthOracle::closed_form(metric_from_node(oc.at("metric"), base));
    }
    if (mode == "quadrature") {
        const IntegratorTolerances tol = tolerances_from(oc, flags, {1e-12, 1e-14});
        return LengthOracle::quadrature(metric_from_node(oc.at("metric"), base), tol);
    }
    if (mode == "table") {
        fs::path p = oc.at("table").get<std::string>();
        if (p.is_relative()) p = base / p;
        return LengthOracle::table_from_csv(p.string());
    }
    throw ConfigError("oracle mode must be closed_form, quadrature or table");
}

RecoveryOptions recovery_options_from(const json& cfg, const CommonFlags& flags) {
    RecoveryOptions opts;
    opts.epsilon = cfg.value("epsilon", opts.epsilon);
    opts.T = cfg.value("T", opts.T);
    opts.seed = flags.seed ? *flags.seed : cfg.value("seed", opts.seed);
    const std::string fit = cfg.value("fit", "polarization");
    if (fit == "least_squares") opts.fit = RecoveryOptions::Fit::LeastSquares;
    else if (fit != "polarization") throw ConfigError("fit must be polarization or least_squares");
    return opts;
}

// ---------------------------------------------------------------------------

int run_trace(const CommonFlags& flags) {
    json cfg;
    std::string resolved;
    MetricField field = [&] {
        cfg = load_json_file(flags.config_path);
        const fs::path base = fs::path(flags.config_path).parent_path();
        resolved = resolved_config(cfg, flags, base, {"metric"});
        return metric_from_node(cfg.at("metric"), base);
    }();

    const Vector y = vec_from_json(cfg.at("y"), "y");
    const SpacetimePoint yhat(cfg.value("x0", 0.0), y);
    const Covector eta = covector_from(cfg, field.n());
    const double T = cfg.at("T").get<double>();
    const IntegratorTolerances tol = tolerances_from(cfg, flags);

    const GeodesicPath path = integrate_bicharacteristic(field, yhat, eta, T, tol);

    const fs::path csv = out_path(flags, cfg, "out_csv", "trace.csv");
    std::ostringstream body;
    write_trajectory_csv(body, path, field);
    write_file(csv, body.str());

    const fs::path diag = out_path(flags, cfg, "out_json", "trace.json");
    write_file(diag, trace_diagnostics_json(path, field, resolved));

    if (!flags.quiet) {
        std::cout << "trace: " << path.samples().size() << " samples -> " << csv.string()
                  << ", diagnostics -> " << diag.string() << "\n";
    }
    return 0;
}

int run_length_table(const CommonFlags& flags) {
    const json cfg = load_json_file(flags.config_path);
    const fs::path base = fs::path(flags.config_path).parent_path();
    const MetricField field = metric_from_node(cfg.at("metric"), base);
    const std::string mode = cfg.value("mode", "closed_form");
    LengthOracle oracle = [&] {
        if (mode == "closed_form") return LengthOracle::closed_form(field);
        if (mode == "quadrature") {
            return LengthOracle::quadrature(field, tolerances_from(cfg, flags, {1e-12, 1e-14}));
        }
        throw ConfigError("length-table mode must be closed_form or quadrature");
    }();

    std::vector<LengthSample> rows;
    if (cfg.contains("queries")) {
        for (const auto& q : cfg.at("queries")) {
            const Vector y = vec_from_json(q.at("y"), "y");
            rows.push_back(oracle.query(SpacetimePoint::spatial(y),
                                        covector_from(q, field.n()), q.at("T").get<double>()));
        }
    } else if (cfg.contains("random")) {
        const auto& rc = cfg.at("random");
        const int count = rc.at("count").get<int>();
        const std::uint64_t seed = flags.seed ? *flags.seed : cfg.value("seed", 0ull);
        Rng rng(seed);
        int made = 0, attempts = 0;
        while (made < count && attempts < 1000 * count) {
            ++attempts;
            Vector y(field.n());
            for (int i = 0; i < field.n(); ++i) {
                y[i] = rng.uniform(rc.at("y_box")[static_cast<size_t>(i)][0].get<double>(),
                                   rc.at("y_box")[static_cast<size_t>(i)][1].get<double>());
            }
            Covector eta(rng.uniform(0.5, 1.5), Vector(field.n()));
            for (int i = 0; i < field.n(); ++i) eta.eta[i] = rng.uniform(-0.8, 0.8);
            const double T = rng.uniform(rc.value("T_min", 0.5), rc.value("T_max", 2.0));
            try {
                rows.push_back(oracle.query(SpacetimePoint::spatial(y), eta, T));
                ++made;
            } catch (const NotTimelike&) {
                continue;
            }
        }
        if (made < count) throw ConfigError("random sampling kept drawing non-timelike data");
    } else if (cfg.contains("polarization")) {
        // emit exactly the queries the recovery pipeline will issue
        const auto& pc = cfg.at("polarization");
        const double eps = pc.value("epsilon", 1e-2);
        const double T = pc.value("T", 1.0);
        Vector a_full = Vector::Zero(field.dim());
        a_full[0] = 1.0;
        if (pc.contains("seed_covector")) {
            a_full = vec_from_json(pc.at("seed_covector"), "seed_covector");
        }
        for (const auto& pj : pc.at("points")) {
            const Vector y = vec_from_json(pj, "point");
            for (const auto& q :
                 polarization_queries(field.dim(), Covector::from_full(a_full), eps)) {
                rows.push_back(oracle.query(SpacetimePoint::spatial(y), q, T));
            }
        }
    } else {
        throw ConfigError("length-table needs 'queries', 'random' or 'polarization'");
    }

    const fs::path out = out_path(flags, cfg, "out", "table.csv");
    std::ostringstream body;
    write_length_table_csv(body, rows, field.n());
    write_file(out, body.str());
    if (!flags.quiet) {
        std::cout << "length-table: " << rows.size() << " rows -> " << out.string() << "\n";
    }
    return 0;
}

int run_recover(const CommonFlags& flags) {
    const json cfg = load_json_file(flags.config_path);
    const fs::path base = fs::path(flags.config_path).parent_path();
    json cfg_resolved = cfg;
    if (cfg_resolved.at("oracle").contains("metric")) {
        cfg_resolved["oracle"]["metric"] =
            resolve_metric_node(cfg.at("oracle").at("metric"), base);
    }
    if (flags.seed) cfg_resolved["seed"] = *flags.seed;
    const std::string resolved = cfg_resolved.dump();

    const RecoveryOptions opts = recovery_options_from(cfg, flags);

    // spatial-only positive-definite variant
    if (cfg.value("riemannian", false)) {
        const json node = resolve_metric_node(cfg.at("oracle").at("metric"), base);
        const RiemannianField rf = RiemannianField::from_json(node.dump());
        const RiemannianLengthOracle oracle = RiemannianLengthOracle::closed_form(rf);
        const Vector y = vec_from_json(cfg.at("y"), "y");
        std::string report;
        int rc = 0;
        try {
            const SymmetricForm q = recover_riemannian(oracle, y, opts);
            report = riemannian_report_json(y, q, "riemannian_closed_form(" + rf.id() + ")",
                                            resolved);
        } catch (const Error& e) {
            report = error_report_json(e.what(), resolved);
            rc = 3;
            std::cerr << "recover: " << e.what() << "\n";
        }
        write_file(out_path(flags, cfg, "out", "recover.json"), report);
        return rc;
    }

    const LengthOracle oracle = oracle_from(cfg, flags, base);
    const std::vector<Vector> points = points_from(cfg, oracle.n());
    const auto results = recover_on_region(oracle, points, opts);

    int failures = 0;
    for (const auto& r : results) {
        if (!r.ok()) {
            ++failures;
            std::cerr << "recover: point " << format_vector(r.y) << " failed: " << r.error
                      << "\n";
        }
    }
    const fs::path out = out_path(flags, cfg, "out", "recover.json");
    write_file(out, recovery_report_json(results, oracle.description(), resolved));
    if (!flags.quiet) {
        std::cout << "recover: " << results.size() - failures << "/" << results.size()
                  << " points -> " << out.string() << "\n";
    }
    return failures == 0 ? 0 : 3;
}

int run_boundary_jet(const CommonFlags& flags) {
    const json cfg = load_json_file(flags.config_path);
    const fs::path base = fs::path(flags.config_path).parent_path();
    json cfg_resolved = cfg;
    if (cfg_resolved.at("oracle").contains("metric")) {
        cfg_resolved["oracle"]["metric"] =
            resolve_metric_node(cfg.at("oracle").at("metric"), base);
    }
    const std::string resolved = cfg_resolved.dump();

    const LengthOracle oracle = oracle_from(cfg, flags, base);
    BoundaryJetOptions opts;
    opts.h = cfg.value("h", opts.h);
    opts.order = cfg.value("order", opts.order);
    opts.richardson = cfg.value("richardson", opts.richardson);
    opts.recovery = recovery_options_from(cfg, flags);

    const Vector y = vec_from_json(cfg.at("y"), "y");
    const Vector normal = vec_from_json(cfg.at("normal"), "normal");

    std::string report;
    int rc = 0;
    try {
        const BoundaryJet jet = recover_boundary_jet(oracle, y, normal, opts);
        report = jet_report_json(jet, oracle.description(), resolved);
    } catch (const Error& e) {
        report = error_report_json(e.what(), resolved);
        rc = 3;
        std::cerr << "boundary-jet: " << e.what() << "\n";
    }
    const fs::path out = out_path(flags, cfg, "out", "jet.json");
    write_file(out, report);
    if (!flags.quiet && rc == 0) std::cout << "boundary-jet -> " << out.string() << "\n";
    return rc;
}

int run_rigidity(const CommonFlags& flags) {
    const json cfg = load_json_file(flags.config_path);
    const fs::path base = fs::path(flags.config_path).parent_path();
    json cfg_resolved = cfg;
    cfg_resolved["g0"] = resolve_metric_node(cfg.at("g0"), base);
    cfg_resolved["g1"] = resolve_metric_node(cfg.at("g1"), base);
    const std::string resolved = cfg_resolved.dump();

    const MetricField g0 = metric_from_node(cfg.at("g0"), base);
    const MetricField g1 = metric_from_node(cfg.at("g1"), base);

    std::vector<BoundaryPair> pairs;
    if (cfg.contains("pairs_csv")) {
        fs::path p = cfg.at("pairs_csv").get<std::string>();
        if (p.is_relative()) p = base / p;
        std::ifstream in(p);
        if (!in) throw ConfigError("cannot open pairs table '" + p.string() + "'");
        pairs = read_boundary_pairs_csv(in, g0.n());
    } else if (cfg.contains("pairs")) {
        for (const auto& pj : cfg.at("pairs")) {
            BoundaryPair p;
            p.y = vec_from_json(pj.at("y"), "pair y");
            p.x_T = vec_from_json(pj.at("x_T"), "pair x_T");
            p.T = pj.value("T", 1.0);
            p.eta0 = pj.value("eta0", 1.0);
            pairs.push_back(std::move(p));
        }
    } else {
        throw ConfigError("rigidity needs 'pairs' or 'pairs_csv'");
    }

    RigidityOptions opts;
    opts.shooting.ode = tolerances_from(cfg, flags);
    if (cfg.contains("scales")) {
        opts.scales.clear();
        for (const auto& s : cfg.at("scales")) opts.scales.push_back(s.get<double>());
    }
    opts.tau_points = cfg.value("tau_points", opts.tau_points);
    opts.h_tau = cfg.value("h_tau", opts.h_tau);
    opts.shooting.shoot_tol = cfg.value("shoot_tol", opts.shooting.shoot_tol);

    if (!cfg.contains("grid") && !cfg.contains("points")) {
        throw ConfigError("rigidity needs a 'grid' (or 'points') for the sup norm");
    }
    const std::vector<Vector> grid = points_from(cfg, g0.n());

    std::string report;
    int rc = 0;
    try {
        const RigidityReport rep = rigidity_check(g0, g1, pairs, grid, opts);
        report = rigidity_report_json(rep, resolved);
        if (!flags.quiet) {
            std::cout << "rigidity: max|Delta|=" << rep.max_abs_delta
                      << " sup_norm=" << rep.sup_norm
                      << (rep.rigid_at_data ? " (rigid at this data)" : "") << "\n";
        }
    } catch (const Error& e) {
        report = error_report_json(e.what(), resolved);
        rc = 4;
        std::cerr << "rigidity: " << e.what() << "\n";
    }
    write_file(out_path(flags, cfg, "out", "rigidity.json"), report);
    return rc;
}

template <typename Fn>
int guarded(const char* command, Fn&& fn) {
    try {
        return fn();
    } catch (const ParseError& e) {
        std::cerr << command << ": " << e.what() << "\n";
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << command << ": " << e.what() << "\n";
        return 1;
    } catch (const EscapedDomain& e) {
        std::cerr << command << ": " << e.what() << "\n";
        return 2;
    } catch (const StepFailure& e) {
        std::cerr << command << ": " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << command << ": " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << command << ": " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"static spacetime geodesics: forward flow, length data, recovery, rigidity"};
    app.require_subcommand(1);

    CommonFlags flags;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", flags.config_path, "JSON config file")->required();
        cmd->add_option("--out", flags.out_dir, "output directory for relative paths");
        cmd->add_option("--seed", flags.seed, "override the RNG seed");
        cmd->add_option("--rtol", flags.rtol, "override the integrator relative tolerance");
        cmd->add_option("--atol", flags.atol, "override the integrator absolute tolerance");
        cmd->add_flag("--quiet", flags.quiet, "suppress the summary line");
    };

    CLI::App* trace = app.add_subcommand("trace", "integrate one trajectory, dump CSV + diagnostics");
    CLI::App* table = app.add_subcommand("length-table", "write a CSV of length samples");
    CLI::App* recover = app.add_subcommand("recover", "pointwise recovery from a length oracle");
    CLI::App* jet = app.add_subcommand("boundary-jet", "derivatives of the recovered field at a boundary point");
    CLI::App* rigidity = app.add_subcommand("rigidity", "two-metric comparison experiment");
    for (CLI::App* cmd : {trace, table, recover, jet, rigidity}) add_common(cmd);

    CLI11_PARSE(app, argc, argv);

    if (trace->parsed()) return guarded("trace", [&] { return run_trace(flags); });
    if (table->parsed()) return guarded("length-table", [&] { return run_length_table(flags); });
    if (recover->parsed()) return guarded("recover", [&] { return run_recover(flags); });
    if (jet->parsed()) return guarded("boundary-jet", [&] { return run_boundary_jet(flags); });
    if (rigidity->parsed()) return guarded("rigidity", [&] { return run_rigidity(flags); });
    return 1;
}

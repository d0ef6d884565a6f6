// Acceptance suite: end-to-end checks at desk scale (n = 1..3), one
// pass/fail line per criterion. Usage: acceptance --cli=<path to CLI binary>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lorgeo/length.hpp"
#include "lorgeo/random.hpp"
#include "lorgeo/recovery.hpp"
#include "lorgeo/rigidity.hpp"

using namespace lorgeo;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string g_cli;

struct Failure {
    std::string msg;
};

void require(bool cond, const std::string& msg) {
    if (!cond) throw Failure{msg};
}

void require_le(double value, double bound, const std::string& what) {
    if (!(value <= bound)) {
        std::ostringstream os;
        os << what << ": " << value << " > " << bound;
        throw Failure{os.str()};
    }
}

Vector vec1(double a) {
    Vector v(1);
    v[0] = a;
    return v;
}

std::string r2_arg(int n) {
    std::string arg = "x1^2";
    for (int i = 2; i <= n; ++i) arg += "+x" + std::to_string(i) + "^2";
    return arg;
}

// Random field of the requested kind with a benign signature over a wide box.
MetricField random_field(int kind, int n, Rng& rng) {
    const Box box = Box::cube(n, -100, 100);
    const std::string r2 = r2_arg(n);
    switch (kind) {
        case 0:
            return MetricField::minkowski(n, box);
        case 1: {
            std::vector<Expr> diag;
            char buf[96];
            std::snprintf(buf, sizeof(buf), "%.6f+%.6f*exp(-(%s))", rng.uniform(0.8, 2.0),
                          rng.uniform(0.0, 0.5), r2.c_str());
            diag.push_back(Expr::parse(buf, n));
            for (int i = 0; i < n; ++i) {
                std::snprintf(buf, sizeof(buf), "-(%.6f+%.6f*exp(-(%s)))", rng.uniform(0.8, 2.0),
                              rng.uniform(0.0, 0.5), r2.c_str());
                diag.push_back(Expr::parse(buf, n));
            }
            return MetricField::diagonal(std::move(diag), box);
        }
        case 2: {
            char buf[96];
            std::snprintf(buf, sizeof(buf), "%.6f+%.6f*exp(-(%s))", rng.uniform(0.7, 1.5),
                          rng.uniform(0.0, 0.6), r2.c_str());
            return MetricField::conformal(Expr::parse(buf, n), n, box);
        }
        default: {
            std::vector<std::pair<std::pair<int, int>, Expr>> entries;
            char buf[96];
            std::snprintf(buf, sizeof(buf), "%.6f+%.6f*exp(-(%s))", rng.uniform(0.9, 1.4),
                          rng.uniform(0.0, 0.3), r2.c_str());
            entries.push_back({{0, 0}, Expr::parse(buf, n)});
            std::snprintf(buf, sizeof(buf), "%.6f*exp(-(%s))", rng.uniform(-0.25, 0.25),
                          r2.c_str());
            entries.push_back({{0, 1}, Expr::parse(buf, n)});
            for (int i = 1; i <= n; ++i) {
                std::snprintf(buf, sizeof(buf), "-(%.6f)", rng.uniform(0.9, 1.6));
                entries.push_back({{i, i}, Expr::parse(buf, n)});
            }
            return MetricField::general(std::move(entries), n, box);
        }
    }
}

Covector random_covector(int n, Rng& rng) {
    Vector eta(n);
    for (int i = 0; i < n; ++i) eta[i] = rng.uniform(-0.8, 0.8);
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    return Covector(sign * rng.uniform(0.5, 1.5), eta);
}

// --------------------------------------------------------------------------

void criterion_conservation() {
    Rng rng(101);
    int done = 0;
    while (done < 100) {
        const int n = 1 + static_cast<int>(rng.uniform() * 3.0);
        const MetricField f = random_field(done % 4, std::min(n, 3), rng);
        Vector y(f.n());
        for (int i = 0; i < f.n(); ++i) y[i] = rng.uniform(-1.0, 1.0);
        const Covector eta = random_covector(f.n(), rng);
        const double T = rng.uniform(0.5, 5.0);
        const GeodesicPath path =
            integrate_bicharacteristic(f, SpacetimePoint::spatial(y), eta, T);
        const double H = std::abs(path.initial_hamiltonian());
        require_le(conservation_defect(path, f), 1e-8 * (1.0 + H),
                   "conservation defect (case " + std::to_string(done) + ")");
        require_le(time_covector_drift(path), 1e-12,
                   "xi0 drift (case " + std::to_string(done) + ")");
        ++done;
    }
}

void criterion_length_identity() {
    Rng rng(202);
    int done = 0, draws = 0;
    while (done < 100 && draws < 5000) {
        ++draws;
        const int n = 1 + static_cast<int>(rng.uniform() * 2.0);
        const MetricField f = random_field(draws % 4, n, rng);
        Vector y(f.n());
        for (int i = 0; i < f.n(); ++i) y[i] = rng.uniform(-1.0, 1.0);
        const Covector eta = random_covector(f.n(), rng);
        const double T = rng.uniform(0.3, 3.0);
        if (f.classify_covector(y, eta) != CovectorClass::TimelikePlus) continue;
        const GeodesicPath path =
            integrate_bicharacteristic(f, SpacetimePoint::spatial(y), eta, T);
        const double quad = length_by_quadrature(f, path);
        const double closed = length_closed_form(f, SpacetimePoint::spatial(y), eta, T);
        require_le(std::abs(quad - closed), 1e-6 * (1.0 + closed),
                   "length identity (case " + std::to_string(done) + ")");
        ++done;
    }
    require(done == 100, "could not draw 100 timelike cases");
}

void criterion_recovery_roundtrip() {
    std::vector<MetricField> fields;
    fields.push_back(MetricField::minkowski(2, Box::cube(2, -6, 6)));
    fields.push_back(MetricField::general({{{0, 0}, Expr::constant(1.0)},
                                           {{0, 1}, Expr::constant(0.3)},
                                           {{1, 1}, Expr::constant(-1.0)}},
                                          1, Box::cube(1, -6, 6), "offdiag-1d"));
    fields.push_back(MetricField::general({{{0, 0}, Expr::constant(1.0)},
                                           {{0, 1}, Expr::constant(0.3)},
                                           {{1, 1}, Expr::constant(-1.0)},
                                           {{2, 2}, Expr::constant(-1.0)}},
                                          2, Box::cube(2, -6, 6), "offdiag-2d"));
    fields.push_back(MetricField::conformal(Expr::parse("1+0.5*exp(-x1^2)", 1), 1,
                                            Box::cube(1, -6, 6)));
    fields.push_back(MetricField::diagonal(
        {Expr::parse("2+0.3*sin(x1)", 2), Expr::parse("-1-0.1*x2^2", 2),
         Expr::parse("-1.5+0.2*exp(-(x1^2+x2^2))", 2)},
        Box::cube(2, -6, 6)));

    Rng rng(303);
    for (const auto& f : fields) {
        const LengthOracle oracle = LengthOracle::closed_form(f);
        for (int p = 0; p < 20; ++p) {
            Vector y(f.n());
            for (int i = 0; i < f.n(); ++i) y[i] = rng.uniform(-1.0, 1.0);
            const auto r = recover_inverse_metric_at(oracle, SpacetimePoint::spatial(y));
            const Matrix truth = f.evaluate_inverse_metric(y).matrix();
            require_le((r.Q.matrix() - truth).cwiseAbs().maxCoeff(), 1e-10,
                       "closed-form round trip, field " + f.id());
        }
    }

    // the slow route: lengths from the integrated flow
    const MetricField qfields[] = {fields[3], fields[1]};
    for (const auto& f : qfields) {
        const LengthOracle oracle = LengthOracle::quadrature(f);
        for (int p = 0; p < 20; ++p) {
            Vector y(f.n());
            for (int i = 0; i < f.n(); ++i) y[i] = rng.uniform(-1.0, 1.0);
            const auto r = recover_inverse_metric_at(oracle, SpacetimePoint::spatial(y));
            const Matrix truth = f.evaluate_inverse_metric(y).matrix();
            require_le((r.Q.matrix() - truth).cwiseAbs().maxCoeff(), 1e-6,
                       "quadrature round trip, field " + f.id());
        }
    }
}

void criterion_boundary_jet() {
    // c = 1 + 0.5 exp(-|x|^2): dc(0) = 0, d^2 c(0) = -delta_lm
    for (int n : {1, 2}) {
        const MetricField f = MetricField::conformal(
            Expr::parse("1+0.5*exp(-(" + r2_arg(n) + "))", n), n, Box::cube(n, -6, 6));
        const LengthOracle oracle = LengthOracle::closed_form(f);
        Vector y = Vector::Zero(n);
        Vector normal = Vector::Zero(n);
        normal[0] = 1.0;
        const BoundaryJet jet = recover_boundary_jet(oracle, y, normal);

        Matrix eta_diag = Matrix::Zero(n + 1, n + 1);
        eta_diag(0, 0) = 1.0;
        for (int i = 1; i <= n; ++i) eta_diag(i, i) = -1.0;

        for (const auto& e : jet.entries) {
            int total = 0;
            for (int a : e.alpha) total += a;
            if (total == 1) {
                require_le(e.value.max_abs(), 5e-5, "first derivative at the symmetric point");
            } else if (total == 2) {
                bool pure = false;
                for (int a : e.alpha) pure = pure || (a == 2);
                const Matrix expected = pure ? Matrix(-1.0 * eta_diag) : Matrix(0.0 * eta_diag);
                require_le((e.value.matrix() - expected).cwiseAbs().maxCoeff(), 1e-3,
                           "second derivative entry (n=" + std::to_string(n) + ")");
            }
        }
    }
}

void criterion_riemannian() {
    Rng rng(404);
    // constant 2x2 and 3x3
    const RiemannianField c2 = RiemannianField::general(
        {{{1, 1}, Expr::constant(2.0)}, {{1, 2}, Expr::constant(0.5)}, {{2, 2}, Expr::constant(1.0)}},
        2, Box::cube(2, -5, 5));
    const RiemannianField c3 = RiemannianField::general(
        {{{1, 1}, Expr::constant(3.0)},
         {{1, 2}, Expr::constant(0.4)},
         {{1, 3}, Expr::constant(-0.2)},
         {{2, 2}, Expr::constant(2.0)},
         {{2, 3}, Expr::constant(0.1)},
         {{3, 3}, Expr::constant(1.5)}},
        3, Box::cube(3, -5, 5));
    const RiemannianField v2 = RiemannianField::general(
        {{{1, 1}, Expr::parse("1+0.5*exp(-x1^2-x2^2)", 2)},
         {{1, 2}, Expr::parse("0.2*exp(-x1^2)", 2)},
         {{2, 2}, Expr::parse("2+sin(x1)", 2)}},
        2, Box::cube(2, -5, 5));
    const RiemannianField v3 = RiemannianField::general(
        {{{1, 1}, Expr::parse("2+0.3*cos(x2)", 3)},
         {{2, 2}, Expr::parse("1.5+0.2*exp(-x1^2)", 3)},
         {{3, 3}, Expr::parse("1+0.1*x3^2", 3)}},
        3, Box::cube(3, -5, 5));

    for (const auto& f : {c2, v2}) {
        const RiemannianLengthOracle oracle = RiemannianLengthOracle::closed_form(f);
        for (int p = 0; p < 10; ++p) {
            Vector y(2);
            for (int i = 0; i < 2; ++i) y[i] = rng.uniform(-1.0, 1.0);
            const SymmetricForm q = recover_riemannian(oracle, y);
            require_le((q.matrix() - f.evaluate_inverse_metric(y).matrix()).cwiseAbs().maxCoeff(),
                       1e-10, "riemannian 2x2 " + f.id());
        }
    }
    for (const auto& f : {c3, v3}) {
        const RiemannianLengthOracle oracle = RiemannianLengthOracle::closed_form(f);
        for (int p = 0; p < 10; ++p) {
            Vector y(3);
            for (int i = 0; i < 3; ++i) y[i] = rng.uniform(-1.0, 1.0);
            const SymmetricForm q = recover_riemannian(oracle, y);
            require_le((q.matrix() - f.evaluate_inverse_metric(y).matrix()).cwiseAbs().maxCoeff(),
                       1e-10, "riemannian 3x3 " + f.id());
        }
    }
}

// shared rigidity fixtures
const double kDelta = 0.01;

MetricField mink1_wide() { return MetricField::minkowski(1, Box::cube(1, -20, 20)); }

MetricField diag00_family() {
    return MetricField::diagonal({Expr::constant(1.0 + kDelta), Expr::constant(-1.0)},
                                 Box::cube(1, -20, 20), "g1-00");
}

MetricField diag11_family() {
    return MetricField::diagonal({Expr::constant(1.0), Expr::constant(-(1.0 + kDelta))},
                                 Box::cube(1, -20, 20), "g1-11");
}

std::vector<Vector> grid1d() {
    std::vector<Vector> g;
    for (int i = 0; i < 9; ++i) g.push_back(vec1(-2.0 + 4.0 * i / 8.0));
    return g;
}

void criterion_rigidity_first_order() {
    const SpacetimePoint y = SpacetimePoint::spatial(vec1(0.0));
    const Vector x_T = vec1(0.5);

    // worked pair: shot covector (1, -0.5), 2H = 0.75,
    // d/dtau sqrt(0.75 + tau*delta) at 0 = delta / (2 sqrt(0.75))
    const double hand = kDelta / (2.0 * std::sqrt(0.75));
    {
        const InterpolatedFamily fam(mink1_wide(), diag00_family());
        const auto [R1, R2] = first_variation(fam, y, x_T, 1.0, 1.0);
        require_le(std::abs(R1 + R2 - hand), 1e-4, "first variation vs hand value");

        const double h = 1e-3;
        auto shot_len = [&](double tau) {
            const MetricField g = fam.field_at(tau);
            const auto r =
                shoot(g, y, x_T, 1.0, 1.0, default_shooting_guess(g, y, x_T, 1.0, 1.0));
            return length_closed_form(g, y, r.etahat, 1.0);
        };
        const double dq = (shot_len(h) - shot_len(0.0)) / h;
        require_le(std::abs(R1 + R2 - dq), 5e-3, "first variation vs difference quotient");
    }
    {
        const InterpolatedFamily fam(mink1_wide(), diag11_family());
        const auto [R1, R2] = first_variation(fam, y, x_T, 1.0, 1.0);
        const double h = 1e-3;
        auto shot_len = [&](double tau) {
            const MetricField g = fam.field_at(tau);
            const auto r =
                shoot(g, y, x_T, 1.0, 1.0, default_shooting_guess(g, y, x_T, 1.0, 1.0));
            return length_closed_form(g, y, r.etahat, 1.0);
        };
        const double dq = (shot_len(h) - shot_len(0.0)) / h;
        require_le(std::abs(R1 + R2 - dq), 5e-3,
                   "first variation vs difference quotient (spatial entry)");
    }
}

void criterion_rigidity_remainder() {
    std::vector<BoundaryPair> pairs = {{vec1(0.0), vec1(0.5), 1.0, 1.0}};
    for (const MetricField& g1 : {diag00_family(), diag11_family()}) {
        const RigidityReport rep = rigidity_check(mink1_wide(), g1, pairs, grid1d());
        const PairReport& pr = rep.pairs.front();
        require(std::isfinite(pr.slope), "remainder slope not measurable for " + g1.id());
        require(pr.slope >= 1.7 && pr.slope <= 2.3,
                "remainder slope " + std::to_string(pr.slope) + " outside [1.7, 2.3] for " +
                    g1.id());
        require(pr.sweep.size() == 4, "sweep size");
        for (const auto& se : pr.sweep) {
            require(se.inequality_holds,
                    "fitted-constant inequality fails at scale " + std::to_string(se.s) +
                        " for " + g1.id());
        }
    }
}

void criterion_rigidity_conclusion() {
    std::vector<BoundaryPair> pairs = {{vec1(0.0), vec1(0.5), 1.0, 1.0}};
    {
        const RigidityReport rep =
            rigidity_check(mink1_wide(), mink1_wide(), pairs, grid1d());
        require_le(rep.max_abs_delta, 1e-9, "Delta for identical metrics");
        require(rep.sup_norm == 0.0, "sup norm for identical metrics");
        require(rep.pairs.front().path_norm == 0.0, "path norm for identical metrics");
        require(rep.rigid_at_data, "identical metrics must report rigid");
    }
    const MetricField conformal_pert = MetricField::conformal(
        Expr::parse("1+0.02*exp(-x1^2)", 1), 1, Box::cube(1, -20, 20), "conf-pert");
    const MetricField conformal_base =
        MetricField::conformal(Expr::parse("1", 1), 1, Box::cube(1, -20, 20), "conf-base");
    struct Case {
        MetricField g0, g1;
    };
    const Case cases[] = {{mink1_wide(), diag00_family()},
                          {mink1_wide(), diag11_family()},
                          {conformal_base, conformal_pert}};
    for (const auto& c : cases) {
        const RigidityReport rep = rigidity_check(c.g0, c.g1, pairs, grid1d());
        require(rep.max_abs_delta > 1e-6,
                "perturbed family should produce a visible Delta (" + c.g1.id() + ")");
        require(rep.sup_norm > 0.0, "perturbed family must report sup_norm > 0");
    }
}

void criterion_null_rejection() {
    const MetricField mink = MetricField::minkowski(2, Box::cube(2, -10, 10));
    const SpacetimePoint y = SpacetimePoint::spatial(Vector::Zero(2));
    Vector e(2);
    e << 1.0, 0.0;
    const Covector null_eta(1.0, e);  // 2H = 0 exactly

    auto expect_not_timelike = [&](const std::function<void()>& f, const std::string& what) {
        try {
            f();
        } catch (const NotTimelike&) {
            return;
        } catch (const std::exception& ex) {
            throw Failure{what + ": wrong error type: " + ex.what()};
        }
        throw Failure{what + ": null data produced a value"};
    };

    expect_not_timelike([&] { length_closed_form(mink, y, null_eta, 1.0); }, "closed form");
    expect_not_timelike(
        [&] {
            const auto path = integrate_bicharacteristic(mink, y, null_eta, 1.0);
            length_by_quadrature(mink, path);
        },
        "quadrature");
    expect_not_timelike([&] { LengthOracle::closed_form(mink).query(y, null_eta, 1.0); },
                        "closed-form oracle");
    expect_not_timelike([&] { LengthOracle::quadrature(mink).query(y, null_eta, 1.0); },
                        "quadrature oracle");
    expect_not_timelike(
        [&] { measured_form(LengthOracle::closed_form(mink), y, null_eta, 1.0); },
        "measured form");
    expect_not_timelike(
        [&] {
            Vector xt(2);
            xt << 0.3, 0.0;
            shoot(mink, y, xt, 1.0, null_eta.eta0, null_eta);
        },
        "shooting guess");

    // a curved field: the conformal factor scales the whole cone, so the
    // flat-cone null covector stays null
    const MetricField f = MetricField::conformal(Expr::parse("1+0.5*exp(-(x1^2+x2^2))", 2), 2,
                                                 Box::cube(2, -10, 10));
    expect_not_timelike([&] { length_closed_form(f, y, null_eta, 1.0); },
                        "closed form, conformal field");
}

std::string strip_timestamp(const fs::path& p) {
    std::ifstream in(p);
    json doc = json::parse(in);
    doc.erase("timestamp");
    return doc.dump();
}

void criterion_determinism() {
    require(!g_cli.empty(), "CLI path missing (pass --cli=...)");
    const fs::path dir = fs::temp_directory_path() / "lorgeo_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto write = [&](const char* name, const std::string& content) {
        std::ofstream out(dir / name);
        out << content;
    };
    auto run = [&](const std::string& args) {
        const std::string cmd = g_cli + " " + args + " >/dev/null 2>&1";
        return WEXITSTATUS(std::system(cmd.c_str()));
    };
    write("m.json", R"json({"n":1,"kind":"conformal","entries":{"c":"1+0.5*exp(-x1^2)"},"box":[[-20,20]]})json");
    write("trace.cfg", R"json({"metric":"m.json","y":[0.3],"eta0":1.0,"eta":[0.2],"T":1.0})json");
    write("table.cfg", R"json({"metric":"m.json","mode":"closed_form",
        "random":{"count":12,"y_box":[[-1,1]]},"out":"table.csv"})json");
    write("recover.cfg", R"json({"oracle":{"mode":"closed_form","metric":"m.json"},
        "points":[[0.0],[0.3],[0.6]],"out":"recover.json"})json");
    write("rigidity.cfg", R"json({"g0":"m.json","g1":"m.json",
        "pairs":[{"y":[0.0],"x_T":[0.4],"T":1.0,"eta0":1.0}],
        "grid":{"axes":[{"lo":-2,"hi":2,"count":9}]},"out":"rigidity.json"})json");

    struct Suite {
        std::string cmd;
        std::string cfg;
        std::vector<std::string> json_outputs;
        std::vector<std::string> raw_outputs;
    };
    const Suite suites[] = {
        {"trace", "trace.cfg", {"trace.json"}, {"trace.csv"}},
        {"length-table", "table.cfg", {}, {"table.csv"}},
        {"recover", "recover.cfg", {"recover.json"}, {}},
        {"rigidity", "rigidity.cfg", {"rigidity.json"}, {}},
    };
    for (const auto& s : suites) {
        std::vector<std::string> first_json, first_raw;
        for (int round = 0; round < 2; ++round) {
            const int rc = run(s.cmd + " --config " + (dir / s.cfg).string() + " --out " +
                               dir.string() + " --seed 42 --quiet");
            require(rc == 0, s.cmd + " exited with " + std::to_string(rc));
            if (round == 0) {
                for (const auto& o : s.json_outputs) first_json.push_back(strip_timestamp(dir / o));
                for (const auto& o : s.raw_outputs) {
                    std::ifstream in(dir / o);
                    first_raw.emplace_back(std::istreambuf_iterator<char>(in),
                                           std::istreambuf_iterator<char>{});
                }
            } else {
                for (size_t i = 0; i < s.json_outputs.size(); ++i) {
                    require(strip_timestamp(dir / s.json_outputs[i]) == first_json[i],
                            s.cmd + ": " + s.json_outputs[i] + " differs between runs");
                }
                for (size_t i = 0; i < s.raw_outputs.size(); ++i) {
                    std::ifstream in(dir / s.raw_outputs[i]);
                    const std::string again{std::istreambuf_iterator<char>(in),
                                            std::istreambuf_iterator<char>()};
                    require(again == first_raw[i],
                            s.cmd + ": " + s.raw_outputs[i] + " differs between runs");
                }
            }
        }
    }
    fs::remove_all(dir);
}

struct Criterion {
    int id;
    const char* title;
    double limit_seconds;
    std::function<void()> run;
};

}  // namespace

int main(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        if (std::strncmp(argv[i], "--cli=", 6) == 0) g_cli = argv[i] + 6;
    }

    const std::vector<Criterion> criteria = {
        {1, "conservation along 100 random trajectories", 10.0, criterion_conservation},
        {2, "length identity, quadrature vs closed form", 30.0, criterion_length_identity},
        {3, "recovery round trip, exact and integrated oracles", 60.0,
         criterion_recovery_roundtrip},
        {4, "boundary jet derivatives of the conformal bump", 60.0, criterion_boundary_jet},
        {5, "positive-definite spatial recovery", 10.0, criterion_riemannian},
        {6, "first variation against hand value and quotient", 30.0,
         criterion_rigidity_first_order},
        {7, "remainder order and fitted-constant inequality", 120.0,
         criterion_rigidity_remainder},
        {8, "rigidity conclusion flags", 60.0, criterion_rigidity_conclusion},
        {9, "null data rejected by every entry point", 5.0, criterion_null_rejection},
        {10, "deterministic CLI reports", 10.0, criterion_determinism},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        std::string error;
        try {
            c.run();
        } catch (const Failure& f) {
            error = f.msg;
        } catch (const std::exception& e) {
            error = e.what();
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (error.empty() && elapsed > c.limit_seconds) {
            std::ostringstream os;
            os << "runtime " << elapsed << "s exceeds " << c.limit_seconds << "s";
            error = os.str();
        }
        if (error.empty()) {
            std::printf("PASS  %2d. %s (%.2fs)\n", c.id, c.title, elapsed);
        } else {
            ++failures;
            std::printf("FAIL  %2d. %s (%.2fs): %s\n", c.id, c.title, elapsed, error.c_str());
        }
        std::fflush(stdout);
    }
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    else std::printf("all criteria passed\n");
    return failures == 0 ? 0 : 1;
}

#include "lorgeo/rigidity.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <sstream>

namespace lorgeo {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double simpson_scalar(const std::vector<double>& f, double T) {
    // f sampled on a uniform odd-count grid over [0, T]
    const size_t m = f.size() - 1;
    double sum = f.front() + f.back();
    for (size_t i = 1; i < m; ++i) sum += f[i] * (i % 2 ? 4.0 : 2.0);
    return sum * (T / static_cast<double>(m)) / 3.0;
}

}  // namespace

InterpolatedFamily::InterpolatedFamily(MetricField g0, MetricField g1)
    : g0_(std::move(g0)), g1_(std::move(g1)) {
    if (g0_.n() != g1_.n()) {
        throw ConfigError("interpolated family: dimensions differ (" + std::to_string(g0_.n()) +
                          " vs " + std::to_string(g1_.n()) + ")");
    }
    if (!(g0_.box() == g1_.box())) {
        throw ConfigError("interpolated family: evaluation boxes differ");
    }
}

MetricField InterpolatedFamily::field_at(double tau) const {
    return MetricField::affine_combination(g0_, g1_, tau);
}

SymmetricForm InterpolatedFamily::difference_at(const Vector& x) const {
    return SymmetricForm::from_matrix(g1_.inverse_entries(x) - g0_.inverse_entries(x));
}

std::vector<SymmetricForm> InterpolatedFamily::difference_derivatives_at(const Vector& x) const {
    const auto d1 = g1_.inverse_metric_derivatives(x);
    const auto d0 = g0_.inverse_metric_derivatives(x);
    std::vector<SymmetricForm> out;
    out.reserve(d1.size());
    for (size_t l = 0; l < d1.size(); ++l) {
        out.push_back(SymmetricForm::from_matrix(d1[l].matrix() - d0[l].matrix()));
    }
    return out;
}

Covector default_shooting_guess(const MetricField& field, const SpacetimePoint& yhat,
                                const Vector& x_T, double T, double eta0_fixed) {
    const SymmetricForm ginv = field.evaluate_inverse_metric(yhat.x);
    const int n = field.n();
    const Matrix spatial = ginv.matrix().block(1, 1, n, n);
    const Vector col0 = ginv.matrix().block(1, 0, n, 1);
    const Vector v = (x_T - yhat.x) / T - eta0_fixed * col0;
    Vector eta = spatial.partialPivLu().solve(v);
    if (!eta.allFinite()) eta = -(x_T - yhat.x) / T;
    return Covector(eta0_fixed, eta);
}

ShootingResult shoot(const MetricField& field, const SpacetimePoint& yhat, const Vector& x_T,
                     double T, double eta0_fixed, const Covector& guess,
                     const ShootingOptions& opts) {
    const int n = field.n();
    if (x_T.size() != n || guess.n() != n) {
        throw ConfigError("shoot: dimension mismatch");
    }
    {
        const Covector g(eta0_fixed, guess.eta);
        if (field.classify_covector(yhat.x, g) != CovectorClass::TimelikePlus) {
            throw NotTimelike("shooting guess not timelike-positive at y=" +
                              format_vector(yhat.x));
        }
    }

    Vector eta = guess.eta;
    Matrix last_jacobian;
    int iters = 0;
    while (true) {
        const Covector cov(eta0_fixed, eta);
        GeodesicPath path = integrate_bicharacteristic(field, yhat, cov, T, opts.ode);
        const Vector endpoint = path.samples().back().xhat.x;
        const Vector F = endpoint - x_T;
        const double res = F.norm();
        if (res <= opts.shoot_tol) {
            if (field.classify_covector(yhat.x, cov) != CovectorClass::TimelikePlus) {
                throw NotTimelike("converged covector left the timelike-positive cone at y=" +
                                  format_vector(yhat.x));
            }
            ShootingResult out;
            out.etahat = cov;
            out.residual = res;
            out.iterations = iters;
            if (last_jacobian.size() == 0) {
                last_jacobian =
                    endpoint_jacobian(field, yhat, cov, T, opts.ode).block(1, 1, n, n);
            }
            out.jacobian = last_jacobian;
            out.arrival_x0 = path.samples().back().xhat.x0;
            out.path = std::move(path);
            return out;
        }
        if (iters >= opts.max_iterations) {
            throw NoConvergence("shooting residual " + std::to_string(res) + " after " +
                                std::to_string(iters) + " iterations at y=" +
                                format_vector(yhat.x));
        }
        const Matrix J =
            endpoint_jacobian(field, yhat, cov, T, opts.ode).block(1, 1, n, n);
        Eigen::JacobiSVD<Matrix> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sv = svd.singularValues();
        if (sv[sv.size() - 1] <= 0.0 || sv[0] / sv[sv.size() - 1] > opts.cond_limit) {
            throw SingularJacobian("endpoint Jacobian condition number above " +
                                   std::to_string(opts.cond_limit) + " at y=" +
                                   format_vector(yhat.x) + " (conjugate point)");
        }
        eta += svd.solve(-F);
        last_jacobian = J;
        ++iters;
    }
}

namespace {

ShootingResult shoot_at_tau(const InterpolatedFamily& family, double tau,
                            const SpacetimePoint& yhat, const Vector& x_T, double T,
                            double eta0_fixed, const ShootingOptions& opts,
                            const Covector* warm_start = nullptr) {
    const MetricField g = family.field_at(tau);
    const Covector guess =
        warm_start ? *warm_start : default_shooting_guess(g, yhat, x_T, T, eta0_fixed);
    return shoot(g, yhat, x_T, T, eta0_fixed, guess, opts);
}

}  // namespace

Covector eta_tau_derivative(const InterpolatedFamily& family, double tau,
                            const SpacetimePoint& yhat, const Vector& x_T, double T,
                            double eta0_fixed, double h_tau, const ShootingOptions& opts) {
    const ShootingResult base = shoot_at_tau(family, tau, yhat, x_T, T, eta0_fixed, opts);
    const Covector& e0 = base.etahat;
    Vector d;
    if (tau - h_tau >= 0.0 && tau + h_tau <= 1.0) {
        const auto sp = shoot_at_tau(family, tau + h_tau, yhat, x_T, T, eta0_fixed, opts, &e0);
        const auto sm = shoot_at_tau(family, tau - h_tau, yhat, x_T, T, eta0_fixed, opts, &e0);
        d = (sp.etahat.eta - sm.etahat.eta) / (2.0 * h_tau);
    } else if (tau - h_tau < 0.0) {
        const auto s1 = shoot_at_tau(family, tau + h_tau, yhat, x_T, T, eta0_fixed, opts, &e0);
        const auto s2 = shoot_at_tau(family, tau + 2.0 * h_tau, yhat, x_T, T, eta0_fixed, opts,
                                     &s1.etahat);
        d = (-3.0 * e0.eta + 4.0 * s1.etahat.eta - s2.etahat.eta) / (2.0 * h_tau);
    } else {
        const auto s1 = shoot_at_tau(family, tau - h_tau, yhat, x_T, T, eta0_fixed, opts, &e0);
        const auto s2 = shoot_at_tau(family, tau - 2.0 * h_tau, yhat, x_T, T, eta0_fixed, opts,
                                     &s1.etahat);
        d = (3.0 * e0.eta - 4.0 * s1.etahat.eta + s2.etahat.eta) / (2.0 * h_tau);
    }
    return Covector(0.0, d);
}

namespace {

struct FirstVariation {
    double R1 = 0.0, R2 = 0.0;
    ShootingResult at0;
    Covector deta;
};

FirstVariation first_variation_detail(const InterpolatedFamily& family,
                                      const SpacetimePoint& yhat, const Vector& x_T, double T,
                                      double eta0_fixed, double h_tau,
                                      const ShootingOptions& opts) {
    FirstVariation fv;
    fv.at0 = shoot_at_tau(family, 0.0, yhat, x_T, T, eta0_fixed, opts);
    const auto s1 =
        shoot_at_tau(family, h_tau, yhat, x_T, T, eta0_fixed, opts, &fv.at0.etahat);
    const auto s2 =
        shoot_at_tau(family, 2.0 * h_tau, yhat, x_T, T, eta0_fixed, opts, &s1.etahat);
    fv.deta = Covector(
        0.0, (-3.0 * fv.at0.etahat.eta + 4.0 * s1.etahat.eta - s2.etahat.eta) / (2.0 * h_tau));

    const Vector eta_full = fv.at0.etahat.full();
    const double H0 = family.g0().hamiltonian(yhat.x, fv.at0.etahat);
    if (2.0 * H0 <= 0.0) {
        throw NotTimelike("first variation: base covector not timelike-positive");
    }
    const double inv_sqrt = 1.0 / std::sqrt(2.0 * H0);
    const SymmetricForm diff = family.difference_at(yhat.x);
    const SymmetricForm g0y = family.g0().evaluate_inverse_metric(yhat.x);
    fv.R1 = 0.5 * T * inv_sqrt * diff.quadratic(eta_full);
    fv.R2 = T * inv_sqrt * (g0y.matrix() * eta_full).dot(fv.deta.full());
    return fv;
}

}  // namespace

std::pair<double, double> first_variation(const InterpolatedFamily& family,
                                          const SpacetimePoint& yhat, const Vector& x_T,
                                          double T, double eta0_fixed, double h_tau,
                                          const ShootingOptions& opts) {
    const FirstVariation fv =
        first_variation_detail(family, yhat, x_T, T, eta0_fixed, h_tau, opts);
    return {fv.R1, fv.R2};
}

double sup_norm(const MetricField& g0, const MetricField& g1, const std::vector<Vector>& grid) {
    if (grid.empty()) throw ConfigError("sup_norm: empty grid");
    double m = 0.0;
    for (const auto& x : grid) {
        m = std::max(m, (g1.inverse_entries(x) - g0.inverse_entries(x)).cwiseAbs().maxCoeff());
    }
    return m;
}

double path_norm(const InterpolatedFamily& family, std::span<const GeodesicPath> paths,
                 int quad_nodes) {
    if (paths.empty()) throw ConfigError("path_norm: no trajectories");
    quad_nodes |= 1;
    double term_value = 0.0, term_deriv = 0.0;
    for (const auto& path : paths) {
        std::vector<double> fv(static_cast<size_t>(quad_nodes));
        std::vector<double> fd(static_cast<size_t>(quad_nodes));
        for (int i = 0; i < quad_nodes; ++i) {
            const double t = path.T() * static_cast<double>(i) / (quad_nodes - 1);
            const Vector x = path.state_at(t).xhat.x;
            fv[static_cast<size_t>(i)] = family.difference_at(x).max_abs();
            double dmax = 0.0;
            for (const auto& dl : family.difference_derivatives_at(x)) {
                dmax = std::max(dmax, dl.max_abs());
            }
            fd[static_cast<size_t>(i)] = dmax;
        }
        term_value = std::max(term_value, simpson_scalar(fv, path.T()));
        term_deriv = std::max(term_deriv, simpson_scalar(fd, path.T()));
    }
    return term_value + term_deriv;
}

std::vector<BoundaryPair> read_boundary_pairs_csv(std::istream& in, int n) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("boundary pairs: empty file");
    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::string cur;
        for (char c : s) {
            if (c == ',') { out.push_back(cur); cur.clear(); }
            else if (c != '\r') cur += c;
        }
        out.push_back(cur);
        return out;
    };
    const auto header = split(line);
    if (static_cast<int>(header.size()) != 2 * n + 2 || header[0] != "y1") {
        throw ParseError("boundary pairs: header must be y1..yn,xT1..xTn,T,eta0");
    }
    std::vector<BoundaryPair> out;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto f = split(line);
        if (static_cast<int>(f.size()) != 2 * n + 2) {
            throw ParseError("boundary pairs line " + std::to_string(lineno) +
                             ": wrong field count");
        }
        auto num = [&](int i) { return std::strtod(f[static_cast<size_t>(i)].c_str(), nullptr); };
        BoundaryPair p;
        p.y.resize(n);
        p.x_T.resize(n);
        for (int i = 0; i < n; ++i) p.y[i] = num(i);
        for (int i = 0; i < n; ++i) p.x_T[i] = num(n + i);
        p.T = num(2 * n);
        p.eta0 = num(2 * n + 1);
        if (p.T <= 0.0) {
            throw ParseError("boundary pairs line " + std::to_string(lineno) + ": T must be > 0");
        }
        out.push_back(std::move(p));
    }
    return out;
}

namespace {

struct SweepComputation {
    ScaleEntry entry;
    std::vector<TauEntry> tau_table;  // filled for s = 1 only
};

SweepComputation analyze_scale(const MetricField& g0, const MetricField& g1_full,
                               const BoundaryPair& pair, const std::vector<Vector>& grid,
                               double s, const RigidityOptions& opts, bool keep_tau_table) {
    const MetricField g1s = MetricField::affine_combination(g0, g1_full, s);
    const InterpolatedFamily family(g0, g1s);
    const SpacetimePoint yhat = SpacetimePoint::spatial(pair.y);

    SweepComputation out;
    out.entry.s = s;

    // Continuation over the tau grid; each solution seeds the next shot.
    std::vector<GeodesicPath> paths;
    paths.reserve(static_cast<size_t>(opts.tau_points));
    Covector warm;
    bool have_warm = false;
    Covector eta_start, eta_end;
    for (int i = 0; i < opts.tau_points; ++i) {
        const double tau = static_cast<double>(i) / (opts.tau_points - 1);
        ShootingResult r = shoot_at_tau(family, tau, yhat, pair.x_T, pair.T, pair.eta0,
                                        opts.shooting, have_warm ? &warm : nullptr);
        warm = r.etahat;
        have_warm = true;
        if (i == 0) eta_start = r.etahat;
        if (i == opts.tau_points - 1) eta_end = r.etahat;
        if (keep_tau_table) {
            out.tau_table.push_back(
                {tau, r.etahat, r.residual, r.iterations, r.arrival_x0});
        }
        paths.push_back(std::move(r.path));
    }

    out.entry.Delta = length_closed_form(g1s, yhat, eta_end, pair.T) -
                      length_closed_form(g0, yhat, eta_start, pair.T);

    const auto [R1, R2] =
        first_variation(family, yhat, pair.x_T, pair.T, pair.eta0, opts.h_tau, opts.shooting);
    out.entry.R1 = R1;
    out.entry.R2 = R2;
    out.entry.sup_norm = sup_norm(g0, g1s, grid);
    out.entry.path_norm = path_norm(family, paths, opts.quad_nodes);
    out.entry.remainder = std::abs(out.entry.Delta - R1 - R2);
    return out;
}

// Least-squares fit of remainder ~ C1 a + C2 b with nonnegative coefficients;
// the two regressors are nearly collinear over a geometric sweep, so the
// minimum-norm solution is taken and negative components trigger a refit on
// the surviving column.
std::pair<double, double> fit_remainder_constants(const std::vector<ScaleEntry>& sweep) {
    const int m = static_cast<int>(sweep.size());
    Matrix A(m, 2);
    Vector b(m);
    for (int i = 0; i < m; ++i) {
        A(i, 0) = sweep[static_cast<size_t>(i)].sup_norm * sweep[static_cast<size_t>(i)].sup_norm;
        A(i, 1) =
            sweep[static_cast<size_t>(i)].path_norm * sweep[static_cast<size_t>(i)].path_norm;
        b[i] = sweep[static_cast<size_t>(i)].remainder;
    }
    if (A.cwiseAbs().maxCoeff() == 0.0) return {0.0, 0.0};
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod;
    cod.setThreshold(1e-6);  // near-collinear columns collapse to rank one
    cod.compute(A);
    Vector c = cod.solve(b);
    auto refit_single = [&](int col) {
        const double denom = A.col(col).squaredNorm();
        return denom > 0.0 ? std::max(0.0, A.col(col).dot(b) / denom) : 0.0;
    };
    if (c[0] < 0.0 && c[1] < 0.0) return {0.0, 0.0};
    if (c[0] < 0.0) return {0.0, refit_single(1)};
    if (c[1] < 0.0) return {refit_single(0), 0.0};
    return {c[0], c[1]};
}

double fit_loglog_slope(const std::vector<ScaleEntry>& sweep) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& e : sweep) {
        if (e.remainder > 1e-13 && e.s > 0.0) pts.emplace_back(std::log(e.s), std::log(e.remainder));
    }
    if (pts.size() < 2) return kNaN;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [x, y] : pts) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double m = static_cast<double>(pts.size());
    const double denom = m * sxx - sx * sx;
    if (std::abs(denom) < 1e-300) return kNaN;
    return (m * sxy - sx * sy) / denom;
}

}  // namespace

RigidityReport rigidity_check(const MetricField& g0, const MetricField& g1,
                              const std::vector<BoundaryPair>& pairs,
                              const std::vector<Vector>& grid, const RigidityOptions& opts) {
    if (pairs.empty()) throw ConfigError("rigidity_check: no boundary pairs");
    if (opts.tau_points < 3) throw ConfigError("rigidity_check: need at least 3 tau points");

    RigidityReport report;
    report.sup_norm = sup_norm(g0, g1, grid);

    bool any_positive_R1 = false;
    for (const auto& pair : pairs) {
        PairReport pr;
        pr.pair = pair;

        std::vector<double> scales = opts.scales;
        if (scales.empty()) scales = {1.0};
        // Run s = 1 first so the headline numbers come from the full family.
        std::sort(scales.begin(), scales.end(), std::greater<>());
        if (scales.front() != 1.0) scales.insert(scales.begin(), 1.0);

        for (size_t si = 0; si < scales.size(); ++si) {
            const bool full = scales[si] == 1.0;
            SweepComputation sc =
                analyze_scale(g0, g1, pair, grid, scales[si], opts, full);
            if (full) {
                pr.Delta = sc.entry.Delta;
                pr.R1 = sc.entry.R1;
                pr.R2 = sc.entry.R2;
                pr.path_norm = sc.entry.path_norm;
                pr.tau_table = std::move(sc.tau_table);
                pr.l0 = report.sup_norm > 0.0 ? sc.entry.R1 / report.sup_norm : kNaN;
                pr.l1 = sc.entry.path_norm > 0.0 ? sc.entry.R2 / sc.entry.path_norm : kNaN;
            }
            pr.sweep.push_back(sc.entry);
        }

        auto [C1, C2] = fit_remainder_constants(pr.sweep);
        pr.C1 = C1;
        pr.C2 = C2;
        pr.slope = fit_loglog_slope(pr.sweep);
        pr.inequality_holds = true;
        for (auto& e : pr.sweep) {
            const double lhs = e.R1 + e.R2;
            const double bound =
                C1 * e.sup_norm * e.sup_norm + C2 * e.path_norm * e.path_norm;
            const double slack = opts.inequality_slack_rel * (bound + e.remainder) +
                                 opts.inequality_slack_abs * (1.0 + std::abs(lhs));
            e.inequality_holds = lhs <= std::abs(e.Delta) + bound + slack;
            pr.inequality_holds = pr.inequality_holds && e.inequality_holds;
            report.max_abs_delta = std::max(report.max_abs_delta, std::abs(e.Delta));
        }
        if (pr.R1 > 0.0) any_positive_R1 = true;
        report.inequality_holds = report.inequality_holds && pr.inequality_holds;
        report.pairs.push_back(std::move(pr));
    }

    report.degenerate_direction = !any_positive_R1;
    report.rigid_at_data =
        report.max_abs_delta > opts.delta_rigid_tol || report.sup_norm <= opts.norm_rigid_tol;
    return report;
}

}  // namespace lorgeo

#include "lorgeo/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace lorgeo {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

// Step-size controller constants (PI control).
constexpr double kSafe = 0.9, kBeta = 0.04, kExpo = 0.2 - kBeta * 0.75;
constexpr double kFacMin = 0.2, kFacMax = 10.0;
constexpr long kMaxSteps = 200000;

struct FlowRhs {
    const MetricField& field;
    int n;
    mutable long evals = 0;

    // z = [x0, x_1..n, xi0, xi_1..n]
    Vector operator()(const Vector& z) const {
        ++evals;
        const Vector x = z.segment(1, n);
        const Covector xi(z[n + 1], z.segment(n + 2, n));
        auto [dH_dx, dH_dxi] = field.hamiltonian_gradients(x, xi);
        Vector dz(2 * n + 2);
        dz[0] = dH_dxi[0];
        dz.segment(1, n) = dH_dxi.tail(n);
        dz[n + 1] = 0.0;  // xi0 is conserved; keep it in the state anyway
        dz.segment(n + 2, n) = -dH_dx;
        return dz;
    }
};

double error_norm(const Vector& err, const Vector& z0, const Vector& z1,
                  const IntegratorTolerances& tol) {
    double sum = 0.0;
    for (int i = 0; i < err.size(); ++i) {
        const double scale = tol.atol + tol.rtol * std::max(std::abs(z0[i]), std::abs(z1[i]));
        const double q = err[i] / scale;
        sum += q * q;
    }
    return std::sqrt(sum / static_cast<double>(err.size()));
}

double initial_step(const FlowRhs& rhs, const Vector& z0, const Vector& f0, double T,
                    const IntegratorTolerances& tol) {
    Vector scale(z0.size());
    for (int i = 0; i < z0.size(); ++i) scale[i] = tol.atol + tol.rtol * std::abs(z0[i]);
    const double d0 = (z0.array() / scale.array()).matrix().norm();
    const double d1 = (f0.array() / scale.array()).matrix().norm();
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, T);
    const Vector z1 = z0 + h0 * f0;
    const Vector f1 = rhs(z1);
    const double d2 = ((f1 - f0).array() / scale.array()).matrix().norm() / h0;
    double h1;
    if (std::max(d1, d2) <= 1e-15) {
        h1 = std::max(1e-6, h0 * 1e-3);
    } else {
        h1 = std::pow(0.01 / std::max(d1, d2), 0.2);
    }
    return std::min({100.0 * h0, h1, T});
}

PhaseState unpack(double t, const Vector& z, int n) {
    PhaseState s;
    s.t = t;
    s.xhat = SpacetimePoint(z[0], z.segment(1, n));
    s.xihat = Covector(z[n + 1], z.segment(n + 2, n));
    return s;
}

}  // namespace

PhaseState GeodesicPath::state_at(double t) const {
    if (t < -1e-12 || t > T_ * (1.0 + 1e-12) + 1e-12) {
        throw ConfigError("state_at: parameter outside [0, T]");
    }
    t = std::clamp(t, 0.0, T_);
    // Last step whose start is <= t.
    size_t lo = 0, hi = steps_.size();
    while (hi - lo > 1) {
        const size_t mid = (lo + hi) / 2;
        if (steps_[mid].t <= t) lo = mid;
        else hi = mid;
    }
    const Step& s = steps_[lo];
    const double theta = std::clamp((t - s.t) / s.h, 0.0, 1.0);
    const double om = 1.0 - theta;
    Vector z = s.r1 + theta * (s.r2 + om * (s.r3 + theta * (s.r4 + om * s.r5)));
    return unpack(t, z, n_);
}

GeodesicPath integrate_bicharacteristic(const MetricField& field, const SpacetimePoint& yhat,
                                        const Covector& etahat, double T,
                                        IntegratorTolerances tol) {
    const int n = field.n();
    if (T <= 0.0) throw ConfigError("integration horizon T must be positive");
    if (yhat.n() != n || etahat.n() != n) {
        throw ConfigError("initial data dimension does not match field (n=" + std::to_string(n) + ")");
    }
    if (!field.box().contains(yhat.x)) {
        throw EscapedDomain("initial point " + format_vector(yhat.x) + " outside box of field '" +
                            field.id() + "'");
    }

    FlowRhs rhs{field, n};
    const int m = 2 * n + 2;
    Vector z(m);
    z[0] = yhat.x0;
    z.segment(1, n) = yhat.x;
    z[n + 1] = etahat.eta0;
    z.segment(n + 2, n) = etahat.eta;

    GeodesicPath path;
    path.field_id_ = field.id();
    path.y0_ = yhat;
    path.eta0_ = etahat;
    path.T_ = T;
    path.n_ = n;
    path.H0_ = field.hamiltonian(yhat.x, etahat);

    Vector k1 = rhs(z);
    double h = initial_step(rhs, z, k1, T, tol);
    double t = 0.0;
    double facold = 1e-4;
    IntegratorStats stats;

    Vector k2(m), k3(m), k4(m), k5(m), k6(m), k7(m), z1(m), err(m);
    while (t < T) {
        if (stats.accepted + stats.rejected > kMaxSteps) {
            throw StepFailure("step budget exhausted at t=" + std::to_string(t) + " in field '" +
                              field.id() + "'");
        }
        if (h < 1e-14 * std::max(1.0, T)) {
            throw StepFailure("step size underflow at t=" + std::to_string(t) + " in field '" +
                              field.id() + "'");
        }
        const bool last = (T - t <= h);
        if (last) h = T - t;

        k2 = rhs(z + h * (a21 * k1));
        k3 = rhs(z + h * (a31 * k1 + a32 * k2));
        k4 = rhs(z + h * (a41 * k1 + a42 * k2 + a43 * k3));
        k5 = rhs(z + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        k6 = rhs(z + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        z1 = z + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        k7 = rhs(z1);
        err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double errn = error_norm(err, z, z1, tol);
        if (!std::isfinite(errn)) errn = 10.0;

        const double fac11 = std::pow(errn, kExpo);
        if (errn <= 1.0) {
            // accept
            GeodesicPath::Step rec;
            rec.t = t;
            rec.h = h;
            rec.r1 = z;
            rec.r2 = z1 - z;
            rec.r3 = h * k1 - rec.r2;
            rec.r4 = rec.r2 - h * k7 - rec.r3;
            rec.r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
            path.steps_.push_back(std::move(rec));

            t = last ? T : t + h;
            z = z1;
            k1 = k7;  // FSAL
            ++stats.accepted;
            stats.max_step = std::max(stats.max_step, h);

            if (!field.box().contains(z.segment(1, n))) {
                throw EscapedDomain("trajectory left box of field '" + field.id() + "' at t=" +
                                    std::to_string(t) + ", x=" + format_vector(z.segment(1, n)));
            }

            double fac = fac11 / std::pow(facold, kBeta);
            fac = std::max(1.0 / kFacMax, std::min(1.0 / kFacMin, fac / kSafe));
            h = h / fac;
            facold = std::max(errn, 1e-4);
        } else {
            ++stats.rejected;
            h = h / std::min(1.0 / kFacMin, fac11 / kSafe);
        }
    }
    stats.rhs_evaluations = rhs.evals;
    path.stats_ = stats;

    // Samples: accepted nodes merged with a uniform grid of >= 65 points.
    std::vector<double> ts;
    ts.reserve(path.steps_.size() + 66);
    for (const auto& s : path.steps_) ts.push_back(s.t);
    ts.push_back(T);
    const int uniform = 65;
    for (int i = 0; i < uniform; ++i) ts.push_back(T * static_cast<double>(i) / (uniform - 1));
    std::sort(ts.begin(), ts.end());
    const double dedup = 1e-12 * std::max(1.0, T);
    path.samples_.reserve(ts.size());
    for (double tv : ts) {
        if (!path.samples_.empty() && tv - path.samples_.back().t < dedup) continue;
        path.samples_.push_back(path.state_at(tv));
    }
    if (path.samples_.back().t != T) {
        path.samples_.back() = path.state_at(T);
        path.samples_.back().t = T;
    }
    return path;
}

double conservation_defect(std::span<const PhaseState> samples, double reference_hamiltonian,
                           const MetricField& field) {
    double defect = 0.0;
    for (const auto& s : samples) {
        const double H = field.hamiltonian(s.xhat.x, s.xihat);
        defect = std::max(defect, std::abs(H - reference_hamiltonian));
    }
    return defect;
}

double conservation_defect(const GeodesicPath& path, const MetricField& field) {
    return conservation_defect(path.samples(), path.initial_hamiltonian(), field);
}

double time_covector_drift(const GeodesicPath& path) {
    double drift = 0.0;
    for (const auto& s : path.samples()) {
        drift = std::max(drift, std::abs(s.xihat.eta0 - path.initial_covector().eta0));
    }
    return drift;
}

Matrix endpoint_jacobian(const MetricField& field, const SpacetimePoint& yhat,
                         const Covector& etahat, double T, IntegratorTolerances tol,
                         double step) {
    const int n = field.n();
    const int d = n + 1;
    if (step <= 0.0) step = 1e-6 * (1.0 + etahat.norm());
    Matrix J(d, d);
    const Vector eta_full = etahat.full();
    for (int j = 0; j < d; ++j) {
        Vector ep = eta_full, em = eta_full;
        ep[j] += step;
        em[j] -= step;
        const GeodesicPath pp =
            integrate_bicharacteristic(field, yhat, Covector::from_full(ep), T, tol);
        const GeodesicPath pm =
            integrate_bicharacteristic(field, yhat, Covector::from_full(em), T, tol);
        const Vector xp = pp.samples().back().xhat.full();
        const Vector xm = pm.samples().back().xhat.full();
        J.col(j) = (xp - xm) / (2.0 * step);
    }
    return J;
}

void write_trajectory_csv(std::ostream& out, const GeodesicPath& path, const MetricField& field) {
    const int n = path.n();
    out << "t,x0";
    for (int i = 1; i <= n; ++i) out << ",x" << i;
    out << ",xi0";
    for (int i = 1; i <= n; ++i) out << ",xi" << i;
    out << ",H\n";
    char buf[40];
    auto put = [&](double v, bool comma) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        if (comma) out << ',';
        out << buf;
    };
    for (const auto& s : path.samples()) {
        put(s.t, false);
        put(s.xhat.x0, true);
        for (int i = 0; i < n; ++i) put(s.xhat.x[i], true);
        put(s.xihat.eta0, true);
        for (int i = 0; i < n; ++i) put(s.xihat.eta[i], true);
        put(field.hamiltonian(s.xhat.x, s.xihat), true);
        out << '\n';
    }
}

}  // namespace lorgeo

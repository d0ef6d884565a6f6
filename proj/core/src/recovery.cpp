#include "lorgeo/recovery.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "lorgeo/random.hpp"

namespace lorgeo {

namespace {

constexpr double kCondLimit = 1e12;

using QueryFn = std::function<double(const Vector&)>;  // full covector -> Q value

struct PolarizationResult {
    Matrix B;
    double eps = 0.0;
    int queries = 0;
    double residual = 0.0;
};

// One pass at fixed eps; throws NotTimelike/MissingSample when a node is
// inadmissible.
PolarizationResult polarize_once(int d, const QueryFn& Q, const Vector& a, double eps,
                                 int& query_count) {
    PolarizationResult out;
    out.B = Matrix::Zero(d, d);
    out.eps = eps;
    std::vector<std::pair<Vector, double>> seen;
    auto q = [&](const Vector& v) {
        for (const auto& [w, val] : seen) {
            if ((w - v).cwiseAbs().maxCoeff() == 0.0) return val;
        }
        const double val = Q(v);
        ++query_count;
        seen.emplace_back(v, val);
        return val;
    };
    for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j) {
            Vector ei = Vector::Zero(d), ej = Vector::Zero(d);
            ei[i] = eps;
            ej[j] = eps;
            const double qpp = q(a + ei + ej);
            const double qpm = q(a + ei - ej);
            const double qmp = q(a - ei + ej);
            const double qmm = q(a - ei - ej);
            const double b = (qpp - qpm - qmp + qmm) / (8.0 * eps * eps);
            out.B(i, j) = b;
            out.B(j, i) = b;
        }
    }
    for (const auto& [v, val] : seen) {
        out.residual = std::max(out.residual, std::abs(v.dot(out.B * v) - val));
    }
    out.queries = static_cast<int>(seen.size());
    return out;
}

PolarizationResult polarize(int d, const QueryFn& Q, const Vector& a, double eps0, double floor,
                            const std::string& where) {
    int attempts_total = 0;
    for (double eps = eps0; eps >= floor * (1.0 - 1e-12); eps *= 0.5) {
        try {
            PolarizationResult r = polarize_once(d, Q, a, eps, attempts_total);
            r.queries = attempts_total;
            return r;
        } catch (const NotTimelike&) {
        } catch (const MissingSample&) {
        }
    }
    throw PolarizationFailure("polarization offset underflowed below " + std::to_string(floor) +
                              " without an admissible query set " + where);
}

Matrix least_squares_fit(int d, const QueryFn& Q, const Vector& a, double eps, int oversample,
                         Rng& rng, double& residual, int& queries, const std::string& where) {
    const int dof = d * (d + 1) / 2;
    const int m = std::max(dof, oversample * dof);
    Matrix A(m, dof);
    Vector b(m);
    std::vector<Vector> probes;
    int row = 0;
    int failures = 0;
    while (row < m) {
        Vector v = a + eps * rng.uniform(0.25, 1.0) * rng.unit_vector(d);
        double val;
        try {
            val = Q(v);
            ++queries;
        } catch (const NotTimelike&) {
            if (++failures > 50 * m) {
                throw PolarizationFailure("least-squares sampling exhausted " + where);
            }
            continue;
        } catch (const MissingSample&) {
            if (++failures > 50 * m) {
                throw PolarizationFailure("least-squares sampling exhausted " + where);
            }
            continue;
        }
        int col = 0;
        for (int i = 0; i < d; ++i) {
            for (int j = i; j < d; ++j) {
                A(row, col++) = (i == j) ? v[i] * v[i] : 2.0 * v[i] * v[j];
            }
        }
        b[row] = val;
        probes.push_back(std::move(v));
        ++row;
    }
    const Vector coef = A.colPivHouseholderQr().solve(b);
    Matrix B(d, d);
    int col = 0;
    for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j) {
            B(i, j) = coef[col];
            B(j, i) = coef[col];
            ++col;
        }
    }
    residual = 0.0;
    for (int r = 0; r < m; ++r) {
        residual = std::max(residual, std::abs(probes[static_cast<size_t>(r)]
                                                   .dot(B * probes[static_cast<size_t>(r)]) -
                                               b[r]));
    }
    return B;
}

}  // namespace

double measured_form(const LengthOracle& oracle, const SpacetimePoint& yhat,
                     const Covector& etahat, double T) {
    const LengthSample s = oracle.query(yhat, etahat, T);
    const double ratio = s.R / s.T;
    return ratio * ratio;
}

Covector find_timelike_seed(const LengthOracle& oracle, const SpacetimePoint& yhat,
                            const RecoveryOptions& opts) {
    const int d = oracle.n() + 1;
    auto admissible = [&](const Vector& full) {
        try {
            measured_form(oracle, yhat, Covector::from_full(full), opts.T);
            return true;
        } catch (const NotTimelike&) {
            return false;
        } catch (const MissingSample&) {
            return false;
        }
    };
    Vector e0 = Vector::Zero(d);
    e0[0] = 1.0;
    if (admissible(e0)) return Covector::from_full(e0);
    if (admissible(-e0)) return Covector::from_full(-e0);
    Rng rng(opts.seed);
    for (int k = 0; k < 200; ++k) {
        const Vector v = rng.unit_vector(d);
        if (admissible(v)) return Covector::from_full(v);
    }
    throw NoTimelikeDirection("no timelike-positive direction found at y=" +
                              format_vector(yhat.x) + " after 202 probes");
}

std::vector<Covector> polarization_queries(int dim, const Covector& seed, double eps) {
    const Vector a = seed.full();
    std::vector<Vector> nodes;
    auto push = [&](const Vector& v) {
        for (const auto& w : nodes) {
            if ((w - v).cwiseAbs().maxCoeff() == 0.0) return;
        }
        nodes.push_back(v);
    };
    for (int i = 0; i < dim; ++i) {
        for (int j = i; j < dim; ++j) {
            Vector ei = Vector::Zero(dim), ej = Vector::Zero(dim);
            ei[i] = eps;
            ej[j] = eps;
            push(a + ei + ej);
            push(a + ei - ej);
            push(a - ei + ej);
            push(a - ei - ej);
        }
    }
    std::vector<Covector> out;
    out.reserve(nodes.size());
    for (const auto& v : nodes) out.push_back(Covector::from_full(v));
    return out;
}

RecoveredMetricPoint recover_inverse_metric_at(const LengthOracle& oracle,
                                               const SpacetimePoint& yhat,
                                               const RecoveryOptions& opts) {
    const int d = oracle.n() + 1;
    const Covector a =
        opts.seed_direction ? *opts.seed_direction : find_timelike_seed(oracle, yhat, opts);
    const Vector a_full = a.full();
    const std::string where = "at y=" + format_vector(yhat.x);

    QueryFn Q = [&](const Vector& v) {
        return measured_form(oracle, yhat, Covector::from_full(v), opts.T);
    };

    RecoveredMetricPoint out;
    out.y = yhat.x;
    out.seed = a;

    Matrix B;
    if (opts.fit == RecoveryOptions::Fit::LeastSquares) {
        Rng rng(opts.seed + 0x9e3779b97f4a7c15ull);
        double residual = 0.0;
        int queries = 0;
        const double eps = opts.epsilon * a_full.norm();
        B = least_squares_fit(d, Q, a_full, eps, opts.ls_oversample, rng, residual, queries,
                              where);
        out.epsilon = eps;
        out.residual = residual;
        out.oracle_queries = queries;
    } else {
        PolarizationResult r =
            polarize(d, Q, a_full, opts.epsilon * a_full.norm(), opts.epsilon_floor, where);
        B = r.B;
        out.epsilon = r.eps;
        out.residual = r.residual;
        out.oracle_queries = r.queries;
    }

    require_lorentzian_signature(B, "in recovered form " + where);
    out.Q = SymmetricForm::from_matrix(B);
    out.Qinv = SymmetricForm::from_matrix(
        invert_spd_checked(out.Q.matrix(), kCondLimit, "in recovered form " + where));
    return out;
}

std::vector<PointRecovery> recover_on_region(const LengthOracle& oracle,
                                             const std::vector<Vector>& points,
                                             const RecoveryOptions& opts) {
    std::vector<PointRecovery> out;
    out.reserve(points.size());
    for (const auto& y : points) {
        PointRecovery r;
        r.y = y;
        try {
            r.point = recover_inverse_metric_at(oracle, SpacetimePoint::spatial(y), opts);
        } catch (const Error& e) {
            r.error = e.what();
        }
        out.push_back(std::move(r));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Boundary jet

namespace {

struct Weight {
    int offset;
    double w;
};

enum class AxisSide { Central, Forward, Backward };

std::vector<Weight> first_stencil(AxisSide side) {
    switch (side) {
        case AxisSide::Central: return {{-1, -0.5}, {1, 0.5}};
        case AxisSide::Forward: return {{0, -1.5}, {1, 2.0}, {2, -0.5}};
        case AxisSide::Backward: return {{0, 1.5}, {-1, -2.0}, {-2, 0.5}};
    }
    return {};
}

std::vector<Weight> second_stencil(AxisSide side) {
    switch (side) {
        case AxisSide::Central: return {{-1, 1.0}, {0, -2.0}, {1, 1.0}};
        case AxisSide::Forward: return {{0, 2.0}, {1, -5.0}, {2, 4.0}, {3, -1.0}};
        case AxisSide::Backward: return {{0, 2.0}, {-1, -5.0}, {-2, 4.0}, {-3, -1.0}};
    }
    return {};
}

}  // namespace

const SymmetricForm& BoundaryJet::at(const std::vector<int>& alpha) const {
    for (const auto& e : entries) {
        if (e.alpha == alpha) return e.value;
    }
    throw ConfigError("boundary jet: no entry for requested multi-index");
}

BoundaryJet recover_boundary_jet(const LengthOracle& oracle, const Vector& y,
                                 const Vector& inward_normal, BoundaryJetOptions opts) {
    if (opts.order < 0 || opts.order > 2) {
        throw UnsupportedOrder("boundary jet supports orders 0..2, got " +
                               std::to_string(opts.order));
    }
    const int n = oracle.n();
    if (y.size() != n || inward_normal.size() != n) {
        throw ConfigError("boundary jet: point/normal dimension mismatch");
    }
    const double nn = inward_normal.norm();
    if (nn <= 0.0) throw ConfigError("boundary jet: zero normal");

    std::vector<AxisSide> side(static_cast<size_t>(n));
    for (int l = 0; l < n; ++l) {
        const double c = inward_normal[l] / nn;
        side[static_cast<size_t>(l)] = (std::abs(c) <= 1e-12) ? AxisSide::Central
                                       : (c > 0.0 ? AxisSide::Forward : AxisSide::Backward);
    }

    // Pointwise recoveries on the integer grid y + step * k, cached per step size.
    std::map<std::pair<long, std::vector<int>>, Matrix> cache;
    auto value_at = [&](const std::vector<int>& k, double step) -> const Matrix& {
        const long key = static_cast<long>(std::llround(opts.h / step));
        auto it = cache.find({key, k});
        if (it == cache.end()) {
            Vector p = y;
            for (int l = 0; l < n; ++l) p[l] += step * k[static_cast<size_t>(l)];
            const RecoveredMetricPoint r =
                recover_inverse_metric_at(oracle, SpacetimePoint::spatial(p), opts.recovery);
            it = cache.emplace(std::make_pair(key, k), r.Q.matrix()).first;
        }
        return it->second;
    };

    auto apply = [&](const std::vector<std::pair<std::vector<int>, double>>& taps, double step,
                     double denom) {
        Matrix acc = Matrix::Zero(n + 1, n + 1);
        for (const auto& [k, w] : taps) acc += w * value_at(k, step);
        return Matrix(acc / denom);
    };

    auto axis_taps = [&](int l, const std::vector<Weight>& st) {
        std::vector<std::pair<std::vector<int>, double>> taps;
        for (const auto& w : st) {
            std::vector<int> k(static_cast<size_t>(n), 0);
            k[static_cast<size_t>(l)] = w.offset;
            taps.emplace_back(std::move(k), w.w);
        }
        return taps;
    };

    BoundaryJet jet;
    jet.y = y;
    jet.h = opts.h;
    jet.order = opts.order;

    {
        std::vector<int> zero(static_cast<size_t>(n), 0);
        jet.entries.push_back(
            {zero, SymmetricForm::from_matrix(value_at(zero, opts.h))});
    }

    if (opts.order >= 1) {
        for (int l = 0; l < n; ++l) {
            const auto taps = axis_taps(l, first_stencil(side[static_cast<size_t>(l)]));
            Matrix D = apply(taps, opts.h, opts.h);
            if (opts.richardson) {
                const Matrix Dh2 = apply(taps, opts.h / 2.0, opts.h / 2.0);
                D = (4.0 * Dh2 - D) / 3.0;
            }
            std::vector<int> alpha(static_cast<size_t>(n), 0);
            alpha[static_cast<size_t>(l)] = 1;
            jet.entries.push_back({alpha, SymmetricForm::from_matrix(D)});
        }
    }

    if (opts.order >= 2) {
        for (int l = 0; l < n; ++l) {
            const auto taps = axis_taps(l, second_stencil(side[static_cast<size_t>(l)]));
            const Matrix D = apply(taps, opts.h, opts.h * opts.h);
            std::vector<int> alpha(static_cast<size_t>(n), 0);
            alpha[static_cast<size_t>(l)] = 2;
            jet.entries.push_back({alpha, SymmetricForm::from_matrix(D)});
        }
        for (int l = 0; l < n; ++l) {
            for (int mx = l + 1; mx < n; ++mx) {
                // tensor product of the two first-derivative stencils
                std::vector<std::pair<std::vector<int>, double>> taps;
                for (const auto& wl : first_stencil(side[static_cast<size_t>(l)])) {
                    for (const auto& wm : first_stencil(side[static_cast<size_t>(mx)])) {
                        std::vector<int> k(static_cast<size_t>(n), 0);
                        k[static_cast<size_t>(l)] = wl.offset;
                        k[static_cast<size_t>(mx)] = wm.offset;
                        taps.emplace_back(std::move(k), wl.w * wm.w);
                    }
                }
                const Matrix D = apply(taps, opts.h, opts.h * opts.h);
                std::vector<int> alpha(static_cast<size_t>(n), 0);
                alpha[static_cast<size_t>(l)] = 1;
                alpha[static_cast<size_t>(mx)] = 1;
                jet.entries.push_back({alpha, SymmetricForm::from_matrix(D)});
            }
        }
    }
    return jet;
}

SymmetricForm recover_riemannian(const RiemannianLengthOracle& oracle, const Vector& y,
                                 const RecoveryOptions& opts) {
    const int n = oracle.n();
    if (y.size() != n) throw ConfigError("riemannian recovery: point dimension mismatch");
    Vector a;
    if (opts.seed_direction) {
        a = opts.seed_direction->eta;
        a /= a.norm();
    } else {
        a = Vector::Zero(n);
        a[0] = 1.0;
    }
    QueryFn Q = [&](const Vector& v) {
        const double R = oracle.query(y, v, opts.T);
        const double r = R / opts.T;
        return r * r;
    };
    const PolarizationResult r = polarize(n, Q, a, opts.epsilon * a.norm(), opts.epsilon_floor,
                                          "at y=" + format_vector(y));
    return SymmetricForm::from_matrix(r.B);
}

}  // namespace lorgeo

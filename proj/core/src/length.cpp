#include "lorgeo/length.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <variant>

namespace lorgeo {

namespace {

void require_timelike(const MetricField& field, const SpacetimePoint& yhat,
                      const Covector& etahat) {
    const double q = 2.0 * field.hamiltonian(yhat.x, etahat);
    if (field.classify_covector(yhat.x, etahat) != CovectorClass::TimelikePlus) {
        throw NotTimelike("data not timelike-positive: 2H = " + std::to_string(q) + " at y=" +
                          format_vector(yhat.x));
    }
}

double simpson(const std::function<double(double)>& f, double T, int nodes) {
    // nodes odd, uniform on [0, T]
    const int m = nodes - 1;
    const double h = T / m;
    double sum = f(0.0) + f(T);
    for (int i = 1; i < m; ++i) sum += f(i * h) * (i % 2 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

}  // namespace

double length_closed_form(const MetricField& field, const SpacetimePoint& yhat,
                          const Covector& etahat, double T) {
    if (T <= 0.0) throw ConfigError("length: T must be positive");
    require_timelike(field, yhat, etahat);
    return std::sqrt(2.0 * field.hamiltonian(yhat.x, etahat)) * T;
}

double length_by_quadrature(const MetricField& field, const GeodesicPath& path,
                            QuadratureOptions opts) {
    require_timelike(field, path.initial_point(), path.initial_covector());

    auto integrand = [&](double t) {
        const PhaseState s = path.state_at(t);
        const SymmetricForm ginv = field.evaluate_inverse_metric(s.xhat.x);
        const SymmetricForm g = field.evaluate_metric(s.xhat.x);
        const Vector v = ginv.matrix() * s.xihat.full();  // dxhat/dt from the covector
        const double q = v.dot(g.matrix() * v);
        if (q <= 0.0) {
            throw NotTimelike("quadrature integrand non-positive at t=" + std::to_string(t) +
                              " (value " + std::to_string(q) + ")");
        }
        return std::sqrt(q);
    };

    int nodes = opts.initial_nodes | 1;  // force odd
    double prev = simpson(integrand, path.T(), nodes);
    while (nodes < opts.max_nodes) {
        nodes = 2 * (nodes - 1) + 1;
        const double cur = simpson(integrand, path.T(), nodes);
        if (std::abs(cur - prev) <= opts.rel_agreement * std::abs(cur)) return cur;
        prev = cur;
    }
    return prev;
}

// ---------------------------------------------------------------------------
// LengthOracle

struct LengthOracle::Impl {
    struct ClosedForm {
        MetricField field;
    };
    struct Quadrature {
        MetricField field;
        IntegratorTolerances tol;
        QuadratureOptions opts;
    };
    struct Table {
        std::vector<LengthSample> rows;
    };
    std::variant<std::monostate, ClosedForm, Quadrature, Table> v;
    int n = 0;
    std::string description;
};

LengthOracle LengthOracle::closed_form(MetricField field) {
    auto impl = std::make_shared<Impl>();
    impl->n = field.n();
    impl->description = "closed_form(" + field.id() + ")";
    impl->v = Impl::ClosedForm{std::move(field)};
    LengthOracle o;
    o.impl_ = std::move(impl);
    return o;
}

LengthOracle LengthOracle::quadrature(MetricField field, IntegratorTolerances tol,
                                      QuadratureOptions opts) {
    auto impl = std::make_shared<Impl>();
    impl->n = field.n();
    impl->description = "quadrature(" + field.id() + ")";
    impl->v = Impl::Quadrature{std::move(field), tol, opts};
    LengthOracle o;
    o.impl_ = std::move(impl);
    return o;
}

LengthOracle LengthOracle::table(std::vector<LengthSample> samples, int n) {
    auto impl = std::make_shared<Impl>();
    impl->n = n;
    impl->description = "table(" + std::to_string(samples.size()) + " samples)";
    impl->v = Impl::Table{std::move(samples)};
    LengthOracle o;
    o.impl_ = std::move(impl);
    return o;
}

LengthOracle LengthOracle::table_from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open length table '" + path + "'");
    int n = 0;
    auto rows = read_length_table_csv(in, n);
    return table(std::move(rows), n);
}

int LengthOracle::n() const { return impl_->n; }

OracleMode LengthOracle::mode() const {
    if (std::holds_alternative<Impl::ClosedForm>(impl_->v)) return OracleMode::ClosedForm;
    if (std::holds_alternative<Impl::Quadrature>(impl_->v)) return OracleMode::Quadrature;
    return OracleMode::Table;
}

const std::string& LengthOracle::description() const { return impl_->description; }

LengthSample LengthOracle::query(const SpacetimePoint& yhat, const Covector& etahat,
                                 double T) const {
    if (yhat.n() != impl_->n || etahat.n() != impl_->n) {
        throw ConfigError("oracle query dimension mismatch (n=" + std::to_string(impl_->n) + ")");
    }
    if (T <= 0.0) throw ConfigError("oracle query: T must be positive");
    LengthSample out{yhat, etahat, T, 0.0};
    if (const auto* cf = std::get_if<Impl::ClosedForm>(&impl_->v)) {
        out.R = length_closed_form(cf->field, yhat, etahat, T);
        return out;
    }
    if (const auto* q = std::get_if<Impl::Quadrature>(&impl_->v)) {
        require_timelike(q->field, yhat, etahat);
        const GeodesicPath path = integrate_bicharacteristic(q->field, yhat, etahat, T, q->tol);
        out.R = length_by_quadrature(q->field, path, q->opts);
        return out;
    }
    const auto& rows = std::get<Impl::Table>(impl_->v).rows;
    const double tol = 1e-9;
    for (const auto& r : rows) {
        if (std::abs(r.T - T) > tol) continue;
        if (std::abs(r.yhat.x0 - yhat.x0) > tol) continue;
        if ((r.yhat.x - yhat.x).cwiseAbs().maxCoeff() > tol) continue;
        if (std::abs(r.etahat.eta0 - etahat.eta0) > tol) continue;
        if ((r.etahat.eta - etahat.eta).cwiseAbs().maxCoeff() > tol) continue;
        return r;
    }
    throw MissingSample("no table entry for y=" + format_vector(yhat.x) + ", eta=(" +
                        std::to_string(etahat.eta0) + "," + format_vector(etahat.eta) + "), T=" +
                        std::to_string(T));
}

LengthSample oracle_query(const LengthOracle& oracle, const SpacetimePoint& yhat,
                          const Covector& etahat, double T) {
    return oracle.query(yhat, etahat, T);
}

// ---------------------------------------------------------------------------
// CSV

void write_length_table_csv(std::ostream& out, const std::vector<LengthSample>& rows, int n) {
    out << "n";
    for (int i = 1; i <= n; ++i) out << ",y" << i;
    out << ",eta0";
    for (int i = 1; i <= n; ++i) out << ",eta" << i;
    out << ",T,R\n";
    char buf[40];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out << ',' << buf;
    };
    for (const auto& r : rows) {
        out << n;
        for (int i = 0; i < n; ++i) put(r.yhat.x[i]);
        put(r.etahat.eta0);
        for (int i = 0; i < n; ++i) put(r.etahat.eta[i]);
        put(r.T);
        put(r.R);
        out << '\n';
    }
}

std::vector<LengthSample> read_length_table_csv(std::istream& in, int& n_out) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("length table: empty file");
    // Column count fixes n: 2n + 4 columns.
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
    const int cols = static_cast<int>(header.size());
    if (cols < 6 || (cols - 4) % 2 != 0) {
        throw ParseError("length table: header must be n,y1..yn,eta0,eta1..etan,T,R");
    }
    const int n = (cols - 4) / 2;
    if (header[0] != "n" || header[1] != "y1" || header[static_cast<size_t>(n + 1)] != "eta0" ||
        header.back() != "R") {
        throw ParseError("length table: unexpected header '" + line + "'");
    }
    std::vector<LengthSample> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto f = split(line);
        if (static_cast<int>(f.size()) != cols) {
            throw ParseError("length table line " + std::to_string(lineno) +
                             ": expected " + std::to_string(cols) + " fields");
        }
        auto num = [&](int i) {
            char* end = nullptr;
            const double v = std::strtod(f[static_cast<size_t>(i)].c_str(), &end);
            if (end == f[static_cast<size_t>(i)].c_str()) {
                throw ParseError("length table line " + std::to_string(lineno) +
                                 ": bad number '" + f[static_cast<size_t>(i)] + "'");
            }
            return v;
        };
        if (static_cast<int>(num(0)) != n) {
            throw ParseError("length table line " + std::to_string(lineno) +
                             ": dimension field disagrees with header");
        }
        LengthSample s;
        Vector y(n), eta(n);
        for (int i = 0; i < n; ++i) y[i] = num(1 + i);
        s.yhat = SpacetimePoint::spatial(y);
        s.etahat.eta0 = num(1 + n);
        for (int i = 0; i < n; ++i) eta[i] = num(2 + n + i);
        s.etahat.eta = eta;
        s.T = num(2 + 2 * n);
        s.R = num(3 + 2 * n);
        if (s.R < 0.0) {
            throw ParseError("length table line " + std::to_string(lineno) + ": R must be >= 0");
        }
        rows.push_back(std::move(s));
    }
    n_out = n;
    return rows;
}

// ---------------------------------------------------------------------------
// RiemannianLengthOracle

struct RiemannianLengthOracle::Impl {
    RiemannianField field;
};

RiemannianLengthOracle RiemannianLengthOracle::closed_form(RiemannianField field) {
    RiemannianLengthOracle o;
    o.impl_ = std::make_shared<Impl>(Impl{std::move(field)});
    return o;
}

double RiemannianLengthOracle::query(const Vector& y, const Vector& eta, double T) const {
    if (T <= 0.0) throw ConfigError("oracle query: T must be positive");
    const double q = eta.dot(impl_->field.inverse_entries(y) * eta);
    const double tol = 1e-10 * (1.0 + eta.squaredNorm());
    if (q <= tol) {
        throw NotTimelike("riemannian data not positive: eta'[g^{jk}]eta = " + std::to_string(q));
    }
    return std::sqrt(q) * T;
}

int RiemannianLengthOracle::n() const { return impl_->field.n(); }

}  // namespace lorgeo

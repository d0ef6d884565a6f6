#include "lorgeo/metric.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace lorgeo {

using nlohmann::json;

namespace {

constexpr double kDerivativeStep = 1e-5;   // central-difference fallback
constexpr double kCondLimit = 1e12;

size_t tri_index(int j, int k, int d) {
    // upper triangle, row-major: (j,k) with j <= k
    return static_cast<size_t>(j * d - j * (j - 1) / 2 + (k - j));
}

}  // namespace

std::string to_string(MetricKind kind) {
    switch (kind) {
        case MetricKind::Minkowski: return "minkowski";
        case MetricKind::Diagonal: return "diagonal";
        case MetricKind::Conformal: return "conformal";
        case MetricKind::General: return "general";
    }
    return "?";
}

double default_null_tolerance(const Covector& etahat) {
    return 1e-10 * (1.0 + etahat.full().squaredNorm());
}

struct MetricField::Impl {
    int n = 0;
    MetricKind kind = MetricKind::General;
    Box box;
    std::string id;
    DerivativeMode mode = DerivativeMode::Analytic;
    std::vector<Expr> entries;                  // upper triangle of [g^{jk}], size d(d+1)/2
    std::vector<std::vector<Expr>> d_entries;   // per spatial axis, same layout
    std::vector<std::string> entry_sources;     // original or synthesized text

    int dim() const { return n + 1; }

    const Expr& entry(int j, int k) const {
        if (j > k) std::swap(j, k);
        return entries[tri_index(j, k, dim())];
    }

    Matrix eval_entries(const Vector& x) const {
        const int d = dim();
        Matrix g(d, d);
        for (int j = 0; j < d; ++j) {
            for (int k = j; k < d; ++k) {
                const double v = entries[tri_index(j, k, d)].eval({x.data(), static_cast<size_t>(x.size())});
                g(j, k) = v;
                g(k, j) = v;
            }
        }
        if (!g.allFinite()) {
            throw EvaluationError("field '" + id + "': coefficient not finite at x=" +
                                  format_vector(x));
        }
        return g;
    }

    Matrix eval_derivative(int axis, const Vector& x) const {
        const int d = dim();
        if (mode == DerivativeMode::Analytic) {
            Matrix g(d, d);
            for (int j = 0; j < d; ++j) {
                for (int k = j; k < d; ++k) {
                    const double v = d_entries[static_cast<size_t>(axis)][tri_index(j, k, d)]
                                         .eval({x.data(), static_cast<size_t>(x.size())});
                    g(j, k) = v;
                    g(k, j) = v;
                }
            }
            if (!g.allFinite()) {
                throw EvaluationError("field '" + id + "': coefficient derivative not finite at x=" +
                                      format_vector(x));
            }
            return g;
        }
        Vector xp = x, xm = x;
        xp[axis] += kDerivativeStep;
        xm[axis] -= kDerivativeStep;
        return (eval_entries(xp) - eval_entries(xm)) / (2.0 * kDerivativeStep);
    }
};

namespace {

std::shared_ptr<MetricField::Impl> make_impl(int n, MetricKind kind, Box box, std::string id,
                                             std::vector<Expr> entries,
                                             std::vector<std::string> sources) {
    auto impl = std::make_shared<MetricField::Impl>();
    impl->n = n;
    impl->kind = kind;
    impl->box = std::move(box);
    impl->id = std::move(id);
    impl->entries = std::move(entries);
    impl->entry_sources = std::move(sources);
    const int d = n + 1;
    impl->d_entries.resize(static_cast<size_t>(n));
    for (int l = 0; l < n; ++l) {
        impl->d_entries[static_cast<size_t>(l)].reserve(impl->entries.size());
        for (const auto& e : impl->entries) {
            impl->d_entries[static_cast<size_t>(l)].push_back(e.derivative(l));
        }
    }
    if (impl->entries.size() != static_cast<size_t>(d * (d + 1) / 2)) {
        throw ConfigError("internal: wrong entry count");
    }
    return impl;
}

void check_box_dim(const Box& box, int n) {
    if (box.dim() != n) {
        throw ConfigError("box has " + std::to_string(box.dim()) +
                          " intervals, expected " + std::to_string(n));
    }
}

}  // namespace

MetricField MetricField::minkowski(int n, Box box) {
    check_box_dim(box, n);
    const int d = n + 1;
    std::vector<Expr> entries(static_cast<size_t>(d * (d + 1) / 2), Expr::constant(0.0));
    std::vector<std::string> sources(entries.size(), "0");
    for (int j = 0; j < d; ++j) {
        entries[tri_index(j, j, d)] = Expr::constant(j == 0 ? 1.0 : -1.0);
        sources[tri_index(j, j, d)] = (j == 0) ? "1" : "-1";
    }
    return MetricField(make_impl(n, MetricKind::Minkowski, std::move(box),
                                 "minkowski-n" + std::to_string(n),
                                 std::move(entries), std::move(sources)));
}

MetricField MetricField::diagonal(std::vector<Expr> diag, Box box, std::string name) {
    const int d = static_cast<int>(diag.size());
    if (d < 2) throw ConfigError("diagonal field needs n+1 >= 2 entries");
    const int n = d - 1;
    check_box_dim(box, n);
    std::vector<Expr> entries(static_cast<size_t>(d * (d + 1) / 2), Expr::constant(0.0));
    std::vector<std::string> sources(entries.size(), "0");
    for (int j = 0; j < d; ++j) {
        entries[tri_index(j, j, d)] = diag[static_cast<size_t>(j)];
        sources[tri_index(j, j, d)] = diag[static_cast<size_t>(j)].to_string();
    }
    if (name.empty()) name = "diagonal-n" + std::to_string(n);
    return MetricField(make_impl(n, MetricKind::Diagonal, std::move(box), std::move(name),
                                 std::move(entries), std::move(sources)));
}

MetricField MetricField::conformal(Expr c, int n, Box box, std::string name) {
    check_box_dim(box, n);
    const int d = n + 1;
    std::vector<Expr> entries(static_cast<size_t>(d * (d + 1) / 2), Expr::constant(0.0));
    std::vector<std::string> sources(entries.size(), "0");
    const std::string c_src = c.to_string();
    for (int j = 0; j < d; ++j) {
        entries[tri_index(j, j, d)] = (j == 0) ? c : c.negated();
        sources[tri_index(j, j, d)] = (j == 0) ? c_src : "-(" + c_src + ")";
    }
    if (name.empty()) name = "conformal-n" + std::to_string(n);
    return MetricField(make_impl(n, MetricKind::Conformal, std::move(box), std::move(name),
                                 std::move(entries), std::move(sources)));
}

MetricField MetricField::general(std::vector<std::pair<std::pair<int, int>, Expr>> pairs,
                                 int n, Box box, std::string name) {
    check_box_dim(box, n);
    const int d = n + 1;
    std::vector<Expr> entries(static_cast<size_t>(d * (d + 1) / 2), Expr::constant(0.0));
    std::vector<std::string> sources(entries.size(), "0");
    std::vector<bool> seen(entries.size(), false);
    for (auto& [jk, e] : pairs) {
        int j = jk.first, k = jk.second;
        if (j > k) std::swap(j, k);
        if (j < 0 || k >= d) {
            throw ConfigError("entry index (" + std::to_string(jk.first) + "," +
                              std::to_string(jk.second) + ") out of range for dimension n=" +
                              std::to_string(n));
        }
        const size_t idx = tri_index(j, k, d);
        if (seen[idx]) {
            throw ConfigError("duplicate entry for (" + std::to_string(j) + "," +
                              std::to_string(k) + ")");
        }
        seen[idx] = true;
        sources[idx] = e.to_string();
        entries[idx] = std::move(e);
    }
    for (int j = 0; j < d; ++j) {
        if (!seen[tri_index(j, j, d)]) {
            throw ConfigError("general field: missing diagonal entry (" + std::to_string(j) +
                              "," + std::to_string(j) + ")");
        }
    }
    if (name.empty()) name = "general-n" + std::to_string(n);
    return MetricField(make_impl(n, MetricKind::General, std::move(box), std::move(name),
                                 std::move(entries), std::move(sources)));
}

MetricField MetricField::affine_combination(const MetricField& a, const MetricField& b,
                                            double t, std::string name) {
    if (a.n() != b.n()) throw ConfigError("affine combination: dimension mismatch");
    if (!(a.box() == b.box())) throw ConfigError("affine combination: boxes differ");
    if (t == 0.0 && name.empty()) return a;
    if (t == 1.0 && name.empty()) return b;
    const int d = a.dim();
    std::vector<Expr> entries;
    std::vector<std::string> sources;
    entries.reserve(static_cast<size_t>(d * (d + 1) / 2));
    for (int j = 0; j < d; ++j) {
        for (int k = j; k < d; ++k) {
            Expr e = Expr::affine_combination(a.impl_->entry(j, k), b.impl_->entry(j, k), t);
            sources.push_back(e.to_string());
            entries.push_back(std::move(e));
        }
    }
    if (name.empty()) {
        char buf[48];
        std::snprintf(buf, sizeof(buf), "@tau=%.6g", t);
        name = a.id() + buf;
    }
    auto impl = make_impl(a.n(), MetricKind::General, a.box(), std::move(name),
                          std::move(entries), std::move(sources));
    return MetricField(std::move(impl));
}

int MetricField::n() const { return impl_->n; }
int MetricField::dim() const { return impl_->dim(); }
MetricKind MetricField::kind() const { return impl_->kind; }
const Box& MetricField::box() const { return impl_->box; }
const std::string& MetricField::id() const { return impl_->id; }
DerivativeMode MetricField::derivative_mode() const { return impl_->mode; }

MetricField MetricField::with_derivative_mode(DerivativeMode mode) const {
    auto impl = std::make_shared<Impl>(*impl_);
    impl->mode = mode;
    return MetricField(std::move(impl));
}

Matrix MetricField::inverse_entries(const Vector& x) const {
    if (x.size() != impl_->n) {
        throw ConfigError("field '" + impl_->id + "': point has dimension " +
                          std::to_string(x.size()) + ", expected " + std::to_string(impl_->n));
    }
    return impl_->eval_entries(x);
}

SymmetricForm MetricField::evaluate_inverse_metric(const Vector& x) const {
    Matrix g = inverse_entries(x);
    require_lorentzian_signature(g, "in field '" + impl_->id + "' at x=" + format_vector(x));
    return SymmetricForm::from_matrix(g);
}

SymmetricForm MetricField::evaluate_metric(const Vector& x) const {
    const SymmetricForm ginv = evaluate_inverse_metric(x);
    Matrix g = invert_spd_checked(ginv.matrix(), kCondLimit,
                                  "in field '" + impl_->id + "' at x=" + format_vector(x));
    return SymmetricForm::from_matrix(g);
}

double MetricField::hamiltonian(const Vector& x, const Covector& etahat) const {
    if (etahat.n() != impl_->n) {
        throw ConfigError("field '" + impl_->id + "': covector dimension mismatch");
    }
    const SymmetricForm g = evaluate_inverse_metric(x);
    return 0.5 * g.quadratic(etahat.full());
}

std::pair<Vector, Vector> MetricField::hamiltonian_gradients(const Vector& x,
                                                             const Covector& etahat) const {
    const SymmetricForm g = evaluate_inverse_metric(x);
    const Vector eta_full = etahat.full();
    Vector dH_dxi = g.matrix() * eta_full;

    Vector dH_dx(impl_->n);
    if (impl_->mode == DerivativeMode::Analytic) {
        for (int l = 0; l < impl_->n; ++l) {
            dH_dx[l] = 0.5 * eta_full.dot(impl_->eval_derivative(l, x) * eta_full);
        }
    } else {
        for (int l = 0; l < impl_->n; ++l) {
            Vector xp = x, xm = x;
            xp[l] += kDerivativeStep;
            xm[l] -= kDerivativeStep;
            const double hp = 0.5 * eta_full.dot(impl_->eval_entries(xp) * eta_full);
            const double hm = 0.5 * eta_full.dot(impl_->eval_entries(xm) * eta_full);
            dH_dx[l] = (hp - hm) / (2.0 * kDerivativeStep);
        }
    }
    return {std::move(dH_dx), std::move(dH_dxi)};
}

std::vector<SymmetricForm> MetricField::inverse_metric_derivatives(const Vector& x) const {
    std::vector<SymmetricForm> out;
    out.reserve(static_cast<size_t>(impl_->n));
    for (int l = 0; l < impl_->n; ++l) {
        out.push_back(SymmetricForm::from_matrix(impl_->eval_derivative(l, x)));
    }
    return out;
}

CovectorClass MetricField::classify_covector(const Vector& y, const Covector& etahat,
                                             double tol_null) const {
    if (tol_null < 0.0) tol_null = default_null_tolerance(etahat);
    const double q = 2.0 * hamiltonian(y, etahat);
    if (q > tol_null) return CovectorClass::TimelikePlus;
    if (q < -tol_null) return CovectorClass::Other;
    return CovectorClass::Null;
}

// ---------------------------------------------------------------------------
// JSON configuration

namespace {

Box box_from_json(const json& j, int n) {
    if (!j.is_array() || static_cast<int>(j.size()) != n) {
        throw ConfigError("'box' must be an array of " + std::to_string(n) + " [lo,hi] pairs");
    }
    std::vector<std::array<double, 2>> iv;
    for (const auto& pair : j) {
        if (!pair.is_array() || pair.size() != 2) {
            throw ConfigError("'box' entries must be [lo,hi] pairs");
        }
        iv.push_back({pair[0].get<double>(), pair[1].get<double>()});
    }
    return Box(std::move(iv));
}

json box_to_json(const Box& box) {
    json out = json::array();
    for (int i = 0; i < box.dim(); ++i) out.push_back({box.lo(i), box.hi(i)});
    return out;
}

std::pair<int, int> parse_entry_key(const std::string& key) {
    if (key.size() != 2 || !std::isdigit(static_cast<unsigned char>(key[0])) ||
        !std::isdigit(static_cast<unsigned char>(key[1]))) {
        throw ConfigError("entry key '" + key + "' must be two digits 'jk'");
    }
    return {key[0] - '0', key[1] - '0'};
}

}  // namespace

MetricField MetricField::from_json(const std::string& json_text) {
    json cfg;
    try {
        cfg = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("metric config: ") + e.what());
    }
    if (!cfg.is_object()) throw ConfigError("metric config must be a JSON object");
    if (!cfg.contains("n") || !cfg.contains("kind") || !cfg.contains("box")) {
        throw ConfigError("metric config needs 'n', 'kind' and 'box'");
    }
    const int n = cfg.at("n").get<int>();
    if (n < 1 || n > 9) throw ConfigError("dimension n must be in [1, 9]");
    const std::string kind = cfg.at("kind").get<std::string>();
    Box box = box_from_json(cfg.at("box"), n);
    std::string name = cfg.value("name", "");
    const std::string deriv = cfg.value("derivatives", "analytic");
    if (deriv != "analytic" && deriv != "central") {
        throw ConfigError("'derivatives' must be 'analytic' or 'central'");
    }

    json entries = cfg.value("entries", json::object());
    MetricField field = [&]() {
        if (kind == "minkowski") {
            if (!entries.empty()) throw ConfigError("minkowski kind takes no entries");
            return MetricField::minkowski(n, std::move(box));
        }
        if (kind == "conformal") {
            if (!entries.contains("c") || entries.size() != 1) {
                throw ConfigError("conformal kind needs exactly one entry 'c'");
            }
            return MetricField::conformal(Expr::parse(entries.at("c").get<std::string>(), n), n,
                                          std::move(box), std::move(name));
        }
        if (kind == "diagonal") {
            std::vector<Expr> diag;
            for (int j = 0; j <= n; ++j) {
                const std::string key = std::string(1, static_cast<char>('0' + j)) +
                                        std::string(1, static_cast<char>('0' + j));
                if (!entries.contains(key)) {
                    throw ConfigError("diagonal kind: missing entry '" + key + "'");
                }
                diag.push_back(Expr::parse(entries.at(key).get<std::string>(), n));
            }
            if (static_cast<int>(entries.size()) != n + 1) {
                throw ConfigError("diagonal kind takes only the diagonal entries '00'..'" +
                                  std::to_string(n) + std::to_string(n) + "'");
            }
            return MetricField::diagonal(std::move(diag), std::move(box), std::move(name));
        }
        if (kind == "general") {
            std::vector<std::pair<std::pair<int, int>, Expr>> pairs;
            for (auto it = entries.begin(); it != entries.end(); ++it) {
                auto jk = parse_entry_key(it.key());
                pairs.emplace_back(jk, Expr::parse(it.value().get<std::string>(), n));
            }
            return MetricField::general(std::move(pairs), n, std::move(box), std::move(name));
        }
        throw ConfigError("unknown metric kind '" + kind + "'");
    }();

    if (deriv == "central") field = field.with_derivative_mode(DerivativeMode::CentralDifference);
    if (!name.empty() && field.id() != name) {
        // minkowski ignores the name argument; rebuild impl with the name
        auto impl = std::make_shared<Impl>(*field.impl_);
        impl->id = name;
        field = MetricField(std::move(impl));
    }
    return field;
}

MetricField MetricField::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open metric config '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

std::string MetricField::to_config_json() const {
    json entries = json::object();
    const int d = dim();
    for (int j = 0; j < d; ++j) {
        for (int k = j; k < d; ++k) {
            const std::string& src = impl_->entry_sources[tri_index(j, k, d)];
            if (src == "0" && j != k) continue;
            entries[std::string(1, static_cast<char>('0' + j)) +
                    std::string(1, static_cast<char>('0' + k))] = src;
        }
    }
    json cfg = {
        {"n", n()},
        {"kind", "general"},
        {"name", id()},
        {"entries", entries},
        {"box", box_to_json(box())},
        {"derivatives", impl_->mode == DerivativeMode::Analytic ? "analytic" : "central"},
    };
    return cfg.dump();
}

// ---------------------------------------------------------------------------
// RiemannianField

struct RiemannianField::Impl {
    int n = 0;
    Box box;
    std::string id;
    std::vector<Expr> entries;  // upper triangle, n x n
    std::vector<std::string> sources;

    Matrix eval(const Vector& x) const {
        Matrix g(n, n);
        for (int j = 0; j < n; ++j) {
            for (int k = j; k < n; ++k) {
                const double v = entries[tri_index(j, k, n)].eval({x.data(), static_cast<size_t>(x.size())});
                g(j, k) = v;
                g(k, j) = v;
            }
        }
        if (!g.allFinite()) {
            throw EvaluationError("field '" + id + "': coefficient not finite at x=" +
                                  format_vector(x));
        }
        return g;
    }
};

RiemannianField RiemannianField::general(
    std::vector<std::pair<std::pair<int, int>, Expr>> pairs, int n, Box box, std::string name) {
    if (n < 1) throw ConfigError("riemannian field needs n >= 1");
    check_box_dim(box, n);
    auto impl = std::make_shared<Impl>();
    impl->n = n;
    impl->box = std::move(box);
    impl->id = name.empty() ? "riemannian-n" + std::to_string(n) : std::move(name);
    impl->entries.assign(static_cast<size_t>(n * (n + 1) / 2), Expr::constant(0.0));
    impl->sources.assign(impl->entries.size(), "0");
    std::vector<bool> seen(impl->entries.size(), false);
    for (auto& [jk, e] : pairs) {
        int j = jk.first - 1, k = jk.second - 1;  // 1-based spatial indices
        if (j > k) std::swap(j, k);
        if (j < 0 || k >= n) {
            throw ConfigError("riemannian entry index out of range (valid: 1.." +
                              std::to_string(n) + ")");
        }
        const size_t idx = tri_index(j, k, n);
        if (seen[idx]) throw ConfigError("duplicate riemannian entry");
        seen[idx] = true;
        impl->sources[idx] = e.to_string();
        impl->entries[idx] = std::move(e);
    }
    for (int j = 0; j < n; ++j) {
        if (!seen[tri_index(j, j, n)]) {
            throw ConfigError("riemannian field: missing diagonal entry (" +
                              std::to_string(j + 1) + "," + std::to_string(j + 1) + ")");
        }
    }
    return RiemannianField(std::move(impl));
}

RiemannianField RiemannianField::from_json(const std::string& json_text) {
    json cfg;
    try {
        cfg = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("riemannian config: ") + e.what());
    }
    const int n = cfg.at("n").get<int>();
    Box box = box_from_json(cfg.at("box"), n);
    std::vector<std::pair<std::pair<int, int>, Expr>> pairs;
    for (auto it = cfg.at("entries").begin(); it != cfg.at("entries").end(); ++it) {
        auto jk = parse_entry_key(it.key());
        pairs.emplace_back(jk, Expr::parse(it.value().get<std::string>(), n));
    }
    return general(std::move(pairs), n, std::move(box), cfg.value("name", ""));
}

int RiemannianField::n() const { return impl_->n; }
const Box& RiemannianField::box() const { return impl_->box; }
const std::string& RiemannianField::id() const { return impl_->id; }

Matrix RiemannianField::inverse_entries(const Vector& x) const {
    if (x.size() != impl_->n) {
        throw ConfigError("field '" + impl_->id + "': point has dimension " +
                          std::to_string(x.size()) + ", expected " + std::to_string(impl_->n));
    }
    return impl_->eval(x);
}

SymmetricForm RiemannianField::evaluate_inverse_metric(const Vector& x) const {
    Matrix g = impl_->eval(x);
    Eigen::SelfAdjointEigenSolver<Matrix> es(g, Eigen::EigenvaluesOnly);
    if (es.eigenvalues()[0] <= 0.0) {
        throw SignatureViolation("field '" + impl_->id + "' not positive definite at x=" +
                                 format_vector(x));
    }
    return SymmetricForm::from_matrix(g);
}

double RiemannianField::hamiltonian(const Vector& x, const Vector& eta) const {
    return 0.5 * evaluate_inverse_metric(x).quadratic(eta);
}

std::string RiemannianField::to_config_json() const {
    json entries = json::object();
    for (int j = 0; j < impl_->n; ++j) {
        for (int k = j; k < impl_->n; ++k) {
            const std::string& src = impl_->sources[tri_index(j, k, impl_->n)];
            if (src == "0" && j != k) continue;
            entries[std::string(1, static_cast<char>('1' + j)) +
                    std::string(1, static_cast<char>('1' + k))] = src;
        }
    }
    json cfg = {
        {"n", impl_->n},
        {"kind", "riemannian"},
        {"name", impl_->id},
        {"entries", entries},
        {"box", box_to_json(impl_->box)},
    };
    return cfg.dump();
}

}  // namespace lorgeo

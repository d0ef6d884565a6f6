// lorgeo - static metric fields on R x R^n and their Hamiltonian
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lorgeo/expression.hpp"
#include "lorgeo/types.hpp"

namespace lorgeo {

enum class MetricKind { Minkowski, Diagonal, Conformal, General };
enum class DerivativeMode { Analytic, CentralDifference };
enum class CovectorClass { TimelikePlus, Null, Other };

std::string to_string(MetricKind kind);

// Default width of the band around 2H = 0 used to classify covectors.
double default_null_tolerance(const Covector& etahat);

// Immutable evaluator for the inverse coefficient matrix [g^{jk}(x)] of a
// static signature-(+,-,...,-) metric, its spatial derivatives, and the
// associated Hamiltonian H(x, eta) = 1/2 eta' [g^{jk}(x)] eta. Coefficients
// are expressions of x1..xn only; evaluation is thread-safe.
class MetricField {
public:
    static MetricField minkowski(int n, Box box);
    static MetricField diagonal(std::vector<Expr> diag, Box box, std::string name = "");
    static MetricField conformal(Expr c, int n, Box box, std::string name = "");
    // entries indexed by (j,k), j <= k; missing off-diagonals default to 0.
    static MetricField general(std::vector<std::pair<std::pair<int, int>, Expr>> entries,
                               int n, Box box, std::string name = "");
    // JSON schema: {"n","kind","entries","box","name","derivatives"}; see README.
    static MetricField from_json(const std::string& json_text);
    static MetricField from_json_file(const std::string& path);

    // Inverse-metric entries combined as a + t*(b - a); t=0 and t=1 reproduce
    // the inputs exactly. Dimensions and boxes must match.
    static MetricField affine_combination(const MetricField& a, const MetricField& b,
                                          double t, std::string name = "");

    int n() const;            // spatial dimension
    int dim() const;          // n + 1
    MetricKind kind() const;
    const Box& box() const;
    const std::string& id() const;
    DerivativeMode derivative_mode() const;
    MetricField with_derivative_mode(DerivativeMode mode) const;

    // [g^{jk}(x)]; checks finiteness and the (+,-,...,-) signature at x.
    SymmetricForm evaluate_inverse_metric(const Vector& x) const;
    // [g_{jk}(x)] = inverse of the above; cond > 1e12 raises SingularMetric.
    SymmetricForm evaluate_metric(const Vector& x) const;

    double hamiltonian(const Vector& x, const Covector& etahat) const;
    // (dH/dx_1..n, dH/dxi_0..n)
    std::pair<Vector, Vector> hamiltonian_gradients(const Vector& x, const Covector& etahat) const;
    // d[g^{jk}]/dx_l for l = 1..n
    std::vector<SymmetricForm> inverse_metric_derivatives(const Vector& x) const;

    CovectorClass classify_covector(const Vector& y, const Covector& etahat,
                                    double tol_null = -1.0) const;

    // Entry evaluation without the signature check (difference quotients,
    // interpolation diagnostics). Finiteness is still enforced.
    Matrix inverse_entries(const Vector& x) const;

    // Resolved configuration document (entry sources, box, kind).
    std::string to_config_json() const;

    struct Impl;  // defined in metric.cpp

private:
    explicit MetricField(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;
};

// Positive-definite spatial-only analogue: inverse metric [g^{jk}]_{j,k=1..n}.
// Used by the Riemannian variant of the recovery pipeline.
class RiemannianField {
public:
    // entries indexed by (j,k), 1 <= j <= k <= n; missing off-diagonals are 0.
    static RiemannianField general(std::vector<std::pair<std::pair<int, int>, Expr>> entries,
                                   int n, Box box, std::string name = "");
    static RiemannianField from_json(const std::string& json_text);

    int n() const;
    const Box& box() const;
    const std::string& id() const;

    // Checks positive definiteness at x.
    SymmetricForm evaluate_inverse_metric(const Vector& x) const;
    // Entry evaluation with only the finiteness check; length queries use
    // this so that indefinite data rejects per query, not per evaluation.
    Matrix inverse_entries(const Vector& x) const;
    double hamiltonian(const Vector& x, const Vector& eta) const;
    std::string to_config_json() const;

private:
    struct Impl;
    explicit RiemannianField(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;
};

}  // namespace lorgeo

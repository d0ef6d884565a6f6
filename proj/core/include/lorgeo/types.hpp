// lorgeo - small value types shared by all modules
#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "lorgeo/errors.hpp"

namespace lorgeo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// A point (x0, x) of R x R^n; x0 is the time coordinate.
struct SpacetimePoint {
    double x0 = 0.0;
    Vector x;

    SpacetimePoint() = default;
    SpacetimePoint(double t, Vector xs) : x0(t), x(std::move(xs)) {}
    static SpacetimePoint spatial(Vector xs) { return SpacetimePoint(0.0, std::move(xs)); }

    int n() const { return static_cast<int>(x.size()); }
    Vector full() const;
    static SpacetimePoint from_full(const Vector& v);
};

// A covector (eta0, eta) dual to spacetime directions at a point.
struct Covector {
    double eta0 = 0.0;
    Vector eta;

    Covector() = default;
    Covector(double e0, Vector es) : eta0(e0), eta(std::move(es)) {}

    int n() const { return static_cast<int>(eta.size()); }
    Vector full() const;
    static Covector from_full(const Vector& v);
    double norm() const { return full().norm(); }
};

// Closed axis-aligned evaluation box in R^n.
class Box {
public:
    Box() = default;
    explicit Box(std::vector<std::array<double, 2>> intervals);
    static Box cube(int n, double lo, double hi);

    int dim() const { return static_cast<int>(iv_.size()); }
    bool contains(const Vector& x) const;
    double lo(int i) const { return iv_[static_cast<size_t>(i)][0]; }
    double hi(int i) const { return iv_[static_cast<size_t>(i)][1]; }
    bool operator==(const Box&) const = default;

private:
    std::vector<std::array<double, 2>> iv_;
};

// Symmetric d x d bilinear form; (j,k) and (k,j) always hold the same value.
class SymmetricForm {
public:
    SymmetricForm() = default;
    explicit SymmetricForm(int dim) : m_(Matrix::Zero(dim, dim)) {}
    // Mirrors the mean of the two triangles so the result is exactly symmetric.
    static SymmetricForm from_matrix(const Matrix& m);

    int dim() const { return static_cast<int>(m_.rows()); }
    double operator()(int j, int k) const { return m_(j, k); }
    void set(int j, int k, double v) { m_(j, k) = v; m_(k, j) = v; }
    const Matrix& matrix() const { return m_; }
    double quadratic(const Vector& v) const { return v.dot(m_ * v); }
    double max_abs() const { return m_.cwiseAbs().maxCoeff(); }

private:
    Matrix m_;
};

// Throws SignatureViolation unless m has exactly one positive eigenvalue,
// the rest negative, and none degenerate. `where` goes into the message.
void require_lorentzian_signature(const Matrix& m, const std::string& where);

// Inverts a symmetric matrix; refuses when cond > cond_limit. One Newton
// polish step keeps the product with the input near the identity.
Matrix invert_spd_checked(const Matrix& m, double cond_limit, const std::string& where);

std::string format_vector(const Vector& v);

}  // namespace lorgeo

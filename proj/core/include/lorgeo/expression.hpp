// lorgeo - scalar expressions of the spatial variables x1..xn
#pragma once

#include <memory>
#include <span>
#include <string>

#include "lorgeo/errors.hpp"

namespace lorgeo {

namespace detail {
struct ExprNode;
using NodePtr = std::shared_ptr<const ExprNode>;
}

// Immutable arithmetic expression over the spatial variables x1..xn.
// Grammar: + - * / ^, unary minus, parentheses, numeric literals, the
// constant pi, and the functions exp, sin, cos, sqrt, log. The time
// variable x0 is deliberately rejected: coefficients are static.
class Expr {
public:
    Expr() = default;

    static Expr parse(const std::string& source, int n_vars);
    static Expr constant(double value);

    // x must have n_vars entries. Non-finite results are returned as-is;
    // callers decide whether that is an error.
    double eval(std::span<const double> x) const;

    // Analytic derivative with respect to x_{var+1}, var in [0, n_vars).
    Expr derivative(int var) const;

    // a + t*(b - a); t = 0 and t = 1 return a and b unchanged.
    static Expr affine_combination(const Expr& a, const Expr& b, double t);

    Expr negated() const;

    int n_vars() const { return n_vars_; }
    bool is_constant_zero() const;
    std::string to_string() const;

private:
    Expr(detail::NodePtr root, int n_vars) : root_(std::move(root)), n_vars_(n_vars) {}
    detail::NodePtr root_;
    int n_vars_ = 0;
};

}  // namespace lorgeo

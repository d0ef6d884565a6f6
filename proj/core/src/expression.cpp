// lorgeo - expression parsing, evaluation, analytic differentiation
#include "lorgeo/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <utility>
#include <vector>

namespace lorgeo {
namespace detail {

enum class Op {
    Number, Var,
    Add, Sub, Mul, Div, Pow, Neg,
    Exp, Sin, Cos, Sqrt, Log,
};

struct ExprNode {
    Op op;
    double value = 0.0;  // Number
    int var = -1;        // Var, zero-based spatial index
    NodePtr a, b;
};

namespace {

NodePtr mk_num(double v) {
    auto n = std::make_shared<ExprNode>();
    n->op = Op::Number;
    n->value = v;
    return n;
}

NodePtr mk_var(int idx) {
    auto n = std::make_shared<ExprNode>();
    n->op = Op::Var;
    n->var = idx;
    return n;
}

bool is_num(const NodePtr& n, double v) {
    return n->op == Op::Number && n->value == v;
}

double eval_node(const ExprNode& n, std::span<const double> x);

NodePtr mk_bin(Op op, NodePtr a, NodePtr b);
NodePtr mk_fun(Op op, NodePtr a);

NodePtr mk_neg(NodePtr a) {
    if (a->op == Op::Number) return mk_num(-a->value);
    if (a->op == Op::Neg) return a->a;
    auto n = std::make_shared<ExprNode>();
    n->op = Op::Neg;
    n->a = std::move(a);
    return n;
}

// Light constant folding; keeps derivative trees small.
NodePtr mk_bin(Op op, NodePtr a, NodePtr b) {
    if (a->op == Op::Number && b->op == Op::Number) {
        switch (op) {
            case Op::Add: return mk_num(a->value + b->value);
            case Op::Sub: return mk_num(a->value - b->value);
            case Op::Mul: return mk_num(a->value * b->value);
            case Op::Div: return mk_num(a->value / b->value);
            case Op::Pow: return mk_num(std::pow(a->value, b->value));
            default: break;
        }
    }
    switch (op) {
        case Op::Add:
            if (is_num(a, 0.0)) return b;
            if (is_num(b, 0.0)) return a;
            break;
        case Op::Sub:
            if (is_num(b, 0.0)) return a;
            if (is_num(a, 0.0)) return mk_neg(b);
            break;
        case Op::Mul:
            if (is_num(a, 0.0) || is_num(b, 0.0)) return mk_num(0.0);
            if (is_num(a, 1.0)) return b;
            if (is_num(b, 1.0)) return a;
            break;
        case Op::Div:
            if (is_num(a, 0.0)) return mk_num(0.0);
            if (is_num(b, 1.0)) return a;
            break;
        case Op::Pow:
            if (is_num(b, 1.0)) return a;
            if (is_num(b, 0.0)) return mk_num(1.0);
            break;
        default:
            break;
    }
    auto n = std::make_shared<ExprNode>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

NodePtr mk_fun(Op op, NodePtr a) {
    if (a->op == Op::Number) {
        switch (op) {
            case Op::Exp: return mk_num(std::exp(a->value));
            case Op::Sin: return mk_num(std::sin(a->value));
            case Op::Cos: return mk_num(std::cos(a->value));
            case Op::Sqrt: return mk_num(std::sqrt(a->value));
            case Op::Log: return mk_num(std::log(a->value));
            default: break;
        }
    }
    auto n = std::make_shared<ExprNode>();
    n->op = op;
    n->a = std::move(a);
    return n;
}

double eval_node(const ExprNode& n, std::span<const double> x) {
    switch (n.op) {
        case Op::Number: return n.value;
        case Op::Var: return x[static_cast<size_t>(n.var)];
        case Op::Add: return eval_node(*n.a, x) + eval_node(*n.b, x);
        case Op::Sub: return eval_node(*n.a, x) - eval_node(*n.b, x);
        case Op::Mul: return eval_node(*n.a, x) * eval_node(*n.b, x);
        case Op::Div: return eval_node(*n.a, x) / eval_node(*n.b, x);
        case Op::Pow: return std::pow(eval_node(*n.a, x), eval_node(*n.b, x));
        case Op::Neg: return -eval_node(*n.a, x);
        case Op::Exp: return std::exp(eval_node(*n.a, x));
        case Op::Sin: return std::sin(eval_node(*n.a, x));
        case Op::Cos: return std::cos(eval_node(*n.a, x));
        case Op::Sqrt: return std::sqrt(eval_node(*n.a, x));
        case Op::Log: return std::log(eval_node(*n.a, x));
    }
    return std::numeric_limits<double>::quiet_NaN();
}

NodePtr diff_node(const NodePtr& n, int var) {
    switch (n->op) {
        case Op::Number: return mk_num(0.0);
        case Op::Var: return mk_num(n->var == var ? 1.0 : 0.0);
        case Op::Add: return mk_bin(Op::Add, diff_node(n->a, var), diff_node(n->b, var));
        case Op::Sub: return mk_bin(Op::Sub, diff_node(n->a, var), diff_node(n->b, var));
        case Op::Mul:
            return mk_bin(Op::Add,
                          mk_bin(Op::Mul, diff_node(n->a, var), n->b),
                          mk_bin(Op::Mul, n->a, diff_node(n->b, var)));
        case Op::Div:
            // (a/b)' = (a'b - ab') / b^2
            return mk_bin(Op::Div,
                          mk_bin(Op::Sub,
                                 mk_bin(Op::Mul, diff_node(n->a, var), n->b),
                                 mk_bin(Op::Mul, n->a, diff_node(n->b, var))),
                          mk_bin(Op::Mul, n->b, n->b));
        case Op::Pow: {
            if (n->b->op == Op::Number) {
                // (u^c)' = c * u^(c-1) * u'
                const double c = n->b->value;
                return mk_bin(Op::Mul, mk_num(c),
                              mk_bin(Op::Mul,
                                     mk_bin(Op::Pow, n->a, mk_num(c - 1.0)),
                                     diff_node(n->a, var)));
            }
            // u^v = exp(v log u):  (u^v)' = u^v * (v' log u + v u'/u)
            return mk_bin(Op::Mul, n,
                          mk_bin(Op::Add,
                                 mk_bin(Op::Mul, diff_node(n->b, var), mk_fun(Op::Log, n->a)),
                                 mk_bin(Op::Div,
                                        mk_bin(Op::Mul, n->b, diff_node(n->a, var)),
                                        n->a)));
        }
        case Op::Neg: return mk_neg(diff_node(n->a, var));
        case Op::Exp: return mk_bin(Op::Mul, n, diff_node(n->a, var));
        case Op::Sin: return mk_bin(Op::Mul, mk_fun(Op::Cos, n->a), diff_node(n->a, var));
        case Op::Cos: return mk_neg(mk_bin(Op::Mul, mk_fun(Op::Sin, n->a), diff_node(n->a, var)));
        case Op::Sqrt:
            return mk_bin(Op::Div, diff_node(n->a, var), mk_bin(Op::Mul, mk_num(2.0), n));
        case Op::Log: return mk_bin(Op::Div, diff_node(n->a, var), n->a);
    }
    return mk_num(0.0);
}

int precedence(Op op) {
    switch (op) {
        case Op::Add: case Op::Sub: return 1;
        case Op::Mul: case Op::Div: return 2;
        case Op::Neg: return 3;
        case Op::Pow: return 4;
        default: return 5;
    }
}

void print_node(const ExprNode& n, std::ostringstream& out);

void print_child(const ExprNode& parent, const ExprNode& child, std::ostringstream& out,
                 bool right_side) {
    bool parens = precedence(child.op) < precedence(parent.op);
    // Right operand of - / ^ needs parens at equal precedence.
    if (!parens && right_side && precedence(child.op) == precedence(parent.op) &&
        (parent.op == Op::Sub || parent.op == Op::Div || parent.op == Op::Pow)) {
        parens = true;
    }
    if (parens) out << '(';
    print_node(child, out);
    if (parens) out << ')';
}

void print_node(const ExprNode& n, std::ostringstream& out) {
    switch (n.op) {
        case Op::Number: {
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.17g", n.value);
            out << buf;
            return;
        }
        case Op::Var: out << 'x' << (n.var + 1); return;
        case Op::Add: print_child(n, *n.a, out, false); out << '+'; print_child(n, *n.b, out, true); return;
        case Op::Sub: print_child(n, *n.a, out, false); out << '-'; print_child(n, *n.b, out, true); return;
        case Op::Mul: print_child(n, *n.a, out, false); out << '*'; print_child(n, *n.b, out, true); return;
        case Op::Div: print_child(n, *n.a, out, false); out << '/'; print_child(n, *n.b, out, true); return;
        case Op::Pow: print_child(n, *n.a, out, false); out << '^'; print_child(n, *n.b, out, true); return;
        case Op::Neg: out << '-'; print_child(n, *n.a, out, true); return;
        case Op::Exp: out << "exp("; print_node(*n.a, out); out << ')'; return;
        case Op::Sin: out << "sin("; print_node(*n.a, out); out << ')'; return;
        case Op::Cos: out << "cos("; print_node(*n.a, out); out << ')'; return;
        case Op::Sqrt: out << "sqrt("; print_node(*n.a, out); out << ')'; return;
        case Op::Log: out << "log("; print_node(*n.a, out); out << ')'; return;
    }
}

// Recursive-descent parser.
class Parser {
public:
    Parser(const std::string& src, int n_vars) : src_(src), n_(n_vars) {}

    NodePtr run() {
        NodePtr e = parse_sum();
        skip_ws();
        if (pos_ != src_.size()) {
            fail("unexpected trailing input starting at '" + src_.substr(pos_) + "'");
        }
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError("expression '" + src_ + "': " + msg);
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool consume(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) { ++pos_; return true; }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    NodePtr parse_sum() {
        NodePtr e = parse_product();
        while (true) {
            if (consume('+')) e = mk_bin(Op::Add, e, parse_product());
            else if (consume('-')) e = mk_bin(Op::Sub, e, parse_product());
            else return e;
        }
    }

    NodePtr parse_product() {
        NodePtr e = parse_unary();
        while (true) {
            if (consume('*')) e = mk_bin(Op::Mul, e, parse_unary());
            else if (consume('/')) e = mk_bin(Op::Div, e, parse_unary());
            else return e;
        }
    }

    NodePtr parse_unary() {
        if (consume('-')) return mk_neg(parse_unary());
        if (consume('+')) return parse_unary();
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_atom();
        if (consume('^')) {
            // Right-associative; exponent may carry a unary sign.
            return mk_bin(Op::Pow, base, parse_unary());
        }
        return base;
    }

    NodePtr parse_atom() {
        skip_ws();
        if (pos_ >= src_.size()) fail("unexpected end of input");
        char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = parse_sum();
            if (!consume(')')) fail("missing ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = src_.c_str() + pos_;
            char* end = nullptr;
            double v = std::strtod(begin, &end);
            if (end == begin) fail("malformed number");
            pos_ += static_cast<size_t>(end - begin);
            return mk_num(v);
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
                ++pos_;
            }
            std::string name = src_.substr(start, pos_ - start);
            if (peek() == '(') {
                ++pos_;
                NodePtr arg = parse_sum();
                if (!consume(')')) fail("missing ')' after argument of '" + name + "'");
                if (name == "exp") return mk_fun(Op::Exp, arg);
                if (name == "sin") return mk_fun(Op::Sin, arg);
                if (name == "cos") return mk_fun(Op::Cos, arg);
                if (name == "sqrt") return mk_fun(Op::Sqrt, arg);
                if (name == "log") return mk_fun(Op::Log, arg);
                fail("unknown function '" + name + "'");
            }
            if (name == "pi") return mk_num(3.14159265358979323846);
            if (name.size() >= 2 && name[0] == 'x') {
                bool digits = true;
                for (size_t i = 1; i < name.size(); ++i) {
                    if (!std::isdigit(static_cast<unsigned char>(name[i]))) { digits = false; break; }
                }
                if (digits) {
                    long idx = std::strtol(name.c_str() + 1, nullptr, 10);
                    if (idx == 0) {
                        fail("variable 'x0' is not allowed: coefficients are independent of the time variable");
                    }
                    if (idx < 1 || idx > n_) {
                        fail("variable '" + name + "' is out of range for dimension n=" + std::to_string(n_));
                    }
                    return mk_var(static_cast<int>(idx - 1));
                }
            }
            fail("unknown identifier '" + name + "'");
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    const std::string& src_;
    int n_;
    size_t pos_ = 0;
};

}  // namespace
}  // namespace detail

Expr Expr::parse(const std::string& source, int n_vars) {
    if (n_vars < 1) throw ConfigError("expression dimension must be >= 1");
    detail::Parser p(source, n_vars);
    return Expr(p.run(), n_vars);
}

Expr Expr::constant(double value) {
    return Expr(detail::mk_num(value), 1);
}

double Expr::eval(std::span<const double> x) const {
    return detail::eval_node(*root_, x);
}

Expr Expr::derivative(int var) const {
    return Expr(detail::diff_node(root_, var), n_vars_);
}

Expr Expr::affine_combination(const Expr& a, const Expr& b, double t) {
    if (t == 0.0) return a;
    if (t == 1.0) return b;
    using namespace detail;
    NodePtr d = mk_bin(Op::Sub, b.root_, a.root_);
    NodePtr combo = mk_bin(Op::Add, a.root_, mk_bin(Op::Mul, mk_num(t), d));
    return Expr(combo, std::max(a.n_vars_, b.n_vars_));
}

Expr Expr::negated() const {
    return Expr(detail::mk_neg(root_), n_vars_);
}

bool Expr::is_constant_zero() const {
    return root_ && root_->op == detail::Op::Number && root_->value == 0.0;
}

std::string Expr::to_string() const {
    std::ostringstream out;
    detail::print_node(*root_, out);
    return out.str();
}

}  // namespace lorgeo

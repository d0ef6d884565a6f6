#include "lorgeo/types.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace lorgeo {

Vector SpacetimePoint::full() const {
    Vector v(n() + 1);
    v[0] = x0;
    v.tail(n()) = x;
    return v;
}

SpacetimePoint SpacetimePoint::from_full(const Vector& v) {
    return SpacetimePoint(v[0], v.tail(v.size() - 1));
}

Vector Covector::full() const {
    Vector v(n() + 1);
    v[0] = eta0;
    v.tail(n()) = eta;
    return v;
}

Covector Covector::from_full(const Vector& v) {
    return Covector(v[0], v.tail(v.size() - 1));
}

Box::Box(std::vector<std::array<double, 2>> intervals) : iv_(std::move(intervals)) {
    for (const auto& i : iv_) {
        if (!(i[0] < i[1])) throw ConfigError("box interval must satisfy lo < hi");
    }
}

Box Box::cube(int n, double lo, double hi) {
    std::vector<std::array<double, 2>> iv(static_cast<size_t>(n), {lo, hi});
    return Box(std::move(iv));
}

bool Box::contains(const Vector& x) const {
    if (x.size() != dim()) return false;
    for (int i = 0; i < dim(); ++i) {
        if (x[i] < lo(i) || x[i] > hi(i)) return false;
    }
    return true;
}

SymmetricForm SymmetricForm::from_matrix(const Matrix& m) {
    SymmetricForm f;
    f.m_ = 0.5 * (m + m.transpose());
    // (a+b)/2 == (b+a)/2 bitwise, so the result is exactly symmetric.
    return f;
}

void require_lorentzian_signature(const Matrix& m, const std::string& where) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    const Vector ev = es.eigenvalues();
    const double scale = std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
    int positive = 0;
    bool degenerate = false;
    for (int i = 0; i < ev.size(); ++i) {
        if (std::abs(ev[i]) < 1e-14 * scale) degenerate = true;
        else if (ev[i] > 0.0) ++positive;
    }
    if (degenerate || positive != 1) {
        std::ostringstream msg;
        msg << "signature violation " << where << ": eigenvalues [";
        for (int i = 0; i < ev.size(); ++i) msg << (i ? ", " : "") << ev[i];
        msg << "], expected exactly one positive";
        throw SignatureViolation(msg.str());
    }
}

Matrix invert_spd_checked(const Matrix& m, double cond_limit, const std::string& where) {
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& sv = svd.singularValues();
    const double smin = sv[sv.size() - 1];
    if (smin <= 0.0 || sv[0] / smin > cond_limit) {
        std::ostringstream msg;
        msg << "matrix not invertible " << where << ": condition number "
            << (smin > 0.0 ? sv[0] / smin : std::numeric_limits<double>::infinity())
            << " exceeds " << cond_limit;
        throw SingularMetric(msg.str());
    }
    Matrix inv = m.partialPivLu().inverse();
    // One Newton step: X <- X (2I - M X).
    const Matrix id = Matrix::Identity(m.rows(), m.cols());
    inv = inv * (2.0 * id - m * inv);
    return inv;
}

std::string format_vector(const Vector& v) {
    std::ostringstream out;
    out << '[';
    for (int i = 0; i < v.size(); ++i) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6g", v[i]);
        out << (i ? ", " : "") << buf;
    }
    out << ']';
    return out.str();
}

}  // namespace lorgeo

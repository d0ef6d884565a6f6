// lorgeo - geodesic length: path quadrature, closed form, oracle access
#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "lorgeo/flow.hpp"
#include "lorgeo/metric.hpp"

namespace lorgeo {

// One length measurement: data (yhat, etahat, T) and the resulting R.
struct LengthSample {
    SpacetimePoint yhat;  // x0 = 0 by convention
    Covector etahat;
    double T = 0.0;
    double R = 0.0;
};

// sqrt(2 H(y, eta)) * T; requires timelike-positive data.
double length_closed_form(const MetricField& field, const SpacetimePoint& yhat,
                          const Covector& etahat, double T);

struct QuadratureOptions {
    int initial_nodes = 257;   // composite Simpson node count (odd)
    int max_nodes = 4097;
    double rel_agreement = 1e-8;  // stop refining when successive values agree
};

// Composite Simpson over a uniform resampling of the path. The velocity at
// each node is reconstructed from the covector through the inverse metric,
// and the integrand sqrt(v' [g_jk] v) must stay positive.
double length_by_quadrature(const MetricField& field, const GeodesicPath& path,
                            QuadratureOptions opts = {});

enum class OracleMode { ClosedForm, Quadrature, Table };

// Deterministic source of length samples. ClosedForm and Quadrature wrap a
// hidden field; Table serves stored measurements only.
class LengthOracle {
public:
    static LengthOracle closed_form(MetricField field);
    // The quadrature route runs the flow; tolerances default well below the
    // closed form so that downstream second differences stay quiet.
    static LengthOracle quadrature(MetricField field,
                                   IntegratorTolerances tol = {1e-12, 1e-14},
                                   QuadratureOptions opts = {});
    static LengthOracle table(std::vector<LengthSample> samples, int n);
    static LengthOracle table_from_csv(const std::string& path);

    LengthSample query(const SpacetimePoint& yhat, const Covector& etahat, double T) const;

    int n() const;
    OracleMode mode() const;
    const std::string& description() const;

private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
};

// Free-function spelling of LengthOracle::query.
LengthSample oracle_query(const LengthOracle& oracle, const SpacetimePoint& yhat,
                          const Covector& etahat, double T);

// CSV, header: n,y1..yn,eta0,eta1..etan,T,R
void write_length_table_csv(std::ostream& out, const std::vector<LengthSample>& rows, int n);
std::vector<LengthSample> read_length_table_csv(std::istream& in, int& n_out);

// Spatial-only positive-definite analogue used by the Riemannian recovery.
class RiemannianLengthOracle {
public:
    static RiemannianLengthOracle closed_form(RiemannianField field);
    // R = sqrt(eta' [g^{jk}(y)] eta) * T; rejects non-positive data.
    double query(const Vector& y, const Vector& eta, double T) const;
    int n() const;

private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
};

}  // namespace lorgeo

// lorgeo - pointwise recovery of the inverse metric from length data
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lorgeo/length.hpp"

namespace lorgeo {

struct RecoveryOptions {
    double epsilon = 1e-2;        // scaled by |seed|, then shrunk on rejection
    double epsilon_floor = 1e-6;
    double T = 1.0;               // horizon used for oracle queries
    enum class Fit { Polarization, LeastSquares };
    Fit fit = Fit::Polarization;
    int ls_oversample = 3;        // LS mode: samples per free entry
    std::uint64_t seed = 0;       // RNG stream for direction search / LS sampling
    std::optional<Covector> seed_direction;  // skip the search when set
};

struct RecoveredMetricPoint {
    Vector y;
    SymmetricForm Q;     // recovered [g^{jk}(y)]
    SymmetricForm Qinv;  // recovered [g_{jk}(y)]
    double epsilon = 0.0;
    Covector seed;
    double residual = 0.0;   // max |v'Qv - measured(v)| over the query set
    int oracle_queries = 0;
};

// (R/T)^2 for the oracle's answer at (yhat, etahat, T).
double measured_form(const LengthOracle& oracle, const SpacetimePoint& yhat,
                     const Covector& etahat, double T);

// Unit covector with an admissible (timelike-positive) query at yhat. Probes
// +/- the time axis, then up to 200 random unit directions.
Covector find_timelike_seed(const LengthOracle& oracle, const SpacetimePoint& yhat,
                            const RecoveryOptions& opts = {});

// The polarization query set around seed a at offset eps: a, a +/- 2 eps e_i,
// a +/- eps e_i +/- eps e_j (i < j), deduplicated, in deterministic order.
// Exposed so tables can be generated to cover exactly these queries.
std::vector<Covector> polarization_queries(int dim, const Covector& seed, double eps);

// Full symmetric form at yhat by second differences about a timelike seed:
// B_ij = [Q(a+e(i)+e(j)) - Q(a+e(i)-e(j)) - Q(a-e(i)+e(j)) + Q(a-e(i)-e(j))] / (8 eps^2)
// with e(k) = eps * unit_k; exact for quadratic data once every node is
// admissible. eps halves until that holds or the floor is reached.
RecoveredMetricPoint recover_inverse_metric_at(const LengthOracle& oracle,
                                               const SpacetimePoint& yhat,
                                               const RecoveryOptions& opts = {});

struct PointRecovery {
    Vector y;
    std::optional<RecoveredMetricPoint> point;
    std::string error;  // empty on success
    bool ok() const { return point.has_value(); }
};

// Independent per-point recovery; failures are collected, not fatal.
std::vector<PointRecovery> recover_on_region(const LengthOracle& oracle,
                                             const std::vector<Vector>& points,
                                             const RecoveryOptions& opts = {});

struct BoundaryJetOptions {
    double h = 1e-3;
    int order = 2;            // supported: 0, 1, 2
    bool richardson = false;  // extrapolate first derivatives from h and h/2
    RecoveryOptions recovery;
};

// Derivatives of the recovered inverse metric at a boundary point. Axes with
// a nonzero inward-normal component use one-sided second-order stencils; the
// others use central stencils.
struct BoundaryJet {
    Vector y;
    double h = 0.0;
    int order = 0;
    struct Entry {
        std::vector<int> alpha;  // multi-index over x1..xn
        SymmetricForm value;
    };
    std::vector<Entry> entries;  // |alpha| ascending
    const SymmetricForm& at(const std::vector<int>& alpha) const;
};

BoundaryJet recover_boundary_jet(const LengthOracle& oracle, const Vector& y,
                                 const Vector& inward_normal, BoundaryJetOptions opts = {});

// Positive-definite spatial variant: every unit direction is admissible, so
// the seed search is trivial. Returns the recovered n x n form.
SymmetricForm recover_riemannian(const RiemannianLengthOracle& oracle, const Vector& y,
                                 const RecoveryOptions& opts = {});

}  // namespace lorgeo

// lorgeo - interpolated metric families, shooting, first variation, norms
#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "lorgeo/flow.hpp"
#include "lorgeo/length.hpp"

namespace lorgeo {

// g_tau = g0 + tau (g1 - g0), combined entrywise on the inverse metric.
// Endpoints reproduce g0 and g1 exactly.
class InterpolatedFamily {
public:
    InterpolatedFamily(MetricField g0, MetricField g1);

    MetricField field_at(double tau) const;
    const MetricField& g0() const { return g0_; }
    const MetricField& g1() const { return g1_; }

    // (g1 - g0)(x) and its spatial derivatives, from raw entries.
    SymmetricForm difference_at(const Vector& x) const;
    std::vector<SymmetricForm> difference_derivatives_at(const Vector& x) const;

private:
    MetricField g0_, g1_;
};

struct ShootingOptions {
    double shoot_tol = 1e-8;
    int max_iterations = 50;
    double cond_limit = 1e10;
    IntegratorTolerances ode{};
};

struct ShootingResult {
    Covector etahat;      // (eta0_fixed, solved spatial components)
    double residual = 0.0;
    int iterations = 0;
    Matrix jacobian;      // n x n spatial endpoint-Jacobian block used last
    double arrival_x0 = 0.0;  // x0(T) of the converged trajectory
    GeodesicPath path;
};

// Newton iteration on the spatial covector components: find eta with
// x(T; yhat, (eta0, eta)) = x_T. The time component is held fixed (it is
// conserved, so this is a gauge choice making the system square).
ShootingResult shoot(const MetricField& field, const SpacetimePoint& yhat, const Vector& x_T,
                     double T, double eta0_fixed, const Covector& guess,
                     const ShootingOptions& opts = {});

// Constant-coefficient solve of the endpoint condition at y; exact for
// constant metrics, a sane Newton start otherwise.
Covector default_shooting_guess(const MetricField& field, const SpacetimePoint& yhat,
                                const Vector& x_T, double T, double eta0_fixed);

// d(etahat_tau)/dtau by difference quotients of shooting solutions
// (central inside (0,1), one-sided second-order at the ends). The time
// component is identically zero under the gauge.
Covector eta_tau_derivative(const InterpolatedFamily& family, double tau,
                            const SpacetimePoint& yhat, const Vector& x_T, double T,
                            double eta0_fixed, double h_tau = 1e-3,
                            const ShootingOptions& opts = {});

// First variation of the length along the family at tau = 0, split as
//   R1 = 1/2 T (2H0)^{-1/2} ((g1-g0)(y) eta0hat, eta0hat)
//   R2 =     T (2H0)^{-1/2} (g0(y) eta0hat, d(etahat_tau)/dtau|0)
// so that R1 + R2 equals the tau-derivative of tau -> R(g_tau, shot).
std::pair<double, double> first_variation(const InterpolatedFamily& family,
                                          const SpacetimePoint& yhat, const Vector& x_T,
                                          double T, double eta0_fixed, double h_tau = 1e-3,
                                          const ShootingOptions& opts = {});

// max over grid points of the max-abs entry of (g1 - g0).
double sup_norm(const MetricField& g0, const MetricField& g1, const std::vector<Vector>& grid);

// sup over the given trajectories of the Simpson integral of |g1 - g0| along
// each, plus the same for the first spatial derivatives.
double path_norm(const InterpolatedFamily& family, std::span<const GeodesicPath> paths,
                 int quad_nodes = 257);

struct BoundaryPair {
    Vector y;
    Vector x_T;
    double T = 1.0;
    double eta0 = 1.0;
};

// CSV, header: y1..yn,xT1..xTn,T,eta0
std::vector<BoundaryPair> read_boundary_pairs_csv(std::istream& in, int n);

struct RigidityOptions {
    int tau_points = 9;                          // grid {0, 1/8, ..., 1}
    std::vector<double> scales = {1.0, 0.5, 0.25, 0.125};
    double h_tau = 1e-3;
    ShootingOptions shooting{};
    int quad_nodes = 257;
    double delta_rigid_tol = 1e-9;
    double norm_rigid_tol = 1e-6;
    // The fitted-bound comparison tolerates this fraction of (bound + remainder)
    // plus a tiny absolute floor; first-order remainders still fail it.
    double inequality_slack_rel = 0.05;
    double inequality_slack_abs = 1e-9;
};

struct TauEntry {
    double tau = 0.0;
    Covector etahat;
    double residual = 0.0;
    int iterations = 0;
    double arrival_x0 = 0.0;
};

struct ScaleEntry {
    double s = 0.0;
    double Delta = 0.0, R1 = 0.0, R2 = 0.0;
    double sup_norm = 0.0, path_norm = 0.0;
    double remainder = 0.0;  // |Delta - R1 - R2|
    bool inequality_holds = true;
};

struct PairReport {
    BoundaryPair pair;
    double Delta = 0.0, R1 = 0.0, R2 = 0.0;
    double l0 = 0.0, l1 = 0.0;           // NaN when the dividing norm vanishes
    double path_norm = 0.0;
    double C1 = 0.0, C2 = 0.0;
    double slope = 0.0;                  // NaN when the remainder is at noise level
    bool inequality_holds = true;
    std::vector<TauEntry> tau_table;
    std::vector<ScaleEntry> sweep;
};

struct RigidityReport {
    double sup_norm = 0.0;               // family-level, over the grid
    double max_abs_delta = 0.0;
    bool inequality_holds = true;        // all pairs, all scales
    bool rigid_at_data = true;           // max|Delta| <= tol implies sup_norm <= tol
    bool degenerate_direction = false;   // R1 <= 0 for every pair
    std::vector<PairReport> pairs;
};

// Full experiment: per-pair continuation shooting over the tau grid, length
// difference Delta, first variation, norms, a scale sweep g0 + s (g1 - g0)
// with fitted remainder constants, and the resulting flags.
RigidityReport rigidity_check(const MetricField& g0, const MetricField& g1,
                              const std::vector<BoundaryPair>& pairs,
                              const std::vector<Vector>& grid, const RigidityOptions& opts = {});

}  // namespace lorgeo

// lorgeo - Hamiltonian flow: dx/dt = dH/dxi, dxi/dt = -dH/dx
#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "lorgeo/metric.hpp"
#include "lorgeo/types.hpp"

namespace lorgeo {

struct IntegratorTolerances {
    double rtol = 1e-9;
    double atol = 1e-11;
};

struct IntegratorStats {
    long accepted = 0;
    long rejected = 0;
    long rhs_evaluations = 0;
    double max_step = 0.0;
};

// One point of the flow: parameter value, spacetime point, covector.
struct PhaseState {
    double t = 0.0;
    SpacetimePoint xhat;
    Covector xihat;
};

// Immutable solution of the flow on [0, T]. Samples are the accepted step
// nodes merged with a uniform grid (at least 65 points); state_at() queries
// the fifth-order dense interpolant of the integrator.
class GeodesicPath {
public:
    const std::vector<PhaseState>& samples() const { return samples_; }
    PhaseState state_at(double t) const;

    double T() const { return T_; }
    int n() const { return n_; }
    const SpacetimePoint& initial_point() const { return y0_; }
    const Covector& initial_covector() const { return eta0_; }
    double initial_hamiltonian() const { return H0_; }
    const IntegratorStats& stats() const { return stats_; }
    const std::string& field_id() const { return field_id_; }

private:
    struct Step {
        double t = 0.0, h = 0.0;
        Vector r1, r2, r3, r4, r5;  // dense-output coefficients
    };
    friend GeodesicPath integrate_bicharacteristic(const MetricField&, const SpacetimePoint&,
                                                   const Covector&, double,
                                                   IntegratorTolerances);
    std::vector<Step> steps_;
    std::vector<PhaseState> samples_;
    std::string field_id_;
    SpacetimePoint y0_;
    Covector eta0_;
    double T_ = 0.0;
    double H0_ = 0.0;
    int n_ = 0;
    IntegratorStats stats_;
};

// Integrates the flow from (yhat, etahat) over [0, T], T > 0. The time
// component of the covector is carried as a state variable even though its
// rate vanishes, so drift is observable.
GeodesicPath integrate_bicharacteristic(const MetricField& field, const SpacetimePoint& yhat,
                                        const Covector& etahat, double T,
                                        IntegratorTolerances tol = {});

// max_t |H(x(t), xi(t)) - H(y, eta)| over the given samples.
double conservation_defect(std::span<const PhaseState> samples, double reference_hamiltonian,
                           const MetricField& field);
double conservation_defect(const GeodesicPath& path, const MetricField& field);

// max_t |xi0(t) - eta0|.
double time_covector_drift(const GeodesicPath& path);

// (n+1) x (n+1) central-difference Jacobian of the endpoint:
// column j = (xhat(T; eta + h e_j) - xhat(T; eta - h e_j)) / (2h),
// rows ordered (x0, x1..xn). step < 0 selects 1e-6 * (1 + |eta|).
Matrix endpoint_jacobian(const MetricField& field, const SpacetimePoint& yhat,
                         const Covector& etahat, double T, IntegratorTolerances tol = {},
                         double step = -1.0);

// CSV dump: t,x0,x1..xn,xi0,xi1..xin,H
void write_trajectory_csv(std::ostream& out, const GeodesicPath& path, const MetricField& field);

}  // namespace lorgeo

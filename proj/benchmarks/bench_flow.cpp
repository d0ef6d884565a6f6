#include <benchmark/benchmark.h>

#include "lorgeo/length.hpp"

using namespace lorgeo;

namespace {

MetricField bump_field(int n) {
    std::string arg = "x1^2";
    for (int i = 2; i <= n; ++i) arg += "+x" + std::to_string(i) + "^2";
    return MetricField::conformal(Expr::parse("1+0.5*exp(-(" + arg + "))", n), n,
                                  Box::cube(n, -50, 50));
}

Covector unit_time(int n) { return Covector(1.0, Vector::Zero(n)); }

void BM_InverseMetricEval(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const MetricField f = bump_field(n);
    Vector x = Vector::Constant(n, 0.3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(f.evaluate_inverse_metric(x));
    }
}
BENCHMARK(BM_InverseMetricEval)->Arg(1)->Arg(2)->Arg(3);

void BM_Integrate(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const MetricField f = bump_field(n);
    const SpacetimePoint y = SpacetimePoint::spatial(Vector::Constant(n, 0.2));
    Covector eta = unit_time(n);
    eta.eta[0] = 0.3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(integrate_bicharacteristic(f, y, eta, 1.0));
    }
}
BENCHMARK(BM_Integrate)->Arg(1)->Arg(2);

void BM_LengthQuadrature(benchmark::State& state) {
    const MetricField f = bump_field(1);
    const SpacetimePoint y = SpacetimePoint::spatial(Vector::Constant(1, 0.2));
    Covector eta = unit_time(1);
    eta.eta[0] = 0.3;
    const GeodesicPath path = integrate_bicharacteristic(f, y, eta, 1.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(length_by_quadrature(f, path));
    }
}
BENCHMARK(BM_LengthQuadrature);

}  // namespace

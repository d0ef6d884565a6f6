#include <benchmark/benchmark.h>

#include "lorgeo/recovery.hpp"
#include "lorgeo/rigidity.hpp"

using namespace lorgeo;

namespace {

void BM_RecoverPoint(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    std::string arg = "x1^2";
    for (int i = 2; i <= n; ++i) arg += "+x" + std::to_string(i) + "^2";
    const MetricField f = MetricField::conformal(Expr::parse("1+0.5*exp(-(" + arg + "))", n), n,
                                                 Box::cube(n, -50, 50));
    const LengthOracle oracle = LengthOracle::closed_form(f);
    const SpacetimePoint y = SpacetimePoint::spatial(Vector::Constant(n, 0.3));
    for (auto _ : state) {
        benchmark::DoNotOptimize(recover_inverse_metric_at(oracle, y));
    }
}
BENCHMARK(BM_RecoverPoint)->Arg(1)->Arg(2)->Arg(3);

void BM_Shoot(benchmark::State& state) {
    const MetricField f = MetricField::conformal(Expr::parse("1+0.5*exp(-x1^2)", 1), 1,
                                                 Box::cube(1, -50, 50));
    const SpacetimePoint y = SpacetimePoint::spatial(Vector::Zero(1));
    Vector x_T(1);
    x_T[0] = 0.4;
    const Covector guess = default_shooting_guess(f, y, x_T, 1.0, 1.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(shoot(f, y, x_T, 1.0, 1.0, guess));
    }
}
BENCHMARK(BM_Shoot);

}  // namespace

#include <benchmark/benchmark.h>

#include "exactrd/expr.hpp"
#include "exactrd/numsolve.hpp"
#include "exactrd/scenario.hpp"
#include "exactrd/verify.hpp"

using namespace exactrd;

namespace {

const Config& shipped() {
  static const Config cfg = load_config(EXACTRD_SCENARIOS);
  return cfg;
}

const Scenario& scenario(const char* name) {
  for (const auto& s : shipped().scenarios)
    if (s.name == name) return s;
  throw std::runtime_error(name);
}

void BM_ExprEval(benchmark::State& state) {
  Expr e = parse("3*sin(6*t)*exp(sin(3*t)^2) + sech(t)^4 - t^2/(1 + cosh(t))");
  double t = 0.1, acc = 0.0;
  for (auto _ : state) {
    acc += e.eval(t);
    t += 1e-6;
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_ExprEval);

void BM_ExprParse(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(parse("3*sin(6*t)*exp(sin(3*t)^2)"));
}
BENCHMARK(BM_ExprParse);

void BM_SolveRiccati(benchmark::State& state) {
  const Scenario& s = scenario("ex_3_3_2");
  for (auto _ : state) benchmark::DoNotOptimize(solve_riccati(s.coeffs, s.interval, s.init));
}
BENCHMARK(BM_SolveRiccati)->Unit(benchmark::kMicrosecond);

void BM_GeneralizedResidual(benchmark::State& state) {
  const Scenario& s = scenario("ex_3_2_2");
  RiccatiState st = scenario_state(s);
  GeneralizedSolution sol = scenario_solution(s, st);
  Grid g = s.grid;
  g.nx = g.nt = static_cast<int>(state.range(0));
  ResidualOptions ro;
  ro.t_domain = st.valid_interval();
  for (auto _ : state) benchmark::DoNotOptimize(residual(sol.system(), sol.fields(), g, 1e-5, ro));
}
BENCHMARK(BM_GeneralizedResidual)->Arg(41)->Arg(81)->Unit(benchmark::kMillisecond);

void BM_MolIntegrate(benchmark::State& state) {
  const Scenario& s = scenario("ex_3_4_1");
  GeneralizedSolution sol = scenario_solution(s, scenario_state(s));
  MolProblem p = MolProblem::from_solution(sol, -5, 5, static_cast<int>(state.range(0)), 0, 1);
  for (auto _ : state) benchmark::DoNotOptimize(integrate(p));
}
BENCHMARK(BM_MolIntegrate)->Arg(101)->Arg(201)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();

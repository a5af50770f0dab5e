#include "cohesive/domain_fem.hpp"
#include "cohesive/evolution.hpp"
#include "cohesive/oracle.hpp"
#include "cohesive/reduced_system.hpp"
#include "cohesive/step_minimizer.hpp"

#include <benchmark/benchmark.h>

using namespace cohesive;

namespace {

ReducedModel condensed(int nx)
{
    const Mesh mesh = build_mesh({2.0, 1.0, nx, 8});
    return condense(mesh, assemble_stiffness(mesh));
}

} // namespace

static void BM_Condense(benchmark::State& state)
{
    const Mesh mesh = build_mesh({2.0, 1.0, static_cast<int>(state.range(0)), 8});
    const auto k = assemble_stiffness(mesh);
    for (auto _ : state)
        benchmark::DoNotOptimize(condense(mesh, k));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Condense)->RangeMultiplier(2)->Range(8, 64)->Unit(benchmark::kMillisecond)->Complexity();

// One loading step from a partly slid state: a mix of stuck, sliding and
// nearly broken nodes.
static void BM_SolveStep(benchmark::State& state)
{
    const int nx = static_cast<int>(state.range(0));
    const ReducedModel model = condensed(nx);
    const auto m = static_cast<Eigen::Index>(model.size());
    const LawField laws(model.size(), CohesiveLaw::capped_linear(0.5, 1.0));
    Eigen::VectorXd v(m);
    for (Eigen::Index e = 0; e < m; ++e)
        v[e] = 0.9 * static_cast<double>(e) / static_cast<double>(m);
    const Eigen::VectorXd p = Eigen::VectorXd::Constant(m, 0.05);
    const StepProblem problem{model, laws, v + p, p, 1.0};
    for (auto _ : state)
        benchmark::DoNotOptimize(solve_step(problem));
    state.SetComplexityN(m);
}
BENCHMARK(BM_SolveStep)->RangeMultiplier(2)->Range(8, 64)->Unit(benchmark::kMicrosecond)->Complexity();

static void BM_SolveCoordinate1d(benchmark::State& state)
{
    const auto law = CohesiveLaw::exponential(1.0, 2.0);
    double b = -0.8;
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_coordinate_1d(1.0, b, law, 0.2, 0.1, 0.5));
        b = b < -2.0 ? -0.8 : b - 1e-3;
    }
}
BENCHMARK(BM_SolveCoordinate1d);

static void BM_TwoBarRun(benchmark::State& state)
{
    const Mesh mesh = build_mesh({1.0, 1.0, 1, 2});
    const ReducedModel bar = condense(mesh, assemble_stiffness(mesh));
    const LawField laws(2, CohesiveLaw::capped_linear(0.5, 1.0));
    const LoadProgram load({{0.0, 0.0}, {2.0, 2.0}});
    const int k = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(run(bar, laws, load, k, zero_initial_state(2)));
    state.SetItemsProcessed(state.iterations() * k);
}
BENCHMARK(BM_TwoBarRun)->Arg(400)->Arg(2000)->Unit(benchmark::kMillisecond);

static void BM_OracleTwoNodes(benchmark::State& state)
{
    const Mesh mesh = build_mesh({1.0, 1.0, 1, 2});
    const ReducedModel bar = condense(mesh, assemble_stiffness(mesh));
    const LawField laws(2, CohesiveLaw::exponential(1.0, 1.0));
    const StepProblem problem{bar, laws, Eigen::Vector2d(0.2, 0.0), Eigen::Vector2d(0.1, -0.1), 1.1};
    const GridSpec grid = default_grid(problem, 1e-3, 1e6);
    for (auto _ : state)
        benchmark::DoNotOptimize(brute_force_step(problem, grid));
}
BENCHMARK(BM_OracleTwoNodes)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

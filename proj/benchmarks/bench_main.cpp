#include <benchmark/benchmark.h>

#include <vector>

#include "icp/angles.hpp"
#include "icp/layout.hpp"
#include "icp/packing.hpp"
#include "icp/walker.hpp"

using namespace icp;

namespace {

struct Patch {
    PlanarMap map;
    AngleAssignment theta;
    PackingMetric metric;
};

Patch solved_patch(int p, int q, int g)
{
    auto m = generate_regular_patch(p, q, g);
    auto th = AngleAssignment::regular(m);
    SolverConfig cfg{SolveMethod::FixedPoint};
    cfg.tol = 1e-12;
    auto res = solve(m, th, PackingMetric::uniform(m), cfg);
    return {m, th, res.metric};
}

void BM_Curvature(benchmark::State& st)
{
    auto m = generate_regular_patch(3, 7, static_cast<int>(st.range(0)));
    auto th = AngleAssignment::regular(m);
    auto r = PackingMetric::uniform(m);
    for (auto _ : st) benchmark::DoNotOptimize(curvature(m, th, r));
    st.counters["vertices"] = m.vertex_count();
}
BENCHMARK(BM_Curvature)->DenseRange(3, 6);

void BM_Solve(benchmark::State& st)
{
    auto m = generate_regular_patch(3, 7, static_cast<int>(st.range(0)));
    auto th = AngleAssignment::regular(m);
    SolverConfig cfg{static_cast<SolveMethod>(st.range(1))};
    cfg.tol = 1e-10;
    for (auto _ : st) benchmark::DoNotOptimize(solve(m, th, PackingMetric::uniform(m), cfg));
    st.counters["vertices"] = m.vertex_count();
}
BENCHMARK(BM_Solve)
    ->ArgsProduct({{3, 4, 5}, {static_cast<int>(SolveMethod::FixedPoint), static_cast<int>(SolveMethod::RicciFlow)}})
    ->Unit(benchmark::kMillisecond);

void BM_LayoutAndCheck(benchmark::State& st)
{
    auto p = solved_patch(3, 7, static_cast<int>(st.range(0)));
    for (auto _ : st) {
        auto lay = layout_embed(p.map, p.theta, p.metric);
        benchmark::DoNotOptimize(consistency_check(lay, p.map, p.theta));
    }
    st.counters["vertices"] = p.map.vertex_count();
}
BENCHMARK(BM_LayoutAndCheck)->DenseRange(4, 6)->Unit(benchmark::kMillisecond);

void BM_WalkEnsemble(benchmark::State& st)
{
    auto p = solved_patch(3, 7, 6);
    auto lay = normalize_to_disk(layout_embed(p.map, p.theta, p.metric), p.map.root());
    const auto n = static_cast<std::size_t>(st.range(0));
    for (auto _ : st) {
        std::vector<WalkTrace> ts;
        for (std::size_t s = 0; s < n; ++s) ts.push_back(srw_walk(p.map, p.map.root(), 1000000, 1, s));
        benchmark::DoNotOptimize(estimate_speed_ensemble(ts, lay));
    }
}
BENCHMARK(BM_WalkEnsemble)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

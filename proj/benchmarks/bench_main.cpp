#include <benchmark/benchmark.h>

#include <string>

#include "capprice/bilevel/pricing.hpp"
#include "capprice/dispatch/lower_level.hpp"
#include "capprice/model/io.hpp"
#include "capprice/model/synth.hpp"
#include "capprice/scenario/baselines.hpp"
#include "capprice/solver/polyhedral.hpp"

using namespace capprice;

namespace {

model::Instance desk() {
    const auto files = model::InstanceFiles::in_directory(std::string(CAPPRICE_DATA_DIR) + "/desk");
    return scenario::apply_scenario(model::load_instance(files, {}), 1.0, 0.6);
}

model::ProsumerAssets day_member(int horizon) {
    model::ProfileShape shape;
    shape.pv_owners = {0};
    const auto p = model::synth_profiles(3, 1, horizon, shape);
    model::ProsumerAssets a;
    a.demand_kw = p.demand_kw[0];
    a.pv_kw = p.pv_kw[0];
    a.p_bat_kw = 2.0;
    a.e_bat_kwh = 4.0;
    a.eta_ch = 0.9;
    a.eta_dis = 0.95;
    a.sigma = 0.1;
    return a;
}

void BM_LowerLp(benchmark::State& state) {
    const int T = static_cast<int>(state.range(0));
    const auto a = day_member(T);
    std::vector<double> price;
    for (int t = 0; t < T; ++t) price.push_back(0.5 + 2.0 * ((t * 7) % T) / T);
    for (auto _ : state) benchmark::DoNotOptimize(dispatch::solve_member(a, price, 75.0).dispatch.objective);
}
BENCHMARK(BM_LowerLp)->Arg(6)->Arg(24)->Arg(96)->Unit(benchmark::kMicrosecond);

void BM_UncoordinatedBaseline(benchmark::State& state) {
    const auto inst = desk();
    for (auto _ : state) benchmark::DoNotOptimize(scenario::baseline_uncoordinated(inst).community.total_cost);
}
BENCHMARK(BM_UncoordinatedBaseline)->Unit(benchmark::kMicrosecond);

void BM_AssembleDesk(benchmark::State& state) {
    const auto inst = desk();
    const auto c_ext = scenario::compute_c_ext(inst);
    for (auto _ : state) benchmark::DoNotOptimize(bilevel::assemble_single_level(inst, c_ext).ir.num_vars());
}
BENCHMARK(BM_AssembleDesk)->Unit(benchmark::kMicrosecond);

void BM_PolyhedralizeDesk(benchmark::State& state) {
    const auto inst = desk();
    const auto a = bilevel::assemble_single_level(inst, scenario::compute_c_ext(inst));
    solver::PolyhedralOptions o;
    o.cone_segments = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(solver::polyhedralize(a.ir, o).num_rows());
}
BENCHMARK(BM_PolyhedralizeDesk)->Arg(8)->Arg(32)->Unit(benchmark::kMicrosecond);

void BM_RootRelaxationDesk(benchmark::State& state) {
    const auto inst = desk();
    const auto a = bilevel::assemble_single_level(inst, scenario::compute_c_ext(inst));
    const auto opt = bilevel::native_options(inst.config);
    for (auto _ : state) benchmark::DoNotOptimize(solver::solve_lp_relaxation(a.ir, {}, opt).objective);
}
BENCHMARK(BM_RootRelaxationDesk)->Unit(benchmark::kMillisecond);

void BM_SolvePricingDesk(benchmark::State& state) {
    const auto inst = desk();
    const auto c_ext = scenario::compute_c_ext(inst);
    for (auto _ : state) benchmark::DoNotOptimize(bilevel::solve_pricing(inst, c_ext).community_cost);
}
BENCHMARK(BM_SolvePricingDesk)->Iterations(2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

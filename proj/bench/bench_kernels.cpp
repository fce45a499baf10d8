// Serial reference vs OpenMP paths of the per-node kernels.
#include <benchmark/benchmark.h>

#include "perieig/config.hpp"
#include "perieig/elliptic.hpp"
#include "perieig/floquet_ode.hpp"
#include "perieig/hj.hpp"

using namespace perieig;

namespace {

const Problem& generic() {
    static const Problem p = build_problem(load_config(std::string(PERIEIG_FIXTURE_DIR) + "/generic.cfg"));
    return p;
}

Execution mode_of(const benchmark::State& s) { return s.range(0) ? Execution::parallel : Execution::serial; }

void BM_HUnder(benchmark::State& s) {
    OdeOptions opt;
    opt.execution = mode_of(s);
    for (auto _ : s) benchmark::DoNotOptimize(h_under(generic().A, 0.5, opt).value);
}

void BM_LambdaUnder(benchmark::State& s) {
    for (auto _ : s) benchmark::DoNotOptimize(lambda_under(generic(), 0.01, mode_of(s)).value);
}

void BM_LaxFriedrichs(benchmark::State& s) {
    auto cfg = load_config(std::string(PERIEIG_FIXTURE_DIR) + "/generic.cfg");
    cfg.space.nodes = 4097;
    const Problem p = build_problem(cfg);
    const HamiltonianLattice H(p, 4.0);
    std::vector<double> w(cfg.space.nodes, 0.0), out;
    const double h = p.space().h();
    for (auto _ : s) {
        lax_friedrichs_step(w, out, 0.1, h / H.alpha(), 1.0, h, H, mode_of(s));
        benchmark::DoNotOptimize(out.data());
    }
}

}  // namespace

BENCHMARK(BM_HUnder)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LambdaUnder)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LaxFriedrichs)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();

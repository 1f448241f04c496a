// Kernel timings for the FOM, POD, ROM and closure stages on the default
// Burgers setup (1024 elements, nu = 1e-3, 101 snapshots).

#include <benchmark/benchmark.h>

#include "cfrom/closure_calibration.hpp"
#include "cfrom/fom_burgers.hpp"
#include "cfrom/galerkin_rom.hpp"
#include "cfrom/pod_basis.hpp"
#include "cfrom/rom_integrator.hpp"

namespace {

using namespace cfrom;

struct Fixture {
    fom::FomConfig cfg;
    fom::SnapshotSet snaps;
    fe::TriDiagMatrix mass;
    pod::PodBasis basis;
    rom::SnapCoeffs coeffs;

    Fixture()
        : snaps(fom::run_fom(cfg)),
          mass(fe::assemble_mass(snaps.mesh)),
          basis(pod::compute_pod(snaps, mass)),
          coeffs(rom::snapshot_coefficients(snaps, basis, basis.d())) {}
};

const Fixture& fixture() {
    static const Fixture f;
    return f;
}

void BM_NonlinearForm(benchmark::State& state) {
    const auto& f = fixture();
    const Eigen::VectorXd u = f.snaps.snapshot(50);
    for (auto _ : state) benchmark::DoNotOptimize(fe::nonlinear_form(u, f.snaps.mesh));
}
BENCHMARK(BM_NonlinearForm);

void BM_FomStep(benchmark::State& state) {
    const auto& f = fixture();
    const fom::BurgersFom model(f.cfg);
    const Eigen::VectorXd u = f.snaps.snapshot(50);
    for (auto _ : state) benchmark::DoNotOptimize(model.step(u));
}
BENCHMARK(BM_FomStep);

void BM_ComputePod(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state) benchmark::DoNotOptimize(pod::compute_pod(f.snaps, f.mass));
}
BENCHMARK(BM_ComputePod)->Unit(benchmark::kMillisecond);

void BM_AssembleRomOperators(benchmark::State& state) {
    const auto& f = fixture();
    const int r = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(rom::assemble_rom_operators(f.basis, r, f.cfg.nu));
    }
}
BENCHMARK(BM_AssembleRomOperators)->Arg(6)->Arg(10)->Arg(15)->Unit(benchmark::kMicrosecond);

void BM_RomRhs(benchmark::State& state) {
    const auto& f = fixture();
    const int r = static_cast<int>(state.range(0));
    const auto ops = rom::assemble_rom_operators(f.basis, r, f.cfg.nu);
    const Eigen::VectorXd a = f.coeffs.a.col(0).head(r);
    for (auto _ : state) benchmark::DoNotOptimize(rom::rom_rhs(ops, a));
}
BENCHMARK(BM_RomRhs)->Arg(6)->Arg(10)->Arg(15);

void BM_IntegrateForwardEuler(benchmark::State& state) {
    const auto& f = fixture();
    const int r = static_cast<int>(state.range(0));
    const auto ops = rom::assemble_rom_operators(f.basis, r, f.cfg.nu);
    const Eigen::VectorXd a0 = f.coeffs.a.col(0).head(r);
    for (auto _ : state) {
        benchmark::DoNotOptimize(rom::integrate_forward_euler(ops, a0, 1e-4, 1.0));
    }
}
BENCHMARK(BM_IntegrateForwardEuler)->Arg(6)->Arg(10)->Arg(15)->Unit(benchmark::kMillisecond);

void BM_ComputeGsnap(benchmark::State& state) {
    const auto& f = fixture();
    const int r = static_cast<int>(state.range(0));
    const int m = static_cast<int>(state.range(1));
    for (auto _ : state) {
        benchmark::DoNotOptimize(closure::compute_gsnap(f.coeffs, f.basis, r, m));
    }
}
BENCHMARK(BM_ComputeGsnap)
    ->Args({6, 12})
    ->Args({10, 20})
    ->Args({15, 30})
    ->Args({15, 101})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

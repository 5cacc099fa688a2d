#include <benchmark/benchmark.h>

#include <random>

#include "tebd/evolution.hpp"
#include "tebd/hamiltonian.hpp"
#include "tebd/mps.hpp"

using namespace tebd;

namespace {

CMatrix random_unitary(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  CMatrix g(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) g(r, c) = Complex(gauss(rng), gauss(rng));
  Eigen::HouseholderQR<CMatrix> qr(g);
  return qr.householderQ();
}

// Chain with every interior bond saturated at the requested rank.
VidalMps saturated_state(int n, int chi, std::mt19937_64& rng) {
  std::vector<CVector> locals(n, [] {
    CVector v(2);
    v << 1.0, 0.0;
    return v;
  }());
  VidalMps state = VidalMps::product_state(locals);
  TruncationPolicy policy;
  policy.chi_max = chi;
  for (int layer = 0; layer < 10; ++layer)
    for (int parity : {0, 1})
      for (int b = parity; b < n - 1; b += 2)
        state.apply_two_site_gate(b, random_unitary(4, rng), policy);
  return state;
}

}  // namespace

static void BM_svd(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss(0.0, 1.0);
  CMatrix m(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) m(r, c) = Complex(gauss(rng), gauss(rng));
  for (auto _ : state) benchmark::DoNotOptimize(svd(m));
}
BENCHMARK(BM_svd)->Arg(8)->Arg(16)->Arg(32)->Arg(64);

static void BM_two_site_update(benchmark::State& state) {
  const int chi = static_cast<int>(state.range(0));
  std::mt19937_64 rng(11);
  VidalMps psi = saturated_state(16, chi, rng);
  const CMatrix gate = random_unitary(4, rng);
  TruncationPolicy policy;
  policy.chi_max = chi;
  for (auto _ : state) benchmark::DoNotOptimize(psi.apply_two_site_gate(7, gate, policy));
}
BENCHMARK(BM_two_site_update)->Arg(4)->Arg(8)->Arg(16)->Arg(32);

static void BM_trotter_step(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(13);
  VidalMps psi = saturated_state(n, 16, rng);
  const LocalHamiltonian h = heisenberg_ferromagnet(n, 1.0, 1.0);
  const GateSchedule sched = make_schedule(h, 0.01, 2, TimeAxis::real_time);
  TruncationPolicy policy;
  policy.chi_max = 16;
  for (auto _ : state) benchmark::DoNotOptimize(apply_schedule_step(psi, sched, policy));
}
BENCHMARK(BM_trotter_step)->Arg(16)->Arg(32)->Arg(64);

static void BM_amplitude(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(17);
  VidalMps psi = saturated_state(n, 16, rng);
  std::vector<int> config(n, 0);
  for (int l = 0; l < n; l += 3) config[l] = 1;
  for (auto _ : state) benchmark::DoNotOptimize(psi.amplitude(config));
}
BENCHMARK(BM_amplitude)->Arg(16)->Arg(64);

static void BM_inner_product(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(19);
  VidalMps a = saturated_state(n, 16, rng);
  VidalMps b = saturated_state(n, 16, rng);
  for (auto _ : state) benchmark::DoNotOptimize(inner_product(a, b));
}
BENCHMARK(BM_inner_product)->Arg(16)->Arg(64);

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "padicforms/artifacts.hpp"

using namespace padicforms;

namespace {

void BM_RingPow(benchmark::State& state) {
  const RingElem x(12345, 6789, 20);
  for (auto _ : state) benchmark::DoNotOptimize(x.pow(10));
}
BENCHMARK(BM_RingPow);

void BM_SweepConfiguration(benchmark::State& state) {
  const TypeDescriptor t = find_lemma("007").type;
  std::uint64_t i = 0;
  for (auto _ : state) {
    const auto leaves = sweep_configuration(t, 6, 10, (i++ * 7919) % 170'544);
    benchmark::DoNotOptimize(search_certificate(6, 10, leaves));
  }
}
BENCHMARK(BM_SweepConfiguration);

void BM_SolveThreshold(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  std::mt19937_64 rng(42);
  std::vector<AdditiveForm> forms;
  for (int i = 0; i < 64; ++i) forms.push_back(random_form(rng, d, isotropy_threshold(d), d + 4));
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(decide_isotropy(forms[i++ % forms.size()]));
}
BENCHMARK(BM_SolveThreshold)->Arg(6)->Arg(10)->Unit(benchmark::kMicrosecond);

void BM_DescentH(benchmark::State& state) {
  const BlockForm h = build_named_form(NamedForm::kH, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(verify_descent(h));
}
BENCHMARK(BM_DescentH)->Arg(6)->Arg(18);

void BM_OracleH6(benchmark::State& state) {
  const BlockForm h = build_named_form(NamedForm::kH, 6);
  for (auto _ : state) benchmark::DoNotOptimize(decide_isotropy_exhaustive(h.form));
}
BENCHMARK(BM_OracleH6)->Unit(benchmark::kMillisecond);

void BM_PowerValueSetBruteForce(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(brute_force_power_values(6, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_PowerValueSetBruteForce)->Arg(5)->Arg(7)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();

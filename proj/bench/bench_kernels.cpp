// Serial reference against the OpenMP kernels. Each benchmark takes the
// execution mode as its first argument (0 = serial, 1 = parallel).

#include <benchmark/benchmark.h>

#include "rlab/norms.hpp"
#include "rlab/scan.hpp"
#include "rlab/variety.hpp"

using namespace rlab;

namespace {

Exec mode(const benchmark::State& st) { return st.range(0) ? Exec::parallel : Exec::serial; }

void label(benchmark::State& st) { st.SetLabel(st.range(0) ? "parallel" : "serial"); }

void BM_exp_sum_lp_torus(benchmark::State& st) {
  MeanValueProblem prob;
  prob.N = static_cast<int>(st.range(1));
  prob.d = 3;
  prob.s = 3;
  MeanValueOptions opt;
  opt.exec = mode(st);
  for (auto _ : st) benchmark::DoNotOptimize(exp_sum_lp_torus(prob, opt));
  label(st);
}
BENCHMARK(BM_exp_sum_lp_torus)->ArgsProduct({{0, 1}, {8, 16}})->Unit(benchmark::kMillisecond);

void BM_vinogradov_count(benchmark::State& st) {
  const int N = static_cast<int>(st.range(1));
  for (auto _ : st) benchmark::DoNotOptimize(vinogradov_count(N, 3, 3, 200'000'000, mode(st)));
  label(st);
}
BENCHMARK(BM_vinogradov_count)->ArgsProduct({{0, 1}, {16, 32}})->Unit(benchmark::kMillisecond);

void BM_lp_norm_sampled(benchmark::State& st) {
  const int N = static_cast<int>(st.range(1));
  const TiledField f = test_function({3.0, N}, Family::random_phase, 1);
  const Ball ball{{0.0, 0.0}, std::pow(static_cast<double>(N), 3.0)};
  for (auto _ : st) benchmark::DoNotOptimize(lp_norm_sampled(f, 8.0, ball, 256, 7, mode(st)).value);
  label(st);
}
BENCHMARK(BM_lp_norm_sampled)->ArgsProduct({{0, 1}, {4, 8}})->Unit(benchmark::kMillisecond);

void BM_neighborhood_volume(benchmark::State& st) {
  std::mt19937_64 rng(3);
  const Polynomial2 P = Polynomial2::random(4, rng);
  const auto n = static_cast<std::size_t>(st.range(1));
  for (auto _ : st) benchmark::DoNotOptimize(neighborhood_volume(P, 0.05, {{-1, -1}, {1, 1}}, n, 9, mode(st)).estimate);
  label(st);
}
BENCHMARK(BM_neighborhood_volume)->ArgsProduct({{0, 1}, {100000, 1000000}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

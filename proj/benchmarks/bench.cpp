#include <benchmark/benchmark.h>

#include "pubo/extbp.hpp"
#include "pubo/qaoa.hpp"

namespace {

namespace extbp = pubo::extbp;
namespace qaoa = pubo::qaoa;

const char* kNames[] = {"A", "B", "C"};

extbp::Encoding encoding(std::int64_t idx, std::int64_t form) {
  return extbp::encode(extbp::builtin_instance(kNames[idx]),
                       form == 0 ? extbp::Formulation::Pubo : extbp::Formulation::Qubo);
}

void BM_CostTable(benchmark::State& state) {
  const auto enc = encoding(state.range(0), state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(qaoa::build_cost_table(enc.poly, enc.qubit_count));
  state.SetLabel(std::to_string(enc.qubit_count) + " qubits");
}
BENCHMARK(BM_CostTable)->ArgsProduct({{0, 1, 2}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_Evolve(benchmark::State& state) {
  const auto enc = encoding(state.range(0), state.range(1));
  const auto table = qaoa::build_cost_table(enc.poly, enc.qubit_count);
  const std::vector<double> params{1.1, 0.4};
  for (auto _ : state) benchmark::DoNotOptimize(qaoa::evolve(params, table));
  state.SetLabel(std::to_string(enc.qubit_count) + " qubits");
}
BENCHMARK(BM_Evolve)->ArgsProduct({{0, 1, 2}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_Run(benchmark::State& state) {
  const auto enc = encoding(state.range(0), 0);
  const auto table = qaoa::build_cost_table(enc.poly, enc.qubit_count);
  qaoa::QaoaConfig cfg;
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(qaoa::run(table, cfg, seed++));
}
BENCHMARK(BM_Run)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

void BM_BruteForce(benchmark::State& state) {
  const auto inst = extbp::builtin_instance(kNames[state.range(0)]);
  for (auto _ : state) benchmark::DoNotOptimize(extbp::brute_force(inst));
}
BENCHMARK(BM_BruteForce)->DenseRange(0, 2)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();

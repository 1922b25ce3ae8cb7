#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "erasure/composite.hpp"
#include "erasure/corpus.hpp"
#include "erasure/oracle.hpp"
#include "erasure/spec_format.hpp"

using namespace erasure;

namespace {

std::string path(const std::string& f) { return corpus_dir() + "/" + f; }

template <class T>
T load(const std::string& f) {
  return std::get<T>(load_model_file(path(f)));
}

void BM_InputErasure(benchmark::State& state) {
  const auto s = load<SystemSpec>("figure1.sys");
  for (auto _ : state) benchmark::DoNotOptimize(check_input_erasure(s, state.range(0)));
}
BENCHMARK(BM_InputErasure)->DenseRange(4, 14, 2);

void BM_InputErasureOracle(benchmark::State& state) {
  const auto s = load<SystemSpec>("figure1.sys");
  for (auto _ : state) benchmark::DoNotOptimize(oracle_check(PropertyId::InputErasure, s, state.range(0)));
}
BENCHMARK(BM_InputErasureOracle)->DenseRange(4, 12, 2);

void BM_CompositeErasure(benchmark::State& state) {
  const auto u = load<UserSpec>("streamab.usr");
  const auto s = load<SystemSpec>("streamab.sys");
  for (auto _ : state) benchmark::DoNotOptimize(check_composite_erasure(u, s, state.range(0)));
}
BENCHMARK(BM_CompositeErasure)->DenseRange(4, 12, 2);

void BM_CompositeErasureOracle(benchmark::State& state) {
  const auto u = load<UserSpec>("streamab.usr");
  const auto s = load<SystemSpec>("streamab.sys");
  for (auto _ : state) benchmark::DoNotOptimize(oracle_check(PropertyId::CompositeErasure, u, s, state.range(0)));
}
BENCHMARK(BM_CompositeErasureOracle)->DenseRange(4, 12, 2);

void BM_ErasureFriendly(benchmark::State& state) {
  const auto u = load<UserSpec>("mod10.usr");
  for (auto _ : state) benchmark::DoNotOptimize(check_erasure_friendly(u, state.range(0)));
}
BENCHMARK(BM_ErasureFriendly)->Arg(10)->Arg(20);

void BM_Theorem(benchmark::State& state) {
  const auto u = load<UserSpec>("usr1.usr");
  const auto s = load<SystemSpec>("example_ex_a.sys");
  for (auto _ : state) benchmark::DoNotOptimize(validate_soundness_theorem(u, s, 10));
}
BENCHMARK(BM_Theorem);

void BM_ParseExpand(benchmark::State& state) {
  std::ifstream in(path("figure1.sys"));
  std::ostringstream text;
  text << in.rdbuf();
  const std::string s = text.str();
  for (auto _ : state) benchmark::DoNotOptimize(load_model(s));
}
BENCHMARK(BM_ParseExpand);

}  // namespace
BENCHMARK_MAIN();

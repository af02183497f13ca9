#include <benchmark/benchmark.h>

#include "fsp/analysis.hpp"
#include "fsp/sweep.hpp"

namespace {

using namespace fsp;

struct Fixture {
  SelfSimilarStructure s = builtin_structure("sg3");
  LatticeLevel level;
  std::vector<BlowupWord> words;

  explicit Fixture(int n) : level(build_level(s, n)), words(enumerate_words(s, n)) {}
};

void BM_IdentitySerial(benchmark::State& state) {
  const Fixture f(static_cast<int>(state.range(0)));
  auto term = [&](const BlowupWord& w) { return identity_term(f.s, f.level, w, false); };
  for (auto _ : state) {
    auto out = map_serial(std::span<const BlowupWord>(f.words), term);
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.words.size()));
}

void BM_IdentityParallel(benchmark::State& state) {
  const Fixture f(static_cast<int>(state.range(0)));
  auto term = [&](const BlowupWord& w) { return identity_term(f.s, f.level, w, false); };
  const int jobs = static_cast<int>(state.range(1));
  for (auto _ : state) {
    auto out = map_parallel(std::span<const BlowupWord>(f.words), term, jobs);
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.words.size()));
}

}  // namespace

BENCHMARK(BM_IdentitySerial)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_IdentityParallel)->Args({2, 0})->Args({3, 0})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

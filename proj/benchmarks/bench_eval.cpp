#include <benchmark/benchmark.h>

#include <random>

#include "ctldl/bench.hpp"
#include "ctldl/database.hpp"
#include "ctldl/decision.hpp"
#include "ctldl/model_check.hpp"
#include "ctldl/std_bridge.hpp"

namespace {

using namespace ctldl;

const StdProgram& query_tree() {
  static const StdProgram tree = ctl_to_std(
      to_enf(Formula::exists_until(Formula::atom(0), Formula::atom(1))), 2);
  return tree;
}

void BM_ModelCheck(benchmark::State& state) {
  const Database d = bench_database(static_cast<int>(state.range(0)), 7);
  const KripkeStructure k = db_to_kripke(d);
  const ModelChecker mc(k);
  const CompiledFormula cf = CompiledFormula::compile(std_to_ctl(query_tree()));
  for (auto _ : state) {
    benchmark::DoNotOptimize(mc.check(cf));
  }
}
BENCHMARK(BM_ModelCheck)->Arg(1000)->Arg(4000)->Arg(16000);

void BM_EvalViaCtl(benchmark::State& state) {
  const Database d = bench_database(static_cast<int>(state.range(0)), 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate_std_via_ctl(query_tree(), d));
  }
}
BENCHMARK(BM_EvalViaCtl)->Arg(1000)->Arg(4000)->Arg(16000);

void BM_EvalDatalog(benchmark::State& state) {
  const Database d = bench_database(static_cast<int>(state.range(0)), 7);
  const FactStore facts = database_to_facts(d);
  Engine engine(flatten(query_tree()));
  for (auto _ : state) {
    benchmark::DoNotOptimize(engine.run(facts));
  }
}
BENCHMARK(BM_EvalDatalog)->Arg(1000)->Arg(4000)->Arg(16000);

void BM_TransitiveClosure(benchmark::State& state) {
  const datalog::Program p =
      parse_program("T(X,Y) :- R(X,Y).\nT(X,Y) :- R(X,Z), T(Z,Y).\n");
  const Database d = bench_database(static_cast<int>(state.range(0)), 11);
  const FactStore facts = database_to_facts(d);
  for (auto _ : state) {
    Engine engine(p);
    benchmark::DoNotOptimize(engine.run(facts));
  }
}
BENCHMARK(BM_TransitiveClosure)->Arg(200)->Arg(800);

void BM_MaskEvaluation(benchmark::State& state) {
  Engine engine(flatten(query_tree()));
  const int sr = engine.edb_slot("R"), s0 = engine.edb_slot("P0"), s1 = engine.edb_slot("P1");
  std::mt19937 rng(3);
  std::uniform_int_distribution<std::uint64_t> bits;
  for (auto _ : state) {
    const std::uint64_t trans = bits(rng) | 0x01010101ULL;  // keep it total-ish
    const std::pair<int, std::uint64_t> edb[3] = {
        {sr, trans & 0x0F0F0F0FULL}, {s0, bits(rng) & 0xF}, {s1, bits(rng) & 0xF}};
    benchmark::DoNotOptimize(
        engine.run_goal_mask_slots(std::span<const std::pair<int, std::uint64_t>>(edb, 3)));
  }
}
BENCHMARK(BM_MaskEvaluation);

void BM_BoundedSat(benchmark::State& state) {
  const Formula f = Formula::conjunction(Formula::exists_next(Formula::atom(0)),
                                         Formula::negation(Formula::atom(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(bounded_satisfiable(f, static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_BoundedSat)->Arg(2)->Arg(3);

}  // namespace

BENCHMARK_MAIN();

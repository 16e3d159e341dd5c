#include "ctldl/bench.hpp"

#include <chrono>
#include <random>

#include "ctldl/decision.hpp"
#include "ctldl/std_bridge.hpp"

namespace ctldl {

Database bench_database(int transitions, unsigned seed) {
  std::mt19937 rng(seed);
  const int n = std::max(transitions / 4, 2);
  Database d;
  for (int i = 0; i < n; ++i) d.intern("n" + std::to_string(i));
  std::uniform_int_distribution<int> node(0, n - 1);
  // a spanning cycle keeps the relation total, the rest is random
  for (int s = 0; s < n; ++s) d.r.emplace_back(s, (s + 1) % n);
  for (int i = n; i < transitions; ++i) d.r.emplace_back(node(rng), node(rng));
  d.unary.assign(2, {});
  std::uniform_int_distribution<int> coin(0, 9);
  for (int s = 0; s < n; ++s) {
    if (coin(rng) < 3) d.unary[0].push_back(s);
    if (coin(rng) < 2) d.unary[1].push_back(s);
  }
  d.normalize();
  return d;
}

std::vector<BenchRow> run_bench(const std::vector<int>& sizes, int repetitions, unsigned seed) {
  using clock = std::chrono::steady_clock;
  const StdProgram query = ctl_to_std(
      to_enf(Formula::exists_until(Formula::atom(0), Formula::atom(1))), 2);
  const datalog::Program flat = flatten(query);

  std::vector<BenchRow> rows;
  for (int size : sizes) {
    const Database d = bench_database(size, seed);

    double best_via = -1, best_direct = -1;
    for (int rep = 0; rep < std::max(repetitions, 1); ++rep) {
      const auto t0 = clock::now();
      const FactStore via = evaluate_std_via_ctl(query, d);
      const auto t1 = clock::now();
      const FactStore facts = database_to_facts(d);
      const FactStore direct = evaluate(flat, facts);
      const auto t2 = clock::now();

      if (!same_relation(via, direct, "G")) {
        throw InternalError("bench: the two evaluation routes disagree");
      }
      const double via_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
      const double direct_ms = std::chrono::duration<double, std::milli>(t2 - t1).count();
      if (best_via < 0 || via_ms < best_via) best_via = via_ms;
      if (best_direct < 0 || direct_ms < best_direct) best_direct = direct_ms;
    }
    rows.push_back({size, "via-ctl", best_via});
    rows.push_back({size, "datalog", best_direct});
  }
  return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::string out = "size,route,millis\n";
  for (const auto& row : rows) {
    out += std::to_string(row.size) + "," + row.route + "," + std::to_string(row.millis) + "\n";
  }
  return out;
}

}  // namespace ctldl

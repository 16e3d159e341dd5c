#pragma once

#include <string>
#include <vector>

#include "ctldl/database.hpp"

namespace ctldl {

struct BenchRow {
  int size = 0;          // transition count of the input database
  std::string route;     // "via-ctl" or "datalog"
  double millis = 0.0;
};

// Fixed query (the flattening of E[ p0 U p1 ]) over seeded random total
// structures with the requested transition counts. Each row reports the best
// of `repetitions` runs of one evaluation route, conversion included.
std::vector<BenchRow> run_bench(const std::vector<int>& sizes, int repetitions = 3,
                                unsigned seed = 12345);

// Header `size,route,millis`, one row per line.
std::string bench_csv(const std::vector<BenchRow>& rows);

// The seeded structure generator used by the rows above.
Database bench_database(int transitions, unsigned seed);

}  // namespace ctldl

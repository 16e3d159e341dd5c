#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>

#include "ctldl/database.hpp"
#include "ctldl/formula.hpp"
#include "ctldl/kripke.hpp"
#include "ctldl/std_bridge.hpp"

namespace ctldl {

struct Witness {
  KripkeStructure structure;
  int state = 0;
};

// Outcome of a bounded search over total structures. Witness-backed verdicts
// (Holds for satisfiability, CounterexampleFound for containment) stay stable
// as the bound grows; the others may change once more states are searched,
// unless `decisive` reports that the bounded-model threshold was reached.
struct BoundedVerdict {
  enum class Kind { Holds, CounterexampleFound, ExhaustedBound };

  Kind kind = Kind::ExhaustedBound;
  std::optional<Witness> witness;
  int bound_searched = 0;
  std::uint64_t completeness_threshold = 0;  // 2^|formula|, saturating
  bool decisive = false;
};

// 2^size(f), saturating at the largest representable value.
std::uint64_t bounded_model_threshold(const Formula& f);

// Searches all total structures over f's atoms with up to max_states states,
// smallest first, pruned to one representative per isomorphism class rooted
// at state 0 (a satisfying structure can always be shrunk to the part
// reachable from the satisfying state, so rooted enumeration is complete).
// Returns Holds with the first witness, or ExhaustedBound.
BoundedVerdict bounded_satisfiable(const Formula& f, int max_states,
                                   std::span<const std::string> atoms = {});

// Containment of truth sets over every finite structure, decided up to the
// bound via satisfiability of f1 and not-f2. No counterexample up to the
// bound yields Holds, decisive only past the threshold (or when the two
// formulas are structurally equal).
BoundedVerdict bounded_contained(const Formula& f1, const Formula& f2, int max_states,
                                 std::span<const std::string> atoms = {});

// Containment of goal relations over every database, through the formula
// route. A counterexample witness converts to a database with kripke_to_db.
BoundedVerdict std_contained(const StdProgram& p1, const StdProgram& p2, int max_states);

// The satisfiability reduction for the binary path predicate of an
// until-tilde subprogram: phi and not exists (true until psi1).
Formula b_sat_reduction(const Formula& phi, const Formula& psi1);

// Evaluates a program on a Kripke-schema database by translating both sides
// and model checking; the result holds the goal relation only.
FactStore evaluate_std_via_ctl(const StdProgram& p, const Database& d);

// Enumeration of total structures, one representative per isomorphism class.
// `shard`/`num_shards` partition the candidate space for parallel drivers;
// max_outdegree 0 means unrestricted. State names are s0, s1, ...; atoms are
// p0, p1, ... unless `atoms` overrides them.
void for_each_total_structure_class(int num_states, int num_atoms,
                                    const std::function<void(const KripkeStructure&)>& fn,
                                    int max_outdegree = 0, int shard = 0, int num_shards = 1,
                                    std::span<const std::string> atoms = {});

}  // namespace ctldl

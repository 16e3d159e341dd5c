#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "ctldl/facts.hpp"

namespace ctldl {

namespace datalog {

struct Term {
  enum class Kind : std::uint8_t { Variable, Constant, Integer, VariableMinusOne, CMax };
  Kind kind = Kind::Variable;
  std::string name;  // Variable / Constant / VariableMinusOne
  int value = 0;     // Integer

  static Term var(std::string n) { return {Kind::Variable, std::move(n), 0}; }
  static Term var_minus_one(std::string n) { return {Kind::VariableMinusOne, std::move(n), 0}; }
  static Term constant(std::string n) { return {Kind::Constant, std::move(n), 0}; }
  static Term integer(int v) { return {Kind::Integer, "", v}; }
  // The symbolic counter ceiling, resolved by evaluate_succ's c_max.
  static Term cmax() { return {Kind::CMax, "", 0}; }

  bool operator==(const Term&) const = default;
};

struct Atom {
  std::string pred;
  std::vector<Term> args;

  bool operator==(const Atom&) const = default;
};

struct Literal {
  bool negated = false;
  Atom atom;

  bool operator==(const Literal&) const = default;
};

// Counter range constraint `Var <= bound`; a missing bound is the symbolic
// `cmax`, resolved by evaluate_succ's c_max argument.
struct CounterGuard {
  std::string var;
  std::optional<int> bound;

  bool operator==(const CounterGuard&) const = default;
};

struct Rule {
  Atom head;
  std::vector<Literal> body;
  std::vector<CounterGuard> guards;

  bool operator==(const Rule&) const = default;
};

struct Program {
  std::vector<Rule> rules;
  std::string goal;

  bool operator==(const Program&) const = default;
};

}  // namespace datalog

// Grammar: `Head(Args) :- Lit, ..., Lit.`; facts are bodyless rules; `!Atom`
// negation; counter guards `N <= 3` / `N <= cmax`; counter terms `N`, `N-1`,
// integer literals. Uppercase-initial terms are variables, lowercase are
// constants. `%` starts a comment; `% goal: G` names the goal predicate.
datalog::Program parse_program(std::string_view text);
std::string render_program(const datalog::Program& p);
std::string render_rule(const datalog::Rule& r);

std::vector<std::string> idb_predicates(const datalog::Program& p);
bool is_idb(const datalog::Program& p, std::string_view pred);

// Throws InputError (naming the rule index) when a head variable, a variable
// of a negated literal, or a guard variable has no positive binding.
void check_safety(const datalog::Program& p);

// Arcs run from a body predicate to the head predicate; only IDB predicates
// appear. An arc is negation-marked when some rule uses the source negated.
struct DependencyGraph {
  std::vector<std::string> nodes;
  std::set<std::tuple<std::string, std::string, bool>> arcs;  // (from, to, negated)
};

DependencyGraph dependency_graph(const datalog::Program& p);

struct Stratification {
  std::map<std::string, int> strata;  // every predicate; EDBs at 0
  int num_strata = 1;
};

// Minimal stratification (longest negation-weighted path); throws InputError
// with an offending cycle when the program is not stratifiable.
Stratification stratify(const datalog::Program& p);

// Checks str() against the stratification conditions for every rule.
bool valid_stratification(const datalog::Program& p, const Stratification& s);

struct EngineOptions {
  // Enables counter semantics with values ranging over 1..c_max.
  std::optional<int> c_max;
  // Skip the bitmask fast path even when the instance fits it.
  bool force_generic = false;
  // Evaluate with this stratification instead of the minimal one.
  std::optional<Stratification> stratification;
};

// A stratified program compiled for repeated bottom-up evaluation: semi-naive
// within each stratum, strata in ascending order. Instances whose domain fits
// into 8 interned constants (and counters up to 8) run on single-word
// bitmask relations; everything else takes the generic tuple path.
class Engine {
 public:
  explicit Engine(datalog::Program program, EngineOptions options = {});
  ~Engine();
  Engine(Engine&&) noexcept;
  Engine& operator=(Engine&&) noexcept;

  // Evaluates against EDB facts; the result holds every IDB relation and
  // shares the input's symbol table. Not thread-safe; use one Engine per
  // thread for concurrent evaluation.
  FactStore run(const FactStore& edb);

  // Hot path for tiny domains: EDB relations passed as premapped masks
  // (unary: bit s; binary: bit 8*a+b; counter value v maps to field v-1).
  // Missing predicates are empty. Returns the goal relation's mask.
  std::uint64_t run_goal_mask(std::span<const std::pair<std::string_view, std::uint64_t>> edb,
                              int domain_size);

  // Slot-resolved variant for repeated calls; slots come from edb_slot(), and
  // entries with slot -1 are ignored.
  int edb_slot(std::string_view name) const;
  std::uint64_t run_goal_mask_slots(std::span<const std::pair<int, std::uint64_t>> edb);

  const datalog::Program& program() const;
  const Stratification& stratification() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// One-shot wrappers. evaluate() rejects programs that use counters.
FactStore evaluate(const datalog::Program& p, const FactStore& edb);
FactStore evaluate_succ(const datalog::Program& p, const FactStore& edb, int c_max);

}  // namespace ctldl

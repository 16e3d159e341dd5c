#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ctldl/database.hpp"
#include "ctldl/datalog.hpp"
#include "ctldl/formula.hpp"
#include "ctldl/kripke.hpp"

namespace ctldl {

enum class TdsOpKind : std::uint8_t {
  Atom,
  NegAtom,
  Top,
  And,
  Or,
  ExNext,
  AllNext,
  ExUntil,
  AllUntil,
  ExUntilTilde,
  AllUntilTilde,
};

int tds_arity(TdsOpKind kind);

// Operator tree over the split Kripke schema S0/S1, P0..P{num_unary-1}.
// Flattening yields Datalog with negation only on the unary EDBs and on the
// shared two-successor predicate 2S; the all-paths until-tilde operator adds
// a bounded counter predicate evaluated with evaluate_succ.
class TdsProgram {
 public:
  static TdsProgram atom_leaf(int atom_index, int num_unary);
  static TdsProgram neg_atom_leaf(int atom_index, int num_unary);
  static TdsProgram top_leaf(int num_unary);
  static TdsProgram build(TdsOpKind kind, std::vector<TdsProgram> children, int num_unary);

  TdsOpKind kind() const { return node_->kind; }
  int atom_index() const;
  TdsProgram child(int i) const;
  int arity() const { return tds_arity(kind()); }
  int num_unary() const { return node_->num_unary; }
  std::size_t node_count() const { return node_->count; }
  bool uses_counters() const { return node_->counters; }

  bool operator==(const TdsProgram& other) const;
  bool operator!=(const TdsProgram& other) const { return !(*this == other); }

  std::string to_sexpr() const;

 private:
  struct Node {
    TdsOpKind kind;
    int atom = -1;
    int num_unary = 1;
    std::size_t count = 1;
    bool counters = false;
    std::shared_ptr<const Node> child0, child1;
  };
  explicit TdsProgram(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// Formula (positive normal form, over num_atoms atoms) -> operator tree.
// Throws InputError when f is not in PNF. A negated-true leaf becomes the
// empty-valued conjunction P0 and not-P0, the only falsity the class offers.
TdsProgram ctl_to_tds(const Formula& f, int num_atoms);

// Flattens to the successor dialect. A concrete c_max instantiates counter
// guards and the counter goal rule; std::nullopt leaves the symbolic `cmax`
// to be resolved by evaluate_succ.
datalog::Program flatten_tds(const TdsProgram& p, std::optional<int> c_max);

// Full pipeline: to_pnf, translate, flatten with c_max = |W|, split the
// structure with `order`, evaluate bottom-up, read back the goal states.
// Requires k total with outdegree <= 2.
StateSet eval_tds(const Formula& f, const KripkeStructure& k, const StateOrder& order = {});

// All-paths until over first-child/next-sibling encodings of arbitrary
// finite branching: emits the goal/sibling rules over S0 and Next joined with
// the flattened operand programs and the domain rules (extended with the
// Next endpoints so sibling chains stay in the domain).
datalog::Program unbounded_au_translate(const TdsProgram& left, const TdsProgram& right);

}  // namespace ctldl

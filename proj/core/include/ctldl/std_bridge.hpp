#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ctldl/datalog.hpp"
#include "ctldl/formula.hpp"

namespace ctldl {

enum class StdOpKind : std::uint8_t { Atom, Top, Not, And, Next, Until, UntilTilde };

int std_arity(StdOpKind kind);

// Operator tree over the Kripke schema R, P0..P{num_unary-1}. Flattening
// produces one goal predicate per node (fresh G1..Gk in post-order, the root
// keeps G), one B predicate per until-tilde node, and the shared A and W
// predicates at most once.
class StdProgram {
 public:
  static StdProgram atom_leaf(int atom_index, int num_unary);
  static StdProgram top_leaf(int num_unary);
  static StdProgram build(StdOpKind kind, std::vector<StdProgram> children, int num_unary);

  StdOpKind kind() const { return node_->kind; }
  int atom_index() const;
  StdProgram child(int i) const;
  int arity() const { return std_arity(kind()); }
  int num_unary() const { return node_->num_unary; }
  std::size_t node_count() const { return node_->count; }

  bool operator==(const StdProgram& other) const;
  bool operator!=(const StdProgram& other) const { return !(*this == other); }

  std::string to_sexpr() const;

 private:
  struct Node {
    StdOpKind kind;
    int atom = -1;
    int num_unary = 1;
    std::size_t count = 1;
    std::shared_ptr<const Node> child0, child1;
  };
  explicit StdProgram(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// Formula (existential normal form, over num_atoms atoms) -> operator tree.
// Throws InputError when f is not in ENF.
StdProgram ctl_to_std(const Formula& f, int num_atoms);

// Operator tree -> formula; the exact inverse of ctl_to_std on ENF input.
Formula std_to_ctl(const StdProgram& p);

// Emits the rule sets of all nodes (post-order), then the shared A rule and
// the W rules when some node needs them. The goal predicate is G.
datalog::Program flatten(const StdProgram& p);

// Matches a program against the operator schemata, up to predicate renaming
// and rule/literal reordering; throws InputError("not in STD: ...") when some
// rule group fits no schema or rules are left over.
StdProgram recognize_std(const datalog::Program& p);

}  // namespace ctldl

#pragma once

#include <cstdint>
#include <vector>

#include "ctldl/formula.hpp"
#include "ctldl/kripke.hpp"

namespace ctldl {

// Flat postorder form of a formula; lets hot loops re-check one formula
// against many structures without walking shared_ptr trees.
struct CompiledFormula {
  struct Op {
    FormulaKind kind;
    int atom = -1;
    int lhs = -1;
    int rhs = -1;
  };
  std::vector<Op> ops;  // root is ops.back()
  int max_atom = -1;

  static CompiledFormula compile(const Formula& f);
};

// Labels states bottom-up over the subformulas: EX/AX by direct successor
// inspection, EU as a least fixpoint, E-until-tilde as a backward fixpoint
// seeded by both-operand states and states on right-operand cycles. The A
// forms of until are evaluated through their E duals. Requires a total
// transition relation.
class ModelChecker {
 public:
  explicit ModelChecker(const KripkeStructure& k);

  StateSet check(const Formula& f) const;
  StateSet check(const CompiledFormula& cf) const;

  // Mask variant, only valid when the structure has at most 64 states.
  std::uint64_t check_mask(const CompiledFormula& cf) const;

  int num_states() const { return n_; }

 private:
  StateSet check_large(const CompiledFormula& cf) const;

  const KripkeStructure* k_;
  int n_;
  std::vector<std::vector<int>> succ_;
  std::vector<std::vector<int>> pred_;
  // Small-structure fast path.
  std::vector<std::uint64_t> succ_mask_;
  std::vector<std::uint64_t> atom_mask_;
  std::uint64_t all_mask_ = 0;
};

// The truth set of f over k.
StateSet model_check(const KripkeStructure& k, const Formula& f);

// Truth-set mask over a structure with n <= 8 states packed into one word:
// transition bit 8*s+t, one state mask per atom. For drivers that stream
// many small structures without building KripkeStructure objects.
std::uint64_t check_mask_packed(const CompiledFormula& cf, int n, std::uint64_t trans_rows,
                                std::span<const std::uint64_t> atom_masks);

// Independent oracle: decides the E-quantified path operators by enumerating
// every lasso with a simple prefix (prefix length <= |W|, so total length
// <= 2|W|) and checking the path semantics position by position; A forms go
// through their E duals. Only usable on small structures.
StateSet truth_oracle(const KripkeStructure& k, const Formula& f, int max_states = 6);

}  // namespace ctldl

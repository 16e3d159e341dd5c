#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ctldl/errors.hpp"

namespace ctldl {

enum class FormulaKind : std::uint8_t {
  True,
  False,
  Atom,
  Not,
  And,
  Or,
  ExistsNext,
  ForallNext,
  ExistsUntil,
  ForallUntil,
  ExistsUntilTilde,
  ForallUntilTilde,
};

bool is_binary(FormulaKind kind);
bool is_unary(FormulaKind kind);

// Immutable CTL formula tree. Atoms are dense indices into an atom list that
// is carried alongside the formula (see ParsedFormula). Copies share nodes.
class Formula {
 public:
  Formula() : Formula(make_true()) {}

  static Formula make_true();
  static Formula make_false();
  static Formula atom(int index);
  static Formula negation(Formula f);
  static Formula conjunction(Formula l, Formula r);
  static Formula disjunction(Formula l, Formula r);
  static Formula exists_next(Formula f);
  static Formula forall_next(Formula f);
  static Formula exists_until(Formula l, Formula r);
  static Formula forall_until(Formula l, Formula r);
  static Formula exists_until_tilde(Formula l, Formula r);
  static Formula forall_until_tilde(Formula l, Formula r);
  static Formula make(FormulaKind kind, std::vector<Formula> children, int atom_index = -1);

  FormulaKind kind() const { return node_->kind; }
  int atom_index() const;
  Formula left() const;
  Formula right() const;
  int arity() const;

  // Number of AST nodes.
  std::size_t size() const { return node_->size; }
  // Largest atom index used, -1 if the formula is propositional-constant only.
  int max_atom() const { return node_->max_atom; }
  std::size_t depth() const { return node_->depth; }

  bool operator==(const Formula& other) const;
  bool operator!=(const Formula& other) const { return !(*this == other); }

 private:
  struct Node {
    FormulaKind kind;
    int atom = -1;
    std::shared_ptr<const Node> child0;
    std::shared_ptr<const Node> child1;
    std::size_t size = 1;
    std::size_t depth = 1;
    int max_atom = -1;
  };

  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static Formula build(FormulaKind kind, int atom, const Formula* l, const Formula* r);

  std::shared_ptr<const Node> node_;

  friend struct FormulaHash;
};

struct FormulaHash {
  std::size_t operator()(const Formula& f) const;
};

// A formula plus the atom names it was parsed against, index-aligned.
struct ParsedFormula {
  Formula formula;
  std::vector<std::string> atoms;
};

// Grammar: true | false | name | !f | f & g | f | g | EX f | AX f |
// E[ f U g ] | A[ f U g ] | E[ f ~U g ] | A[ f ~U g ] | ( f ),
// with precedence ! > & > |.  '#' starts a line comment.
// Atom names are lowercase alphanumerics, numbered in first-occurrence order.
ParsedFormula parse_formula(std::string_view text);

// Parses against a fixed atom list instead of interning new names.
Formula parse_formula_with_atoms(std::string_view text, std::span<const std::string> atoms);

std::string render_formula(const Formula& f, std::span<const std::string> atoms);
std::string render_formula(const ParsedFormula& pf);

// Existential normal form: no A quantifier, no disjunction, falsity only as
// !true. Preserves the truth set on every structure.
Formula to_enf(const Formula& f);

// Positive normal form: negation only directly above atoms and true.
Formula to_pnf(const Formula& f);

bool is_enf(const Formula& f);
bool is_pnf(const Formula& f);

// Remaps atom indices from one atom list onto another; throws InputError if a
// used atom is missing from `to`.
Formula reindex_atoms(const Formula& f, std::span<const std::string> from,
                      std::span<const std::string> to);

}  // namespace ctldl

#include "ctldl/tds_bridge.hpp"

#include <algorithm>
#include <functional>

namespace ctldl {

using datalog::Atom;
using datalog::CounterGuard;
using datalog::Literal;
using datalog::Program;
using datalog::Rule;
using datalog::Term;

int tds_arity(TdsOpKind kind) {
  switch (kind) {
    case TdsOpKind::Atom:
    case TdsOpKind::NegAtom:
    case TdsOpKind::Top:
      return 0;
    case TdsOpKind::ExNext:
    case TdsOpKind::AllNext:
      return 1;
    default:
      return 2;
  }
}

namespace {

TdsOpKind leaf_checked(TdsOpKind kind, int atom_index, int num_unary) {
  if (num_unary < 1) throw InputError("a program needs at least one unary predicate");
  if (kind != TdsOpKind::Top && (atom_index < 0 || atom_index >= num_unary)) {
    throw InputError("atom index " + std::to_string(atom_index) + " outside P0..P" +
                     std::to_string(num_unary - 1));
  }
  return kind;
}

}  // namespace

TdsProgram TdsProgram::atom_leaf(int atom_index, int num_unary) {
  auto node = std::make_shared<Node>();
  node->kind = leaf_checked(TdsOpKind::Atom, atom_index, num_unary);
  node->atom = atom_index;
  node->num_unary = num_unary;
  return TdsProgram(std::move(node));
}

TdsProgram TdsProgram::neg_atom_leaf(int atom_index, int num_unary) {
  auto node = std::make_shared<Node>();
  node->kind = leaf_checked(TdsOpKind::NegAtom, atom_index, num_unary);
  node->atom = atom_index;
  node->num_unary = num_unary;
  return TdsProgram(std::move(node));
}

TdsProgram TdsProgram::top_leaf(int num_unary) {
  auto node = std::make_shared<Node>();
  node->kind = leaf_checked(TdsOpKind::Top, 0, num_unary);
  node->num_unary = num_unary;
  return TdsProgram(std::move(node));
}

TdsProgram TdsProgram::build(TdsOpKind kind, std::vector<TdsProgram> children, int num_unary) {
  const int want = tds_arity(kind);
  if (want == 0) throw InputError("leaf nodes are built with their leaf constructors");
  if (static_cast<int>(children.size()) != want) {
    throw InputError("operator arity mismatch: expected " + std::to_string(want) + " children");
  }
  for (const auto& c : children) {
    if (c.num_unary() != num_unary) {
      throw InputError("children must range over the same unary predicates");
    }
  }
  auto node = std::make_shared<Node>();
  node->kind = kind;
  node->num_unary = num_unary;
  node->counters = kind == TdsOpKind::AllUntilTilde;
  if (want >= 1) {
    node->child0 = children[0].node_;
    node->count += children[0].node_count();
    node->counters = node->counters || children[0].uses_counters();
  }
  if (want >= 2) {
    node->child1 = children[1].node_;
    node->count += children[1].node_count();
    node->counters = node->counters || children[1].uses_counters();
  }
  return TdsProgram(std::move(node));
}

int TdsProgram::atom_index() const {
  if (node_->kind != TdsOpKind::Atom && node_->kind != TdsOpKind::NegAtom) {
    throw InternalError("atom_index on a non-atom node");
  }
  return node_->atom;
}

TdsProgram TdsProgram::child(int i) const {
  const auto& c = i == 0 ? node_->child0 : node_->child1;
  if (i < 0 || i > 1 || !c) throw InternalError("tds child index out of range");
  return TdsProgram(c);
}

bool TdsProgram::operator==(const TdsProgram& other) const {
  if (node_ == other.node_) return true;
  if (kind() != other.kind() || node_->atom != other.node_->atom ||
      num_unary() != other.num_unary() || node_count() != other.node_count()) {
    return false;
  }
  for (int i = 0; i < arity(); ++i) {
    if (!(child(i) == other.child(i))) return false;
  }
  return true;
}

std::string TdsProgram::to_sexpr() const {
  const auto binary = [&](const char* tag) {
    return std::string("(") + tag + " " + child(0).to_sexpr() + " " + child(1).to_sexpr() + ")";
  };
  switch (kind()) {
    case TdsOpKind::Atom: return "(atom p" + std::to_string(node_->atom) + ")";
    case TdsOpKind::NegAtom: return "(neg-atom p" + std::to_string(node_->atom) + ")";
    case TdsOpKind::Top: return "true";
    case TdsOpKind::And: return binary("and");
    case TdsOpKind::Or: return binary("or");
    case TdsOpKind::ExNext: return "(ex-next " + child(0).to_sexpr() + ")";
    case TdsOpKind::AllNext: return "(all-next " + child(0).to_sexpr() + ")";
    case TdsOpKind::ExUntil: return binary("ex-until");
    case TdsOpKind::AllUntil: return binary("all-until");
    case TdsOpKind::ExUntilTilde: return binary("ex-until-tilde");
    case TdsOpKind::AllUntilTilde: return binary("all-until-tilde");
  }
  return {};
}

// ---------------------------------------------------------------------------
// Translation

TdsProgram ctl_to_tds(const Formula& f, int num_atoms) {
  if (!is_pnf(f)) {
    throw InputError("ctl_to_tds requires positive normal form; run to_pnf first");
  }
  if (num_atoms <= f.max_atom()) {
    throw InputError("num_atoms must cover every atom used by the formula");
  }
  const int num_unary = std::max(num_atoms, 1);
  const std::function<TdsProgram(const Formula&)> go = [&](const Formula& g) -> TdsProgram {
    switch (g.kind()) {
      case FormulaKind::Atom: return TdsProgram::atom_leaf(g.atom_index(), num_unary);
      case FormulaKind::True: return TdsProgram::top_leaf(num_unary);
      case FormulaKind::Not:
        // PNF negation sits over an atom or over true; the negated-true case
        // has no operator of its own, so use the empty conjunction P0 & !P0.
        if (g.left().kind() == FormulaKind::Atom) {
          return TdsProgram::neg_atom_leaf(g.left().atom_index(), num_unary);
        }
        return TdsProgram::build(
            TdsOpKind::And,
            {TdsProgram::atom_leaf(0, num_unary), TdsProgram::neg_atom_leaf(0, num_unary)},
            num_unary);
      case FormulaKind::And:
        return TdsProgram::build(TdsOpKind::And, {go(g.left()), go(g.right())}, num_unary);
      case FormulaKind::Or:
        return TdsProgram::build(TdsOpKind::Or, {go(g.left()), go(g.right())}, num_unary);
      case FormulaKind::ExistsNext:
        return TdsProgram::build(TdsOpKind::ExNext, {go(g.left())}, num_unary);
      case FormulaKind::ForallNext:
        return TdsProgram::build(TdsOpKind::AllNext, {go(g.left())}, num_unary);
      case FormulaKind::ExistsUntil:
        return TdsProgram::build(TdsOpKind::ExUntil, {go(g.left()), go(g.right())}, num_unary);
      case FormulaKind::ForallUntil:
        return TdsProgram::build(TdsOpKind::AllUntil, {go(g.left()), go(g.right())}, num_unary);
      case FormulaKind::ExistsUntilTilde:
        return TdsProgram::build(TdsOpKind::ExUntilTilde, {go(g.left()), go(g.right())},
                                 num_unary);
      case FormulaKind::ForallUntilTilde:
        return TdsProgram::build(TdsOpKind::AllUntilTilde, {go(g.left()), go(g.right())},
                                 num_unary);
      default:
        throw InternalError("ctl_to_tds: non-PNF node slipped through");
    }
  };
  return go(f);
}

// ---------------------------------------------------------------------------
// Flattening

namespace {

Term V(const char* name) { return Term::var(name); }

Rule rule(Atom head, std::vector<Literal> body, std::vector<CounterGuard> guards = {}) {
  Rule r;
  r.head = std::move(head);
  r.body = std::move(body);
  r.guards = std::move(guards);
  return r;
}

Literal pos(std::string pred, std::vector<Term> args) {
  return Literal{false, Atom{std::move(pred), std::move(args)}};
}

Literal neg(std::string pred, std::vector<Term> args) {
  return Literal{true, Atom{std::move(pred), std::move(args)}};
}

struct TdsFlattener {
  Program out;
  std::optional<int> c_max;
  int next_goal = 1;
  int next_b = 1;
  int next_c = 1;
  bool need_2s = false;
  bool need_w = false;
  bool with_next_rules = false;  // extend the domain with sibling endpoints

  CounterGuard guard(const char* var) const {
    CounterGuard g;
    g.var = var;
    if (c_max) g.bound = *c_max;
    return g;
  }

  // Both successor relations drive the same rule shape in several operators.
  void each_succ(const std::function<void(const char*)>& emit) {
    emit("S0");
    emit("S1");
  }

  std::string emit(const TdsProgram& node, bool is_root) {
    std::vector<std::string> kids;
    for (int i = 0; i < node.arity(); ++i) kids.push_back(emit(node.child(i), false));
    const std::string g = is_root ? "G" : "G" + std::to_string(next_goal++);
    const std::string p_i =
        node.arity() == 0 && node.kind() != TdsOpKind::Top ? "P" + std::to_string(node.atom_index()) : "";
    switch (node.kind()) {
      case TdsOpKind::Atom:
        out.rules.push_back(rule(Atom{g, {V("X")}}, {pos(p_i, {V("X")})}));
        break;
      case TdsOpKind::NegAtom:
        // Domain-guarded for safety; negation still touches only the EDB.
        need_w = true;
        out.rules.push_back(rule(Atom{g, {V("X")}}, {pos("W", {V("X")}), neg(p_i, {V("X")})}));
        break;
      case TdsOpKind::Top:
        need_w = true;
        out.rules.push_back(rule(Atom{g, {V("X")}}, {pos("W", {V("X")})}));
        break;
      case TdsOpKind::And:
        out.rules.push_back(
            rule(Atom{g, {V("X")}}, {pos(kids[0], {V("X")}), pos(kids[1], {V("X")})}));
        break;
      case TdsOpKind::Or:
        out.rules.push_back(rule(Atom{g, {V("X")}}, {pos(kids[0], {V("X")})}));
        out.rules.push_back(rule(Atom{g, {V("X")}}, {pos(kids[1], {V("X")})}));
        break;
      case TdsOpKind::ExNext:
        each_succ([&](const char* s) {
          out.rules.push_back(
              rule(Atom{g, {V("X")}}, {pos(s, {V("X"), V("Y")}), pos(kids[0], {V("Y")})}));
        });
        break;
      case TdsOpKind::AllNext:
        need_2s = true;
        out.rules.push_back(rule(Atom{g, {V("X")}}, {pos("S0", {V("X"), V("Y")}),
                                                     neg("2S", {V("X")}), pos(kids[0], {V("Y")})}));
        out.rules.push_back(rule(Atom{g, {V("X")}},
                                 {pos("S0", {V("X"), V("Y")}), pos("S1", {V("X"), V("Z")}),
                                  pos(kids[0], {V("Y")}), pos(kids[0], {V("Z")})}));
        break;
      case TdsOpKind::ExUntil:
        out.rules.push_back(rule(Atom{g, {V("X")}}, {pos(kids[1], {V("X")})}));
        each_succ([&](const char* s) {
          out.rules.push_back(rule(Atom{g, {V("X")}}, {pos(kids[0], {V("X")}),
                                                       pos(s, {V("X"), V("Y")}), pos(g, {V("Y")})}));
        });
        break;
      case TdsOpKind::AllUntil:
        need_2s = true;
        out.rules.push_back(rule(Atom{g, {V("X")}}, {pos(kids[1], {V("X")})}));
        out.rules.push_back(rule(Atom{g, {V("X")}},
                                 {pos(kids[0], {V("X")}), pos("S0", {V("X"), V("Y")}),
                                  neg("2S", {V("X")}), pos(g, {V("Y")})}));
        out.rules.push_back(rule(Atom{g, {V("X")}},
                                 {pos(kids[0], {V("X")}), pos("S0", {V("X"), V("Y")}),
                                  pos("S1", {V("X"), V("Z")}), pos(g, {V("Y")}), pos(g, {V("Z")})}));
        break;
      case TdsOpKind::ExUntilTilde: {
        const std::string b = "B" + std::to_string(next_b++);
        out.rules.push_back(
            rule(Atom{g, {V("X")}}, {pos(kids[0], {V("X")}), pos(kids[1], {V("X")})}));
        out.rules.push_back(rule(Atom{g, {V("X")}}, {pos(b, {V("X"), V("X")})}));
        each_succ([&](const char* s) {
          out.rules.push_back(rule(Atom{g, {V("X")}}, {pos(kids[1], {V("X")}),
                                                       pos(s, {V("X"), V("Y")}), pos(g, {V("Y")})}));
        });
        each_succ([&](const char* s) {
          out.rules.push_back(rule(Atom{b, {V("X"), V("Y")}},
                                   {pos(kids[1], {V("X")}), pos(s, {V("X"), V("Y")}),
                                    pos(kids[1], {V("Y")})}));
        });
        each_succ([&](const char* s) {
          out.rules.push_back(rule(Atom{b, {V("X"), V("Y")}},
                                   {pos(kids[1], {V("X")}), pos(s, {V("X"), V("U")}),
                                    pos(b, {V("U"), V("Y")})}));
        });
        break;
      }
      case TdsOpKind::AllUntilTilde: {
        need_2s = true;
        const std::string c = "C" + std::to_string(next_c++);
        out.rules.push_back(
            rule(Atom{g, {V("X")}}, {pos(kids[0], {V("X")}), pos(kids[1], {V("X")})}));
        out.rules.push_back(rule(
            Atom{g, {V("X")}},
            {pos(c, {V("X"), c_max ? Term::integer(*c_max) : Term::cmax()})}));
        out.rules.push_back(rule(Atom{g, {V("X")}},
                                 {pos(kids[1], {V("X")}), pos("S0", {V("X"), V("Y")}),
                                  neg("2S", {V("X")}), pos(g, {V("Y")})}));
        out.rules.push_back(rule(Atom{g, {V("X")}},
                                 {pos(kids[1], {V("X")}), pos("S0", {V("X"), V("Y")}),
                                  pos("S1", {V("X"), V("Z")}), pos(g, {V("Y")}), pos(g, {V("Z")})}));
        out.rules.push_back(rule(Atom{c, {V("X"), V("N")}},
                                 {pos(kids[1], {V("X")}), pos("S0", {V("X"), V("Y")}),
                                  neg("2S", {V("X")}), pos(c, {V("Y"), Term::var_minus_one("N")})},
                                 {guard("N")}));
        out.rules.push_back(rule(Atom{c, {V("X"), V("N")}},
                                 {pos(kids[1], {V("X")}), pos("S0", {V("X"), V("Y")}),
                                  pos("S1", {V("X"), V("Z")}),
                                  pos(c, {V("Y"), Term::var_minus_one("N")}),
                                  pos(c, {V("Z"), Term::var_minus_one("N")})},
                                 {guard("N")}));
        out.rules.push_back(rule(Atom{c, {V("X"), V("N")}},
                                 {pos(kids[1], {V("X")}), pos("S0", {V("X"), V("Y")}),
                                  pos("S1", {V("X"), V("Z")}), pos(g, {V("Y")}),
                                  pos(c, {V("Z"), Term::var_minus_one("N")})},
                                 {guard("N")}));
        out.rules.push_back(rule(Atom{c, {V("X"), V("N")}},
                                 {pos(kids[1], {V("X")}), pos("S0", {V("X"), V("Y")}),
                                  pos("S1", {V("X"), V("Z")}),
                                  pos(c, {V("Y"), Term::var_minus_one("N")}), pos(g, {V("Z")})},
                                 {guard("N")}));
        out.rules.push_back(rule(Atom{c, {V("X"), Term::integer(1)}},
                                 {pos(kids[1], {V("X")}), pos("S0", {V("X"), V("Y")}),
                                  neg("2S", {V("X")}), pos(kids[1], {V("Y")})}));
        out.rules.push_back(rule(Atom{c, {V("X"), Term::integer(1)}},
                                 {pos(kids[1], {V("X")}), pos("S0", {V("X"), V("Y")}),
                                  pos("S1", {V("X"), V("Z")}), pos(kids[1], {V("Y")}),
                                  pos(kids[1], {V("Z")})}));
        break;
      }
    }
    return g;
  }

  void finish(int num_unary) {
    if (need_2s) {
      out.rules.push_back(rule(Atom{"2S", {V("X")}},
                               {pos("S0", {V("X"), V("Y")}), pos("S1", {V("X"), V("Z")})}));
    }
    if (need_w) {
      for (const char* s : {"S0", "S1"}) {
        out.rules.push_back(rule(Atom{"W", {V("X")}}, {pos(s, {V("X"), V("Y")})}));
        out.rules.push_back(rule(Atom{"W", {V("X")}}, {pos(s, {V("Y"), V("X")})}));
      }
      if (with_next_rules) {
        out.rules.push_back(rule(Atom{"W", {V("X")}}, {pos("Next", {V("X"), V("Y")})}));
        out.rules.push_back(rule(Atom{"W", {V("X")}}, {pos("Next", {V("Y"), V("X")})}));
      }
      for (int i = 0; i < num_unary; ++i) {
        out.rules.push_back(rule(Atom{"W", {V("X")}}, {pos("P" + std::to_string(i), {V("X")})}));
      }
    }
  }
};

}  // namespace

Program flatten_tds(const TdsProgram& p, std::optional<int> c_max) {
  if (c_max && *c_max < 1) throw InputError("c_max must be >= 1");
  TdsFlattener fl;
  fl.c_max = c_max;
  fl.out.goal = "G";
  fl.emit(p, true);
  fl.finish(p.num_unary());
  return fl.out;
}

StateSet eval_tds(const Formula& f, const KripkeStructure& k, const StateOrder& order) {
  const Formula pnf = to_pnf(f);
  const int num_atoms = static_cast<int>(k.ap.size());
  if (pnf.max_atom() >= num_atoms) {
    throw InputError("formula mentions an atom outside the structure's declared atom set");
  }
  const TdsProgram tree = ctl_to_tds(pnf, std::max(num_atoms, pnf.max_atom() + 1));
  const int c_max = k.num_states();
  const Program prog = flatten_tds(tree, c_max);
  const Database split = split_outdegree2(k, order);
  const FactStore edb = database_to_facts(split);
  const FactStore result = evaluate_succ(prog, edb, c_max);

  StateSet out;
  if (const Relation* rel = result.find("G"); rel != nullptr) {
    for (const auto& t : rel->tuples) out.push_back(t[0]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Program unbounded_au_translate(const TdsProgram& left, const TdsProgram& right) {
  if (left.num_unary() != right.num_unary()) {
    throw InputError("operands must range over the same unary predicates");
  }
  TdsFlattener fl;
  fl.out.goal = "G";
  fl.with_next_rules = true;
  const std::string g1 = fl.emit(left, false);
  const std::string g2 = fl.emit(right, false);

  fl.out.rules.push_back(rule(Atom{"G", {V("X")}}, {pos(g2, {V("X")})}));
  fl.out.rules.push_back(rule(Atom{"G", {V("X")}},
                              {pos(g1, {V("X")}), pos("S0", {V("X"), V("Y")}), pos("G", {V("Y")}),
                               pos("B", {V("Y")})}));
  fl.need_w = true;
  fl.out.rules.push_back(rule(Atom{"B", {V("X")}}, {pos("W", {V("X")}), neg("N", {V("X")})}));
  fl.out.rules.push_back(rule(Atom{"B", {V("X")}},
                              {pos("Next", {V("X"), V("Y")}), pos("G", {V("Y")}), pos("B", {V("Y")})}));
  fl.out.rules.push_back(rule(Atom{"N", {V("X")}}, {pos("Next", {V("X"), V("Y")})}));
  fl.finish(left.num_unary());
  return fl.out;
}

}  // namespace ctldl

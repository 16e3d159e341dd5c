#include "ctldl/std_bridge.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <set>
#include <unordered_map>

namespace ctldl {

using datalog::Atom;
using datalog::Literal;
using datalog::Program;
using datalog::Rule;
using datalog::Term;

int std_arity(StdOpKind kind) {
  switch (kind) {
    case StdOpKind::Atom:
    case StdOpKind::Top:
      return 0;
    case StdOpKind::Not:
    case StdOpKind::Next:
      return 1;
    case StdOpKind::And:
    case StdOpKind::Until:
    case StdOpKind::UntilTilde:
      return 2;
  }
  return 0;
}

StdProgram StdProgram::atom_leaf(int atom_index, int num_unary) {
  if (num_unary < 1) throw InputError("a program needs at least one unary predicate");
  if (atom_index < 0 || atom_index >= num_unary) {
    throw InputError("atom index " + std::to_string(atom_index) + " outside P0..P" +
                     std::to_string(num_unary - 1));
  }
  auto node = std::make_shared<Node>();
  node->kind = StdOpKind::Atom;
  node->atom = atom_index;
  node->num_unary = num_unary;
  return StdProgram(std::move(node));
}

StdProgram StdProgram::top_leaf(int num_unary) {
  if (num_unary < 1) throw InputError("a program needs at least one unary predicate");
  auto node = std::make_shared<Node>();
  node->kind = StdOpKind::Top;
  node->num_unary = num_unary;
  return StdProgram(std::move(node));
}

StdProgram StdProgram::build(StdOpKind kind, std::vector<StdProgram> children, int num_unary) {
  const int want = std_arity(kind);
  if (static_cast<int>(children.size()) != want) {
    throw InputError("operator arity mismatch: expected " + std::to_string(want) + " children");
  }
  if (kind == StdOpKind::Atom || kind == StdOpKind::Top) {
    throw InputError("leaf nodes are built with atom_leaf/top_leaf");
  }
  for (const auto& c : children) {
    if (c.num_unary() != num_unary) {
      throw InputError("children must range over the same unary predicates");
    }
  }
  auto node = std::make_shared<Node>();
  node->kind = kind;
  node->num_unary = num_unary;
  if (want >= 1) {
    node->child0 = children[0].node_;
    node->count += children[0].node_count();
  }
  if (want >= 2) {
    node->child1 = children[1].node_;
    node->count += children[1].node_count();
  }
  return StdProgram(std::move(node));
}

int StdProgram::atom_index() const {
  if (node_->kind != StdOpKind::Atom) throw InternalError("atom_index on a non-atom node");
  return node_->atom;
}

StdProgram StdProgram::child(int i) const {
  const auto& c = i == 0 ? node_->child0 : node_->child1;
  if (i < 0 || i > 1 || !c) throw InternalError("std child index out of range");
  return StdProgram(c);
}

bool StdProgram::operator==(const StdProgram& other) const {
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

std::string StdProgram::to_sexpr() const {
  switch (kind()) {
    case StdOpKind::Atom: return "(atom p" + std::to_string(node_->atom) + ")";
    case StdOpKind::Top: return "true";
    case StdOpKind::Not: return "(not " + child(0).to_sexpr() + ")";
    case StdOpKind::And: return "(and " + child(0).to_sexpr() + " " + child(1).to_sexpr() + ")";
    case StdOpKind::Next: return "(next " + child(0).to_sexpr() + ")";
    case StdOpKind::Until:
      return "(until " + child(0).to_sexpr() + " " + child(1).to_sexpr() + ")";
    case StdOpKind::UntilTilde:
      return "(until-tilde " + child(0).to_sexpr() + " " + child(1).to_sexpr() + ")";
  }
  return {};
}

// ---------------------------------------------------------------------------
// Translations

StdProgram ctl_to_std(const Formula& f, int num_atoms) {
  if (!is_enf(f)) {
    throw InputError("ctl_to_std requires existential normal form; run to_enf first");
  }
  if (num_atoms <= f.max_atom()) {
    throw InputError("num_atoms must cover every atom used by the formula");
  }
  const int num_unary = std::max(num_atoms, 1);
  const std::function<StdProgram(const Formula&)> go = [&](const Formula& g) -> StdProgram {
    switch (g.kind()) {
      case FormulaKind::Atom: return StdProgram::atom_leaf(g.atom_index(), num_unary);
      case FormulaKind::True: return StdProgram::top_leaf(num_unary);
      case FormulaKind::Not:
        return StdProgram::build(StdOpKind::Not, {go(g.left())}, num_unary);
      case FormulaKind::And:
        return StdProgram::build(StdOpKind::And, {go(g.left()), go(g.right())}, num_unary);
      case FormulaKind::ExistsNext:
        return StdProgram::build(StdOpKind::Next, {go(g.left())}, num_unary);
      case FormulaKind::ExistsUntil:
        return StdProgram::build(StdOpKind::Until, {go(g.left()), go(g.right())}, num_unary);
      case FormulaKind::ExistsUntilTilde:
        return StdProgram::build(StdOpKind::UntilTilde, {go(g.left()), go(g.right())}, num_unary);
      default:
        throw InternalError("ctl_to_std: non-ENF node slipped through");
    }
  };
  return go(f);
}

Formula std_to_ctl(const StdProgram& p) {
  switch (p.kind()) {
    case StdOpKind::Atom: return Formula::atom(p.atom_index());
    case StdOpKind::Top: return Formula::make_true();
    case StdOpKind::Not: return Formula::negation(std_to_ctl(p.child(0)));
    case StdOpKind::And:
      return Formula::conjunction(std_to_ctl(p.child(0)), std_to_ctl(p.child(1)));
    case StdOpKind::Next: return Formula::exists_next(std_to_ctl(p.child(0)));
    case StdOpKind::Until:
      return Formula::exists_until(std_to_ctl(p.child(0)), std_to_ctl(p.child(1)));
    case StdOpKind::UntilTilde:
      return Formula::exists_until_tilde(std_to_ctl(p.child(0)), std_to_ctl(p.child(1)));
  }
  throw InternalError("std_to_ctl: unreachable");
}

// ---------------------------------------------------------------------------
// Flattening

namespace {

Term V(const char* name) { return Term::var(name); }

Rule make_rule(Atom head, std::vector<Literal> body) {
  Rule r;
  r.head = std::move(head);
  r.body = std::move(body);
  return r;
}

Literal pos(std::string pred, std::vector<Term> args) {
  return Literal{false, Atom{std::move(pred), std::move(args)}};
}

Literal neg(std::string pred, std::vector<Term> args) {
  return Literal{true, Atom{std::move(pred), std::move(args)}};
}

struct StdFlattener {
  Program out;
  int next_goal = 1;
  int next_b = 1;
  bool need_a = false;
  bool need_w = false;

  std::string emit(const StdProgram& node, bool is_root) {
    std::vector<std::string> kids;
    for (int i = 0; i < node.arity(); ++i) kids.push_back(emit(node.child(i), false));
    const std::string g = is_root ? "G" : "G" + std::to_string(next_goal++);
    switch (node.kind()) {
      case StdOpKind::Atom:
        out.rules.push_back(make_rule(Atom{g, {V("X")}},
                                      {pos("P" + std::to_string(node.atom_index()), {V("X")})}));
        break;
      case StdOpKind::Top:
        need_w = true;
        out.rules.push_back(make_rule(Atom{g, {V("X")}}, {pos("W", {V("X")})}));
        break;
      case StdOpKind::Not:
        need_w = true;
        out.rules.push_back(
            make_rule(Atom{g, {V("X")}}, {pos("W", {V("X")}), neg(kids[0], {V("X")})}));
        break;
      case StdOpKind::And:
        out.rules.push_back(
            make_rule(Atom{g, {V("X")}}, {pos(kids[0], {V("X")}), pos(kids[1], {V("X")})}));
        break;
      case StdOpKind::Next:
        need_a = true;
        out.rules.push_back(
            make_rule(Atom{g, {V("X")}}, {pos(kids[0], {V("X")}), neg("A", {V("X")})}));
        out.rules.push_back(make_rule(Atom{g, {V("X")}},
                                      {pos("R", {V("X"), V("Y")}), pos(kids[0], {V("Y")})}));
        break;
      case StdOpKind::Until:
        out.rules.push_back(make_rule(Atom{g, {V("X")}}, {pos(kids[1], {V("X")})}));
        out.rules.push_back(make_rule(
            Atom{g, {V("X")}},
            {pos(kids[0], {V("X")}), pos("R", {V("X"), V("Y")}), pos(g, {V("Y")})}));
        break;
      case StdOpKind::UntilTilde: {
        need_a = true;
        const std::string b = "B" + std::to_string(next_b++);
        out.rules.push_back(
            make_rule(Atom{g, {V("X")}}, {pos(kids[0], {V("X")}), pos(kids[1], {V("X")})}));
        out.rules.push_back(
            make_rule(Atom{g, {V("X")}}, {pos(kids[1], {V("X")}), neg("A", {V("X")})}));
        out.rules.push_back(make_rule(Atom{g, {V("X")}}, {pos(b, {V("X"), V("X")})}));
        out.rules.push_back(make_rule(
            Atom{g, {V("X")}},
            {pos(kids[1], {V("X")}), pos("R", {V("X"), V("Y")}), pos(g, {V("Y")})}));
        out.rules.push_back(make_rule(
            Atom{b, {V("X"), V("Y")}},
            {pos(kids[1], {V("X")}), pos("R", {V("X"), V("Y")}), pos(kids[1], {V("Y")})}));
        out.rules.push_back(make_rule(
            Atom{b, {V("X"), V("Y")}},
            {pos(kids[1], {V("X")}), pos("R", {V("X"), V("U")}), pos(b, {V("U"), V("Y")})}));
        break;
      }
    }
    return g;
  }
};

}  // namespace

Program flatten(const StdProgram& p) {
  StdFlattener fl;
  fl.out.goal = "G";
  fl.emit(p, true);
  if (fl.need_a) {
    fl.out.rules.push_back(make_rule(Atom{"A", {V("X")}}, {pos("R", {V("X"), V("Y")})}));
  }
  if (fl.need_w) {
    fl.out.rules.push_back(make_rule(Atom{"W", {V("X")}}, {pos("R", {V("X"), V("Y")})}));
    fl.out.rules.push_back(make_rule(Atom{"W", {V("X")}}, {pos("R", {V("Y"), V("X")})}));
    for (int i = 0; i < p.num_unary(); ++i) {
      fl.out.rules.push_back(
          make_rule(Atom{"W", {V("X")}}, {pos("P" + std::to_string(i), {V("X")})}));
    }
  }
  return fl.out;
}

// ---------------------------------------------------------------------------
// Recognizer

namespace {

struct Matcher {
  struct Proto {
    StdOpKind kind;
    int atom = -1;
    std::vector<Proto> children;
  };

  std::map<std::string, std::vector<const Rule*>> groups;  // head pred -> rules
  std::set<const Rule*> consumed;
  std::string a_pred, w_pred;  // shared predicates, fixed at first use
  int w_unary = -1;            // exact unary count, from the W group
  int max_leaf = 0;            // lower bound from atom leaves

  [[noreturn]] static void reject(const std::string& why) {
    throw InputError("not in STD: " + why);
  }

  static bool is_var(const Term& t) { return t.kind == Term::Kind::Variable; }

  static bool unary_pred_index(const std::string& pred, int* index) {
    if (pred.size() < 2 || pred[0] != 'P') return false;
    for (std::size_t i = 1; i < pred.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(pred[i]))) return false;
    }
    *index = std::stoi(pred.substr(1));
    return true;
  }

  // g(x) <- R(x,y)
  static bool is_a_shape(const Rule& r) {
    if (r.head.args.size() != 1 || r.body.size() != 1 || !r.guards.empty()) return false;
    const Literal& l = r.body[0];
    if (l.negated || l.atom.pred != "R" || l.atom.args.size() != 2) return false;
    if (!is_var(r.head.args[0]) || !is_var(l.atom.args[0]) || !is_var(l.atom.args[1])) return false;
    return r.head.args[0].name == l.atom.args[0].name &&
           l.atom.args[0].name != l.atom.args[1].name;
  }

  // g(x) <- R(y,x)
  static bool is_rev_r_shape(const Rule& r) {
    if (r.head.args.size() != 1 || r.body.size() != 1 || !r.guards.empty()) return false;
    const Literal& l = r.body[0];
    if (l.negated || l.atom.pred != "R" || l.atom.args.size() != 2) return false;
    if (!is_var(r.head.args[0]) || !is_var(l.atom.args[0]) || !is_var(l.atom.args[1])) return false;
    return r.head.args[0].name == l.atom.args[1].name &&
           l.atom.args[0].name != l.atom.args[1].name;
  }

  // g(x) <- P_i(x); returns i or -1.
  static int unary_leaf_index(const Rule& r) {
    if (r.head.args.size() != 1 || r.body.size() != 1 || !r.guards.empty()) return -1;
    const Literal& l = r.body[0];
    int idx = -1;
    if (l.negated || !unary_pred_index(l.atom.pred, &idx) || l.atom.args.size() != 1) return -1;
    if (!is_var(r.head.args[0]) || !is_var(l.atom.args[0])) return -1;
    return r.head.args[0].name == l.atom.args[0].name ? idx : -1;
  }

  // g(x) <- q(x) for an IDB q; returns q or "".
  static std::string single_idb_body(const Rule& r) {
    if (r.head.args.size() != 1 || r.body.size() != 1 || !r.guards.empty()) return {};
    const Literal& l = r.body[0];
    if (l.negated || l.atom.args.size() != 1) return {};
    int idx;
    if (unary_pred_index(l.atom.pred, &idx) || l.atom.pred == "R") return {};
    if (!is_var(r.head.args[0]) || !is_var(l.atom.args[0])) return {};
    return r.head.args[0].name == l.atom.args[0].name ? l.atom.pred : std::string{};
  }

  bool check_w_group(const std::string& pred) {
    const auto it = groups.find(pred);
    if (it == groups.end()) return false;
    const auto& rules = it->second;
    if (rules.size() < 3) return false;
    bool fwd = false, rev = false;
    std::set<int> unary;
    for (const Rule* r : rules) {
      if (is_a_shape(*r)) {
        if (fwd) return false;
        fwd = true;
      } else if (is_rev_r_shape(*r)) {
        if (rev) return false;
        rev = true;
      } else if (const int idx = unary_leaf_index(*r); idx >= 0) {
        if (!unary.insert(idx).second) return false;
      } else {
        return false;
      }
    }
    if (!fwd || !rev || unary.empty()) return false;
    if (*unary.begin() != 0 || *unary.rbegin() != static_cast<int>(unary.size()) - 1) return false;
    if (max_leaf > static_cast<int>(unary.size())) return false;
    w_unary = static_cast<int>(unary.size());
    return true;
  }

  void claim_w(const std::string& pred) {
    if (w_pred.empty()) {
      if (!check_w_group(pred)) reject("predicate '" + pred + "' does not define the domain");
      w_pred = pred;
      for (const Rule* r : groups.at(pred)) consumed.insert(r);
    } else if (w_pred != pred) {
      reject("two distinct domain predicates: '" + w_pred + "' and '" + pred + "'");
    }
  }

  void claim_a(const std::string& pred) {
    if (a_pred.empty()) {
      const auto it = groups.find(pred);
      if (it == groups.end() || it->second.size() != 1 || !is_a_shape(*it->second[0])) {
        reject("predicate '" + pred + "' is not the has-successor predicate");
      }
      a_pred = pred;
      consumed.insert(it->second[0]);
    } else if (a_pred != pred) {
      reject("two distinct has-successor predicates");
    }
  }

  // g(x) <- c1(x), c2(x)
  static bool and_shape(const Rule& r, std::string* c1, std::string* c2) {
    if (r.head.args.size() != 1 || r.body.size() != 2 || !r.guards.empty()) return false;
    if (!is_var(r.head.args[0])) return false;
    const std::string h = r.head.args[0].name;
    for (const Literal& l : r.body) {
      if (l.negated || l.atom.args.size() != 1 || !is_var(l.atom.args[0]) ||
          l.atom.args[0].name != h) {
        return false;
      }
    }
    *c1 = r.body[0].atom.pred;
    *c2 = r.body[1].atom.pred;
    return true;
  }

  // g(x) <- p(x), !n(x), order-insensitive
  static bool guarded_neg_shape(const Rule& r, std::string* positive, std::string* negated) {
    if (r.head.args.size() != 1 || r.body.size() != 2 || !r.guards.empty()) return false;
    if (!is_var(r.head.args[0])) return false;
    const std::string h = r.head.args[0].name;
    const Literal *p = nullptr, *n = nullptr;
    for (const Literal& l : r.body) (l.negated ? n : p) = &l;
    if (p == nullptr || n == nullptr) return false;
    if (p->atom.args.size() != 1 || !is_var(p->atom.args[0]) || p->atom.args[0].name != h) {
      return false;
    }
    if (n->atom.args.size() != 1 || !is_var(n->atom.args[0]) || n->atom.args[0].name != h) {
      return false;
    }
    *positive = p->atom.pred;
    *negated = n->atom.pred;
    return true;
  }

  // g(x) <- R(x,y), c(y)
  static bool step_shape(const Rule& r, std::string* c) {
    if (r.head.args.size() != 1 || r.body.size() != 2 || !r.guards.empty()) return false;
    if (!is_var(r.head.args[0])) return false;
    const std::string h = r.head.args[0].name;
    const Literal *rr = nullptr, *cc = nullptr;
    for (const Literal& l : r.body) {
      if (l.atom.pred == "R" && !l.negated && l.atom.args.size() == 2) {
        rr = &l;
      } else {
        cc = &l;
      }
    }
    if (rr == nullptr || cc == nullptr || cc->negated || cc->atom.args.size() != 1) return false;
    if (!is_var(rr->atom.args[0]) || !is_var(rr->atom.args[1]) || !is_var(cc->atom.args[0])) {
      return false;
    }
    const std::string y = rr->atom.args[1].name;
    if (rr->atom.args[0].name != h || y == h) return false;
    if (cc->atom.args[0].name != y) return false;
    *c = cc->atom.pred;
    return true;
  }

  // g(x) <- c1(x), R(x,y), t(y)
  static bool walk_shape(const Rule& r, std::string* c1, std::string* target) {
    if (r.head.args.size() != 1 || r.body.size() != 3 || !r.guards.empty()) return false;
    if (!is_var(r.head.args[0])) return false;
    const std::string h = r.head.args[0].name;
    const Literal* rr = nullptr;
    std::vector<const Literal*> unaries;
    for (const Literal& l : r.body) {
      if (l.negated) return false;
      if (l.atom.pred == "R" && l.atom.args.size() == 2) {
        rr = &l;
      } else if (l.atom.args.size() == 1) {
        unaries.push_back(&l);
      } else {
        return false;
      }
    }
    if (rr == nullptr || unaries.size() != 2) return false;
    if (!is_var(rr->atom.args[0]) || !is_var(rr->atom.args[1])) return false;
    const std::string y = rr->atom.args[1].name;
    if (rr->atom.args[0].name != h || y == h) return false;
    const Literal *at_h = nullptr, *at_y = nullptr;
    for (const Literal* l : unaries) {
      if (!is_var(l->atom.args[0])) return false;
      if (l->atom.args[0].name == h) at_h = l;
      else if (l->atom.args[0].name == y) at_y = l;
    }
    if (at_h == nullptr || at_y == nullptr) return false;
    *c1 = at_h->atom.pred;
    *target = at_y->atom.pred;
    return true;
  }

  // g(x) <- b(x,x)
  static bool cycle_shape(const Rule& r, std::string* b) {
    if (r.head.args.size() != 1 || r.body.size() != 1 || !r.guards.empty()) return false;
    const Literal& l = r.body[0];
    if (l.negated || l.atom.args.size() != 2) return false;
    if (!is_var(r.head.args[0]) || !is_var(l.atom.args[0]) || !is_var(l.atom.args[1])) return false;
    const std::string h = r.head.args[0].name;
    if (l.atom.args[0].name != h || l.atom.args[1].name != h) return false;
    *b = l.atom.pred;
    return true;
  }

  // b(x,y) <- c(x), R(x,y), c(y)
  static bool b_base_shape(const Rule& r, const std::string& b, std::string* c) {
    if (r.head.pred != b || r.head.args.size() != 2 || r.body.size() != 3 || !r.guards.empty()) {
      return false;
    }
    if (!is_var(r.head.args[0]) || !is_var(r.head.args[1])) return false;
    const std::string x = r.head.args[0].name, y = r.head.args[1].name;
    if (x == y) return false;
    const Literal* rr = nullptr;
    const Literal *at_x = nullptr, *at_y = nullptr;
    for (const Literal& l : r.body) {
      if (l.negated) return false;
      if (l.atom.pred == "R" && l.atom.args.size() == 2) {
        rr = &l;
      } else if (l.atom.args.size() == 1 && is_var(l.atom.args[0])) {
        if (l.atom.args[0].name == x) at_x = &l;
        else if (l.atom.args[0].name == y) at_y = &l;
        else return false;
      } else {
        return false;
      }
    }
    if (rr == nullptr || at_x == nullptr || at_y == nullptr) return false;
    if (!is_var(rr->atom.args[0]) || !is_var(rr->atom.args[1])) return false;
    if (rr->atom.args[0].name != x || rr->atom.args[1].name != y) return false;
    if (at_x->atom.pred != at_y->atom.pred) return false;
    *c = at_x->atom.pred;
    return true;
  }

  // b(x,y) <- c(x), R(x,u), b(u,y)
  static bool b_step_shape(const Rule& r, const std::string& b, std::string* c) {
    if (r.head.pred != b || r.head.args.size() != 2 || r.body.size() != 3 || !r.guards.empty()) {
      return false;
    }
    if (!is_var(r.head.args[0]) || !is_var(r.head.args[1])) return false;
    const std::string x = r.head.args[0].name, y = r.head.args[1].name;
    if (x == y) return false;
    const Literal *rr = nullptr, *bb = nullptr, *cc = nullptr;
    for (const Literal& l : r.body) {
      if (l.negated) return false;
      if (l.atom.pred == "R" && l.atom.args.size() == 2) rr = &l;
      else if (l.atom.pred == b && l.atom.args.size() == 2) bb = &l;
      else if (l.atom.args.size() == 1) cc = &l;
      else return false;
    }
    if (rr == nullptr || bb == nullptr || cc == nullptr) return false;
    for (const Literal* l : {rr, bb}) {
      for (const auto& t : l->atom.args) {
        if (!is_var(t)) return false;
      }
    }
    if (!is_var(cc->atom.args[0]) || cc->atom.args[0].name != x) return false;
    const std::string u = rr->atom.args[1].name;
    if (rr->atom.args[0].name != x || u == x || u == y) return false;
    if (bb->atom.args[0].name != u || bb->atom.args[1].name != y) return false;
    *c = cc->atom.pred;
    return true;
  }

  Proto match_node(const std::string& pred) {
    const auto it = groups.find(pred);
    if (it == groups.end()) reject("no rules define goal predicate '" + pred + "'");
    const auto& rules = it->second;
    for (const Rule* r : rules) {
      if (consumed.count(r)) reject("predicate '" + pred + "' is shared between operators");
    }

    if (rules.size() == 1) {
      const Rule& r = *rules[0];
      consumed.insert(&r);
      if (const int idx = unary_leaf_index(r); idx >= 0) {
        if (w_unary >= 0 && idx >= w_unary) {
          reject("leaf predicate P" + std::to_string(idx) + " is outside the domain rules");
        }
        max_leaf = std::max(max_leaf, idx + 1);
        return Proto{StdOpKind::Atom, idx, {}};
      }
      std::string c1, c2;
      if (guarded_neg_shape(r, &c1, &c2)) {
        claim_w(c1);
        return Proto{StdOpKind::Not, -1, {match_node(c2)}};
      }
      if (const std::string w = single_idb_body(r); !w.empty()) {
        claim_w(w);
        return Proto{StdOpKind::Top, -1, {}};
      }
      if (and_shape(r, &c1, &c2)) {
        Proto l = match_node(c1);
        Proto r2 = match_node(c2);
        return Proto{StdOpKind::And, -1, {std::move(l), std::move(r2)}};
      }
      reject("rule '" + render_rule(r) + "' fits no operator");
    }

    if (rules.size() == 2) {
      const Rule *r1 = rules[0], *r2 = rules[1];
      for (int attempt = 0; attempt < 2; ++attempt) {
        std::string c_guard, a_cand, c_step;
        if (guarded_neg_shape(*r1, &c_guard, &a_cand) && step_shape(*r2, &c_step) &&
            c_guard == c_step) {
          consumed.insert(r1);
          consumed.insert(r2);
          claim_a(a_cand);
          return Proto{StdOpKind::Next, -1, {match_node(c_guard)}};
        }
        std::string c1, target;
        int leaf_idx = unary_leaf_index(*r1);
        const std::string idb_body = single_idb_body(*r1);
        if ((leaf_idx >= 0 || !idb_body.empty()) && walk_shape(*r2, &c1, &target) &&
            target == pred) {
          // Until: first rule names the right operand's goal predicate.
          // A bare P_i body cannot occur here: operands are subprograms with
          // their own goals, so the right operand is an IDB.
          if (!idb_body.empty()) {
            consumed.insert(r1);
            consumed.insert(r2);
            Proto left = match_node(c1);
            Proto right = match_node(idb_body);
            return Proto{StdOpKind::Until, -1, {std::move(left), std::move(right)}};
          }
        }
        std::swap(r1, r2);
      }
      reject("the two rules of '" + pred + "' fit no operator");
    }

    if (rules.size() == 4) {
      const Rule *and_rule = nullptr, *neg_rule = nullptr, *cyc_rule = nullptr,
                 *walk_rule = nullptr;
      std::string c2_from_neg, a_cand, b_name, c2_from_walk;
      for (const Rule* r : rules) {
        std::string x, y;
        if (cycle_shape(*r, &x)) {
          cyc_rule = r;
          b_name = x;
        } else if (guarded_neg_shape(*r, &x, &y)) {
          neg_rule = r;
          c2_from_neg = x;
          a_cand = y;
        } else if (walk_shape(*r, &x, &y) && y == pred) {
          walk_rule = r;
          c2_from_walk = x;
        } else if (and_shape(*r, &x, &y)) {
          and_rule = r;
        }
      }
      if (and_rule == nullptr || neg_rule == nullptr || cyc_rule == nullptr ||
          walk_rule == nullptr) {
        reject("the four rules of '" + pred + "' do not form an until-tilde block");
      }
      if (c2_from_neg != c2_from_walk) reject("inconsistent right operand in until-tilde block");
      const std::string c2 = c2_from_neg;
      std::string x, y;
      and_shape(*and_rule, &x, &y);
      if (x == c2) std::swap(x, y);
      if (y != c2) reject("until-tilde conjunction rule does not mention the right operand");
      const std::string c1 = x;
      claim_a(a_cand);

      const auto bit = groups.find(b_name);
      if (bit == groups.end() || bit->second.size() != 2) {
        reject("cycle predicate '" + b_name + "' needs exactly two rules");
      }
      std::string cb1, cb2;
      const Rule *bb1 = bit->second[0], *bb2 = bit->second[1];
      const bool ok = (b_base_shape(*bb1, b_name, &cb1) && b_step_shape(*bb2, b_name, &cb2)) ||
                      (b_base_shape(*bb2, b_name, &cb1) && b_step_shape(*bb1, b_name, &cb2));
      if (!ok || cb1 != c2 || cb2 != c2) {
        reject("cycle predicate '" + b_name + "' does not walk the right operand");
      }
      for (const Rule* r : rules) consumed.insert(r);
      consumed.insert(bb1);
      consumed.insert(bb2);
      Proto left = match_node(c1);
      Proto right = match_node(c2);
      return Proto{StdOpKind::UntilTilde, -1, {std::move(left), std::move(right)}};
    }

    reject("predicate '" + pred + "' has " + std::to_string(rules.size()) +
           " rules, matching no operator");
  }

  int final_unary() const { return w_unary >= 0 ? w_unary : std::max(max_leaf, 1); }
};

}  // namespace

StdProgram recognize_std(const Program& p) {
  if (p.rules.empty()) Matcher::reject("empty program");
  Matcher m;
  for (const auto& r : p.rules) m.groups[r.head.pred].push_back(&r);
  const std::string goal = p.goal.empty() ? p.rules.front().head.pred : p.goal;

  const Matcher::Proto proto = m.match_node(goal);
  for (const auto& r : p.rules) {
    if (!m.consumed.count(&r)) Matcher::reject("unused rule '" + render_rule(r) + "'");
  }

  // Build the tree once the unary count is settled.
  const int n = m.final_unary();
  const std::function<StdProgram(const Matcher::Proto&)> build =
      [&](const Matcher::Proto& t) -> StdProgram {
    switch (std_arity(t.kind)) {
      case 0:
        return t.kind == StdOpKind::Atom ? StdProgram::atom_leaf(t.atom, n)
                                         : StdProgram::top_leaf(n);
      case 1:
        return StdProgram::build(t.kind, {build(t.children[0])}, n);
      default:
        return StdProgram::build(t.kind, {build(t.children[0]), build(t.children[1])}, n);
    }
  };
  return build(proto);
}

}  // namespace ctldl

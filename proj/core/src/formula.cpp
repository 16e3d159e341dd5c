#include "ctldl/formula.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>
#include <utility>

namespace ctldl {

bool is_binary(FormulaKind kind) {
  switch (kind) {
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::ExistsUntil:
    case FormulaKind::ForallUntil:
    case FormulaKind::ExistsUntilTilde:
    case FormulaKind::ForallUntilTilde:
      return true;
    default:
      return false;
  }
}

bool is_unary(FormulaKind kind) {
  switch (kind) {
    case FormulaKind::Not:
    case FormulaKind::ExistsNext:
    case FormulaKind::ForallNext:
      return true;
    default:
      return false;
  }
}

Formula Formula::build(FormulaKind kind, int atom, const Formula* l, const Formula* r) {
  auto node = std::make_shared<Node>();
  node->kind = kind;
  node->atom = atom;
  if (l != nullptr) {
    node->child0 = l->node_;
    node->size += l->node_->size;
    node->depth = std::max(node->depth, l->node_->depth + 1);
    node->max_atom = std::max(node->max_atom, l->node_->max_atom);
  }
  if (r != nullptr) {
    node->child1 = r->node_;
    node->size += r->node_->size;
    node->depth = std::max(node->depth, r->node_->depth + 1);
    node->max_atom = std::max(node->max_atom, r->node_->max_atom);
  }
  if (kind == FormulaKind::Atom) node->max_atom = atom;
  return Formula(std::move(node));
}

Formula Formula::make_true() { return build(FormulaKind::True, -1, nullptr, nullptr); }
Formula Formula::make_false() { return build(FormulaKind::False, -1, nullptr, nullptr); }

Formula Formula::atom(int index) {
  if (index < 0) throw InputError("atom index must be non-negative");
  return build(FormulaKind::Atom, index, nullptr, nullptr);
}

Formula Formula::negation(Formula f) { return build(FormulaKind::Not, -1, &f, nullptr); }
Formula Formula::conjunction(Formula l, Formula r) { return build(FormulaKind::And, -1, &l, &r); }
Formula Formula::disjunction(Formula l, Formula r) { return build(FormulaKind::Or, -1, &l, &r); }
Formula Formula::exists_next(Formula f) { return build(FormulaKind::ExistsNext, -1, &f, nullptr); }
Formula Formula::forall_next(Formula f) { return build(FormulaKind::ForallNext, -1, &f, nullptr); }
Formula Formula::exists_until(Formula l, Formula r) {
  return build(FormulaKind::ExistsUntil, -1, &l, &r);
}
Formula Formula::forall_until(Formula l, Formula r) {
  return build(FormulaKind::ForallUntil, -1, &l, &r);
}
Formula Formula::exists_until_tilde(Formula l, Formula r) {
  return build(FormulaKind::ExistsUntilTilde, -1, &l, &r);
}
Formula Formula::forall_until_tilde(Formula l, Formula r) {
  return build(FormulaKind::ForallUntilTilde, -1, &l, &r);
}

Formula Formula::make(FormulaKind kind, std::vector<Formula> children, int atom_index) {
  const std::size_t want = is_binary(kind) ? 2 : is_unary(kind) ? 1 : 0;
  if (children.size() != want) throw InputError("formula arity mismatch");
  if (kind == FormulaKind::Atom) return atom(atom_index);
  const Formula* l = want >= 1 ? &children[0] : nullptr;
  const Formula* r = want >= 2 ? &children[1] : nullptr;
  return build(kind, -1, l, r);
}

int Formula::atom_index() const {
  if (node_->kind != FormulaKind::Atom) throw InternalError("atom_index on non-atom");
  return node_->atom;
}

Formula Formula::left() const {
  if (!node_->child0) throw InternalError("left() on leaf formula");
  return Formula(node_->child0);
}

Formula Formula::right() const {
  if (!node_->child1) throw InternalError("right() on unary/leaf formula");
  return Formula(node_->child1);
}

int Formula::arity() const { return is_binary(kind()) ? 2 : is_unary(kind()) ? 1 : 0; }

bool Formula::operator==(const Formula& other) const {
  if (node_ == other.node_) return true;
  if (node_->kind != other.node_->kind || node_->atom != other.node_->atom ||
      node_->size != other.node_->size) {
    return false;
  }
  const bool l0 = node_->child0 != nullptr;
  if (l0 != (other.node_->child0 != nullptr)) return false;
  if (l0 && !(Formula(node_->child0) == Formula(other.node_->child0))) return false;
  const bool l1 = node_->child1 != nullptr;
  if (l1 != (other.node_->child1 != nullptr)) return false;
  if (l1 && !(Formula(node_->child1) == Formula(other.node_->child1))) return false;
  return true;
}

std::size_t FormulaHash::operator()(const Formula& f) const {
  std::size_t h = static_cast<std::size_t>(f.kind()) * 1099511628211ULL + 14695981039346656037ULL;
  if (f.kind() == FormulaKind::Atom) h ^= static_cast<std::size_t>(f.atom_index()) * 0x9e3779b97f4a7c15ULL;
  if (f.arity() >= 1) h = h * 31 + (*this)(f.left());
  if (f.arity() >= 2) h = h * 37 + (*this)(f.right());
  return h;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

enum class Tok {
  End,
  LParen,
  RParen,
  LBracket,
  RBracket,
  Not,
  And,
  Or,
  UntilOp,
  UntilTildeOp,
  KwTrue,
  KwFalse,
  KwEX,
  KwAX,
  KwE,
  KwA,
  Name,
};

struct Lexer {
  std::string_view text;
  std::size_t pos = 0;
  int line = 1;
  int col = 1;

  Tok tok = Tok::End;
  std::string name;
  int tok_line = 1;
  int tok_col = 1;

  void advance_char() {
    if (pos < text.size()) {
      if (text[pos] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++pos;
    }
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("formula: " + msg + " at " + std::to_string(tok_line) + ":" +
                         std::to_string(tok_col),
                     tok_line, tok_col);
  }

  void next() {
    for (;;) {
      while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) {
        advance_char();
      }
      if (pos < text.size() && text[pos] == '#') {
        while (pos < text.size() && text[pos] != '\n') advance_char();
        continue;
      }
      break;
    }
    tok_line = line;
    tok_col = col;
    if (pos >= text.size()) {
      tok = Tok::End;
      return;
    }
    const char c = text[pos];
    switch (c) {
      case '(': advance_char(); tok = Tok::LParen; return;
      case ')': advance_char(); tok = Tok::RParen; return;
      case '[': advance_char(); tok = Tok::LBracket; return;
      case ']': advance_char(); tok = Tok::RBracket; return;
      case '!': advance_char(); tok = Tok::Not; return;
      case '&': advance_char(); tok = Tok::And; return;
      case '|': advance_char(); tok = Tok::Or; return;
      case '~':
        advance_char();
        if (pos >= text.size() || text[pos] != 'U') fail("expected 'U' after '~'");
        advance_char();
        tok = Tok::UntilTildeOp;
        return;
      default: break;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos;
      while (pos < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) {
        advance_char();
      }
      std::string word(text.substr(start, pos - start));
      if (word == "true") { tok = Tok::KwTrue; return; }
      if (word == "false") { tok = Tok::KwFalse; return; }
      if (word == "EX") { tok = Tok::KwEX; return; }
      if (word == "AX") { tok = Tok::KwAX; return; }
      if (word == "E") { tok = Tok::KwE; return; }
      if (word == "A") { tok = Tok::KwA; return; }
      if (word == "U") { tok = Tok::UntilOp; return; }
      if (std::islower(static_cast<unsigned char>(word[0]))) {
        tok = Tok::Name;
        name = std::move(word);
        return;
      }
      fail("unknown token '" + word + "'");
    }
    fail(std::string("unexpected character '") + c + "'");
  }
};

struct FormulaParser {
  Lexer lex;
  std::vector<std::string>* atoms;       // interning mode
  std::span<const std::string> fixed;    // fixed-atom mode
  bool interning;

  int atom_id(const std::string& n) {
    if (interning) {
      for (std::size_t i = 0; i < atoms->size(); ++i) {
        if ((*atoms)[i] == n) return static_cast<int>(i);
      }
      atoms->push_back(n);
      return static_cast<int>(atoms->size() - 1);
    }
    for (std::size_t i = 0; i < fixed.size(); ++i) {
      if (fixed[i] == n) return static_cast<int>(i);
    }
    lex.fail("unknown atom '" + n + "'");
  }

  void expect(Tok t, const char* what) {
    if (lex.tok != t) lex.fail(std::string("expected ") + what);
    lex.next();
  }

  Formula parse_or() {
    Formula f = parse_and();
    while (lex.tok == Tok::Or) {
      lex.next();
      f = Formula::disjunction(f, parse_and());
    }
    return f;
  }

  Formula parse_and() {
    Formula f = parse_unary();
    while (lex.tok == Tok::And) {
      lex.next();
      f = Formula::conjunction(f, parse_unary());
    }
    return f;
  }

  Formula parse_unary() {
    switch (lex.tok) {
      case Tok::Not:
        lex.next();
        return Formula::negation(parse_unary());
      case Tok::KwEX:
        lex.next();
        return Formula::exists_next(parse_unary());
      case Tok::KwAX:
        lex.next();
        return Formula::forall_next(parse_unary());
      default:
        return parse_primary();
    }
  }

  Formula parse_bracketed(bool existential) {
    expect(Tok::LBracket, "'['");
    Formula l = parse_or();
    bool tilde = false;
    if (lex.tok == Tok::UntilOp) {
      lex.next();
    } else if (lex.tok == Tok::UntilTildeOp) {
      tilde = true;
      lex.next();
    } else {
      lex.fail("expected 'U' or '~U'");
    }
    Formula r = parse_or();
    expect(Tok::RBracket, "']'");
    if (existential) {
      return tilde ? Formula::exists_until_tilde(l, r) : Formula::exists_until(l, r);
    }
    return tilde ? Formula::forall_until_tilde(l, r) : Formula::forall_until(l, r);
  }

  Formula parse_primary() {
    switch (lex.tok) {
      case Tok::KwTrue:
        lex.next();
        return Formula::make_true();
      case Tok::KwFalse:
        lex.next();
        return Formula::make_false();
      case Tok::Name: {
        int id = atom_id(lex.name);
        lex.next();
        return Formula::atom(id);
      }
      case Tok::LParen: {
        lex.next();
        Formula f = parse_or();
        expect(Tok::RParen, "')'");
        return f;
      }
      case Tok::KwE:
        lex.next();
        return parse_bracketed(true);
      case Tok::KwA:
        lex.next();
        return parse_bracketed(false);
      default:
        lex.fail("expected a formula");
    }
  }
};

}  // namespace

ParsedFormula parse_formula(std::string_view text) {
  ParsedFormula out;
  Lexer lex;
  lex.text = text;
  FormulaParser p{std::move(lex), &out.atoms, {}, true};
  p.lex.next();
  out.formula = p.parse_or();
  if (p.lex.tok != Tok::End) p.lex.fail("trailing input");
  return out;
}

Formula parse_formula_with_atoms(std::string_view text, std::span<const std::string> atoms) {
  Lexer lex;
  lex.text = text;
  FormulaParser p{std::move(lex), nullptr, atoms, false};
  p.lex.next();
  Formula f = p.parse_or();
  if (p.lex.tok != Tok::End) p.lex.fail("trailing input");
  return f;
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

// Precedence levels: 1 = |, 2 = &, 3 = prefix, 4 = primary.
void render_rec(const Formula& f, std::span<const std::string> atoms, int min_prec,
                std::string& out) {
  const auto paren = [&](int prec, auto&& body) {
    if (prec < min_prec) {
      out += '(';
      body();
      out += ')';
    } else {
      body();
    }
  };
  switch (f.kind()) {
    case FormulaKind::True:
      out += "true";
      return;
    case FormulaKind::False:
      out += "false";
      return;
    case FormulaKind::Atom: {
      const int i = f.atom_index();
      if (i < 0 || static_cast<std::size_t>(i) >= atoms.size()) {
        throw InputError("formula mentions atom index " + std::to_string(i) +
                         " outside the declared atom list");
      }
      out += atoms[i];
      return;
    }
    case FormulaKind::Not:
      paren(3, [&] {
        out += '!';
        render_rec(f.left(), atoms, 3, out);
      });
      return;
    case FormulaKind::ExistsNext:
    case FormulaKind::ForallNext:
      paren(3, [&] {
        out += f.kind() == FormulaKind::ExistsNext ? "EX " : "AX ";
        render_rec(f.left(), atoms, 3, out);
      });
      return;
    case FormulaKind::And:
      paren(2, [&] {
        render_rec(f.left(), atoms, 2, out);
        out += " & ";
        render_rec(f.right(), atoms, 3, out);
      });
      return;
    case FormulaKind::Or:
      paren(1, [&] {
        render_rec(f.left(), atoms, 1, out);
        out += " | ";
        render_rec(f.right(), atoms, 2, out);
      });
      return;
    case FormulaKind::ExistsUntil:
    case FormulaKind::ForallUntil:
    case FormulaKind::ExistsUntilTilde:
    case FormulaKind::ForallUntilTilde: {
      const bool existential =
          f.kind() == FormulaKind::ExistsUntil || f.kind() == FormulaKind::ExistsUntilTilde;
      const bool tilde =
          f.kind() == FormulaKind::ExistsUntilTilde || f.kind() == FormulaKind::ForallUntilTilde;
      out += existential ? "E[ " : "A[ ";
      render_rec(f.left(), atoms, 1, out);
      out += tilde ? " ~U " : " U ";
      render_rec(f.right(), atoms, 1, out);
      out += " ]";
      return;
    }
  }
}

}  // namespace

std::string render_formula(const Formula& f, std::span<const std::string> atoms) {
  std::string out;
  render_rec(f, atoms, 1, out);
  return out;
}

std::string render_formula(const ParsedFormula& pf) {
  return render_formula(pf.formula, pf.atoms);
}

// ---------------------------------------------------------------------------
// Normal forms

Formula to_enf(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::True:
    case FormulaKind::Atom:
      return f;
    case FormulaKind::False:
      return Formula::negation(Formula::make_true());
    case FormulaKind::Not:
      return Formula::negation(to_enf(f.left()));
    case FormulaKind::And:
      return Formula::conjunction(to_enf(f.left()), to_enf(f.right()));
    case FormulaKind::Or:
      return Formula::negation(Formula::conjunction(
          Formula::negation(to_enf(f.left())), Formula::negation(to_enf(f.right()))));
    case FormulaKind::ExistsNext:
      return Formula::exists_next(to_enf(f.left()));
    case FormulaKind::ForallNext:
      return Formula::negation(Formula::exists_next(Formula::negation(to_enf(f.left()))));
    case FormulaKind::ExistsUntil:
      return Formula::exists_until(to_enf(f.left()), to_enf(f.right()));
    case FormulaKind::ForallUntil:
      return Formula::negation(Formula::exists_until_tilde(
          Formula::negation(to_enf(f.left())), Formula::negation(to_enf(f.right()))));
    case FormulaKind::ExistsUntilTilde:
      return Formula::exists_until_tilde(to_enf(f.left()), to_enf(f.right()));
    case FormulaKind::ForallUntilTilde:
      return Formula::negation(Formula::exists_until(
          Formula::negation(to_enf(f.left())), Formula::negation(to_enf(f.right()))));
  }
  throw InternalError("to_enf: unreachable");
}

namespace {

Formula pnf_pos(const Formula& f);
Formula pnf_neg(const Formula& f);

Formula pnf_pos(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::True:
    case FormulaKind::Atom:
      return f;
    case FormulaKind::False:
      return Formula::negation(Formula::make_true());
    case FormulaKind::Not:
      return pnf_neg(f.left());
    case FormulaKind::And:
      return Formula::conjunction(pnf_pos(f.left()), pnf_pos(f.right()));
    case FormulaKind::Or:
      return Formula::disjunction(pnf_pos(f.left()), pnf_pos(f.right()));
    case FormulaKind::ExistsNext:
      return Formula::exists_next(pnf_pos(f.left()));
    case FormulaKind::ForallNext:
      return Formula::forall_next(pnf_pos(f.left()));
    case FormulaKind::ExistsUntil:
      return Formula::exists_until(pnf_pos(f.left()), pnf_pos(f.right()));
    case FormulaKind::ForallUntil:
      return Formula::forall_until(pnf_pos(f.left()), pnf_pos(f.right()));
    case FormulaKind::ExistsUntilTilde:
      return Formula::exists_until_tilde(pnf_pos(f.left()), pnf_pos(f.right()));
    case FormulaKind::ForallUntilTilde:
      return Formula::forall_until_tilde(pnf_pos(f.left()), pnf_pos(f.right()));
  }
  throw InternalError("to_pnf: unreachable");
}

Formula pnf_neg(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::True:
      return Formula::negation(Formula::make_true());
    case FormulaKind::False:
      return Formula::make_true();
    case FormulaKind::Atom:
      return Formula::negation(f);
    case FormulaKind::Not:
      return pnf_pos(f.left());
    case FormulaKind::And:
      return Formula::disjunction(pnf_neg(f.left()), pnf_neg(f.right()));
    case FormulaKind::Or:
      return Formula::conjunction(pnf_neg(f.left()), pnf_neg(f.right()));
    case FormulaKind::ExistsNext:
      return Formula::forall_next(pnf_neg(f.left()));
    case FormulaKind::ForallNext:
      return Formula::exists_next(pnf_neg(f.left()));
    case FormulaKind::ExistsUntil:
      return Formula::forall_until_tilde(pnf_neg(f.left()), pnf_neg(f.right()));
    case FormulaKind::ForallUntil:
      return Formula::exists_until_tilde(pnf_neg(f.left()), pnf_neg(f.right()));
    case FormulaKind::ExistsUntilTilde:
      return Formula::forall_until(pnf_neg(f.left()), pnf_neg(f.right()));
    case FormulaKind::ForallUntilTilde:
      return Formula::exists_until(pnf_neg(f.left()), pnf_neg(f.right()));
  }
  throw InternalError("to_pnf: unreachable");
}

}  // namespace

Formula to_pnf(const Formula& f) { return pnf_pos(f); }

bool is_enf(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::True:
    case FormulaKind::Atom:
      return true;
    case FormulaKind::False:
    case FormulaKind::Or:
    case FormulaKind::ForallNext:
    case FormulaKind::ForallUntil:
    case FormulaKind::ForallUntilTilde:
      return false;
    case FormulaKind::Not:
    case FormulaKind::ExistsNext:
      return is_enf(f.left());
    case FormulaKind::And:
    case FormulaKind::ExistsUntil:
    case FormulaKind::ExistsUntilTilde:
      return is_enf(f.left()) && is_enf(f.right());
  }
  return false;
}

bool is_pnf(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::True:
    case FormulaKind::Atom:
      return true;
    case FormulaKind::False:
      return false;
    case FormulaKind::Not:
      return f.left().kind() == FormulaKind::Atom || f.left().kind() == FormulaKind::True;
    case FormulaKind::ExistsNext:
    case FormulaKind::ForallNext:
      return is_pnf(f.left());
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::ExistsUntil:
    case FormulaKind::ForallUntil:
    case FormulaKind::ExistsUntilTilde:
    case FormulaKind::ForallUntilTilde:
      return is_pnf(f.left()) && is_pnf(f.right());
  }
  return false;
}

Formula reindex_atoms(const Formula& f, std::span<const std::string> from,
                      std::span<const std::string> to) {
  if (f.kind() == FormulaKind::Atom) {
    const int i = f.atom_index();
    if (i < 0 || static_cast<std::size_t>(i) >= from.size()) {
      throw InputError("atom index out of range of source atom list");
    }
    const auto it = std::find(to.begin(), to.end(), from[i]);
    if (it == to.end()) {
      throw InputError("atom '" + from[i] + "' is not declared by the target structure");
    }
    return Formula::atom(static_cast<int>(it - to.begin()));
  }
  std::vector<Formula> children;
  if (f.arity() >= 1) children.push_back(reindex_atoms(f.left(), from, to));
  if (f.arity() >= 2) children.push_back(reindex_atoms(f.right(), from, to));
  return Formula::make(f.kind(), std::move(children));
}

}  // namespace ctldl

#include "ctldl/datalog.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <functional>
#include <unordered_map>
#include <unordered_set>

namespace ctldl {

using datalog::Atom;
using datalog::CounterGuard;
using datalog::Literal;
using datalog::Program;
using datalog::Rule;
using datalog::Term;

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct PTok {
  enum class Kind {
    End, Word, Int, LParen, RParen, Comma, Dot, Bang, Implies, LessEq, Minus,
  };
  Kind kind = Kind::End;
  std::string text;
  int value = 0;
  int line = 1;
};

struct ProgramLexer {
  std::string_view text;
  std::size_t pos = 0;
  int line = 1;
  std::string goal_directive;

  PTok next() {
    for (;;) {
      while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) {
        if (text[pos] == '\n') ++line;
        ++pos;
      }
      if (pos < text.size() && text[pos] == '%') {
        std::size_t start = pos;
        while (pos < text.size() && text[pos] != '\n') ++pos;
        std::string_view comment = text.substr(start + 1, pos - start - 1);
        const auto g = comment.find("goal");
        if (g != std::string_view::npos) {
          auto rest = comment.substr(g + 4);
          const auto colon = rest.find(':');
          if (colon != std::string_view::npos) {
            std::string name;
            for (char c : rest.substr(colon + 1)) {
              if (!std::isspace(static_cast<unsigned char>(c))) name += c;
            }
            if (!name.empty()) goal_directive = name;
          }
        }
        continue;
      }
      break;
    }
    PTok t;
    t.line = line;
    if (pos >= text.size()) return t;
    const char c = text[pos];
    const auto single = [&](PTok::Kind k) {
      ++pos;
      t.kind = k;
      return t;
    };
    switch (c) {
      case '(': return single(PTok::Kind::LParen);
      case ')': return single(PTok::Kind::RParen);
      case ',': return single(PTok::Kind::Comma);
      case '.': return single(PTok::Kind::Dot);
      case '!': return single(PTok::Kind::Bang);
      case '-': return single(PTok::Kind::Minus);
      case ':':
        if (pos + 1 < text.size() && text[pos + 1] == '-') {
          pos += 2;
          t.kind = PTok::Kind::Implies;
          return t;
        }
        throw ParseError("program: stray ':' at line " + std::to_string(line), line, 1);
      case '<':
        if (pos + 1 < text.size() && text[pos + 1] == '=') {
          pos += 2;
          t.kind = PTok::Kind::LessEq;
          return t;
        }
        throw ParseError("program: stray '<' at line " + std::to_string(line), line, 1);
      default: break;
    }
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos;
      while (pos < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) {
        ++pos;
      }
      t.text = std::string(text.substr(start, pos - start));
      if (std::all_of(t.text.begin(), t.text.end(),
                      [](char d) { return std::isdigit(static_cast<unsigned char>(d)); })) {
        t.kind = PTok::Kind::Int;
        t.value = std::stoi(t.text);
      } else {
        t.kind = PTok::Kind::Word;
      }
      return t;
    }
    throw ParseError(std::string("program: unexpected character '") + c + "' at line " +
                         std::to_string(line),
                     line, 1);
  }
};

struct ProgramParser {
  ProgramLexer lex{};
  PTok tok{};

  void advance() { tok = lex.next(); }

  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError("program: " + msg + " at line " + std::to_string(tok.line), tok.line, 1);
  }

  Term parse_term() {
    if (tok.kind == PTok::Kind::Int) {
      Term t = Term::integer(tok.value);
      advance();
      return t;
    }
    if (tok.kind != PTok::Kind::Word) fail("expected a term");
    const std::string word = tok.text;
    advance();
    if (word == "cmax") return Term::cmax();
    if (std::isupper(static_cast<unsigned char>(word[0]))) {
      if (tok.kind == PTok::Kind::Minus) {
        advance();
        if (tok.kind != PTok::Kind::Int || tok.value != 1) fail("only 'Var-1' counter terms are supported");
        advance();
        return Term::var_minus_one(word);
      }
      return Term::var(word);
    }
    if (std::islower(static_cast<unsigned char>(word[0]))) return Term::constant(word);
    fail("term '" + word + "' must start with a letter");
  }

  Atom parse_atom(const std::string& pred) {
    Atom a;
    a.pred = pred;
    if (tok.kind != PTok::Kind::LParen) return a;  // propositional (0-ary)
    advance();
    if (tok.kind == PTok::Kind::RParen) fail("empty argument list");
    for (;;) {
      a.args.push_back(parse_term());
      if (tok.kind == PTok::Kind::Comma) {
        advance();
        continue;
      }
      if (tok.kind == PTok::Kind::RParen) {
        advance();
        return a;
      }
      fail("expected ',' or ')'");
    }
  }

  Program parse() {
    advance();
    Program p;
    while (tok.kind != PTok::Kind::End) {
      Rule r;
      if (tok.kind != PTok::Kind::Word) fail("expected a rule head");
      const std::string head_name = tok.text;
      advance();
      r.head = parse_atom(head_name);
      if (tok.kind == PTok::Kind::Implies) {
        advance();
        for (;;) {
          if (tok.kind == PTok::Kind::Bang) {
            advance();
            if (tok.kind != PTok::Kind::Word) fail("expected a predicate after '!'");
            const std::string name = tok.text;
            advance();
            Literal lit;
            lit.negated = true;
            lit.atom = parse_atom(name);
            r.body.push_back(std::move(lit));
          } else if (tok.kind == PTok::Kind::Word || tok.kind == PTok::Kind::Int) {
            const bool was_word = tok.kind == PTok::Kind::Word;
            const std::string name = tok.text;
            advance();
            if (was_word && tok.kind == PTok::Kind::LessEq) {
              if (!std::isupper(static_cast<unsigned char>(name[0]))) {
                fail("guard variable '" + name + "' must be uppercase");
              }
              advance();
              CounterGuard g;
              g.var = name;
              if (tok.kind == PTok::Kind::Int) {
                g.bound = tok.value;
                advance();
              } else if (tok.kind == PTok::Kind::Word && tok.text == "cmax") {
                advance();
              } else {
                fail("guard bound must be an integer or 'cmax'");
              }
              r.guards.push_back(std::move(g));
            } else if (was_word) {
              Literal lit;
              lit.atom = parse_atom(name);
              r.body.push_back(std::move(lit));
            } else {
              fail("unexpected integer in rule body");
            }
          } else {
            fail("expected a body literal");
          }
          if (tok.kind == PTok::Kind::Comma) {
            advance();
            continue;
          }
          break;
        }
      }
      if (tok.kind != PTok::Kind::Dot) fail("expected '.' after rule");
      advance();
      p.rules.push_back(std::move(r));
    }
    if (!lex.goal_directive.empty()) {
      p.goal = lex.goal_directive;
    } else {
      // Default goal: predicate G when it heads a rule, otherwise the first head.
      for (const auto& r : p.rules) {
        if (r.head.pred == "G") p.goal = "G";
      }
      if (p.goal.empty() && !p.rules.empty()) p.goal = p.rules.front().head.pred;
    }
    return p;
  }
};

std::string render_term(const Term& t) {
  switch (t.kind) {
    case Term::Kind::Variable: return t.name;
    case Term::Kind::VariableMinusOne: return t.name + "-1";
    case Term::Kind::Constant: return t.name;
    case Term::Kind::Integer: return std::to_string(t.value);
    case Term::Kind::CMax: return "cmax";
  }
  return {};
}

std::string render_atom(const Atom& a) {
  std::string out = a.pred;
  if (!a.args.empty()) {
    out += "(";
    for (std::size_t i = 0; i < a.args.size(); ++i) {
      if (i > 0) out += ",";
      out += render_term(a.args[i]);
    }
    out += ")";
  }
  return out;
}

}  // namespace

Program parse_program(std::string_view text) {
  ProgramParser p;
  p.lex.text = text;
  Program prog = p.parse();
  check_safety(prog);
  return prog;
}

std::string render_rule(const Rule& r) {
  std::string out = render_atom(r.head);
  if (!r.body.empty() || !r.guards.empty()) {
    out += " :- ";
    bool first = true;
    for (const auto& lit : r.body) {
      if (!first) out += ", ";
      first = false;
      if (lit.negated) out += "!";
      out += render_atom(lit.atom);
    }
    for (const auto& g : r.guards) {
      if (!first) out += ", ";
      first = false;
      out += g.var + " <= " + (g.bound ? std::to_string(*g.bound) : std::string("cmax"));
    }
  }
  out += ".";
  return out;
}

std::string render_program(const Program& p) {
  std::string out;
  if (!p.goal.empty()) out += "% goal: " + p.goal + "\n";
  for (const auto& r : p.rules) out += render_rule(r) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Static analysis

std::vector<std::string> idb_predicates(const Program& p) {
  std::vector<std::string> out;
  for (const auto& r : p.rules) {
    if (std::find(out.begin(), out.end(), r.head.pred) == out.end()) out.push_back(r.head.pred);
  }
  return out;
}

bool is_idb(const Program& p, std::string_view pred) {
  return std::any_of(p.rules.begin(), p.rules.end(),
                     [&](const Rule& r) { return r.head.pred == pred; });
}

void check_safety(const Program& p) {
  for (std::size_t ri = 0; ri < p.rules.size(); ++ri) {
    const Rule& r = p.rules[ri];
    std::unordered_set<std::string> bound;
    for (const auto& lit : r.body) {
      if (lit.negated) continue;
      for (const auto& t : lit.atom.args) {
        if (t.kind == Term::Kind::Variable || t.kind == Term::Kind::VariableMinusOne) {
          bound.insert(t.name);
        }
      }
    }
    const auto require = [&](const std::string& var, const char* where) {
      if (!bound.count(var)) {
        throw InputError("rule " + std::to_string(ri) + " is unsafe: variable '" + var + "' in " +
                         where + " has no positive occurrence (" + render_rule(r) + ")");
      }
    };
    for (const auto& t : r.head.args) {
      if (t.kind == Term::Kind::Variable || t.kind == Term::Kind::VariableMinusOne) {
        require(t.name, "the head");
      }
    }
    for (const auto& lit : r.body) {
      if (!lit.negated) continue;
      for (const auto& t : lit.atom.args) {
        if (t.kind == Term::Kind::Variable || t.kind == Term::Kind::VariableMinusOne) {
          require(t.name, "a negated literal");
        }
      }
    }
    for (const auto& g : r.guards) require(g.var, "a counter guard");
  }
}

DependencyGraph dependency_graph(const Program& p) {
  DependencyGraph g;
  g.nodes = idb_predicates(p);
  const auto idb = [&](const std::string& name) {
    return std::find(g.nodes.begin(), g.nodes.end(), name) != g.nodes.end();
  };
  for (const auto& r : p.rules) {
    for (const auto& lit : r.body) {
      if (idb(lit.atom.pred)) g.arcs.insert({lit.atom.pred, r.head.pred, lit.negated});
    }
  }
  return g;
}

namespace {

// Tarjan SCCs over predicate indices.
std::vector<int> scc_components(int n, const std::vector<std::vector<int>>& adj, int& num_comps) {
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<int> scc_stack;
  std::vector<char> on_stack(n, 0);
  int next_index = 0;
  num_comps = 0;
  std::vector<std::pair<int, std::size_t>> frames;
  for (int root = 0; root < n; ++root) {
    if (index[root] >= 0) continue;
    frames.emplace_back(root, 0);
    while (!frames.empty()) {
      auto& [v, ci] = frames.back();
      if (ci == 0) {
        index[v] = low[v] = next_index++;
        scc_stack.push_back(v);
        on_stack[v] = 1;
      }
      bool descended = false;
      while (ci < adj[v].size()) {
        const int w = adj[v][ci++];
        if (index[w] < 0) {
          frames.emplace_back(w, 0);
          descended = true;
          break;
        }
        if (on_stack[w]) low[v] = std::min(low[v], index[w]);
      }
      if (descended) continue;
      if (low[v] == index[v]) {
        for (;;) {
          const int w = scc_stack.back();
          scc_stack.pop_back();
          on_stack[w] = 0;
          comp[w] = num_comps;
          if (w == v) break;
        }
        ++num_comps;
      }
      const int finished = v;
      frames.pop_back();
      if (!frames.empty()) {
        const int parent = frames.back().first;
        low[parent] = std::min(low[parent], low[finished]);
      }
    }
  }
  return comp;
}

}  // namespace

Stratification stratify(const Program& p) {
  // All predicates take part; EDBs never head a rule, so they sit at 0.
  std::vector<std::string> preds;
  std::unordered_map<std::string, int> id;
  const auto intern = [&](const std::string& name) {
    auto [it, inserted] = id.try_emplace(name, static_cast<int>(preds.size()));
    if (inserted) preds.push_back(name);
    return it->second;
  };
  for (const auto& r : p.rules) {
    intern(r.head.pred);
    for (const auto& lit : r.body) intern(lit.atom.pred);
  }
  const int n = static_cast<int>(preds.size());
  struct Edge {
    int from, to;
    bool neg;
  };
  std::vector<Edge> edges;
  std::vector<std::vector<int>> adj(n);
  for (const auto& r : p.rules) {
    const int h = id[r.head.pred];
    for (const auto& lit : r.body) {
      const int b = id[lit.atom.pred];
      edges.push_back({b, h, lit.negated});
      adj[b].push_back(h);
    }
  }

  int num_comps = 0;
  const std::vector<int> comp = scc_components(n, adj, num_comps);

  for (const auto& e : edges) {
    if (e.neg && comp[e.from] == comp[e.to]) {
      // Reconstruct one offending cycle: e.to ->* e.from, then the negated arc.
      std::vector<int> parent(n, -1);
      std::vector<int> queue{e.to};
      std::vector<char> seen(n, 0);
      seen[e.to] = 1;
      for (std::size_t qi = 0; qi < queue.size(); ++qi) {
        const int v = queue[qi];
        for (int w : adj[v]) {
          if (!seen[w] && comp[w] == comp[e.to]) {
            seen[w] = 1;
            parent[w] = v;
            queue.push_back(w);
          }
        }
      }
      std::vector<std::string> path;
      for (int v = e.from; v != -1; v = parent[v]) {
        path.push_back(preds[v]);
        if (v == e.to) break;
      }
      std::string msg = "not stratifiable: recursion through negation on cycle: ";
      for (auto it = path.rbegin(); it != path.rend(); ++it) msg += *it + " -> ";
      msg += preds[e.to];
      throw InputError(msg);
    }
  }

  // Longest negation-weighted path on the condensation: relax edges until
  // fixpoint; the graph is a DAG on components, so num_comps passes suffice.
  std::vector<int> comp_level(num_comps, 0);
  for (int pass = 0; pass < num_comps; ++pass) {
    bool changed = false;
    for (const auto& e : edges) {
      const int want = comp_level[comp[e.from]] + (e.neg ? 1 : 0);
      if (comp_level[comp[e.to]] < want) {
        comp_level[comp[e.to]] = want;
        changed = true;
      }
    }
    if (!changed) break;
  }

  Stratification s;
  s.num_strata = 1;
  for (int i = 0; i < n; ++i) {
    s.strata[preds[i]] = comp_level[comp[i]];
    s.num_strata = std::max(s.num_strata, comp_level[comp[i]] + 1);
  }
  return s;
}

bool valid_stratification(const Program& p, const Stratification& s) {
  const auto level = [&](const std::string& pred) {
    const auto it = s.strata.find(pred);
    return it == s.strata.end() ? 0 : it->second;
  };
  for (const auto& r : p.rules) {
    if (!s.strata.count(r.head.pred)) return false;
    for (const auto& lit : r.body) {
      if (lit.negated ? level(r.head.pred) <= level(lit.atom.pred)
                      : level(r.head.pred) < level(lit.atom.pred)) {
        return false;
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Engine

namespace {

constexpr int kMaskDomain = 8;

struct ArgPlan {
  enum class Action : std::uint8_t {
    CheckConst,
    CheckInt,
    BindVar,
    CheckVar,
    BindVarFromMinusOne,  // term V-1, V unbound: V := value + 1
    CheckVarMinusOne,     // term V-1, V bound: value must equal V - 1
  };
  Action action;
  int var = -1;
  int const_index = -1;  // program constant table
  int value = 0;
  // True when the value is known before this literal runs; a duplicate
  // variable within one literal checks, but is not usable for indexing.
  bool pre_bound = false;
};

struct LiteralPlan {
  enum class Kind : std::uint8_t { Positive, Negative, Guard } kind = Kind::Positive;
  int pred = -1;
  bool delta = false;  // iterate only the delta range (semi-naive seed)
  std::vector<ArgPlan> args;
  // Guard payload.
  int guard_var = -1;
  std::optional<int> guard_bound;
  // Index request (generic path): bitmask of bound argument positions.
  std::uint32_t bound_mask = 0;
};

struct HeadArg {
  enum class Src : std::uint8_t { Var, VarMinusOne, Const, Int } src;
  int var = -1;
  int const_index = -1;
  int value = 0;
};

// Word-level kernels for the recurring rule shapes of the translations;
// None falls back to the generic binding executor.
enum class Kernel : std::uint8_t {
  None,
  Copy,       // h(x) <- a(x)
  And2,       // h(x) <- a(x), b(x)
  AndNot,     // h(x) <- a(x), !b(x)
  Step,       // h(x) <- a(x,y), b(y)
  GuardStep,  // h(x) <- a(x), b(x,y), c(y)
  Diag,       // h(x) <- a(x,x)
  Proj0,      // h(x) <- a(x,y)
  Proj1,      // h(x) <- a(y,x)
  BmatBase,   // h(x,y) <- a(x), b(x,y), c(y)
  BmatStep,   // h(x,y) <- a(x), b(x,u), c(u,y)
};

struct RulePlan {
  int index = 0;
  int head_pred = -1;
  std::vector<HeadArg> head;
  int num_vars = 0;
  int stratum = 0;
  Kernel kernel = Kernel::None;
  int kernel_a = -1, kernel_b = -1, kernel_c = -1;  // operand predicate ids
  // schedules[0]: full evaluation; schedules[i>0]: same-stratum positive
  // occurrence i-1 restricted to the delta.
  std::vector<std::vector<LiteralPlan>> schedules;
  std::vector<int> body_preds;      // positive body predicates
  std::uint64_t body_bits = 0;      // same, as pred-id bits (mask path, <= 64 preds)
};

struct PredInfo {
  std::string name;
  int arity = -1;
  std::vector<SortKind> sorts;
  bool idb = false;
  int stratum = 0;
  bool counters = false;
};

constexpr std::uint64_t encode_field(std::uint64_t v, int pos) { return v << (16 * pos); }

}  // namespace

struct Engine::Impl {
  Program program;
  EngineOptions options;
  Stratification strat;

  std::vector<PredInfo> preds;
  std::unordered_map<std::string, int> pred_ids;
  std::vector<std::string> const_names;
  std::unordered_map<std::string, int> const_ids;
  std::vector<RulePlan> plans;
  std::vector<std::vector<int>> strata_rules;  // plan indices per stratum
  std::vector<char> strata_recursive;          // some rule reads its own stratum
  int goal_pred = -1;
  bool uses_counters = false;
  bool has_constants = false;
  int max_arity = 0;

  // --- construction -------------------------------------------------------

  int pred_id(const std::string& name) {
    auto [it, inserted] = pred_ids.try_emplace(name, static_cast<int>(preds.size()));
    if (inserted) {
      preds.push_back(PredInfo{name, -1, {}, false, 0, false});
    }
    return it->second;
  }

  int const_id(const std::string& name) {
    auto [it, inserted] = const_ids.try_emplace(name, static_cast<int>(const_names.size()));
    if (inserted) const_names.push_back(name);
    return it->second;
  }

  void note_arity(const Atom& a) {
    PredInfo& info = preds[pred_id(a.pred)];
    const int arity = static_cast<int>(a.args.size());
    if (info.arity < 0) {
      info.arity = arity;
      info.sorts.assign(arity, SortKind::Constant);
    } else if (info.arity != arity) {
      throw InputError("predicate " + a.pred + " used with arities " +
                       std::to_string(info.arity) + " and " + std::to_string(arity));
    }
    max_arity = std::max(max_arity, arity);
    if (arity > 4) {
      throw InputError("relations of arity > 4 are not supported (predicate " + a.pred + ")");
    }
  }

  void infer_sorts() {
    // Fixpoint between per-rule variable sorts and per-predicate position sorts.
    struct VarSort {
      bool counter = false;
    };
    bool changed = true;
    std::vector<std::unordered_map<std::string, VarSort>> var_sorts(program.rules.size());
    std::vector<std::vector<char>> pos_is_counter(preds.size());
    for (std::size_t i = 0; i < preds.size(); ++i) {
      pos_is_counter[i].assign(std::max(preds[i].arity, 0), 0);
    }
    const auto mark_pos = [&](int pid, int pos) {
      if (!pos_is_counter[pid][pos]) {
        pos_is_counter[pid][pos] = 1;
        changed = true;
      }
    };
    while (changed) {
      changed = false;
      for (std::size_t ri = 0; ri < program.rules.size(); ++ri) {
        const Rule& r = program.rules[ri];
        auto& vs = var_sorts[ri];
        const auto mark_var = [&](const std::string& v) {
          if (!vs[v].counter) {
            vs[v].counter = true;
            changed = true;
          }
        };
        for (const auto& g : r.guards) mark_var(g.var);
        const auto scan_atom = [&](const Atom& a) {
          const int pid = pred_ids.at(a.pred);
          for (std::size_t i = 0; i < a.args.size(); ++i) {
            const Term& t = a.args[i];
            switch (t.kind) {
              case Term::Kind::Integer:
              case Term::Kind::CMax:
                mark_pos(pid, static_cast<int>(i));
                break;
              case Term::Kind::VariableMinusOne:
                mark_pos(pid, static_cast<int>(i));
                mark_var(t.name);
                break;
              case Term::Kind::Variable:
                if (vs[t.name].counter) mark_pos(pid, static_cast<int>(i));
                if (pos_is_counter[pid][i]) mark_var(t.name);
                break;
              case Term::Kind::Constant:
                if (pos_is_counter[pid][i]) {
                  throw InputError("predicate " + a.pred + " mixes constants and counters at position " +
                                   std::to_string(i));
                }
                break;
            }
          }
        };
        scan_atom(r.head);
        for (const auto& lit : r.body) scan_atom(lit.atom);
      }
    }
    for (std::size_t i = 0; i < preds.size(); ++i) {
      for (std::size_t j = 0; j < pos_is_counter[i].size(); ++j) {
        if (pos_is_counter[i][j]) {
          preds[i].sorts[j] = SortKind::Counter;
          preds[i].counters = true;
          uses_counters = true;
        }
      }
    }
    // A constant in a counter position would have been rejected above; also
    // reject counter variables leaking into constant positions.
    for (std::size_t ri = 0; ri < program.rules.size(); ++ri) {
      const Rule& r = program.rules[ri];
      const auto& vs = var_sorts[ri];
      const auto check_atom = [&](const Atom& a) {
        const int pid = pred_ids.at(a.pred);
        for (std::size_t i = 0; i < a.args.size(); ++i) {
          const Term& t = a.args[i];
          if (t.kind == Term::Kind::Variable) {
            const auto it = vs.find(t.name);
            const bool vc = it != vs.end() && it->second.counter;
            if (vc != (preds[pid].sorts[i] == SortKind::Counter)) {
              throw InputError("rule " + std::to_string(ri) + " mixes counter and constant sorts on variable '" +
                               t.name + "'");
            }
          }
        }
      };
      check_atom(r.head);
      for (const auto& lit : r.body) check_atom(lit.atom);
    }
  }

  explicit Impl(Program prog, EngineOptions opts)
      : program(std::move(prog)), options(std::move(opts)) {
    check_safety(program);
    for (const auto& r : program.rules) {
      note_arity(r.head);
      preds[pred_id(r.head.pred)].idb = true;
      for (const auto& lit : r.body) note_arity(lit.atom);
    }
    infer_sorts();
    const bool has_guard_or_counter =
        uses_counters || std::any_of(program.rules.begin(), program.rules.end(),
                                     [](const Rule& r) { return !r.guards.empty(); });
    if (has_guard_or_counter && !options.c_max.has_value()) {
      throw InputError("program uses counter terms; evaluate it with evaluate_succ and a c_max");
    }
    if (options.c_max && *options.c_max < 1) throw InputError("c_max must be >= 1");

    if (options.stratification) {
      if (!valid_stratification(program, *options.stratification)) {
        throw InputError("provided stratification violates the stratification conditions");
      }
      strat = *options.stratification;
    } else {
      strat = stratify(program);
    }
    for (auto& info : preds) {
      const auto it = strat.strata.find(info.name);
      info.stratum = it == strat.strata.end() ? 0 : it->second;
      strat.num_strata = std::max(strat.num_strata, info.stratum + 1);
    }

    if (!program.goal.empty()) {
      const auto it = pred_ids.find(program.goal);
      goal_pred = it == pred_ids.end() ? -1 : it->second;
    }

    build_plans();
  }

  void build_plans() {
    strata_rules.assign(strat.num_strata, {});
    strata_recursive.assign(strat.num_strata, 0);
    for (std::size_t ri = 0; ri < program.rules.size(); ++ri) {
      const Rule& r = program.rules[ri];
      RulePlan plan;
      plan.index = static_cast<int>(ri);
      plan.head_pred = pred_ids.at(r.head.pred);
      plan.stratum = preds[plan.head_pred].stratum;

      std::unordered_map<std::string, int> var_slots;
      const auto var_slot = [&](const std::string& name) {
        auto [it, inserted] = var_slots.try_emplace(name, static_cast<int>(var_slots.size()));
        return it->second;
      };

      // Positive body literal indices, and whether they are same-stratum IDBs.
      std::vector<int> positives;
      for (std::size_t li = 0; li < r.body.size(); ++li) {
        if (!r.body[li].negated) positives.push_back(static_cast<int>(li));
      }

      const auto make_schedule = [&](int delta_positive) {
        // delta_positive: index into `positives`, or -1 for the full schedule.
        std::vector<int> order;
        if (delta_positive >= 0) order.push_back(positives[delta_positive]);
        for (int li : positives) {
          if (delta_positive < 0 || li != positives[delta_positive]) order.push_back(li);
        }

        std::vector<LiteralPlan> schedule;
        std::unordered_set<std::string> bound;
        std::vector<char> neg_emitted(r.body.size(), 0);
        std::vector<char> guard_emitted(r.guards.size(), 0);

        const auto atom_args_bound = [&](const Atom& a) {
          for (const auto& t : a.args) {
            if ((t.kind == Term::Kind::Variable || t.kind == Term::Kind::VariableMinusOne) &&
                !bound.count(t.name)) {
              return false;
            }
          }
          return true;
        };
        const auto flush_checks = [&] {
          for (std::size_t li = 0; li < r.body.size(); ++li) {
            if (!r.body[li].negated || neg_emitted[li]) continue;
            if (!atom_args_bound(r.body[li].atom)) continue;
            neg_emitted[li] = 1;
            LiteralPlan lp;
            lp.kind = LiteralPlan::Kind::Negative;
            lp.pred = pred_ids.at(r.body[li].atom.pred);
            for (const auto& t : r.body[li].atom.args) {
              ArgPlan ap{};
              switch (t.kind) {
                case Term::Kind::Constant:
                  ap.action = ArgPlan::Action::CheckConst;
                  ap.const_index = const_id(t.name);
                  break;
                case Term::Kind::Integer:
                  ap.action = ArgPlan::Action::CheckInt;
                  ap.value = t.value;
                  break;
                case Term::Kind::CMax:
                  ap.action = ArgPlan::Action::CheckInt;
                  ap.value = options.c_max.value_or(0);
                  break;
                case Term::Kind::Variable:
                  ap.action = ArgPlan::Action::CheckVar;
                  ap.var = var_slot(t.name);
                  break;
                case Term::Kind::VariableMinusOne:
                  ap.action = ArgPlan::Action::CheckVarMinusOne;
                  ap.var = var_slot(t.name);
                  break;
              }
              lp.args.push_back(ap);
            }
            schedule.push_back(std::move(lp));
          }
          for (std::size_t gi = 0; gi < r.guards.size(); ++gi) {
            if (guard_emitted[gi] || !bound.count(r.guards[gi].var)) continue;
            guard_emitted[gi] = 1;
            LiteralPlan lp;
            lp.kind = LiteralPlan::Kind::Guard;
            lp.guard_var = var_slot(r.guards[gi].var);
            lp.guard_bound = r.guards[gi].bound;
            schedule.push_back(std::move(lp));
          }
        };

        flush_checks();  // constants-only negatives/guards (unusual but legal)
        for (std::size_t oi = 0; oi < order.size(); ++oi) {
          const Literal& lit = r.body[order[oi]];
          LiteralPlan lp;
          lp.kind = LiteralPlan::Kind::Positive;
          lp.pred = pred_ids.at(lit.atom.pred);
          lp.delta = delta_positive >= 0 && oi == 0;
          const std::unordered_set<std::string> bound_at_entry = bound;
          for (std::size_t i = 0; i < lit.atom.args.size(); ++i) {
            const Term& t = lit.atom.args[i];
            ArgPlan ap{};
            switch (t.kind) {
              case Term::Kind::Constant:
                ap.action = ArgPlan::Action::CheckConst;
                ap.const_index = const_id(t.name);
                ap.pre_bound = true;
                break;
              case Term::Kind::Integer:
                ap.action = ArgPlan::Action::CheckInt;
                ap.value = t.value;
                ap.pre_bound = true;
                break;
              case Term::Kind::CMax:
                ap.action = ArgPlan::Action::CheckInt;
                ap.value = options.c_max.value_or(0);
                ap.pre_bound = true;
                break;
              case Term::Kind::Variable:
                ap.var = var_slot(t.name);
                if (bound.count(t.name)) {
                  ap.action = ArgPlan::Action::CheckVar;
                  ap.pre_bound = bound_at_entry.count(t.name) > 0;
                } else {
                  ap.action = ArgPlan::Action::BindVar;
                  bound.insert(t.name);
                }
                break;
              case Term::Kind::VariableMinusOne:
                ap.var = var_slot(t.name);
                if (bound.count(t.name)) {
                  ap.action = ArgPlan::Action::CheckVarMinusOne;
                  ap.pre_bound = bound_at_entry.count(t.name) > 0;
                } else {
                  ap.action = ArgPlan::Action::BindVarFromMinusOne;
                  bound.insert(t.name);
                }
                break;
            }
            if (ap.pre_bound) lp.bound_mask |= 1u << i;
            lp.args.push_back(ap);
          }
          schedule.push_back(std::move(lp));
          flush_checks();
        }
        return schedule;
      };

      plan.schedules.push_back(make_schedule(-1));
      for (std::size_t pi = 0; pi < positives.size(); ++pi) {
        const int pid = pred_ids.at(r.body[positives[pi]].atom.pred);
        if (preds[pid].idb && preds[pid].stratum == plan.stratum) {
          plan.schedules.push_back(make_schedule(static_cast<int>(pi)));
        }
        plan.body_preds.push_back(pid);
      }

      // Head plan; variable slots must already exist (safety guarantees it).
      for (const auto& t : r.head.args) {
        HeadArg ha{};
        switch (t.kind) {
          case Term::Kind::Constant:
            ha.src = HeadArg::Src::Const;
            ha.const_index = const_id(t.name);
            has_constants = true;
            break;
          case Term::Kind::Integer:
            ha.src = HeadArg::Src::Int;
            ha.value = t.value;
            break;
          case Term::Kind::CMax:
            ha.src = HeadArg::Src::Int;
            ha.value = options.c_max.value_or(0);
            break;
          case Term::Kind::Variable:
            ha.src = HeadArg::Src::Var;
            ha.var = var_slots.at(t.name);
            break;
          case Term::Kind::VariableMinusOne:
            ha.src = HeadArg::Src::VarMinusOne;
            ha.var = var_slots.at(t.name);
            break;
        }
        plan.head.push_back(ha);
      }
      plan.num_vars = static_cast<int>(var_slots.size());

      // Body constants also force the by-name mapping at run time.
      for (const auto& lit : r.body) {
        for (const auto& t : lit.atom.args) {
          if (t.kind == Term::Kind::Constant) has_constants = true;
        }
      }

      for (int pid : plan.body_preds) {
        if (pid < 64) plan.body_bits |= 1ULL << pid;
      }
      if (plan.schedules.size() > 1) strata_recursive[plan.stratum] = 1;
      detect_kernel(plan);
      strata_rules[plan.stratum].push_back(static_cast<int>(plans.size()));
      plans.push_back(std::move(plan));
    }
  }

  // --- generic tuple path ---------------------------------------------------

  struct GenRel {
    std::vector<std::uint64_t> rows;
    std::unordered_set<std::uint64_t> members;
    std::size_t delta_begin = 0;
    std::size_t delta_end = 0;
    // Lazily-built equality indexes keyed by bound-position mask.
    std::map<std::uint32_t, std::unordered_map<std::uint64_t, std::vector<std::uint32_t>>> indexes;

    bool insert(std::uint64_t row) {
      if (!members.insert(row).second) return false;
      rows.push_back(row);
      for (auto& [mask, index] : indexes) {
        std::uint64_t key = 0;
        for (int i = 0; i < 4; ++i) {
          if (mask & (1u << i)) key |= row & (0xFFFFULL << (16 * i));
        }
        index[key].push_back(static_cast<std::uint32_t>(rows.size() - 1));
      }
      return true;
    }
  };

  std::vector<GenRel> gen_rels;
  std::vector<int> run_const_ids;  // program constant -> store symbol id

  static std::uint64_t encode_row(const Tuple& t) {
    std::uint64_t row = 0;
    for (std::size_t i = 0; i < t.size(); ++i) row |= encode_field(static_cast<std::uint16_t>(t[i]), static_cast<int>(i));
    return row;
  }

  void ensure_index(GenRel& rel, std::uint32_t mask, int arity) {
    if (rel.indexes.count(mask)) return;
    auto& index = rel.indexes[mask];
    for (std::size_t ri = 0; ri < rel.rows.size(); ++ri) {
      std::uint64_t key = 0;
      for (int i = 0; i < arity; ++i) {
        if (mask & (1u << i)) key |= rel.rows[ri] & (0xFFFFULL << (16 * i));
      }
      index[key].push_back(static_cast<std::uint32_t>(ri));
    }
  }

  // Executes one schedule; returns true when a new head tuple appeared.
  bool execute_generic(const RulePlan& plan, const std::vector<LiteralPlan>& schedule) {
    thread_local std::vector<int> binding;
    binding.assign(plan.num_vars, 0);
    bool derived = false;

    const int cmax = options.c_max.value_or(0);
    const auto fire_head = [&]() {
      std::uint64_t row = 0;
      for (std::size_t i = 0; i < plan.head.size(); ++i) {
        int v = 0;
        switch (plan.head[i].src) {
          case HeadArg::Src::Var: v = binding[plan.head[i].var]; break;
          case HeadArg::Src::VarMinusOne: v = binding[plan.head[i].var] - 1; break;
          case HeadArg::Src::Const: v = run_const_ids[plan.head[i].const_index]; break;
          case HeadArg::Src::Int: v = plan.head[i].value; break;
        }
        if (preds[plan.head_pred].arity > 0 &&
            preds[plan.head_pred].sorts[i] == SortKind::Counter) {
          if (v < 1 || v > cmax) return;  // out-of-range counter: no fact
        }
        row |= encode_field(static_cast<std::uint16_t>(v), static_cast<int>(i));
      }
      if (gen_rels[plan.head_pred].insert(row)) derived = true;
    };

    const std::function<void(std::size_t)> step = [&](std::size_t si) {
      if (si == schedule.size()) {
        fire_head();
        return;
      }
      const LiteralPlan& lp = schedule[si];
      if (lp.kind == LiteralPlan::Kind::Guard) {
        const int bound = lp.guard_bound.value_or(cmax);
        const int v = binding[lp.guard_var];
        if (v >= 1 && v <= bound && v <= cmax) step(si + 1);
        return;
      }
      if (lp.kind == LiteralPlan::Kind::Negative) {
        std::uint64_t row = 0;
        for (std::size_t i = 0; i < lp.args.size(); ++i) {
          int v = 0;
          switch (lp.args[i].action) {
            case ArgPlan::Action::CheckConst: v = run_const_ids[lp.args[i].const_index]; break;
            case ArgPlan::Action::CheckInt: v = lp.args[i].value; break;
            case ArgPlan::Action::CheckVar: v = binding[lp.args[i].var]; break;
            case ArgPlan::Action::CheckVarMinusOne: v = binding[lp.args[i].var] - 1; break;
            default: throw InternalError("negative literal with unbound argument");
          }
          if (v < 0 || v > 0xFFFF) return;
          row |= encode_field(static_cast<std::uint16_t>(v), static_cast<int>(i));
        }
        if (!gen_rels[lp.pred].members.count(row)) step(si + 1);
        return;
      }

      GenRel& rel = gen_rels[lp.pred];
      // Bindings need no save/restore: the plan only reads a variable after
      // the literal that binds it, and every candidate row rebinds first.
      const auto match_row = [&](std::uint64_t row) {
        bool ok = true;
        for (std::size_t i = 0; i < lp.args.size() && ok; ++i) {
          const int v = static_cast<int>((row >> (16 * i)) & 0xFFFF);
          const ArgPlan& ap = lp.args[i];
          switch (ap.action) {
            case ArgPlan::Action::CheckConst: ok = v == run_const_ids[ap.const_index]; break;
            case ArgPlan::Action::CheckInt: ok = v == ap.value; break;
            case ArgPlan::Action::CheckVar: ok = v == binding[ap.var]; break;
            case ArgPlan::Action::CheckVarMinusOne: ok = v == binding[ap.var] - 1; break;
            case ArgPlan::Action::BindVar: binding[ap.var] = v; break;
            case ArgPlan::Action::BindVarFromMinusOne: binding[ap.var] = v + 1; break;
          }
        }
        if (ok) step(si + 1);
      };

      const std::size_t begin = lp.delta ? rel.delta_begin : 0;
      const std::size_t end = lp.delta ? rel.delta_end : rel.rows.size();
      if (!lp.delta && lp.bound_mask != 0 && rel.rows.size() > 32) {
        ensure_index(rel, lp.bound_mask, static_cast<int>(lp.args.size()));
        std::uint64_t key = 0;
        bool feasible = true;
        for (std::size_t i = 0; i < lp.args.size(); ++i) {
          if (!(lp.bound_mask & (1u << i))) continue;
          int v = 0;
          switch (lp.args[i].action) {
            case ArgPlan::Action::CheckConst: v = run_const_ids[lp.args[i].const_index]; break;
            case ArgPlan::Action::CheckInt: v = lp.args[i].value; break;
            case ArgPlan::Action::CheckVar: v = binding[lp.args[i].var]; break;
            case ArgPlan::Action::CheckVarMinusOne: v = binding[lp.args[i].var] - 1; break;
            default: feasible = false; break;
          }
          if (v < 0 || v > 0xFFFF) feasible = false;
          if (!feasible) break;
          key |= encode_field(static_cast<std::uint16_t>(v), static_cast<int>(i));
        }
        if (!feasible) return;
        const auto& index = rel.indexes[lp.bound_mask];
        const auto it = index.find(key);
        if (it == index.end()) return;
        const auto& ids = it->second;
        const std::size_t n = ids.size();
        for (std::size_t i = 0; i < n; ++i) match_row(rel.rows[ids[i]]);
        return;
      }
      for (std::size_t i = begin; i < end; ++i) match_row(rel.rows[i]);
    };

    step(0);
    return derived;
  }

  FactStore run_generic(const FactStore& edb) {
    FactStore out = prepare_output(edb);

    gen_rels.assign(preds.size(), {});
    // Load EDB relations.
    for (std::size_t pi = 0; pi < preds.size(); ++pi) {
      if (preds[pi].idb) continue;
      const Relation* rel = edb.find(preds[pi].name);
      if (rel == nullptr) continue;
      for (const auto& t : rel->tuples) {
        for (int v : t) {
          if (v < 0 || v > 0xFFFF) throw InputError("symbol id exceeds engine limits");
        }
        gen_rels[pi].insert(encode_row(t));
      }
    }

    for (const auto& rules : strata_rules) {
      // Round 0: full schedules.
      std::vector<std::size_t> mark(preds.size());
      for (std::size_t pi = 0; pi < preds.size(); ++pi) mark[pi] = gen_rels[pi].rows.size();
      for (int ri : rules) execute_generic(plans[ri], plans[ri].schedules[0]);
      for (;;) {
        bool grew = false;
        for (std::size_t pi = 0; pi < preds.size(); ++pi) {
          gen_rels[pi].delta_begin = mark[pi];
          gen_rels[pi].delta_end = gen_rels[pi].rows.size();
          if (gen_rels[pi].delta_begin != gen_rels[pi].delta_end) grew = true;
          mark[pi] = gen_rels[pi].rows.size();
        }
        if (!grew) break;
        for (int ri : rules) {
          for (std::size_t s = 1; s < plans[ri].schedules.size(); ++s) {
            const int delta_pred = plans[ri].schedules[s].front().pred;
            if (gen_rels[delta_pred].delta_begin == gen_rels[delta_pred].delta_end) continue;
            execute_generic(plans[ri], plans[ri].schedules[s]);
          }
        }
      }
    }

    store_results(out);
    return out;
  }

  // --- bitmask path ---------------------------------------------------------

  std::vector<std::uint64_t> masks;

  bool mask_capable_plan() const {
    if (max_arity > 2) return false;
    if (options.c_max && *options.c_max > kMaskDomain) return false;
    for (const auto& plan : plans) {
      for (const auto& ha : plan.head) {
        if (ha.src == HeadArg::Src::Int && (ha.value < 1 || ha.value > kMaskDomain)) return false;
      }
    }
    return true;
  }

  // Encodes a counter value into a mask field (counters are 1-based).
  static int mask_field(SortKind sort, int v) { return sort == SortKind::Counter ? v - 1 : v; }

  void detect_kernel(RulePlan& plan) {
    const auto& schedule = plan.schedules[0];
    const auto counterless = [&](int pid) {
      return pid >= 0 && !preds[pid].counters;
    };
    if (!counterless(plan.head_pred)) return;
    for (const auto& lp : schedule) {
      if (lp.kind == LiteralPlan::Kind::Guard || !counterless(lp.pred)) return;
    }
    const auto pos_unary_bind = [](const LiteralPlan& lp, int* var) {
      if (lp.kind != LiteralPlan::Kind::Positive || lp.args.size() != 1) return false;
      if (lp.args[0].action != ArgPlan::Action::BindVar) return false;
      *var = lp.args[0].var;
      return true;
    };
    const auto unary_check = [](const LiteralPlan& lp, LiteralPlan::Kind kind, int var) {
      return lp.kind == kind && lp.args.size() == 1 &&
             lp.args[0].action == ArgPlan::Action::CheckVar && lp.args[0].var == var;
    };
    const auto head_is = [&](std::initializer_list<int> vars) {
      if (plan.head.size() != vars.size()) return false;
      std::size_t i = 0;
      for (int v : vars) {
        if (plan.head[i].src != HeadArg::Src::Var || plan.head[i].var != v) return false;
        ++i;
      }
      return true;
    };

    if (schedule.size() == 1) {
      const LiteralPlan& l = schedule[0];
      if (l.kind != LiteralPlan::Kind::Positive) return;
      int v0 = -1;
      if (pos_unary_bind(l, &v0) && head_is({v0})) {
        plan.kernel = Kernel::Copy;
        plan.kernel_a = l.pred;
        return;
      }
      if (l.args.size() == 2 && l.args[0].action == ArgPlan::Action::BindVar) {
        const int a0 = l.args[0].var;
        if (l.args[1].action == ArgPlan::Action::BindVar) {
          const int a1 = l.args[1].var;
          if (head_is({a0})) {
            plan.kernel = Kernel::Proj0;
            plan.kernel_a = l.pred;
          } else if (head_is({a1})) {
            plan.kernel = Kernel::Proj1;
            plan.kernel_a = l.pred;
          }
        } else if (l.args[1].action == ArgPlan::Action::CheckVar && l.args[1].var == a0 &&
                   head_is({a0})) {
          plan.kernel = Kernel::Diag;
          plan.kernel_a = l.pred;
        }
      }
      return;
    }

    if (schedule.size() == 2) {
      int v0 = -1;
      if (pos_unary_bind(schedule[0], &v0) && head_is({v0})) {
        if (unary_check(schedule[1], LiteralPlan::Kind::Positive, v0)) {
          plan.kernel = Kernel::And2;
          plan.kernel_a = schedule[0].pred;
          plan.kernel_b = schedule[1].pred;
        } else if (unary_check(schedule[1], LiteralPlan::Kind::Negative, v0)) {
          plan.kernel = Kernel::AndNot;
          plan.kernel_a = schedule[0].pred;
          plan.kernel_b = schedule[1].pred;
        }
        return;
      }
      // h(x) <- a(x,y), b(y)
      const LiteralPlan& l0 = schedule[0];
      const LiteralPlan& l1 = schedule[1];
      if (l0.kind == LiteralPlan::Kind::Positive && l0.args.size() == 2 &&
          l0.args[0].action == ArgPlan::Action::BindVar &&
          l0.args[1].action == ArgPlan::Action::BindVar &&
          unary_check(l1, LiteralPlan::Kind::Positive, l0.args[1].var) &&
          head_is({l0.args[0].var})) {
        plan.kernel = Kernel::Step;
        plan.kernel_a = l0.pred;
        plan.kernel_b = l1.pred;
      }
      return;
    }

    if (schedule.size() == 3) {
      int v0 = -1;
      if (!pos_unary_bind(schedule[0], &v0)) return;
      const LiteralPlan& l1 = schedule[1];
      const LiteralPlan& l2 = schedule[2];
      if (l1.kind != LiteralPlan::Kind::Positive || l1.args.size() != 2 ||
          l1.args[0].action != ArgPlan::Action::CheckVar || l1.args[0].var != v0 ||
          l1.args[1].action != ArgPlan::Action::BindVar) {
        return;
      }
      const int v1 = l1.args[1].var;
      if (unary_check(l2, LiteralPlan::Kind::Positive, v1)) {
        if (head_is({v0})) {
          plan.kernel = Kernel::GuardStep;
        } else if (head_is({v0, v1})) {
          plan.kernel = Kernel::BmatBase;
        } else {
          return;
        }
        plan.kernel_a = schedule[0].pred;
        plan.kernel_b = l1.pred;
        plan.kernel_c = l2.pred;
        return;
      }
      // h(x,y) <- a(x), b(x,u), c(u,y)
      if (l2.kind == LiteralPlan::Kind::Positive && l2.args.size() == 2 &&
          l2.args[0].action == ArgPlan::Action::CheckVar && l2.args[0].var == v1 &&
          l2.args[1].action == ArgPlan::Action::BindVar &&
          head_is({v0, l2.args[1].var})) {
        plan.kernel = Kernel::BmatStep;
        plan.kernel_a = schedule[0].pred;
        plan.kernel_b = l1.pred;
        plan.kernel_c = l2.pred;
      }
      return;
    }
  }

  bool execute_kernel(const RulePlan& plan) {
    std::uint64_t& out = masks[plan.head_pred];
    const std::uint64_t old = out;
    switch (plan.kernel) {
      case Kernel::Copy:
        out |= masks[plan.kernel_a];
        break;
      case Kernel::And2:
        out |= masks[plan.kernel_a] & masks[plan.kernel_b];
        break;
      case Kernel::AndNot:
        out |= masks[plan.kernel_a] & ~masks[plan.kernel_b];
        break;
      case Kernel::Step: {
        const std::uint64_t bin = masks[plan.kernel_a];
        const std::uint64_t u = masks[plan.kernel_b];
        for (int s = 0; s < kMaskDomain; ++s) {
          if ((bin >> (8 * s)) & u & 0xFF) out |= 1ULL << s;
        }
        break;
      }
      case Kernel::GuardStep: {
        const std::uint64_t guard = masks[plan.kernel_a];
        const std::uint64_t bin = masks[plan.kernel_b];
        const std::uint64_t u = masks[plan.kernel_c];
        std::uint64_t reach = 0;
        for (int s = 0; s < kMaskDomain; ++s) {
          if ((bin >> (8 * s)) & u & 0xFF) reach |= 1ULL << s;
        }
        out |= guard & reach;
        break;
      }
      case Kernel::Diag: {
        const std::uint64_t bin = masks[plan.kernel_a];
        for (int s = 0; s < kMaskDomain; ++s) out |= ((bin >> (9 * s)) & 1ULL) << s;
        break;
      }
      case Kernel::Proj0: {
        const std::uint64_t bin = masks[plan.kernel_a];
        for (int s = 0; s < kMaskDomain; ++s) {
          if ((bin >> (8 * s)) & 0xFF) out |= 1ULL << s;
        }
        break;
      }
      case Kernel::Proj1: {
        std::uint64_t fold = masks[plan.kernel_a];
        fold |= fold >> 32;
        fold |= fold >> 16;
        fold |= fold >> 8;
        out |= fold & 0xFF;
        break;
      }
      case Kernel::BmatBase: {
        std::uint64_t at = masks[plan.kernel_a];
        const std::uint64_t bin = masks[plan.kernel_b];
        const std::uint64_t target = masks[plan.kernel_c] & 0xFF;
        while (at) {
          const int s = std::countr_zero(at);
          at &= at - 1;
          out |= (((bin >> (8 * s)) & target) & 0xFF) << (8 * s);
        }
        break;
      }
      case Kernel::BmatStep: {
        std::uint64_t at = masks[plan.kernel_a];
        const std::uint64_t bin = masks[plan.kernel_b];
        const std::uint64_t mat = masks[plan.kernel_c];
        while (at) {
          const int s = std::countr_zero(at);
          at &= at - 1;
          std::uint64_t mids = (bin >> (8 * s)) & 0xFF;
          std::uint64_t row = 0;
          while (mids) {
            const int u = std::countr_zero(mids);
            mids &= mids - 1;
            row |= (mat >> (8 * u)) & 0xFF;
          }
          out |= row << (8 * s);
        }
        break;
      }
      case Kernel::None:
        throw InternalError("execute_kernel on a generic plan");
    }
    return out != old;
  }

  bool execute_mask(const RulePlan& plan) {
    if (plan.kernel != Kernel::None) return execute_kernel(plan);
    const std::vector<LiteralPlan>& schedule = plan.schedules[0];
    const int cmax = options.c_max.value_or(0);
    bool derived = false;
    int binding[16];

    const auto arg_value = [&](const ArgPlan& ap, SortKind sort) -> int {
      switch (ap.action) {
        case ArgPlan::Action::CheckConst: return run_const_ids[ap.const_index];
        case ArgPlan::Action::CheckInt: return mask_field(sort, ap.value);
        case ArgPlan::Action::CheckVar: return mask_field(sort, binding[ap.var]);
        case ArgPlan::Action::CheckVarMinusOne: return mask_field(sort, binding[ap.var] - 1);
        default: return -1;
      }
    };

    const auto step = [&](auto&& self, std::size_t si) -> void {
      if (si == schedule.size()) {
        std::uint64_t bit = 0;
        const auto& sorts = preds[plan.head_pred].sorts;
        int fields[2] = {0, 0};
        for (std::size_t i = 0; i < plan.head.size(); ++i) {
          int v = 0;
          switch (plan.head[i].src) {
            case HeadArg::Src::Var: v = binding[plan.head[i].var]; break;
            case HeadArg::Src::VarMinusOne: v = binding[plan.head[i].var] - 1; break;
            case HeadArg::Src::Const: v = run_const_ids[plan.head[i].const_index]; break;
            case HeadArg::Src::Int: v = plan.head[i].value; break;
          }
          if (sorts[i] == SortKind::Counter && (v < 1 || v > cmax)) return;
          fields[i] = mask_field(sorts[i], v);
          if (fields[i] < 0 || fields[i] >= kMaskDomain) return;
        }
        bit = plan.head.empty() ? 1ULL
                                : (plan.head.size() == 1 ? 1ULL << fields[0]
                                                         : 1ULL << (8 * fields[0] + fields[1]));
        std::uint64_t& m = masks[plan.head_pred];
        if (!(m & bit)) {
          m |= bit;
          derived = true;
        }
        return;
      }
      const LiteralPlan& lp = schedule[si];
      if (lp.kind == LiteralPlan::Kind::Guard) {
        const int bound = lp.guard_bound.value_or(cmax);
        const int v = binding[lp.guard_var];
        if (v >= 1 && v <= bound && v <= cmax) self(self, si + 1);
        return;
      }
      const auto& sorts = preds[lp.pred].sorts;
      if (lp.kind == LiteralPlan::Kind::Negative) {
        std::uint64_t bit;
        if (lp.args.empty()) {
          bit = 1ULL;
        } else if (lp.args.size() == 1) {
          const int v = arg_value(lp.args[0], sorts[0]);
          if (v < 0 || v >= kMaskDomain) { self(self, si + 1); return; }
          bit = 1ULL << v;
        } else {
          const int a = arg_value(lp.args[0], sorts[0]);
          const int b = arg_value(lp.args[1], sorts[1]);
          if (a < 0 || a >= kMaskDomain || b < 0 || b >= kMaskDomain) { self(self, si + 1); return; }
          bit = 1ULL << (8 * a + b);
        }
        if (!(masks[lp.pred] & bit)) self(self, si + 1);
        return;
      }

      const std::uint64_t rel = masks[lp.pred];
      if (lp.args.empty()) {
        if (rel & 1ULL) self(self, si + 1);
        return;
      }
      const auto visit = [&](int rawa, int rawb) {
        // Raw values are mask fields; decode counters back to 1-based values.
        bool ok = true;
        const int decoded[2] = {sorts[0] == SortKind::Counter ? rawa + 1 : rawa,
                                lp.args.size() > 1 && sorts[1] == SortKind::Counter ? rawb + 1 : rawb};
        for (std::size_t i = 0; i < lp.args.size() && ok; ++i) {
          const ArgPlan& ap = lp.args[i];
          const int v = decoded[i];
          switch (ap.action) {
            case ArgPlan::Action::CheckConst: ok = v == run_const_ids[ap.const_index]; break;
            case ArgPlan::Action::CheckInt: ok = v == ap.value; break;
            case ArgPlan::Action::CheckVar: ok = v == binding[ap.var]; break;
            case ArgPlan::Action::CheckVarMinusOne: ok = v == binding[ap.var] - 1; break;
            case ArgPlan::Action::BindVar: binding[ap.var] = v; break;
            case ArgPlan::Action::BindVarFromMinusOne: binding[ap.var] = v + 1; break;
          }
        }
        if (ok) self(self, si + 1);
      };

      if (lp.args.size() == 1) {
        const ArgPlan& ap = lp.args[0];
        if (ap.pre_bound) {
          const int v = arg_value(ap, sorts[0]);
          if (v >= 0 && v < kMaskDomain && (rel & (1ULL << v))) self(self, si + 1);
        } else {
          std::uint64_t m = rel & 0xFF;
          while (m) {
            const int v = std::countr_zero(m);
            m &= m - 1;
            visit(v, 0);
          }
        }
        return;
      }

      // Binary literal; iteration strategy follows which sides are known
      // before the literal runs.
      const ArgPlan& a0 = lp.args[0];
      const ArgPlan& a1 = lp.args[1];
      const bool b0 = a0.pre_bound;
      const bool b1 = a1.pre_bound;
      if (b0 && b1) {
        const int va = arg_value(a0, sorts[0]);
        const int vb = arg_value(a1, sorts[1]);
        if (va >= 0 && va < kMaskDomain && vb >= 0 && vb < kMaskDomain &&
            (rel & (1ULL << (8 * va + vb)))) {
          self(self, si + 1);
        }
        return;
      }
      if (b0) {
        const int va = arg_value(a0, sorts[0]);
        if (va < 0 || va >= kMaskDomain) return;
        std::uint64_t row = (rel >> (8 * va)) & 0xFF;
        while (row) {
          const int vb = std::countr_zero(row);
          row &= row - 1;
          visit(va, vb);
        }
        return;
      }
      if (b1) {
        const int vb = arg_value(a1, sorts[1]);
        if (vb < 0 || vb >= kMaskDomain) return;
        for (int va = 0; va < kMaskDomain; ++va) {
          if (rel & (1ULL << (8 * va + vb))) visit(va, vb);
        }
        return;
      }
      std::uint64_t m = rel;
      while (m) {
        const int bit = std::countr_zero(m);
        m &= m - 1;
        visit(bit >> 3, bit & 7);
      }
    };

    step(step, 0);
    return derived;
  }

  std::vector<std::uint64_t> mask_before_;

  void run_mask_strata() {
    // Dependency-aware naive iteration: re-run a rule only when one of its
    // positive body relations changed in the previous round.
    const bool small = preds.size() <= 64;
    mask_before_.resize(preds.size());
    std::vector<char> dirty_wide;
    if (!small) dirty_wide.assign(preds.size(), 1);
    for (std::size_t stratum = 0; stratum < strata_rules.size(); ++stratum) {
      const auto& rules = strata_rules[stratum];
      if (!strata_recursive[stratum]) {
        // No rule reads its own stratum: one pass reaches the fixpoint.
        for (int ri : rules) execute_mask(plans[ri]);
        continue;
      }
      std::uint64_t dirty_bits = ~0ULL;
      if (!small) std::fill(dirty_wide.begin(), dirty_wide.end(), 1);
      bool first = true;
      for (;;) {
        std::copy(masks.begin(), masks.end(), mask_before_.begin());
        bool any = false;
        for (int ri : rules) {
          const RulePlan& plan = plans[ri];
          bool relevant = first || plan.body_preds.empty();
          if (!relevant) {
            if (small) {
              relevant = (plan.body_bits & dirty_bits) != 0;
            } else {
              relevant = std::any_of(plan.body_preds.begin(), plan.body_preds.end(),
                                     [&](int p) { return dirty_wide[p]; });
            }
          }
          if (relevant && execute_mask(plan)) any = true;
        }
        if (!any) break;
        if (small) {
          dirty_bits = 0;
          for (std::size_t pi = 0; pi < preds.size(); ++pi) {
            if (masks[pi] != mask_before_[pi]) dirty_bits |= 1ULL << pi;
          }
        } else {
          for (std::size_t pi = 0; pi < preds.size(); ++pi) {
            dirty_wide[pi] = masks[pi] != mask_before_[pi];
          }
        }
        first = false;
      }
    }
  }

  // --- shared ----------------------------------------------------------------

  FactStore prepare_output(const FactStore& edb) {
    FactStore out;
    for (const auto& s : edb.symbols()) out.intern(s);
    run_const_ids.assign(const_names.size(), 0);
    for (std::size_t i = 0; i < const_names.size(); ++i) run_const_ids[i] = out.intern(const_names[i]);

    // Validate the EDB side against the plan.
    for (const auto& [name, rel] : edb.relations()) {
      const auto it = pred_ids.find(name);
      if (it == pred_ids.end()) continue;  // unused relation
      const PredInfo& info = preds[it->second];
      if (info.idb) {
        throw InputError("relation '" + name + "' is derived by the program; EDB facts for it are not allowed");
      }
      if (info.arity >= 0 && rel.arity != info.arity) {
        throw InputError("arity mismatch between facts and rules for predicate '" + name + "'");
      }
      if (info.arity >= 0 && rel.sorts != info.sorts) {
        throw InputError("sort mismatch between facts and rules for predicate '" + name + "'");
      }
      if (options.c_max) {
        for (const auto& t : rel.tuples) {
          for (std::size_t i = 0; i < t.size(); ++i) {
            if (rel.sorts[i] == SortKind::Counter && (t[i] < 1 || t[i] > *options.c_max)) {
              throw InputError("counter fact outside 1..c_max in relation '" + name + "'");
            }
          }
        }
      }
    }
    return out;
  }

  void store_results(FactStore& out) {
    for (std::size_t pi = 0; pi < preds.size(); ++pi) {
      const PredInfo& info = preds[pi];
      if (!info.idb) continue;
      out.declare(info.name, std::max(info.arity, 0), info.sorts);
      for (std::uint64_t row : gen_rels[pi].rows) {
        Tuple t(std::max(info.arity, 0));
        for (int i = 0; i < info.arity; ++i) t[i] = static_cast<std::int32_t>((row >> (16 * i)) & 0xFFFF);
        out.add(info.name, std::move(t), info.sorts);
      }
    }
  }

  void store_mask_results(FactStore& out, int domain) {
    for (std::size_t pi = 0; pi < preds.size(); ++pi) {
      const PredInfo& info = preds[pi];
      if (!info.idb) continue;
      out.declare(info.name, std::max(info.arity, 0), info.sorts);
      const std::uint64_t m = masks[pi];
      if (info.arity == 0) {
        if (m & 1ULL) out.add(info.name, Tuple{}, info.sorts);
      } else if (info.arity == 1) {
        for (int a = 0; a < kMaskDomain; ++a) {
          if (m & (1ULL << a)) {
            const int v = info.sorts[0] == SortKind::Counter ? a + 1 : a;
            out.add(info.name, Tuple{v}, info.sorts);
          }
        }
      } else {
        for (int a = 0; a < kMaskDomain; ++a) {
          for (int b = 0; b < kMaskDomain; ++b) {
            if (m & (1ULL << (8 * a + b))) {
              const int va = info.sorts[0] == SortKind::Counter ? a + 1 : a;
              const int vb = info.sorts[1] == SortKind::Counter ? b + 1 : b;
              out.add(info.name, Tuple{va, vb}, info.sorts);
            }
          }
        }
      }
    }
    (void)domain;
  }

  FactStore run(const FactStore& edb) {
    const bool mask_ok = !options.force_generic && mask_capable_plan() && !has_constants_outside_mask(edb);
    if (!mask_ok) return run_generic(edb);

    FactStore out = prepare_output(edb);
    masks.assign(preds.size(), 0);
    for (std::size_t pi = 0; pi < preds.size(); ++pi) {
      if (preds[pi].idb) continue;
      const Relation* rel = edb.find(preds[pi].name);
      if (rel == nullptr) continue;
      for (const auto& t : rel->tuples) {
        if (t.empty()) {
          masks[pi] |= 1ULL;
        } else if (t.size() == 1) {
          masks[pi] |= 1ULL << mask_field(rel->sorts[0], t[0]);
        } else {
          masks[pi] |= 1ULL << (8 * mask_field(rel->sorts[0], t[0]) + mask_field(rel->sorts[1], t[1]));
        }
      }
    }
    run_mask_strata();
    store_mask_results(out, edb.num_symbols());
    return out;
  }

  bool has_constants_outside_mask(const FactStore& edb) const {
    // The mask path needs every symbol id (input symbols plus program
    // constants not present in the input) to stay below kMaskDomain.
    int extra = 0;
    for (const auto& name : const_names) {
      if (edb.find_symbol(name) < 0) ++extra;
    }
    if (edb.num_symbols() + extra > kMaskDomain) return true;
    for (const auto& [name, rel] : edb.relations()) {
      if (rel.arity > 2) return true;
      for (const auto& t : rel.tuples) {
        for (std::size_t i = 0; i < t.size(); ++i) {
          if (rel.sorts[i] == SortKind::Counter) {
            if (t[i] < 1 || t[i] > kMaskDomain) return true;
          } else if (t[i] >= kMaskDomain) {
            return true;
          }
        }
      }
    }
    return false;
  }

  std::uint64_t run_goal_mask(std::span<const std::pair<std::string_view, std::uint64_t>> edb,
                              int domain_size) {
    if (goal_pred < 0) throw InputError("program has no goal predicate");
    if (domain_size > kMaskDomain || !mask_capable_plan() || has_constants) {
      throw InternalError("run_goal_mask requires a mask-capable program and domain");
    }
    masks.assign(preds.size(), 0);
    for (const auto& [name, mask] : edb) {
      const auto it = pred_ids.find(std::string(name));
      if (it != pred_ids.end() && !preds[it->second].idb) masks[it->second] = mask;
    }
    run_mask_strata();
    return masks[goal_pred];
  }

  int edb_slot(std::string_view name) const {
    const auto it = pred_ids.find(std::string(name));
    if (it == pred_ids.end() || preds[it->second].idb) return -1;
    return it->second;
  }

  std::uint64_t run_goal_mask_slots(std::span<const std::pair<int, std::uint64_t>> edb) {
    masks.assign(preds.size(), 0);
    for (const auto& [slot, mask] : edb) {
      if (slot >= 0) masks[slot] = mask;
    }
    run_mask_strata();
    return masks[goal_pred];
  }
};

Engine::Engine(Program program, EngineOptions options)
    : impl_(std::make_unique<Impl>(std::move(program), std::move(options))) {}
Engine::~Engine() = default;
Engine::Engine(Engine&&) noexcept = default;
Engine& Engine::operator=(Engine&&) noexcept = default;

FactStore Engine::run(const FactStore& edb) { return impl_->run(edb); }

std::uint64_t Engine::run_goal_mask(
    std::span<const std::pair<std::string_view, std::uint64_t>> edb, int domain_size) {
  return impl_->run_goal_mask(edb, domain_size);
}

int Engine::edb_slot(std::string_view name) const { return impl_->edb_slot(name); }

std::uint64_t Engine::run_goal_mask_slots(std::span<const std::pair<int, std::uint64_t>> edb) {
  return impl_->run_goal_mask_slots(edb);
}

const Program& Engine::program() const { return impl_->program; }
const Stratification& Engine::stratification() const { return impl_->strat; }

FactStore evaluate(const Program& p, const FactStore& edb) {
  Engine engine(p);
  return engine.run(edb);
}

FactStore evaluate_succ(const Program& p, const FactStore& edb, int c_max) {
  EngineOptions options;
  options.c_max = c_max;
  Engine engine(p, options);
  return engine.run(edb);
}

}  // namespace ctldl

// Acceptance suite: ten equivalence and behavior criteria, each printed as
// one PASS/FAIL line. Exits non-zero when any criterion fails.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "ctldl/bench.hpp"
#include "ctldl/database.hpp"
#include "ctldl/datalog.hpp"
#include "ctldl/decision.hpp"
#include "ctldl/formula.hpp"
#include "ctldl/kripke.hpp"
#include "ctldl/model_check.hpp"
#include "ctldl/std_bridge.hpp"
#include "ctldl/tds_bridge.hpp"
#include "helpers.hpp"

using namespace ctldl;

namespace {

const std::vector<std::string> kAtoms{"p", "q"};

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// --- corpora ---------------------------------------------------------------

std::vector<Formula> unique_corpus(std::size_t count, int depth, helpers::Flavor flavor,
                                   unsigned seed) {
  std::mt19937 rng(seed);
  std::vector<Formula> out;
  std::set<std::string> seen;
  while (out.size() < count) {
    const Formula f = helpers::random_formula(rng, depth, 2, flavor);
    if (static_cast<int>(f.depth()) > depth) continue;
    if (seen.insert(render_formula(f, kAtoms)).second) out.push_back(f);
  }
  return out;
}

bool contains_all_until_tilde(const Formula& f) {
  if (f.kind() == FormulaKind::ForallUntilTilde) return true;
  if (f.arity() >= 1 && contains_all_until_tilde(f.left())) return true;
  if (f.arity() >= 2 && contains_all_until_tilde(f.right())) return true;
  return false;
}

StdProgram random_std_tree(std::mt19937& rng, int depth, int num_unary) {
  std::uniform_int_distribution<int> coin(0, 99);
  const int r = coin(rng);
  if (depth <= 0 || r < 25) {
    if (r % 5 == 0) return StdProgram::top_leaf(num_unary);
    return StdProgram::atom_leaf(r % num_unary, num_unary);
  }
  const auto sub = [&] { return random_std_tree(rng, depth - 1, num_unary); };
  if (r < 45) return StdProgram::build(StdOpKind::Not, {sub()}, num_unary);
  if (r < 60) return StdProgram::build(StdOpKind::And, {sub(), sub()}, num_unary);
  if (r < 72) return StdProgram::build(StdOpKind::Next, {sub()}, num_unary);
  if (r < 86) return StdProgram::build(StdOpKind::Until, {sub(), sub()}, num_unary);
  return StdProgram::build(StdOpKind::UntilTilde, {sub(), sub()}, num_unary);
}

Database random_db(std::mt19937& rng) {
  std::uniform_int_distribution<int> nconst(1, 5), coin(0, 3);
  for (;;) {
    Database d;
    const int n = nconst(rng);
    for (int i = 0; i < n; ++i) d.intern("c" + std::to_string(i));
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        if (coin(rng) == 0) d.r.emplace_back(a, b);
      }
    }
    d.unary.assign(2, {});
    for (int u = 0; u < 2; ++u) {
      for (int c = 0; c < n; ++c) {
        if (coin(rng) < 2) d.unary[u].push_back(c);
      }
    }
    d.normalize();
    if (!domain_of(d).empty()) return d;
  }
}

// --- packed structures -----------------------------------------------------

struct Packed {
  std::uint8_t n = 0;
  std::uint64_t trans = 0;  // bit 8*s+t
  std::uint64_t p0 = 0, p1 = 0;
};

Packed pack(const KripkeStructure& k) {
  Packed s;
  s.n = static_cast<std::uint8_t>(k.num_states());
  for (const auto& [a, b] : k.trans) s.trans |= 1ULL << (8 * a + b);
  for (int st = 0; st < k.num_states(); ++st) {
    if (k.atom_true_at(st, 0)) s.p0 |= 1ULL << st;
    if (k.ap.size() > 1 && k.atom_true_at(st, 1)) s.p1 |= 1ULL << st;
  }
  return s;
}

KripkeStructure unpack(const Packed& s) {
  KripkeStructure k;
  for (int i = 0; i < s.n; ++i) k.states.push_back("s" + std::to_string(i));
  k.ap = kAtoms;
  k.valuation.assign(s.n, {});
  for (int st = 0; st < s.n; ++st) {
    if ((s.p0 >> st) & 1) k.valuation[st].push_back(0);
    if ((s.p1 >> st) & 1) k.valuation[st].push_back(1);
    for (int t = 0; t < s.n; ++t) {
      if (s.trans & (1ULL << (8 * st + t))) k.trans.emplace_back(st, t);
    }
  }
  std::sort(k.trans.begin(), k.trans.end());
  return k;
}

std::vector<Packed> materialize_structures(int max_states, int max_outdegree) {
  std::vector<Packed> out;
  for (int n = 1; n <= max_states; ++n) {
    for_each_total_structure_class(
        n, 2, [&](const KripkeStructure& k) { out.push_back(pack(k)); }, max_outdegree);
  }
  return out;
}

std::set<std::string> goal_names(const FactStore& fs, const std::string& goal) {
  std::set<std::string> out;
  if (const Relation* rel = fs.find(goal); rel != nullptr) {
    for (const auto& t : rel->tuples) out.insert(fs.symbol(t[0]));
  }
  return out;
}

// --- criterion 1 -----------------------------------------------------------

std::string criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<Formula> corpus = unique_corpus(500, 4, helpers::Flavor::Enf, 2024);
  const std::vector<Packed> structures = materialize_structures(4, 0);

  std::atomic<long long> pairs{0};
  std::atomic<long long> full_checks{0};
  std::mutex mu;
  std::vector<std::string> failures;

  const auto worker = [&](int tid, int num_threads) {
    long long local_pairs = 0;
    for (std::size_t fi = tid; fi < corpus.size(); fi += num_threads) {
      const Formula& f = corpus[fi];
      const CompiledFormula cf = CompiledFormula::compile(f);
      const datalog::Program prog = flatten(ctl_to_std(f, 2));
      Engine engine(prog);
      const std::pair<int, std::uint64_t> slots[3] = {
          {engine.edb_slot("R"), 0}, {engine.edb_slot("P0"), 0}, {engine.edb_slot("P1"), 0}};
      for (const Packed& s : structures) {
        std::pair<int, std::uint64_t> edb[3] = {
            {slots[0].first, s.trans}, {slots[1].first, s.p0}, {slots[2].first, s.p1}};
        const std::uint64_t atoms[2] = {s.p0, s.p1};
        const std::uint64_t want = check_mask_packed(cf, s.n, s.trans, atoms);
        const std::uint64_t got =
            engine.run_goal_mask_slots(std::span<const std::pair<int, std::uint64_t>>(edb, 3));
        ++local_pairs;
        if (got != want) {
          std::lock_guard<std::mutex> lock(mu);
          if (failures.size() < 5) {
            failures.push_back("formula '" + render_formula(f, kAtoms) + "' on\n" +
                               render_kripke(unpack(s)));
          }
        }
        // sampled cross-check through the public, unoptimized route
        if (local_pairs % 1000003 == 0) {
          const KripkeStructure k = unpack(s);
          const FactStore result = evaluate(prog, database_to_facts(kripke_to_db(k)));
          std::uint64_t slow = 0;
          if (const Relation* rel = result.find("G"); rel != nullptr) {
            for (const auto& t : rel->tuples) slow |= 1ULL << t[0];
          }
          const StateSet mc = model_check(k, f);
          std::uint64_t slow_mc = 0;
          for (int st : mc) slow_mc |= 1ULL << st;
          ++full_checks;
          if (slow != got || slow_mc != want) {
            std::lock_guard<std::mutex> lock(mu);
            failures.push_back("fast/slow route divergence on '" + render_formula(f, kAtoms) + "'");
          }
        }
      }
    }
    pairs += local_pairs;
  };

  std::thread t1(worker, 0, 2), t2(worker, 1, 2);
  t1.join();
  t2.join();

  const double secs = seconds_since(t0);
  std::ostringstream detail;
  detail << structures.size() << " structures x " << corpus.size() << " formulas = "
         << pairs.load() << " pairs, " << full_checks.load() << " slow-route samples, "
         << failures.size() << " mismatches, " << secs << "s";
  if (!failures.empty()) return "mismatches: " + failures.front() + " | " + detail.str();
  if (secs >= 300.0) return "runtime over five minutes: " + detail.str();
  std::cout << "    " << detail.str() << "\n";
  return "";
}

// --- criteria 2 and 3 ------------------------------------------------------

std::string criterion2_3(bool closure_variant) {
  std::mt19937 rng(closure_variant ? 7401 : 7400);
  std::vector<Database> dbs;
  for (int i = 0; i < 200; ++i) dbs.push_back(random_db(rng));
  std::mt19937 rng2(4097);
  std::vector<StdProgram> programs;
  for (int i = 0; i < 100; ++i) programs.push_back(random_std_tree(rng2, 3, 2));

  long long checked = 0;
  for (const auto& tree : programs) {
    const datalog::Program prog = flatten(tree);
    Engine engine(prog);
    const Formula f = std_to_ctl(tree);
    for (const auto& d : dbs) {
      const FactStore facts = database_to_facts(d);
      const FactStore direct = evaluate(prog, facts);
      if (closure_variant) {
        const FactStore closed = evaluate(prog, database_to_facts(total_closure(d)));
        if (!same_relation(direct, closed, "G")) {
          return "closure changed the goal of " + tree.to_sexpr() + " on\n" + render_database(d);
        }
      } else {
        const KripkeStructure k = db_to_kripke(d);
        const StateSet sat = model_check(k, f);
        std::set<std::string> mc_names;
        for (int s : sat) mc_names.insert(k.states[s]);
        if (goal_names(direct, "G") != mc_names) {
          return "route mismatch for " + tree.to_sexpr() + " on\n" + render_database(d);
        }
      }
      ++checked;
    }
  }

  if (closure_variant) {
    // the three-rule program whose answers ignore added self-loops
    const datalog::Program intro = parse_program(
        "% goal: G\nA(X) :- R(X,Y).\nG(X) :- !A(X), P0(X).\nG(X) :- R(X,Y), P0(Y).\n");
    for (const auto& d : dbs) {
      const FactStore a = evaluate(intro, database_to_facts(d));
      const FactStore b = evaluate(intro, database_to_facts(total_closure(d)));
      if (!same_relation(a, b, "G")) return "closure changed the three-rule example program";
      ++checked;
    }
  }
  std::cout << "    " << checked << " (database, program) checks\n";
  return "";
}

// --- criterion 4 -----------------------------------------------------------

std::string criterion4() {
  const auto t0 = std::chrono::steady_clock::now();
  // 300 positive-normal-form formulas with at least 50 all-until-tilde users
  std::vector<Formula> corpus = unique_corpus(250, 3, helpers::Flavor::Pnf, 5150);
  {
    std::mt19937 rng(5151);
    std::set<std::string> seen;
    for (const auto& f : corpus) seen.insert(render_formula(f, kAtoms));
    int with = 0;
    for (const auto& f : corpus) with += contains_all_until_tilde(f);
    while (with < 50 || corpus.size() < 300) {
      Formula body = helpers::random_formula(rng, 2, 2, helpers::Flavor::Pnf);
      Formula guard = helpers::random_formula(rng, 1, 2, helpers::Flavor::Pnf);
      const Formula f = Formula::forall_until_tilde(guard, body);
      if (!seen.insert(render_formula(f, kAtoms)).second) continue;
      corpus.push_back(f);
      ++with;
    }
  }

  const std::vector<Packed> structures = materialize_structures(4, 2);

  std::atomic<long long> pairs{0}, slow_checks{0};
  std::mutex mu;
  std::vector<std::string> failures;

  const auto worker = [&](int tid, int num_threads) {
    long long local = 0;
    for (std::size_t fi = tid; fi < corpus.size(); fi += num_threads) {
      const Formula pnf = to_pnf(corpus[fi]);
      const CompiledFormula cf = CompiledFormula::compile(pnf);
      const TdsProgram tree = ctl_to_tds(pnf, 2);
      // one engine per structure size: c_max is the state count
      std::vector<Engine> engines;
      int slot_s0[5], slot_s1[5], slot_p0[5], slot_p1[5];
      for (int n = 1; n <= 4; ++n) {
        EngineOptions opt;
        opt.c_max = n;
        engines.emplace_back(flatten_tds(tree, std::nullopt), opt);
        Engine& e = engines.back();
        slot_s0[n] = e.edb_slot("S0");
        slot_s1[n] = e.edb_slot("S1");
        slot_p0[n] = e.edb_slot("P0");
        slot_p1[n] = e.edb_slot("P1");
      }
      for (const Packed& s : structures) {
        const std::uint64_t atoms[2] = {s.p0, s.p1};
        const std::uint64_t want = check_mask_packed(cf, s.n, s.trans, atoms);
        // split the successors per state: ascending and descending orders
        std::uint64_t s0_fwd = 0, s1_fwd = 0, s0_bwd = 0, s1_bwd = 0;
        for (int st = 0; st < s.n; ++st) {
          const std::uint64_t row = (s.trans >> (8 * st)) & 0xFF;
          const int first = std::countr_zero(row);
          const bool two = (row & (row - 1)) != 0;
          const int second = two ? 63 - std::countl_zero(row) : -1;
          s0_fwd |= 1ULL << (8 * st + first);
          s0_bwd |= 1ULL << (8 * st + (two ? second : first));
          if (two) {
            s1_fwd |= 1ULL << (8 * st + second);
            s1_bwd |= 1ULL << (8 * st + first);
          }
        }
        Engine& engine = engines[s.n - 1];
        for (int order = 0; order < 2; ++order) {
          const std::pair<int, std::uint64_t> edb[4] = {
              {slot_s0[s.n], order == 0 ? s0_fwd : s0_bwd},
              {slot_s1[s.n], order == 0 ? s1_fwd : s1_bwd},
              {slot_p0[s.n], s.p0},
              {slot_p1[s.n], s.p1}};
          const std::uint64_t got =
              engine.run_goal_mask_slots(std::span<const std::pair<int, std::uint64_t>>(edb, 4));
          ++local;
          if (got != want) {
            std::lock_guard<std::mutex> lock(mu);
            if (failures.size() < 5) {
              failures.push_back("formula '" + render_formula(pnf, kAtoms) + "' order " +
                                 std::to_string(order) + " on\n" + render_kripke(unpack(s)));
            }
          }
          if (local % 500009 == 0) {
            // full public pipeline, including the database split
            const KripkeStructure k = unpack(s);
            const StateOrder ord =
                order == 0 ? StateOrder{} : StateOrder([](const std::string& a, const std::string& b) {
                  return a > b;
                });
            const StateSet slow = eval_tds(corpus[fi], k, ord);
            std::uint64_t slow_mask = 0;
            for (int st : slow) slow_mask |= 1ULL << st;
            ++slow_checks;
            if (slow_mask != got) {
              std::lock_guard<std::mutex> lock(mu);
              failures.push_back("fast path diverges from eval_tds on '" +
                                 render_formula(pnf, kAtoms) + "'");
            }
          }
        }
      }
    }
    pairs += local;
  };

  std::thread t1(worker, 0, 2), t2(worker, 1, 2);
  t1.join();
  t2.join();

  std::ostringstream detail;
  detail << structures.size() << " structures x " << corpus.size() << " formulas x 2 orders = "
         << pairs.load() << " pairs, " << slow_checks.load() << " slow-route samples, "
         << failures.size() << " mismatches, " << seconds_since(t0) << "s";
  if (!failures.empty()) return failures.front() + " | " + detail.str();
  std::cout << "    " << detail.str() << "\n";
  return "";
}

// --- criterion 5 -----------------------------------------------------------

std::string criterion5() {
  const std::vector<Formula> corpus = unique_corpus(1000, 4, helpers::Flavor::Full, 9001);
  const std::vector<Packed> structures = materialize_structures(3, 0);
  long long checks = 0;
  for (const auto& f : corpus) {
    const CompiledFormula raw = CompiledFormula::compile(f);
    const CompiledFormula enf = CompiledFormula::compile(to_enf(f));
    const CompiledFormula pnf = CompiledFormula::compile(to_pnf(f));
    for (const Packed& s : structures) {
      const std::uint64_t atoms[2] = {s.p0, s.p1};
      const std::uint64_t want = check_mask_packed(raw, s.n, s.trans, atoms);
      if (check_mask_packed(enf, s.n, s.trans, atoms) != want) {
        return "to_enf changed the truth set of '" + render_formula(f, kAtoms) + "' on\n" +
               render_kripke(unpack(s));
      }
      if (check_mask_packed(pnf, s.n, s.trans, atoms) != want) {
        return "to_pnf changed the truth set of '" + render_formula(f, kAtoms) + "' on\n" +
               render_kripke(unpack(s));
      }
      ++checks;
    }
  }
  std::cout << "    " << checks << " (formula, structure) checks\n";
  return "";
}

// --- criterion 6 -----------------------------------------------------------

std::string criterion6() {
  std::mt19937 rng(1201);
  std::set<std::string> seen;
  int round_trips = 0;
  while (round_trips < 1000) {
    const Formula f = helpers::random_formula(rng, 4, 2, helpers::Flavor::Enf);
    if (!seen.insert(render_formula(f, kAtoms)).second) continue;
    const int num_atoms = std::max(f.max_atom() + 1, 1);
    if (!(std_to_ctl(ctl_to_std(f, num_atoms)) == f)) {
      return "translation round trip broke '" + render_formula(f, kAtoms) + "'";
    }
    ++round_trips;
  }

  std::mt19937 rng2(1301);
  for (int i = 0; i < 500; ++i) {
    const StdProgram tree = random_std_tree(rng2, 3, 2);
    const StdProgram back = recognize_std(flatten(tree));
    if (back.to_sexpr() != tree.to_sexpr()) {
      return "recognizer returned a different tree for " + tree.to_sexpr();
    }
  }
  std::cout << "    1000 formula round trips, 500 recognizer round trips\n";
  return "";
}

// --- criterion 7 -----------------------------------------------------------

std::string criterion7() {
  const std::vector<Formula> corpus = unique_corpus(500, 4, helpers::Flavor::Enf, 2024);
  for (const auto& f : corpus) {
    const datalog::Program prog = flatten(ctl_to_std(f, 2));
    const std::size_t n = 1;  // two unary predicates: P0, P1
    if (prog.rules.size() > 8 * f.size() + (n + 2)) {
      return "rule count " + std::to_string(prog.rules.size()) + " exceeds the linear bound for '" +
             render_formula(f, kAtoms) + "'";
    }
  }
  std::mt19937 rng(1301);
  for (int i = 0; i < 500; ++i) {
    const StdProgram tree = random_std_tree(rng, 3, 2);
    if (std_to_ctl(tree).size() > tree.node_count()) {
      return "formula size exceeds the node count for " + tree.to_sexpr();
    }
  }
  std::cout << "    500 programs within 8|f|+(n+2) rules; 500 formulas within node count\n";
  return "";
}

// --- criterion 8 -----------------------------------------------------------

std::string criterion8() {
#ifdef CTLDL_CLI_PATH
  const std::string cmd =
      std::string(CTLDL_CLI_PATH) + " translate --direction ctl2std --formula \"E[ false ~U p ]\"";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return "could not spawn the command-line binary";
  std::string out;
  char buf[4096];
  std::size_t nread;
  while ((nread = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, nread);
  if (pclose(pipe) != 0) return "translate exited non-zero";
  const std::string expected =
      "% goal: G\n"
      "G1(X) :- W(X).\n"
      "G2(X) :- W(X), !G1(X).\n"
      "G3(X) :- P0(X).\n"
      "G(X) :- G2(X), G3(X).\n"
      "G(X) :- G3(X), !A(X).\n"
      "G(X) :- B1(X,X).\n"
      "G(X) :- G3(X), R(X,Y), G(Y).\n"
      "B1(X,Y) :- G3(X), R(X,Y), G3(Y).\n"
      "B1(X,Y) :- G3(X), R(X,U), B1(U,Y).\n"
      "A(X) :- R(X,Y).\n"
      "W(X) :- R(X,Y).\n"
      "W(X) :- R(Y,X).\n"
      "W(X) :- P0(X).\n";
  if (out != expected) return "translate output differs from the thirteen-rule program";
#else
  return "the command-line binary path was not configured";
#endif

  const Stratification s = stratify(parse_program("A :- !B.\nB :- !C.\nC :- D.\n"));
  if (s.strata.at("C") != 0 || s.strata.at("D") != 0 || s.strata.at("B") != 1 ||
      s.strata.at("A") != 2) {
    return "stratification of the three-rule example is off";
  }
  std::cout << "    thirteen-rule translation and example stratification reproduced\n";
  return "";
}

// --- criterion 9 -----------------------------------------------------------

std::string criterion9() {
  const char* satisfiable[20] = {
      "true", "p", "!p", "EX p", "E[ p U q ]", "A[ p U q ]", "E[ false ~U p ]", "AX p",
      "p | q", "EX EX p", "E[ true U q ]", "A[ p ~U p ]", "EX p & !p", "A[ p U q ] & p",
      "E[ p ~U q ]", "!E[ true U p ]", "EX !p", "q & EX q", "E[ q U q ]", "AX AX q"};
  for (const char* text : satisfiable) {
    const ParsedFormula pf = parse_formula(text);
    const auto v = bounded_satisfiable(pf.formula, 3, pf.atoms);
    if (v.kind != BoundedVerdict::Kind::Holds) {
      return std::string("no witness within three states for '") + text + "'";
    }
    const StateSet sat = model_check(v.witness->structure, pf.formula);
    if (!std::binary_search(sat.begin(), sat.end(), v.witness->state)) {
      return std::string("witness for '") + text + "' does not replay";
    }
  }

  const char* contradictions[10] = {
      "p & !p", "q & !q", "true & false", "EX p & !EX p", "AX p & EX !p",
      "E[ p U q ] & !E[ p U q ]", "A[ p ~U q ] & !A[ p ~U q ]", "p & !(p | q)",
      "E[ false ~U p ] & !E[ false ~U p ]", "(p | !p) & (q & !q)"};
  for (const char* text : contradictions) {
    if (bounded_satisfiable(parse_formula(text).formula, 3).kind !=
        BoundedVerdict::Kind::ExhaustedBound) {
      return std::string("found a model for the contradiction '") + text + "'";
    }
  }

  const Formula q = Formula::atom(0);
  const Formula eventually_q = Formula::exists_until(Formula::make_true(), q);
  if (bounded_contained(q, eventually_q, 3).kind != BoundedVerdict::Kind::Holds) {
    return "q contained in eventually-q was not confirmed";
  }
  const auto cex = bounded_contained(eventually_q, q, 3);
  if (cex.kind != BoundedVerdict::Kind::CounterexampleFound || !cex.witness ||
      cex.witness->structure.states.size() > 3) {
    return "no small counterexample for eventually-q contained in q";
  }
  const StateSet in1 = model_check(cex.witness->structure, eventually_q);
  const StateSet in2 = model_check(cex.witness->structure, q);
  if (!std::binary_search(in1.begin(), in1.end(), cex.witness->state) ||
      std::binary_search(in2.begin(), in2.end(), cex.witness->state)) {
    return "the containment counterexample does not replay";
  }
  std::cout << "    20 witnesses, 10 exhausted bounds, containment confirmed and refuted\n";
  return "";
}

// --- criterion 10 ----------------------------------------------------------

std::string criterion10() {
  const std::vector<int> sizes{1000, 2000, 4000, 8000, 16000};
  const auto rows = run_bench(sizes, 5);
  std::vector<double> via;
  for (const auto& row : rows) {
    if (row.route == "via-ctl") via.push_back(row.millis);
  }
  std::ostringstream detail;
  detail << "via-ctl millis:";
  for (double v : via) detail << " " << v;
  for (std::size_t i = 1; i < via.size(); ++i) {
    if (via[i] > 3.0 * std::max(via[i - 1], 0.01)) {
      return "growth factor " + std::to_string(via[i] / via[i - 1]) + " above 3 (" + detail.str() +
             ")";
    }
  }
  std::cout << "    " << detail.str() << "\n";
  return "";
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::string (*run)();
  };
  const Criterion criteria[] = {
      {1, "translated programs match the model checker on every small structure", +[] { return criterion1(); }},
      {2, "program evaluation equals model checking through the reverse mapping", +[] { return criterion2_3(false); }},
      {3, "goal relations are invariant under total closure", +[] { return criterion2_3(true); }},
      {4, "successor-dialect evaluation matches the model checker under both child orders", +[] { return criterion4(); }},
      {5, "normal forms preserve truth sets", +[] { return criterion5(); }},
      {6, "translation and recognition round trips", +[] { return criterion6(); }},
      {7, "linear size bounds for both translation directions", +[] { return criterion7(); }},
      {8, "example fidelity: thirteen-rule translation and stratification", +[] { return criterion8(); }},
      {9, "bounded satisfiability and containment sanity", +[] { return criterion9(); }},
      {10, "via-model-checking evaluation scales softly with the database", +[] { return criterion10(); }},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    std::string detail;
    try {
      detail = c.run();
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    if (detail.empty()) {
      std::cout << "[PASS] criterion " << c.id << ": " << c.name << "\n";
    } else {
      std::cout << "[FAIL] criterion " << c.id << ": " << c.name << " -- " << detail << "\n";
      ++failures;
    }
    std::cout.flush();
  }
  return failures == 0 ? 0 : 1;
}

// Command-line front end: translations between CTL and the Datalog
// fragments, bottom-up evaluation, model checking, bounded satisfiability
// and containment, and a small evaluation benchmark.
//
// Exit codes: 0 success / holds, 1 counterexample or unsat at the bound,
// 2 usage or parse error, 3 internal invariant violation.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ctldl/bench.hpp"
#include "ctldl/database.hpp"
#include "ctldl/datalog.hpp"
#include "ctldl/decision.hpp"
#include "ctldl/errors.hpp"
#include "ctldl/formula.hpp"
#include "ctldl/kripke.hpp"
#include "ctldl/model_check.hpp"
#include "ctldl/std_bridge.hpp"
#include "ctldl/tds_bridge.hpp"

namespace {

using namespace ctldl;

constexpr int kExitOk = 0;
constexpr int kExitNegative = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInternal = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  out << content;
}

ParsedFormula formula_arg(const std::string& inline_text, const std::string& file) {
  if (!inline_text.empty() && !file.empty()) {
    throw InputError("pass the formula either inline or as a file, not both");
  }
  if (!inline_text.empty()) return parse_formula(inline_text);
  if (!file.empty()) return parse_formula(read_file(file));
  throw InputError("a formula is required (--formula or --input)");
}

std::string render_witness(const Witness& w) {
  std::string out = "# witness state: " + w.structure.states[w.state] + "\n";
  out += render_kripke(w.structure);
  return out;
}

struct Options {
  std::string direction;
  std::string formula;
  std::string input;
  std::string output;
  std::string program;
  std::string database;
  std::string engine = "datalog";
  std::optional<int> cmax;
  std::string kripke;
  std::string form;
  std::string f1, f2, p1, p2;
  int bound = 3;
  std::vector<int> sizes;
  int reps = 3;
};

int cmd_translate(const Options& opt) {
  if (opt.direction == "ctl2std") {
    const ParsedFormula pf = formula_arg(opt.formula, opt.input);
    const Formula enf = to_enf(pf.formula);
    const StdProgram tree = ctl_to_std(enf, std::max<int>(pf.atoms.size(), 1));
    write_output(opt.output, render_program(flatten(tree)));
    return kExitOk;
  }
  if (opt.direction == "ctl2tds") {
    const ParsedFormula pf = formula_arg(opt.formula, opt.input);
    const Formula pnf = to_pnf(pf.formula);
    const TdsProgram tree = ctl_to_tds(pnf, std::max<int>(pf.atoms.size(), 1));
    write_output(opt.output, render_program(flatten_tds(tree, opt.cmax)));
    return kExitOk;
  }
  if (opt.direction == "std2ctl") {
    if (opt.input.empty()) throw InputError("std2ctl needs --input with a program file");
    const datalog::Program prog = parse_program(read_file(opt.input));
    const StdProgram tree = recognize_std(prog);
    const Formula f = std_to_ctl(tree);
    std::vector<std::string> atoms;
    for (int i = 0; i < tree.num_unary(); ++i) atoms.push_back("p" + std::to_string(i));
    write_output(opt.output, render_formula(f, atoms) + "\n");
    return kExitOk;
  }
  throw InputError("unknown direction '" + opt.direction + "'");
}

int cmd_eval(const Options& opt) {
  const datalog::Program prog = parse_program(read_file(opt.program));
  const FactStore facts = parse_facts(read_file(opt.database));

  FactStore result;
  if (opt.engine == "datalog") {
    result = evaluate(prog, facts);
  } else if (opt.engine == "succ") {
    const int cmax =
        opt.cmax.value_or(static_cast<int>(domain_of(database_from_facts(facts)).size()));
    result = evaluate_succ(prog, facts, std::max(cmax, 1));
  } else if (opt.engine == "via-ctl") {
    const StdProgram tree = recognize_std(prog);
    result = evaluate_std_via_ctl(tree, database_from_facts(facts));
  } else {
    throw InputError("unknown engine '" + opt.engine + "'");
  }

  std::string out;
  if (const Relation* rel = result.find(prog.goal); rel != nullptr) {
    std::vector<std::string> lines;
    for (const auto& t : rel->tuples) lines.push_back(render_fact(result, prog.goal, t));
    std::sort(lines.begin(), lines.end());
    for (const auto& l : lines) out += l + "\n";
  }
  write_output(opt.output, out);
  return kExitOk;
}

int cmd_mc(const Options& opt) {
  const KripkeStructure k = parse_kripke(read_file(opt.kripke));
  const ParsedFormula pf = formula_arg(opt.formula, opt.input);
  const Formula f = reindex_atoms(pf.formula, pf.atoms, k.ap);
  const StateSet sat = model_check(k, f);
  std::string out;
  for (int s : sat) out += k.states[s] + "\n";
  write_output(opt.output, out);
  return kExitOk;
}

int cmd_closure(const Options& opt) {
  const Database d = parse_database(read_file(opt.database));
  write_output(opt.output, render_database(total_closure(d)));
  return kExitOk;
}

int cmd_normalize(const Options& opt) {
  const ParsedFormula pf = formula_arg(opt.formula, opt.input);
  Formula out;
  if (opt.form == "enf") {
    out = to_enf(pf.formula);
  } else if (opt.form == "pnf") {
    out = to_pnf(pf.formula);
  } else {
    throw InputError("unknown normal form '" + opt.form + "'");
  }
  write_output(opt.output, render_formula(out, pf.atoms) + "\n");
  return kExitOk;
}

int cmd_sat(const Options& opt) {
  const ParsedFormula pf = formula_arg(opt.formula, opt.input);
  const BoundedVerdict v = bounded_satisfiable(pf.formula, opt.bound, pf.atoms);
  if (v.kind == BoundedVerdict::Kind::Holds) {
    write_output(opt.output, render_witness(*v.witness));
    return kExitOk;
  }
  std::cerr << "unsatisfiable within " << v.bound_searched
            << " states (decisive once the bound reaches " << v.completeness_threshold << ")\n";
  return kExitNegative;
}

int cmd_contains(const Options& opt) {
  BoundedVerdict v;
  bool programs = false;
  if (!opt.p1.empty() || !opt.p2.empty()) {
    if (opt.p1.empty() || opt.p2.empty()) throw InputError("--p1 and --p2 go together");
    programs = true;
    const StdProgram a = recognize_std(parse_program(read_file(opt.p1)));
    const StdProgram b = recognize_std(parse_program(read_file(opt.p2)));
    v = std_contained(a, b, opt.bound);
  } else {
    if (opt.f1.empty() || opt.f2.empty()) throw InputError("--f1 and --f2 are required");
    const ParsedFormula a = parse_formula(opt.f1);
    // a shared atom list, first formula's atoms first
    std::vector<std::string> atoms = a.atoms;
    const ParsedFormula b = parse_formula(opt.f2);
    for (const auto& name : b.atoms) {
      if (std::find(atoms.begin(), atoms.end(), name) == atoms.end()) atoms.push_back(name);
    }
    const Formula fa = reindex_atoms(a.formula, a.atoms, atoms);
    const Formula fb = reindex_atoms(b.formula, b.atoms, atoms);
    v = bounded_contained(fa, fb, opt.bound, atoms);
  }

  if (v.kind == BoundedVerdict::Kind::Holds) {
    std::cerr << "contained up to " << v.bound_searched << " states"
              << (v.decisive ? " (decisive)" : "") << "\n";
    return kExitOk;
  }
  std::string out = render_witness(*v.witness);
  if (programs) {
    out += "# counterexample database:\n";
    out += render_database(kripke_to_db(v.witness->structure));
  }
  write_output(opt.output, out);
  return kExitNegative;
}

int cmd_roundtrip(const Options& opt) {
  const ParsedFormula pf = formula_arg(opt.formula, opt.input);
  const Formula enf = to_enf(pf.formula);
  const StdProgram tree = ctl_to_std(enf, std::max<int>(pf.atoms.size(), 1));
  const std::string program_text = render_program(flatten(tree));

  std::string out = "enf: " + render_formula(enf, pf.atoms) + "\n";
  out += program_text;
  const StdProgram back = recognize_std(parse_program(program_text));
  const Formula recovered = std_to_ctl(back);
  out += "recovered: " + render_formula(recovered, pf.atoms) + "\n";
  write_output(opt.output, out);
  return recovered == enf ? kExitOk : kExitInternal;
}

int cmd_bench(const Options& opt) {
  const auto rows = run_bench(opt.sizes, opt.reps);
  write_output(opt.output, bench_csv(rows));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CTL <-> Datalog translations, evaluation, and bounded decision procedures"};
  app.require_subcommand(1);
  Options opt;

  auto* translate = app.add_subcommand("translate", "translate between formulas and programs");
  translate->add_option("--direction", opt.direction, "ctl2std | ctl2tds | std2ctl")->required();
  translate->add_option("--formula", opt.formula, "formula text");
  translate->add_option("--input", opt.input, "formula or program file");
  translate->add_option("--output", opt.output, "output file (default stdout)");
  translate->add_option("--cmax", opt.cmax, "instantiate counter bounds (ctl2tds)");

  auto* eval = app.add_subcommand("eval", "evaluate a program on a database");
  eval->add_option("--program", opt.program)->required();
  eval->add_option("--database", opt.database)->required();
  eval->add_option("--engine", opt.engine, "datalog | via-ctl | succ");
  eval->add_option("--cmax", opt.cmax, "counter ceiling (succ engine; default: domain size)");
  eval->add_option("--output", opt.output);

  auto* mc = app.add_subcommand("mc", "model check a formula on a structure");
  mc->add_option("--kripke", opt.kripke)->required();
  mc->add_option("--formula", opt.formula);
  mc->add_option("--input", opt.input, "formula file");
  mc->add_option("--output", opt.output);

  auto* closure = app.add_subcommand("closure", "total-close a database");
  closure->add_option("--database", opt.database)->required();
  closure->add_option("--output", opt.output);

  auto* normalize = app.add_subcommand("normalize", "rewrite a formula into a normal form");
  normalize->add_option("--formula", opt.formula);
  normalize->add_option("--input", opt.input, "formula file");
  normalize->add_option("--form", opt.form, "enf | pnf")->required();
  normalize->add_option("--output", opt.output);

  auto* sat = app.add_subcommand("sat", "bounded satisfiability search");
  sat->add_option("--formula", opt.formula);
  sat->add_option("--input", opt.input, "formula file");
  sat->add_option("--bound", opt.bound, "maximum number of states")->required();
  sat->add_option("--output", opt.output);

  auto* contains = app.add_subcommand("contains", "bounded containment check");
  contains->add_option("--f1", opt.f1);
  contains->add_option("--f2", opt.f2);
  contains->add_option("--p1", opt.p1, "program file");
  contains->add_option("--p2", opt.p2, "program file");
  contains->add_option("--bound", opt.bound)->required();
  contains->add_option("--output", opt.output);

  auto* roundtrip = app.add_subcommand("roundtrip", "formula -> program -> formula");
  roundtrip->add_option("--formula", opt.formula);
  roundtrip->add_option("--input", opt.input, "formula file");
  roundtrip->add_option("--output", opt.output);

  auto* bench = app.add_subcommand("bench", "time the two evaluation routes");
  bench->add_option("--sizes", opt.sizes, "transition counts")->delimiter(',');
  bench->add_option("--reps", opt.reps, "repetitions per row");
  bench->add_option("--output", opt.output);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (translate->parsed()) return cmd_translate(opt);
    if (eval->parsed()) return cmd_eval(opt);
    if (mc->parsed()) return cmd_mc(opt);
    if (closure->parsed()) return cmd_closure(opt);
    if (normalize->parsed()) return cmd_normalize(opt);
    if (sat->parsed()) return cmd_sat(opt);
    if (contains->parsed()) return cmd_contains(opt);
    if (roundtrip->parsed()) return cmd_roundtrip(opt);
    if (bench->parsed()) return cmd_bench(opt);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}

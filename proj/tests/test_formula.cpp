#include "ctldl/formula.hpp"

#include <random>

#include "doctest.h"
#include "helpers.hpp"

using namespace ctldl;

TEST_CASE("parse basic forms") {
  auto pf = parse_formula("EX p");
  CHECK(pf.formula == Formula::exists_next(Formula::atom(0)));
  CHECK(pf.atoms == std::vector<std::string>{"p"});

  pf = parse_formula("E[ q U t ] & EX p");
  const Formula expected = Formula::conjunction(
      Formula::exists_until(Formula::atom(0), Formula::atom(1)),
      Formula::exists_next(Formula::atom(2)));
  CHECK(pf.formula == expected);
  CHECK(pf.atoms == std::vector<std::string>{"q", "t", "p"});

  pf = parse_formula("E[ false ~U p ]");
  CHECK(pf.formula == Formula::exists_until_tilde(Formula::make_false(), Formula::atom(0)));
}

TEST_CASE("parse precedence and comments") {
  CHECK(parse_formula("!p & q | r").formula ==
        Formula::disjunction(
            Formula::conjunction(Formula::negation(Formula::atom(0)), Formula::atom(1)),
            Formula::atom(2)));
  CHECK(parse_formula("p | q & r").formula ==
        Formula::disjunction(Formula::atom(0),
                             Formula::conjunction(Formula::atom(1), Formula::atom(2))));
  CHECK(parse_formula("EX p & q").formula ==
        Formula::conjunction(Formula::exists_next(Formula::atom(0)), Formula::atom(1)));
  CHECK(parse_formula("# leading comment\n A[ p U q ] # trailing").formula ==
        Formula::forall_until(Formula::atom(0), Formula::atom(1)));
  CHECK(parse_formula("(p | q) & r").formula ==
        Formula::conjunction(Formula::disjunction(Formula::atom(0), Formula::atom(1)),
                             Formula::atom(2)));
}

TEST_CASE("parse errors carry positions") {
  CHECK_THROWS_AS(parse_formula("E[ p U"), ParseError);
  CHECK_THROWS_AS(parse_formula("p &"), ParseError);
  CHECK_THROWS_AS(parse_formula("Foo"), ParseError);
  CHECK_THROWS_AS(parse_formula("p ~ q"), ParseError);
  try {
    parse_formula("p &\n& q");
    CHECK(false);
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 1);
  }
}

TEST_CASE("render basic forms") {
  std::vector<std::string> atoms{"p", "q"};
  CHECK(render_formula(Formula::make_true(), atoms) == "true");
  CHECK(render_formula(Formula::exists_next(Formula::atom(0)), atoms) == "EX p");
  CHECK(render_formula(Formula::forall_until_tilde(Formula::atom(0), Formula::atom(1)), atoms) ==
        "A[ p ~U q ]");
}

TEST_CASE("render/parse round trip on random formulas") {
  std::mt19937 rng(7);
  std::vector<std::string> atoms{"p", "q", "r"};
  for (int i = 0; i < 500; ++i) {
    const Formula f = helpers::random_formula(rng, 5, 3, helpers::Flavor::Full);
    const std::string text = render_formula(f, atoms);
    CHECK(parse_formula_with_atoms(text, atoms) == f);
  }
}

TEST_CASE("formula size counts AST nodes") {
  CHECK(Formula::atom(0).size() == 1);
  CHECK(parse_formula("EX p").formula.size() == 2);
  CHECK(parse_formula("E[ p U q ]").formula.size() == 3);
  CHECK(parse_formula("!p & q").formula.size() == 4);
}

TEST_CASE("to_enf rewrites") {
  const auto p = Formula::atom(0);
  const auto q = Formula::atom(1);

  // A[p U q] -> !E[!p ~U !q]
  CHECK(to_enf(Formula::forall_until(p, q)) ==
        Formula::negation(Formula::exists_until_tilde(Formula::negation(p), Formula::negation(q))));
  // false -> !true
  CHECK(to_enf(Formula::make_false()) == Formula::negation(Formula::make_true()));
  // already-ENF input is untouched
  CHECK(to_enf(Formula::exists_until(p, q)) == Formula::exists_until(p, q));
  // A-next and A-until-tilde duals
  CHECK(to_enf(Formula::forall_next(p)) ==
        Formula::negation(Formula::exists_next(Formula::negation(p))));
  CHECK(to_enf(Formula::forall_until_tilde(p, q)) ==
        Formula::negation(Formula::exists_until(Formula::negation(p), Formula::negation(q))));
}

TEST_CASE("to_pnf rewrites") {
  const auto p = Formula::atom(0);
  const auto q = Formula::atom(1);

  CHECK(to_pnf(Formula::negation(Formula::exists_until(p, q))) ==
        Formula::forall_until_tilde(Formula::negation(p), Formula::negation(q)));
  CHECK(to_pnf(Formula::negation(Formula::negation(p))) == p);
  CHECK(to_pnf(Formula::negation(Formula::conjunction(p, Formula::exists_next(q)))) ==
        Formula::disjunction(Formula::negation(p),
                             Formula::forall_next(Formula::negation(q))));
}

TEST_CASE("normal form invariants and linear blowup") {
  std::mt19937 rng(11);
  for (int i = 0; i < 800; ++i) {
    const Formula f = helpers::random_formula(rng, 5, 3, helpers::Flavor::Full);
    const Formula enf = to_enf(f);
    const Formula pnf = to_pnf(f);
    CHECK(is_enf(enf));
    CHECK(is_pnf(pnf));
    CHECK(enf.size() <= 4 * f.size());
    CHECK(pnf.size() <= 2 * f.size());
  }
}

TEST_CASE("is_enf / is_pnf classify") {
  const auto pf = [](const char* s) { return parse_formula(s).formula; };
  CHECK(is_enf(pf("!E[ p U q ] & EX !true")));
  CHECK(!is_enf(pf("p | q")));
  CHECK(!is_enf(pf("false")));
  CHECK(!is_enf(pf("A[ p U q ]")));
  CHECK(is_pnf(pf("!p | A[ p ~U !q ]")));
  CHECK(!is_pnf(pf("!(p & q)")));
  CHECK(!is_pnf(pf("!EX p")));
}

TEST_CASE("reindex_atoms maps by name") {
  const auto pf = parse_formula("p & EX q");
  const std::vector<std::string> target{"x", "q", "p"};
  const Formula g = reindex_atoms(pf.formula, pf.atoms, target);
  CHECK(g == Formula::conjunction(Formula::atom(2), Formula::exists_next(Formula::atom(1))));
  CHECK_THROWS_AS(reindex_atoms(pf.formula, pf.atoms, std::vector<std::string>{"p"}), InputError);
}

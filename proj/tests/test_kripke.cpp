#include "ctldl/database.hpp"
#include "ctldl/kripke.hpp"

#include "doctest.h"
#include "helpers.hpp"

using namespace ctldl;
using helpers::make_kripke;

namespace {

std::vector<std::pair<std::string, std::string>> named_pairs(
    const Database& d, const std::vector<std::pair<int, int>>& rel) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [a, b] : rel) out.emplace_back(d.constants[a], d.constants[b]);
  return out;
}

}  // namespace

TEST_CASE("kripke text format round trip") {
  const char* text =
      "# a small structure\n"
      "state a p q\n"
      "state b\n"
      "edge a b\n"
      "edge b b\n";
  const KripkeStructure k = parse_kripke(text);
  CHECK(k.states == std::vector<std::string>{"a", "b"});
  CHECK(k.ap == std::vector<std::string>{"p", "q"});
  CHECK(k.trans == std::vector<std::pair<int, int>>{{0, 1}, {1, 1}});
  CHECK(k.atom_true_at(0, 0));
  CHECK(!k.atom_true_at(1, 0));
  CHECK(parse_kripke(render_kripke(k)) == k);
  CHECK(!k.is_total() == false);

  CHECK_THROWS_AS(parse_kripke("state a\nstate a\n"), ParseError);
  CHECK_THROWS_AS(parse_kripke("edge a b\n"), ParseError);
  CHECK_THROWS_AS(parse_kripke("vertex a\n"), ParseError);
}

TEST_CASE("kripke_to_db examples") {
  // one state, self loop, p at a
  auto k = make_kripke({"a"}, {{"a", "a"}}, {{"a", {"p"}}}, {"p"});
  Database d = kripke_to_db(k);
  CHECK(named_pairs(d, d.r) == std::vector<std::pair<std::string, std::string>>{{"a", "a"}});
  CHECK(d.unary.size() == 1);
  CHECK(d.unary[0] == std::vector<int>{0});

  // empty valuation: all P_i empty, R copied
  k = make_kripke({"a", "b"}, {{"a", "b"}, {"b", "a"}}, {}, {"p"});
  d = kripke_to_db(k);
  CHECK(d.unary[0].empty());
  CHECK(d.r.size() == 2);

  // the two-state structure from the oracle examples
  k = make_kripke({"a", "b"}, {{"a", "b"}, {"b", "b"}}, {{"b", {"p"}}}, {"p"});
  d = kripke_to_db(k);
  CHECK(named_pairs(d, d.r) ==
        std::vector<std::pair<std::string, std::string>>{{"a", "b"}, {"b", "b"}});
  CHECK(d.constants[d.unary[0][0]] == "b");
}

TEST_CASE("total_closure examples") {
  // R empty over domain {a} (a appears in P0)
  Database d;
  d.intern("a");
  d.unary.push_back({0});
  Database t = total_closure(d);
  CHECK(named_pairs(t, t.r) == std::vector<std::pair<std::string, std::string>>{{"a", "a"}});

  // R={(a,b)}: b lacks a successor
  d = parse_database("R(a,b).\n");
  t = total_closure(d);
  CHECK(named_pairs(t, t.r) ==
        std::vector<std::pair<std::string, std::string>>{{"a", "b"}, {"b", "b"}});

  // total input is unchanged, and closure is idempotent
  const Database total = parse_database("R(a,b).\nR(b,a).\nP0(a).\n");
  CHECK(total_closure(total) == total);
  CHECK(total_closure(t) == t);
}

TEST_CASE("domain_of examples") {
  Database d = parse_database("R(a,b).\nP0(c).\n");
  auto names = [&](const DomainSet& dom) {
    std::vector<std::string> out;
    for (int c : dom) out.push_back(d.constants[c]);
    std::sort(out.begin(), out.end());
    return out;
  };
  CHECK(names(domain_of(d)) == std::vector<std::string>{"a", "b", "c"});
  CHECK(domain_of(Database{}).empty());
  const Database self = parse_database("R(a,a).\n");
  CHECK(domain_of(self).size() == 1);
}

TEST_CASE("domain is preserved by closure") {
  const Database d = parse_database("R(a,b).\nR(c,d).\nP1(e).\n");
  CHECK(domain_of(total_closure(d)) == domain_of(d));
}

TEST_CASE("db_to_kripke examples") {
  // R={}, P0={a}: the closure forces the self-loop
  KripkeStructure k = db_to_kripke(parse_database("P0(a).\n"));
  CHECK(k.states == std::vector<std::string>{"a"});
  CHECK(k.trans == std::vector<std::pair<int, int>>{{0, 0}});
  CHECK(k.atom_true_at(0, 0));

  k = db_to_kripke(parse_database("R(a,b).\n"));
  CHECK(k.states == std::vector<std::string>{"a", "b"});
  CHECK(k.trans == std::vector<std::pair<int, int>>{{0, 1}, {1, 1}});

  // already-total R is copied as-is
  k = db_to_kripke(parse_database("R(a,b).\nR(b,a).\n"));
  CHECK(k.trans == std::vector<std::pair<int, int>>{{0, 1}, {1, 0}});

  CHECK_THROWS_WITH_AS(db_to_kripke(Database{}), "empty structure", InputError);
}

TEST_CASE("db_to_kripke inverts kripke_to_db on total structures") {
  const auto k = make_kripke({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}, {"c", "a"}, {"a", "a"}},
                             {{"a", {"p"}}, {"c", {"q", "p"}}}, {"p", "q"});
  const KripkeStructure back = db_to_kripke(kripke_to_db(k));
  CHECK(back.states == k.states);
  CHECK(back.trans == k.trans);
  CHECK(back.valuation == k.valuation);
  CHECK(back.ap == std::vector<std::string>{"p0", "p1"});
}

TEST_CASE("split_outdegree2") {
  const auto k = make_kripke({"a", "b", "c"}, {{"a", "b"}, {"a", "c"}, {"b", "b"}, {"c", "a"}},
                             {{"b", {"p"}}}, {"p"});
  const Database d = split_outdegree2(k);
  CHECK(named_pairs(d, d.s0) ==
        std::vector<std::pair<std::string, std::string>>{{"a", "b"}, {"b", "b"}, {"c", "a"}});
  CHECK(named_pairs(d, d.s1) == std::vector<std::pair<std::string, std::string>>{{"a", "c"}});

  // reversed order swaps the children of a
  const Database rev = split_outdegree2(k, [](const std::string& x, const std::string& y) {
    return x > y;
  });
  CHECK(named_pairs(rev, rev.s0)[0] == std::pair<std::string, std::string>{"a", "c"});
  CHECK(named_pairs(rev, rev.s1) == std::vector<std::pair<std::string, std::string>>{{"a", "b"}});

  // S0 and S1 partition the transition relation
  auto all = d.s0;
  all.insert(all.end(), d.s1.begin(), d.s1.end());
  std::sort(all.begin(), all.end());
  CHECK(all == k.trans);

  const auto nontotal = make_kripke({"a", "b"}, {{"a", "b"}}, {}, {});
  CHECK_THROWS_AS(split_outdegree2(nontotal), InputError);
  const auto wide = make_kripke({"a", "b", "c", "d"},
                                {{"a", "b"}, {"a", "c"}, {"a", "d"}, {"b", "b"}, {"c", "c"}, {"d", "d"}},
                                {}, {});
  CHECK_THROWS_AS(split_outdegree2(wide), InputError);
  try {
    split_outdegree2(wide);
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("'a'") != std::string::npos);
  }
}

TEST_CASE("database text format round trip") {
  const Database d = parse_database("# facts\nR(a,b).\nR(b,b).\nP0(b).\n");
  CHECK(parse_database(render_database(d)) == d);

  const Database split = parse_database("S0(a,b).\nS1(a,c).\nS0(b,b).\nS0(c,c).\nP1(c).\n");
  CHECK(split.form == Database::BinaryForm::Split);
  CHECK(split.unary.size() == 2);
  CHECK(parse_database(render_database(split)) == split);

  CHECK_THROWS_AS(parse_database("R(a,b).\nS0(a,b).\n"), InputError);
  CHECK_THROWS_AS(parse_database("Q(a,b).\n"), InputError);
  CHECK_THROWS_AS(parse_database("R(a).\n"), InputError);
  // the split relations are disjoint partial functions on the first argument
  CHECK_THROWS_AS(parse_database("S0(a,b).\nS0(a,c).\n"), InputError);
  CHECK_THROWS_AS(parse_database("S0(a,b).\nS1(a,b).\n"), InputError);
}

#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ctldl/facts.hpp"
#include "ctldl/kripke.hpp"

namespace ctldl {

// Relational database over a Kripke schema: one binary relation R (or the
// disjoint refinement S0/S1, optionally with a Next sibling relation) plus
// unary relations P0..Pn. Constants are interned; facts are sorted id pairs.
struct Database {
  enum class BinaryForm { SingleR, Split };

  BinaryForm form = BinaryForm::SingleR;
  std::vector<std::string> constants;          // universe; may exceed the computed domain
  std::vector<std::pair<int, int>> r;          // SingleR
  std::vector<std::pair<int, int>> s0, s1;     // Split
  std::vector<std::pair<int, int>> next;       // optional sibling order (first-child encodings)
  std::vector<std::vector<int>> unary;         // P_i fact sets, each sorted

  int constant_id(std::string_view name) const;  // -1 if unknown
  int intern(std::string_view name);
  std::size_t num_unary() const { return unary.size(); }
  void normalize();  // sorts and dedups all fact sets

  bool operator==(const Database&) const = default;
};

// Sorted set of constant ids: every constant appearing in some fact.
using DomainSet = std::vector<int>;

DomainSet domain_of(const Database& d);

// Adds a self-loop at every domain element without an R-successor. Requires
// the single-R form; idempotent, and the identity on total relations.
Database total_closure(const Database& d);

// Structure -> database: P_i holds exactly at the states where atom i is true.
Database kripke_to_db(const KripkeStructure& k);

// Database -> structure over the computed domain, transition relation
// total-closed, valuation read off the P_i. Throws InputError on an empty
// domain ("empty structure") or when d is not in single-R form.
KripkeStructure db_to_kripke(const Database& d);

using StateOrder = std::function<bool(const std::string&, const std::string&)>;

// Splits a total structure of outdegree <= 2 into the disjoint relations
// S0/S1: per state, the children sorted by `order` become the S0-child and,
// if present, the S1-child. Throws InputError naming any state of outdegree
// 0 or > 2.
Database split_outdegree2(const KripkeStructure& k, const StateOrder& order = {});

// Conversions to the generic fact representation (predicates R/S0/S1/Next/Pi).
FactStore database_to_facts(const Database& d);
Database database_from_facts(const FactStore& store);

// Fact-line text format, e.g. `R(a,b).` / `P0(a).` / `S0(a,b).`.
Database parse_database(std::string_view text);
std::string render_database(const Database& d);

}  // namespace ctldl

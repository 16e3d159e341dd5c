#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ctldl/errors.hpp"

namespace ctldl {

// Argument sorts: interned constants vs. bounded integer counters. The two
// never mix within one argument position.
enum class SortKind : std::uint8_t { Constant, Counter };

using Tuple = std::vector<std::int32_t>;

struct Relation {
  int arity = 0;
  std::vector<SortKind> sorts;
  std::set<Tuple> tuples;
};

// Ground facts grouped by predicate, over one interned symbol table.
class FactStore {
 public:
  int intern(std::string_view name);
  int find_symbol(std::string_view name) const;  // -1 if unknown
  const std::string& symbol(int id) const { return symbols_[id]; }
  int num_symbols() const { return static_cast<int>(symbols_.size()); }
  const std::vector<std::string>& symbols() const { return symbols_; }

  // Adds a fact, fixing or checking the predicate's arity and sorts.
  void add(const std::string& pred, Tuple tuple, const std::vector<SortKind>& sorts);
  void declare(const std::string& pred, int arity, const std::vector<SortKind>& sorts);

  const Relation* find(const std::string& pred) const;
  const std::map<std::string, Relation>& relations() const { return relations_; }

  std::size_t total_facts() const;

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, int> symbol_ids_;
  std::map<std::string, Relation> relations_;
};

// Fact files: one ground fact per line (`R(a,b).`, `P0(a).`, `C(a,3).`),
// `#` or `%` comments. Integer arguments are counter-sorted.
FactStore parse_facts(std::string_view text);
std::string render_facts(const FactStore& store);
std::string render_fact(const FactStore& store, const std::string& pred, const Tuple& t);

// True when both stores hold the same facts for `pred` (by symbol name).
bool same_relation(const FactStore& a, const FactStore& b, const std::string& pred);

}  // namespace ctldl

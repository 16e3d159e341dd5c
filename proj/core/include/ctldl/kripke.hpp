#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ctldl/errors.hpp"

namespace ctldl {

// Sorted set of state ids (indices into KripkeStructure::states).
using StateSet = std::vector<int>;

// Finite transition system with per-state atom labels. States and atoms are
// interned; all fact-like members are kept sorted for deterministic iteration.
struct KripkeStructure {
  std::vector<std::string> states;
  std::vector<std::pair<int, int>> trans;     // sorted, unique
  std::vector<std::vector<int>> valuation;    // per state: sorted atom ids
  std::vector<std::string> ap;

  int num_states() const { return static_cast<int>(states.size()); }
  int state_id(std::string_view name) const;  // -1 if unknown
  bool atom_true_at(int state, int atom) const;
  bool has_edge(int from, int to) const;
  bool is_total() const;

  // Throws InputError when an edge endpoint or valuation entry is out of range.
  void validate() const;

  bool operator==(const KripkeStructure&) const = default;
};

// One successor list per state, each sorted ascending.
std::vector<std::vector<int>> successor_lists(const KripkeStructure& k);

// Line format: `state <name> [atom ...]`, `edge <from> <to>`, `#` comments.
KripkeStructure parse_kripke(std::string_view text);
std::string render_kripke(const KripkeStructure& k);

}  // namespace ctldl

#include "ctldl/kripke.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace ctldl {

int KripkeStructure::state_id(std::string_view name) const {
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i] == name) return static_cast<int>(i);
  }
  return -1;
}

bool KripkeStructure::atom_true_at(int state, int atom) const {
  const auto& v = valuation[state];
  return std::binary_search(v.begin(), v.end(), atom);
}

bool KripkeStructure::has_edge(int from, int to) const {
  return std::binary_search(trans.begin(), trans.end(), std::make_pair(from, to));
}

bool KripkeStructure::is_total() const {
  std::vector<char> has_succ(states.size(), 0);
  for (const auto& [from, to] : trans) has_succ[from] = 1;
  return std::all_of(has_succ.begin(), has_succ.end(), [](char c) { return c != 0; });
}

void KripkeStructure::validate() const {
  const int n = num_states();
  for (const auto& [from, to] : trans) {
    if (from < 0 || from >= n || to < 0 || to >= n) {
      throw InputError("transition endpoint outside the state set");
    }
  }
  if (valuation.size() != states.size()) {
    throw InputError("valuation must have one entry per state");
  }
  for (const auto& atoms : valuation) {
    for (int a : atoms) {
      if (a < 0 || static_cast<std::size_t>(a) >= ap.size()) {
        throw InputError("valuation mentions an undeclared atom");
      }
    }
  }
}

std::vector<std::vector<int>> successor_lists(const KripkeStructure& k) {
  std::vector<std::vector<int>> succ(k.states.size());
  for (const auto& [from, to] : k.trans) succ[from].push_back(to);
  return succ;  // trans is sorted, so each list is sorted
}

namespace {

bool valid_name(std::string_view s) {
  if (s.empty() || !std::islower(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::islower(static_cast<unsigned char>(c)) ||
           std::isdigit(static_cast<unsigned char>(c)) || c == '_';
  });
}

}  // namespace

KripkeStructure parse_kripke(std::string_view text) {
  KripkeStructure k;
  std::vector<std::vector<std::string>> pending_edges;  // {from, to} by name

  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word)) continue;
    if (word == "state") {
      std::string name;
      if (!(ls >> name)) throw ParseError("state line needs a name", lineno, 1);
      if (!valid_name(name)) throw ParseError("bad state name '" + name + "'", lineno, 1);
      if (k.state_id(name) >= 0) throw ParseError("duplicate state '" + name + "'", lineno, 1);
      k.states.push_back(name);
      k.valuation.emplace_back();
      std::string atom;
      while (ls >> atom) {
        if (!valid_name(atom)) throw ParseError("bad atom name '" + atom + "'", lineno, 1);
        int id = -1;
        for (std::size_t i = 0; i < k.ap.size(); ++i) {
          if (k.ap[i] == atom) id = static_cast<int>(i);
        }
        if (id < 0) {
          k.ap.push_back(atom);
          id = static_cast<int>(k.ap.size() - 1);
        }
        k.valuation.back().push_back(id);
      }
      auto& v = k.valuation.back();
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    } else if (word == "edge") {
      std::string from, to, extra;
      if (!(ls >> from >> to) || (ls >> extra)) {
        throw ParseError("edge line needs exactly two states", lineno, 1);
      }
      pending_edges.push_back({from, to});
    } else {
      throw ParseError("expected 'state' or 'edge', got '" + word + "'", lineno, 1);
    }
  }

  for (const auto& e : pending_edges) {
    const int from = k.state_id(e[0]);
    const int to = k.state_id(e[1]);
    if (from < 0) throw ParseError("edge mentions undeclared state '" + e[0] + "'", 0, 0);
    if (to < 0) throw ParseError("edge mentions undeclared state '" + e[1] + "'", 0, 0);
    k.trans.emplace_back(from, to);
  }
  std::sort(k.trans.begin(), k.trans.end());
  k.trans.erase(std::unique(k.trans.begin(), k.trans.end()), k.trans.end());
  return k;
}

std::string render_kripke(const KripkeStructure& k) {
  std::string out;
  for (std::size_t s = 0; s < k.states.size(); ++s) {
    out += "state " + k.states[s];
    for (int a : k.valuation[s]) out += " " + k.ap[a];
    out += "\n";
  }
  for (const auto& [from, to] : k.trans) {
    out += "edge " + k.states[from] + " " + k.states[to] + "\n";
  }
  return out;
}

}  // namespace ctldl

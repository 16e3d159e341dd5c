#pragma once

#include <algorithm>
#include <bit>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ctldl/formula.hpp"
#include "ctldl/kripke.hpp"

namespace helpers {

using ctldl::Formula;
using ctldl::KripkeStructure;

inline KripkeStructure make_kripke(std::vector<std::string> states,
                                   std::vector<std::pair<std::string, std::string>> edges,
                                   std::vector<std::pair<std::string, std::vector<std::string>>> labels,
                                   std::vector<std::string> atoms) {
  KripkeStructure k;
  k.states = std::move(states);
  k.ap = std::move(atoms);
  k.valuation.assign(k.states.size(), {});
  for (const auto& [state, state_atoms] : labels) {
    const int s = k.state_id(state);
    for (const auto& a : state_atoms) {
      for (std::size_t i = 0; i < k.ap.size(); ++i) {
        if (k.ap[i] == a) k.valuation[s].push_back(static_cast<int>(i));
      }
    }
    std::sort(k.valuation[s].begin(), k.valuation[s].end());
  }
  for (const auto& [from, to] : edges) k.trans.emplace_back(k.state_id(from), k.state_id(to));
  std::sort(k.trans.begin(), k.trans.end());
  k.trans.erase(std::unique(k.trans.begin(), k.trans.end()), k.trans.end());
  return k;
}

inline std::vector<std::string> state_names(const KripkeStructure& k, const ctldl::StateSet& set) {
  std::vector<std::string> out;
  for (int s : set) out.push_back(k.states[s]);
  return out;
}

enum class Flavor { Full, Enf, Pnf };

// Random formula of depth <= max_depth over atoms 0..num_atoms-1.
inline Formula random_formula(std::mt19937& rng, int max_depth, int num_atoms, Flavor flavor) {
  std::uniform_int_distribution<int> coin(0, 99);
  const auto leaf = [&]() -> Formula {
    const int r = coin(rng);
    if (num_atoms > 0 && r < 70) {
      std::uniform_int_distribution<int> pick(0, num_atoms - 1);
      const Formula a = Formula::atom(pick(rng));
      if (flavor == Flavor::Pnf && r < 25) return Formula::negation(a);
      return a;
    }
    if (flavor == Flavor::Full && r < 85) return Formula::make_false();
    if (flavor == Flavor::Pnf && r < 78) return Formula::negation(Formula::make_true());
    return Formula::make_true();
  };
  const std::function<Formula(int)> gen = [&](int depth) -> Formula {
    if (depth <= 0) return leaf();
    const int r = coin(rng);
    if (r < 18) return leaf();
    const auto sub = [&] { return gen(depth - 1); };
    switch (flavor) {
      case Flavor::Enf: {
        if (r < 36) return Formula::negation(sub());
        if (r < 52) return Formula::conjunction(sub(), sub());
        if (r < 68) return Formula::exists_next(sub());
        if (r < 84) return Formula::exists_until(sub(), sub());
        return Formula::exists_until_tilde(sub(), sub());
      }
      case Flavor::Pnf: {
        if (r < 30) return Formula::conjunction(sub(), sub());
        if (r < 42) return Formula::disjunction(sub(), sub());
        if (r < 50) return Formula::exists_next(sub());
        if (r < 58) return Formula::forall_next(sub());
        if (r < 69) return Formula::exists_until(sub(), sub());
        if (r < 80) return Formula::forall_until(sub(), sub());
        if (r < 90) return Formula::exists_until_tilde(sub(), sub());
        return Formula::forall_until_tilde(sub(), sub());
      }
      case Flavor::Full: {
        if (r < 32) return Formula::negation(sub());
        if (r < 44) return Formula::conjunction(sub(), sub());
        if (r < 54) return Formula::disjunction(sub(), sub());
        if (r < 62) return Formula::exists_next(sub());
        if (r < 69) return Formula::forall_next(sub());
        if (r < 77) return Formula::exists_until(sub(), sub());
        if (r < 85) return Formula::forall_until(sub(), sub());
        if (r < 93) return Formula::exists_until_tilde(sub(), sub());
        return Formula::forall_until_tilde(sub(), sub());
      }
    }
    return leaf();
  };
  return gen(max_depth);
}

// Every total structure with exactly n states over the given atom names;
// max_outdegree 0 means unrestricted.
inline void for_each_total_structure(int n, const std::vector<std::string>& atoms,
                                     const std::function<void(const KripkeStructure&)>& fn,
                                     int max_outdegree = 0) {
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back(std::string(1, static_cast<char>('a' + i)));
  const int num_atoms = static_cast<int>(atoms.size());
  const int succ_choices = 1 << n;

  std::vector<int> succ(n, 1);
  const auto popcount_ok = [&](int mask) {
    if (mask == 0) return false;
    if (max_outdegree == 0) return true;
    return std::popcount(static_cast<unsigned>(mask)) <= max_outdegree;
  };
  const std::function<void(int)> pick_succ = [&](int state) {
    if (state == n) {
      // enumerate valuations
      const int val_choices = 1 << (n * num_atoms);
      for (int val = 0; val < val_choices; ++val) {
        KripkeStructure k;
        k.states = names;
        k.ap = atoms;
        k.valuation.assign(n, {});
        for (int s = 0; s < n; ++s) {
          for (int a = 0; a < num_atoms; ++a) {
            if ((val >> (s * num_atoms + a)) & 1) k.valuation[s].push_back(a);
          }
        }
        for (int s = 0; s < n; ++s) {
          for (int t = 0; t < n; ++t) {
            if ((succ[s] >> t) & 1) k.trans.emplace_back(s, t);
          }
        }
        fn(k);
      }
      return;
    }
    for (int mask = 1; mask < succ_choices; ++mask) {
      if (!popcount_ok(mask)) continue;
      succ[state] = mask;
      pick_succ(state + 1);
    }
  };
  pick_succ(0);
}

inline void for_each_total_structure_upto(int n_max, const std::vector<std::string>& atoms,
                                          const std::function<void(const KripkeStructure&)>& fn,
                                          int max_outdegree = 0) {
  for (int n = 1; n <= n_max; ++n) for_each_total_structure(n, atoms, fn, max_outdegree);
}

}  // namespace helpers

#include "ctldl/model_check.hpp"

#include <algorithm>
#include <functional>

namespace ctldl {

namespace {

int compile_rec(const Formula& f, CompiledFormula& out) {
  CompiledFormula::Op op;
  op.kind = f.kind();
  if (f.kind() == FormulaKind::Atom) op.atom = f.atom_index();
  if (f.arity() >= 1) op.lhs = compile_rec(f.left(), out);
  if (f.arity() >= 2) op.rhs = compile_rec(f.right(), out);
  out.ops.push_back(op);
  return static_cast<int>(out.ops.size()) - 1;
}

}  // namespace

CompiledFormula CompiledFormula::compile(const Formula& f) {
  CompiledFormula cf;
  cf.ops.reserve(f.size());
  compile_rec(f, cf);
  cf.max_atom = f.max_atom();
  return cf;
}

ModelChecker::ModelChecker(const KripkeStructure& k) : k_(&k), n_(k.num_states()) {
  k.validate();
  succ_.assign(n_, {});
  pred_.assign(n_, {});
  for (const auto& [from, to] : k.trans) {
    succ_[from].push_back(to);
    pred_[to].push_back(from);
  }
  for (int s = 0; s < n_; ++s) {
    if (succ_[s].empty()) {
      throw InputError("model_check requires a total transition relation; state '" + k.states[s] +
                       "' has no successor");
    }
  }
  if (n_ <= 64) {
    all_mask_ = n_ == 64 ? ~0ULL : ((1ULL << n_) - 1);
    succ_mask_.assign(n_, 0);
    for (const auto& [from, to] : k.trans) succ_mask_[from] |= 1ULL << to;
    atom_mask_.assign(k.ap.size(), 0);
    for (int s = 0; s < n_; ++s) {
      for (int a : k.valuation[s]) atom_mask_[a] |= 1ULL << s;
    }
  }
}

std::uint64_t ModelChecker::check_mask(const CompiledFormula& cf) const {
  if (n_ > 64) throw InternalError("check_mask on a structure with more than 64 states");
  if (cf.max_atom >= static_cast<int>(k_->ap.size())) {
    throw InputError("formula mentions an atom outside the structure's declared atom set");
  }
  std::uint64_t stack_slots[64];
  std::vector<std::uint64_t> heap_slots;
  std::uint64_t* slot = stack_slots;
  if (cf.ops.size() > 64) {
    heap_slots.resize(cf.ops.size());
    slot = heap_slots.data();
  }

  const auto pre_exists = [&](std::uint64_t set) {
    std::uint64_t out = 0;
    for (int s = 0; s < n_; ++s) {
      if (succ_mask_[s] & set) out |= 1ULL << s;
    }
    return out;
  };
  const auto pre_forall = [&](std::uint64_t set) {
    std::uint64_t out = 0;
    for (int s = 0; s < n_; ++s) {
      if ((succ_mask_[s] & ~set) == 0) out |= 1ULL << s;
    }
    return out;
  };
  const auto until_exists = [&](std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = b;
    for (;;) {
      const std::uint64_t grown = z | (a & pre_exists(z));
      if (grown == z) return z;
      z = grown;
    }
  };
  const auto until_tilde_exists = [&](std::uint64_t a, std::uint64_t b) {
    // Reachability rows restricted to b-states, then cycle states b & row[s]∋s.
    std::uint64_t row[64];
    for (int s = 0; s < n_; ++s) row[s] = (b >> s) & 1 ? succ_mask_[s] & b : 0;
    for (int k = 0; k < n_; ++k) {
      if (!((b >> k) & 1)) continue;
      const std::uint64_t rk = row[k];
      for (int s = 0; s < n_; ++s) {
        if ((row[s] >> k) & 1) row[s] |= rk;
      }
    }
    std::uint64_t seed = a & b;
    for (int s = 0; s < n_; ++s) {
      if (((b >> s) & 1) && ((row[s] >> s) & 1)) seed |= 1ULL << s;
    }
    std::uint64_t z = seed;
    for (;;) {
      const std::uint64_t grown = z | (b & pre_exists(z));
      if (grown == z) return z;
      z = grown;
    }
  };

  for (std::size_t i = 0; i < cf.ops.size(); ++i) {
    const auto& op = cf.ops[i];
    switch (op.kind) {
      case FormulaKind::True: slot[i] = all_mask_; break;
      case FormulaKind::False: slot[i] = 0; break;
      case FormulaKind::Atom: slot[i] = atom_mask_[op.atom]; break;
      case FormulaKind::Not: slot[i] = all_mask_ & ~slot[op.lhs]; break;
      case FormulaKind::And: slot[i] = slot[op.lhs] & slot[op.rhs]; break;
      case FormulaKind::Or: slot[i] = slot[op.lhs] | slot[op.rhs]; break;
      case FormulaKind::ExistsNext: slot[i] = pre_exists(slot[op.lhs]); break;
      case FormulaKind::ForallNext: slot[i] = pre_forall(slot[op.lhs]); break;
      case FormulaKind::ExistsUntil: slot[i] = until_exists(slot[op.lhs], slot[op.rhs]); break;
      case FormulaKind::ExistsUntilTilde:
        slot[i] = until_tilde_exists(slot[op.lhs], slot[op.rhs]);
        break;
      case FormulaKind::ForallUntil:
        slot[i] = all_mask_ &
                  ~until_tilde_exists(all_mask_ & ~slot[op.lhs], all_mask_ & ~slot[op.rhs]);
        break;
      case FormulaKind::ForallUntilTilde:
        slot[i] = all_mask_ & ~until_exists(all_mask_ & ~slot[op.lhs], all_mask_ & ~slot[op.rhs]);
        break;
    }
  }
  return slot[cf.ops.size() - 1];
}

StateSet ModelChecker::check_large(const CompiledFormula& cf) const {
  if (cf.max_atom >= static_cast<int>(k_->ap.size())) {
    throw InputError("formula mentions an atom outside the structure's declared atom set");
  }
  using Set = std::vector<char>;

  const auto pre_exists = [&](const Set& set) {
    Set out(n_, 0);
    for (int s = 0; s < n_; ++s) {
      for (int t : succ_[s]) {
        if (set[t]) {
          out[s] = 1;
          break;
        }
      }
    }
    return out;
  };
  const auto until_exists = [&](const Set& a, const Set& b) {
    Set z = b;
    std::vector<int> work;
    for (int s = 0; s < n_; ++s) {
      if (z[s]) work.push_back(s);
    }
    while (!work.empty()) {
      const int t = work.back();
      work.pop_back();
      for (int s : pred_[t]) {
        if (!z[s] && a[s]) {
          z[s] = 1;
          work.push_back(s);
        }
      }
    }
    return z;
  };
  // States lying on a cycle whose states all satisfy b: Tarjan SCCs of the
  // b-induced subgraph; an SCC counts if it has >= 2 states or a self-loop.
  const auto cycle_states = [&](const Set& b) {
    Set on_cycle(n_, 0);
    std::vector<int> index(n_, -1), low(n_, 0), comp(n_, -1);
    std::vector<int> stack, scc_stack;
    std::vector<char> on_stack(n_, 0);
    int next_index = 0, next_comp = 0;
    std::vector<std::pair<int, std::size_t>> frames;
    for (int root = 0; root < n_; ++root) {
      if (!b[root] || index[root] >= 0) continue;
      frames.emplace_back(root, 0);
      while (!frames.empty()) {
        auto& [v, ci] = frames.back();
        if (ci == 0) {
          index[v] = low[v] = next_index++;
          scc_stack.push_back(v);
          on_stack[v] = 1;
        }
        bool descended = false;
        while (ci < succ_[v].size()) {
          const int w = succ_[v][ci++];
          if (!b[w]) continue;
          if (index[w] < 0) {
            frames.emplace_back(w, 0);
            descended = true;
            break;
          }
          if (on_stack[w]) low[v] = std::min(low[v], index[w]);
        }
        if (descended) continue;
        if (low[v] == index[v]) {
          std::vector<int> members;
          for (;;) {
            const int w = scc_stack.back();
            scc_stack.pop_back();
            on_stack[w] = 0;
            comp[w] = next_comp;
            members.push_back(w);
            if (w == v) break;
          }
          ++next_comp;
          bool cyclic = members.size() >= 2;
          if (!cyclic) {
            const int w = members[0];
            cyclic = std::binary_search(succ_[w].begin(), succ_[w].end(), w);
          }
          if (cyclic) {
            for (int w : members) on_cycle[w] = 1;
          }
        }
        const int finished = v;
        frames.pop_back();
        if (!frames.empty()) {
          const int parent = frames.back().first;
          low[parent] = std::min(low[parent], low[finished]);
        }
      }
    }
    return on_cycle;
  };
  const auto until_tilde_exists = [&](const Set& a, const Set& b) {
    Set seed = cycle_states(b);
    for (int s = 0; s < n_; ++s) {
      if (a[s] && b[s]) seed[s] = 1;
    }
    return until_exists(b, seed);
  };
  const auto complement = [&](const Set& s) {
    Set out(n_, 0);
    for (int i = 0; i < n_; ++i) out[i] = !s[i];
    return out;
  };

  std::vector<Set> slot(cf.ops.size());
  for (std::size_t i = 0; i < cf.ops.size(); ++i) {
    const auto& op = cf.ops[i];
    switch (op.kind) {
      case FormulaKind::True: slot[i].assign(n_, 1); break;
      case FormulaKind::False: slot[i].assign(n_, 0); break;
      case FormulaKind::Atom: {
        slot[i].assign(n_, 0);
        for (int s = 0; s < n_; ++s) slot[i][s] = k_->atom_true_at(s, op.atom);
        break;
      }
      case FormulaKind::Not: slot[i] = complement(slot[op.lhs]); break;
      case FormulaKind::And: {
        slot[i].assign(n_, 0);
        for (int s = 0; s < n_; ++s) slot[i][s] = slot[op.lhs][s] && slot[op.rhs][s];
        break;
      }
      case FormulaKind::Or: {
        slot[i].assign(n_, 0);
        for (int s = 0; s < n_; ++s) slot[i][s] = slot[op.lhs][s] || slot[op.rhs][s];
        break;
      }
      case FormulaKind::ExistsNext: slot[i] = pre_exists(slot[op.lhs]); break;
      case FormulaKind::ForallNext: {
        slot[i].assign(n_, 0);
        for (int s = 0; s < n_; ++s) {
          bool all = true;
          for (int t : succ_[s]) {
            if (!slot[op.lhs][t]) {
              all = false;
              break;
            }
          }
          slot[i][s] = all;
        }
        break;
      }
      case FormulaKind::ExistsUntil: slot[i] = until_exists(slot[op.lhs], slot[op.rhs]); break;
      case FormulaKind::ExistsUntilTilde:
        slot[i] = until_tilde_exists(slot[op.lhs], slot[op.rhs]);
        break;
      case FormulaKind::ForallUntil:
        slot[i] = complement(until_tilde_exists(complement(slot[op.lhs]), complement(slot[op.rhs])));
        break;
      case FormulaKind::ForallUntilTilde:
        slot[i] = complement(until_exists(complement(slot[op.lhs]), complement(slot[op.rhs])));
        break;
    }
  }
  StateSet out;
  for (int s = 0; s < n_; ++s) {
    if (slot.back()[s]) out.push_back(s);
  }
  return out;
}

StateSet ModelChecker::check(const CompiledFormula& cf) const {
  if (n_ <= 64) {
    const std::uint64_t m = check_mask(cf);
    StateSet out;
    for (int s = 0; s < n_; ++s) {
      if ((m >> s) & 1) out.push_back(s);
    }
    return out;
  }
  return check_large(cf);
}

StateSet ModelChecker::check(const Formula& f) const { return check(CompiledFormula::compile(f)); }

StateSet model_check(const KripkeStructure& k, const Formula& f) {
  return ModelChecker(k).check(f);
}

std::uint64_t check_mask_packed(const CompiledFormula& cf, int n, std::uint64_t trans_rows,
                                std::span<const std::uint64_t> atom_masks) {
  const std::uint64_t all = n == 64 ? ~0ULL : ((1ULL << n) - 1);
  const auto row = [&](int s) { return (trans_rows >> (8 * s)) & 0xFF; };

  const auto pre_exists = [&](std::uint64_t set) {
    std::uint64_t out = 0;
    for (int s = 0; s < n; ++s) {
      if (row(s) & set) out |= 1ULL << s;
    }
    return out;
  };
  const auto pre_forall = [&](std::uint64_t set) {
    std::uint64_t out = 0;
    for (int s = 0; s < n; ++s) {
      if ((row(s) & ~set) == 0) out |= 1ULL << s;
    }
    return out;
  };
  const auto until_exists = [&](std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = b;
    for (;;) {
      const std::uint64_t grown = z | (a & pre_exists(z));
      if (grown == z) return z;
      z = grown;
    }
  };
  const auto until_tilde_exists = [&](std::uint64_t a, std::uint64_t b) {
    std::uint64_t reach[8];
    for (int s = 0; s < n; ++s) reach[s] = (b >> s) & 1 ? row(s) & b : 0;
    for (int k = 0; k < n; ++k) {
      if (!((b >> k) & 1)) continue;
      const std::uint64_t rk = reach[k];
      for (int s = 0; s < n; ++s) {
        if ((reach[s] >> k) & 1) reach[s] |= rk;
      }
    }
    std::uint64_t z = a & b;
    for (int s = 0; s < n; ++s) {
      if (((b >> s) & 1) && ((reach[s] >> s) & 1)) z |= 1ULL << s;
    }
    for (;;) {
      const std::uint64_t grown = z | (b & pre_exists(z));
      if (grown == z) return z;
      z = grown;
    }
  };

  std::uint64_t stack_slots[64];
  std::vector<std::uint64_t> heap_slots;
  std::uint64_t* slot = stack_slots;
  if (cf.ops.size() > 64) {
    heap_slots.resize(cf.ops.size());
    slot = heap_slots.data();
  }
  for (std::size_t i = 0; i < cf.ops.size(); ++i) {
    const auto& op = cf.ops[i];
    switch (op.kind) {
      case FormulaKind::True: slot[i] = all; break;
      case FormulaKind::False: slot[i] = 0; break;
      case FormulaKind::Atom: slot[i] = atom_masks[op.atom]; break;
      case FormulaKind::Not: slot[i] = all & ~slot[op.lhs]; break;
      case FormulaKind::And: slot[i] = slot[op.lhs] & slot[op.rhs]; break;
      case FormulaKind::Or: slot[i] = slot[op.lhs] | slot[op.rhs]; break;
      case FormulaKind::ExistsNext: slot[i] = pre_exists(slot[op.lhs]); break;
      case FormulaKind::ForallNext: slot[i] = pre_forall(slot[op.lhs]); break;
      case FormulaKind::ExistsUntil: slot[i] = until_exists(slot[op.lhs], slot[op.rhs]); break;
      case FormulaKind::ExistsUntilTilde:
        slot[i] = until_tilde_exists(slot[op.lhs], slot[op.rhs]);
        break;
      case FormulaKind::ForallUntil:
        slot[i] = all & ~until_tilde_exists(all & ~slot[op.lhs], all & ~slot[op.rhs]);
        break;
      case FormulaKind::ForallUntilTilde:
        slot[i] = all & ~until_exists(all & ~slot[op.lhs], all & ~slot[op.rhs]);
        break;
    }
  }
  return slot[cf.ops.size() - 1];
}

// ---------------------------------------------------------------------------
// Truth oracle

namespace {

// One lasso: states[0..m-1] is a simple prefix, the successor of
// states[m-1] is states[loop], giving the path states[0..m-1] (states[loop..m-1])^w.
struct Lasso {
  const std::vector<int>* states;
  int loop;

  int at(int i) const {
    const int m = static_cast<int>(states->size());
    if (i < m) return (*states)[i];
    return (*states)[loop + (i - loop) % (m - loop)];
  }
  int prefix_len() const { return static_cast<int>(states->size()); }
};

using Set = std::vector<char>;

bool lasso_next(const Lasso& l, const Set& s1) { return s1[l.at(1)]; }

bool lasso_until(const Lasso& l, const Set& s1, const Set& s2) {
  // A first witness position always occurs within the simple prefix.
  for (int i = 0; i < l.prefix_len(); ++i) {
    if (s2[l.at(i)]) return true;
    if (!s1[l.at(i)]) return false;
  }
  return false;
}

bool lasso_until_tilde(const Lasso& l, const Set& s1, const Set& s2) {
  // Every failure of s2 must be strictly preceded by an s1 position; only the
  // first failure matters, and it occurs within the simple prefix if at all.
  for (int i = 0; i < l.prefix_len(); ++i) {
    if (!s2[l.at(i)]) {
      for (int j = 0; j < i; ++j) {
        if (s1[l.at(j)]) return true;
      }
      return false;
    }
  }
  return true;  // s2 holds on the whole periodic path
}

// Enumerates all lassos with a simple prefix starting at `start`; returns
// true as soon as `property` holds on one of them.
template <typename Property>
bool exists_lasso(const std::vector<std::vector<int>>& succ, int start, Property&& property) {
  const int n = static_cast<int>(succ.size());
  std::vector<int> path{start};
  std::vector<char> on_path(n, 0);
  on_path[start] = 1;
  std::vector<std::size_t> cursor{0};

  while (!cursor.empty()) {
    const int v = path.back();
    if (cursor.back() < succ[v].size()) {
      const int w = succ[v][cursor.back()++];
      if (on_path[w]) {
        int loop = 0;
        while (path[loop] != w) ++loop;
        if (property(Lasso{&path, loop})) return true;
      } else {
        path.push_back(w);
        on_path[w] = 1;
        cursor.push_back(0);
      }
    } else {
      on_path[v] = 0;
      path.pop_back();
      cursor.pop_back();
    }
  }
  return false;
}

}  // namespace

StateSet truth_oracle(const KripkeStructure& k, const Formula& f, int max_states) {
  k.validate();
  const int n = k.num_states();
  if (n > max_states) {
    throw InputError("truth_oracle: structure has " + std::to_string(n) +
                     " states, above the bound of " + std::to_string(max_states));
  }
  if (f.max_atom() >= static_cast<int>(k.ap.size())) {
    throw InputError("formula mentions an atom outside the structure's declared atom set");
  }
  const auto succ = successor_lists(k);
  for (int s = 0; s < n; ++s) {
    if (succ[s].empty()) {
      throw InputError("truth_oracle requires a total transition relation");
    }
  }

  const auto complement = [&](const Set& s) {
    Set out(n, 0);
    for (int i = 0; i < n; ++i) out[i] = !s[i];
    return out;
  };
  const auto for_each_state = [&](auto&& pred) {
    Set out(n, 0);
    for (int s = 0; s < n; ++s) out[s] = pred(s);
    return out;
  };

  const std::function<Set(const Formula&)> eval = [&](const Formula& g) -> Set {
    switch (g.kind()) {
      case FormulaKind::True: return Set(n, 1);
      case FormulaKind::False: return Set(n, 0);
      case FormulaKind::Atom:
        return for_each_state([&](int s) { return k.atom_true_at(s, g.atom_index()); });
      case FormulaKind::Not: return complement(eval(g.left()));
      case FormulaKind::And: {
        const Set a = eval(g.left()), b = eval(g.right());
        return for_each_state([&](int s) { return a[s] && b[s]; });
      }
      case FormulaKind::Or: {
        const Set a = eval(g.left()), b = eval(g.right());
        return for_each_state([&](int s) { return a[s] || b[s]; });
      }
      case FormulaKind::ExistsNext: {
        const Set a = eval(g.left());
        return for_each_state([&](int s) {
          return exists_lasso(succ, s, [&](const Lasso& l) { return lasso_next(l, a); });
        });
      }
      case FormulaKind::ForallNext: {
        const Set a = complement(eval(g.left()));
        return for_each_state([&](int s) {
          return !exists_lasso(succ, s, [&](const Lasso& l) { return lasso_next(l, a); });
        });
      }
      case FormulaKind::ExistsUntil: {
        const Set a = eval(g.left()), b = eval(g.right());
        return for_each_state([&](int s) {
          return exists_lasso(succ, s, [&](const Lasso& l) { return lasso_until(l, a, b); });
        });
      }
      case FormulaKind::ExistsUntilTilde: {
        const Set a = eval(g.left()), b = eval(g.right());
        return for_each_state([&](int s) {
          return exists_lasso(succ, s,
                              [&](const Lasso& l) { return lasso_until_tilde(l, a, b); });
        });
      }
      case FormulaKind::ForallUntil: {
        // A(a U b) = !E(!a UT !b)
        const Set a = complement(eval(g.left())), b = complement(eval(g.right()));
        return for_each_state([&](int s) {
          return !exists_lasso(succ, s,
                               [&](const Lasso& l) { return lasso_until_tilde(l, a, b); });
        });
      }
      case FormulaKind::ForallUntilTilde: {
        // A(a UT b) = !E(!a U !b)
        const Set a = complement(eval(g.left())), b = complement(eval(g.right()));
        return for_each_state([&](int s) {
          return !exists_lasso(succ, s, [&](const Lasso& l) { return lasso_until(l, a, b); });
        });
      }
    }
    throw InternalError("truth_oracle: unreachable");
  };

  const Set result = eval(f);
  StateSet out;
  for (int s = 0; s < n; ++s) {
    if (result[s]) out.push_back(s);
  }
  return out;
}

}  // namespace ctldl

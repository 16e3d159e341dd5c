#include "ctldl/decision.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <numeric>

#include "ctldl/model_check.hpp"

namespace ctldl {

std::uint64_t bounded_model_threshold(const Formula& f) {
  const std::size_t size = f.size();
  if (size >= 64) return ~0ULL;
  return 1ULL << size;
}

namespace {

// Joint encoding of transitions and valuation under a state permutation;
// smaller encodings are earlier in the search order.
struct Candidate {
  int n = 0;
  int atoms = 0;
  const std::uint8_t* succ = nullptr;  // successor mask per state
  const std::uint8_t* val = nullptr;   // atom mask per state

  std::uint64_t encode(const int* perm) const {
    std::uint64_t out = 0;
    int bit = 0;
    for (int s = 0; s < n; ++s) {
      const int ps = perm[s];
      for (int t = 0; t < n; ++t) {
        if (succ[ps] & (1u << perm[t])) out |= 1ULL << bit;
        ++bit;
      }
    }
    for (int s = 0; s < n; ++s) {
      out |= static_cast<std::uint64_t>(val[perm[s]]) << bit;
      bit += atoms;
    }
    return out;
  }
};

bool reachable_from_zero(int n, const std::uint8_t* succ) {
  std::uint8_t seen = 1;
  for (;;) {
    std::uint8_t grown = seen;
    for (int s = 0; s < n; ++s) {
      if (seen & (1u << s)) grown |= succ[s];
    }
    if (grown == seen) break;
    seen = grown;
  }
  return seen == (n == 8 ? 0xFF : (1u << n) - 1);
}

KripkeStructure materialize(int n, int atoms, const std::uint8_t* succ, const std::uint8_t* val,
                            std::span<const std::string> atom_names) {
  KripkeStructure k;
  for (int s = 0; s < n; ++s) k.states.push_back("s" + std::to_string(s));
  for (int a = 0; a < atoms; ++a) {
    k.ap.push_back(a < static_cast<int>(atom_names.size()) ? atom_names[a]
                                                           : "p" + std::to_string(a));
  }
  k.valuation.assign(n, {});
  for (int s = 0; s < n; ++s) {
    for (int a = 0; a < atoms; ++a) {
      if (val[s] & (1u << a)) k.valuation[s].push_back(a);
    }
    for (int t = 0; t < n; ++t) {
      if (succ[s] & (1u << t)) k.trans.emplace_back(s, t);
    }
  }
  std::sort(k.trans.begin(), k.trans.end());
  return k;
}

// Iterates successor-mask assignments (the transition relation) in ascending
// bitmask order with state 0 most significant, valuations innermost.
template <typename Fn>
void enumerate_structures(int n, int atoms, bool rooted, int max_outdegree, int shard,
                          int num_shards, Fn&& fn) {
  if (n > 8) throw InputError("bounded enumeration supports at most 8 states");
  if (n * n + n * atoms > 64) {
    throw InputError("bounded enumeration: state count times atoms exceeds the 64-bit encoding");
  }
  std::vector<std::uint8_t> succ_masks;
  const int full = (1 << n) - 1;
  for (int m = 1; m <= full; ++m) {
    if (max_outdegree == 0 || std::popcount(static_cast<unsigned>(m)) <= max_outdegree) {
      succ_masks.push_back(static_cast<std::uint8_t>(m));
    }
  }

  std::vector<int> idx(n, 0);
  std::uint8_t succ[8] = {0};
  std::uint8_t val[8] = {0};
  const int val_choices = 1 << (n * atoms);

  // permutations (all, or fixing state 0 when rooted)
  std::vector<std::array<int, 8>> perms;
  std::array<int, 8> base{};
  std::iota(base.begin(), base.end(), 0);
  std::vector<int> tail(base.begin() + (rooted ? 1 : 0), base.begin() + n);
  std::sort(tail.begin(), tail.end());
  do {
    std::array<int, 8> perm = base;
    for (std::size_t i = 0; i < tail.size(); ++i) perm[(rooted ? 1 : 0) + i] = tail[i];
    perms.push_back(perm);
  } while (std::next_permutation(tail.begin(), tail.end()));

  std::uint64_t graph_counter = 0;
  for (;;) {
    for (int s = 0; s < n; ++s) succ[s] = succ_masks[idx[s]];
    const bool take_shard =
        num_shards <= 1 ||
        graph_counter % static_cast<std::uint64_t>(num_shards) == static_cast<std::uint64_t>(shard);
    ++graph_counter;
    if (take_shard && (!rooted || reachable_from_zero(n, succ))) {
      for (int v = 0; v < val_choices; ++v) {
        for (int s = 0; s < n; ++s) {
          val[s] = static_cast<std::uint8_t>((v >> (s * atoms)) & ((1 << atoms) - 1));
        }
        const Candidate cand{n, atoms, succ, val};
        const std::uint64_t self = cand.encode(perms[0].data());
        bool canonical = true;
        for (std::size_t pi = 1; pi < perms.size() && canonical; ++pi) {
          if (cand.encode(perms[pi].data()) < self) canonical = false;
        }
        if (!canonical) continue;
        if (fn(succ, val)) return;
      }
    }
    // odometer with state 0 most significant
    int pos = n - 1;
    while (pos >= 0) {
      if (++idx[pos] < static_cast<int>(succ_masks.size())) break;
      idx[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
}

}  // namespace

void for_each_total_structure_class(int num_states, int num_atoms,
                                    const std::function<void(const KripkeStructure&)>& fn,
                                    int max_outdegree, int shard, int num_shards,
                                    std::span<const std::string> atoms) {
  enumerate_structures(num_states, num_atoms, /*rooted=*/false, max_outdegree, shard, num_shards,
                       [&](const std::uint8_t* succ, const std::uint8_t* val) {
                         fn(materialize(num_states, num_atoms, succ, val, atoms));
                         return false;
                       });
}

BoundedVerdict bounded_satisfiable(const Formula& f, int max_states,
                                   std::span<const std::string> atoms) {
  if (max_states < 1) throw InputError("max_states must be >= 1");
  const int num_atoms = f.max_atom() + 1;
  const CompiledFormula cf = CompiledFormula::compile(f);

  BoundedVerdict verdict;
  verdict.bound_searched = max_states;
  verdict.completeness_threshold = bounded_model_threshold(f);
  verdict.decisive =
      static_cast<std::uint64_t>(max_states) >= verdict.completeness_threshold;

  for (int n = 1; n <= max_states && !verdict.witness; ++n) {
    enumerate_structures(n, num_atoms, /*rooted=*/true, /*max_outdegree=*/0, 0, 1,
                         [&](const std::uint8_t* succ, const std::uint8_t* val) {
                           const KripkeStructure k = materialize(n, num_atoms, succ, val, atoms);
                           const ModelChecker mc(k);
                           if (mc.check_mask(cf) & 1ULL) {  // state 0 is the root
                             verdict.witness = Witness{k, 0};
                             return true;
                           }
                           return false;
                         });
  }
  verdict.kind = verdict.witness ? BoundedVerdict::Kind::Holds : BoundedVerdict::Kind::ExhaustedBound;
  if (verdict.witness) verdict.decisive = true;
  return verdict;
}

BoundedVerdict bounded_contained(const Formula& f1, const Formula& f2, int max_states,
                                 std::span<const std::string> atoms) {
  if (f1 == f2) {
    BoundedVerdict verdict;
    verdict.kind = BoundedVerdict::Kind::Holds;
    verdict.bound_searched = 0;
    verdict.completeness_threshold = 0;
    verdict.decisive = true;
    return verdict;
  }
  const Formula gap = Formula::conjunction(f1, Formula::negation(f2));
  BoundedVerdict search = bounded_satisfiable(gap, max_states, atoms);
  BoundedVerdict verdict;
  verdict.bound_searched = search.bound_searched;
  verdict.completeness_threshold = search.completeness_threshold;
  if (search.kind == BoundedVerdict::Kind::Holds) {
    verdict.kind = BoundedVerdict::Kind::CounterexampleFound;
    verdict.witness = std::move(search.witness);
    verdict.decisive = true;
  } else {
    verdict.kind = BoundedVerdict::Kind::Holds;
    verdict.decisive = search.decisive;
  }
  return verdict;
}

BoundedVerdict std_contained(const StdProgram& p1, const StdProgram& p2, int max_states) {
  return bounded_contained(std_to_ctl(p1), std_to_ctl(p2), max_states);
}

Formula b_sat_reduction(const Formula& phi, const Formula& psi1) {
  return Formula::conjunction(
      phi, Formula::negation(Formula::exists_until(Formula::make_true(), psi1)));
}

FactStore evaluate_std_via_ctl(const StdProgram& p, const Database& d) {
  const KripkeStructure k = db_to_kripke(d);
  const Formula f = std_to_ctl(p);
  if (f.max_atom() >= static_cast<int>(k.ap.size())) {
    // The program reads unary predicates the database never mentions; they
    // are empty, so extend the atom list.
    KripkeStructure padded = k;
    for (int a = static_cast<int>(k.ap.size()); a <= f.max_atom(); ++a) {
      padded.ap.push_back("p" + std::to_string(a));
    }
    const StateSet states = model_check(padded, f);
    FactStore out;
    for (const auto& c : d.constants) out.intern(c);
    out.declare("G", 1, {SortKind::Constant});
    for (int s : states) out.add("G", Tuple{out.find_symbol(padded.states[s])}, {SortKind::Constant});
    return out;
  }
  const StateSet states = model_check(k, f);
  FactStore out;
  for (const auto& c : d.constants) out.intern(c);
  out.declare("G", 1, {SortKind::Constant});
  for (int s : states) out.add("G", Tuple{out.find_symbol(k.states[s])}, {SortKind::Constant});
  return out;
}

}  // namespace ctldl

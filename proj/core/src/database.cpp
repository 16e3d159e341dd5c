#include "ctldl/database.hpp"

#include <algorithm>
#include <cctype>

namespace ctldl {

namespace {

void sort_unique(std::vector<std::pair<int, int>>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

void sort_unique(std::vector<int>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

int Database::constant_id(std::string_view name) const {
  for (std::size_t i = 0; i < constants.size(); ++i) {
    if (constants[i] == name) return static_cast<int>(i);
  }
  return -1;
}

int Database::intern(std::string_view name) {
  const int id = constant_id(name);
  if (id >= 0) return id;
  constants.emplace_back(name);
  return static_cast<int>(constants.size()) - 1;
}

void Database::normalize() {
  sort_unique(r);
  sort_unique(s0);
  sort_unique(s1);
  sort_unique(next);
  for (auto& u : unary) sort_unique(u);
}

DomainSet domain_of(const Database& d) {
  DomainSet dom;
  const auto take_pairs = [&dom](const std::vector<std::pair<int, int>>& rel) {
    for (const auto& [a, b] : rel) {
      dom.push_back(a);
      dom.push_back(b);
    }
  };
  take_pairs(d.r);
  take_pairs(d.s0);
  take_pairs(d.s1);
  take_pairs(d.next);
  for (const auto& u : d.unary) dom.insert(dom.end(), u.begin(), u.end());
  sort_unique(dom);
  return dom;
}

Database total_closure(const Database& d) {
  if (d.form != Database::BinaryForm::SingleR) {
    throw InputError("total_closure requires the single-R form");
  }
  Database out = d;
  const DomainSet dom = domain_of(d);
  std::vector<char> has_succ(d.constants.size(), 0);
  for (const auto& [from, to] : d.r) has_succ[from] = 1;
  for (int x : dom) {
    if (!has_succ[x]) out.r.emplace_back(x, x);
  }
  out.normalize();
  return out;
}

Database kripke_to_db(const KripkeStructure& k) {
  k.validate();
  Database d;
  d.form = Database::BinaryForm::SingleR;
  d.constants = k.states;
  d.r = k.trans;
  d.unary.assign(k.ap.size(), {});
  for (int s = 0; s < k.num_states(); ++s) {
    for (int a : k.valuation[s]) d.unary[a].push_back(s);
  }
  d.normalize();
  return d;
}

KripkeStructure db_to_kripke(const Database& d) {
  if (d.form != Database::BinaryForm::SingleR) {
    throw InputError("db_to_kripke requires the single-R form");
  }
  const DomainSet dom = domain_of(d);
  if (dom.empty()) throw InputError("empty structure");

  std::vector<int> state_of(d.constants.size(), -1);
  KripkeStructure k;
  for (int c : dom) {
    state_of[c] = static_cast<int>(k.states.size());
    k.states.push_back(d.constants[c]);
  }
  k.valuation.assign(k.states.size(), {});
  for (std::size_t i = 0; i < d.unary.size(); ++i) {
    k.ap.push_back("p" + std::to_string(i));
    for (int c : d.unary[i]) k.valuation[state_of[c]].push_back(static_cast<int>(i));
  }
  for (auto& v : k.valuation) std::sort(v.begin(), v.end());

  const Database closed = total_closure(d);
  for (const auto& [from, to] : closed.r) k.trans.emplace_back(state_of[from], state_of[to]);
  std::sort(k.trans.begin(), k.trans.end());
  return k;
}

Database split_outdegree2(const KripkeStructure& k, const StateOrder& order) {
  k.validate();
  const StateOrder cmp = order ? order : StateOrder([](const std::string& a, const std::string& b) {
    return a < b;
  });

  Database d;
  d.form = Database::BinaryForm::Split;
  d.constants = k.states;
  d.unary.assign(k.ap.size(), {});
  for (int s = 0; s < k.num_states(); ++s) {
    for (int a : k.valuation[s]) d.unary[a].push_back(s);
  }

  const auto succ = successor_lists(k);
  for (int s = 0; s < k.num_states(); ++s) {
    std::vector<int> children = succ[s];
    if (children.empty()) {
      throw InputError("state '" + k.states[s] + "' has outdegree 0; total structure required");
    }
    if (children.size() > 2) {
      throw InputError("state '" + k.states[s] + "' has outdegree " +
                       std::to_string(children.size()) + "; at most 2 is supported");
    }
    std::sort(children.begin(), children.end(),
              [&](int a, int b) { return cmp(k.states[a], k.states[b]); });
    d.s0.emplace_back(s, children[0]);
    if (children.size() == 2) d.s1.emplace_back(s, children[1]);
  }
  d.normalize();
  return d;
}

FactStore database_to_facts(const Database& d) {
  FactStore store;
  for (const auto& c : d.constants) store.intern(c);
  const std::vector<SortKind> bin{SortKind::Constant, SortKind::Constant};
  const std::vector<SortKind> un{SortKind::Constant};
  const auto add_pairs = [&](const char* pred, const std::vector<std::pair<int, int>>& rel) {
    for (const auto& [a, b] : rel) store.add(pred, Tuple{a, b}, bin);
  };
  if (d.form == Database::BinaryForm::SingleR) {
    add_pairs("R", d.r);
  } else {
    add_pairs("S0", d.s0);
    add_pairs("S1", d.s1);
  }
  add_pairs("Next", d.next);
  for (std::size_t i = 0; i < d.unary.size(); ++i) {
    const std::string pred = "P" + std::to_string(i);
    for (int c : d.unary[i]) store.add(pred, Tuple{c}, un);
  }
  return store;
}

Database database_from_facts(const FactStore& store) {
  Database d;
  // Constants in name order, so the layout is independent of fact order.
  d.constants = store.symbols();
  std::sort(d.constants.begin(), d.constants.end());
  std::vector<int> remap(store.num_symbols());
  for (int i = 0; i < store.num_symbols(); ++i) {
    remap[i] = static_cast<int>(
        std::lower_bound(d.constants.begin(), d.constants.end(), store.symbol(i)) -
        d.constants.begin());
  }

  bool has_r = false, has_split = false;
  int max_unary = -1;
  for (const auto& [pred, rel] : store.relations()) {
    if (rel.tuples.empty()) continue;
    for (SortKind s : rel.sorts) {
      if (s != SortKind::Constant) {
        throw InputError("Kripke-schema databases cannot contain counter arguments (" + pred + ")");
      }
    }
    if (pred == "R" || pred == "S0" || pred == "S1" || pred == "Next") {
      if (rel.arity != 2) throw InputError(pred + " must be binary");
      if (pred == "R") has_r = true;
      if (pred == "S0" || pred == "S1") has_split = true;
    } else if (pred.size() >= 2 && pred[0] == 'P' &&
               std::all_of(pred.begin() + 1, pred.end(),
                           [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      if (rel.arity != 1) throw InputError(pred + " must be unary");
      max_unary = std::max(max_unary, std::stoi(pred.substr(1)));
    } else {
      throw InputError("predicate '" + pred + "' does not fit the Kripke schema (R/S0/S1/Next/Pi)");
    }
  }
  if (has_r && has_split) {
    throw InputError("database mixes R with the S0/S1 refinement");
  }
  d.form = has_split ? Database::BinaryForm::Split : Database::BinaryForm::SingleR;
  d.unary.assign(max_unary + 1, {});

  const auto copy_pairs = [&](const char* pred, std::vector<std::pair<int, int>>& out) {
    if (const Relation* rel = store.find(pred); rel != nullptr) {
      for (const auto& t : rel->tuples) out.emplace_back(remap[t[0]], remap[t[1]]);
    }
  };
  copy_pairs("R", d.r);
  copy_pairs("S0", d.s0);
  copy_pairs("S1", d.s1);
  copy_pairs("Next", d.next);
  for (int i = 0; i <= max_unary; ++i) {
    if (const Relation* rel = store.find("P" + std::to_string(i)); rel != nullptr) {
      for (const auto& t : rel->tuples) d.unary[i].push_back(remap[t[0]]);
    }
  }
  d.normalize();

  if (d.form == Database::BinaryForm::Split) {
    // S0 and S1 are disjoint partial functions on their first argument.
    for (const auto* rel : {&d.s0, &d.s1}) {
      for (std::size_t i = 1; i < rel->size(); ++i) {
        if ((*rel)[i].first == (*rel)[i - 1].first) {
          throw InputError("state '" + d.constants[(*rel)[i].first] +
                           "' has two children in the same successor relation");
        }
      }
    }
    for (const auto& pair : d.s0) {
      if (std::binary_search(d.s1.begin(), d.s1.end(), pair)) {
        throw InputError("S0 and S1 must be disjoint");
      }
    }
  }
  return d;
}

Database parse_database(std::string_view text) { return database_from_facts(parse_facts(text)); }

std::string render_database(const Database& d) { return render_facts(database_to_facts(d)); }

}  // namespace ctldl

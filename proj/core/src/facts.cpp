#include "ctldl/facts.hpp"

#include <algorithm>
#include <cctype>

namespace ctldl {

int FactStore::intern(std::string_view name) {
  if (auto it = symbol_ids_.find(std::string(name)); it != symbol_ids_.end()) return it->second;
  symbols_.emplace_back(name);
  const int id = static_cast<int>(symbols_.size()) - 1;
  symbol_ids_.emplace(symbols_.back(), id);
  return id;
}

int FactStore::find_symbol(std::string_view name) const {
  const auto it = symbol_ids_.find(std::string(name));
  return it == symbol_ids_.end() ? -1 : it->second;
}

void FactStore::declare(const std::string& pred, int arity, const std::vector<SortKind>& sorts) {
  auto [it, inserted] = relations_.try_emplace(pred);
  Relation& rel = it->second;
  if (inserted) {
    rel.arity = arity;
    rel.sorts = sorts;
    return;
  }
  if (rel.arity != arity) {
    throw InputError("arity mismatch for predicate " + pred + ": " + std::to_string(rel.arity) +
                     " vs " + std::to_string(arity));
  }
  if (rel.sorts != sorts) {
    throw InputError("argument sort mismatch for predicate " + pred);
  }
}

void FactStore::add(const std::string& pred, Tuple tuple, const std::vector<SortKind>& sorts) {
  declare(pred, static_cast<int>(tuple.size()), sorts);
  relations_[pred].tuples.insert(std::move(tuple));
}

const Relation* FactStore::find(const std::string& pred) const {
  const auto it = relations_.find(pred);
  return it == relations_.end() ? nullptr : &it->second;
}

std::size_t FactStore::total_facts() const {
  std::size_t n = 0;
  for (const auto& [_, rel] : relations_) n += rel.tuples.size();
  return n;
}

namespace {

bool constant_name(std::string_view s) {
  if (s.empty() || !std::islower(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

bool predicate_name(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

bool integer_token(std::string_view s) {
  return !s.empty() &&
         std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

}  // namespace

FactStore parse_facts(std::string_view text) {
  FactStore store;
  std::size_t pos = 0;
  int lineno = 1;
  const auto fail = [&](const std::string& msg) -> void {
    throw ParseError("facts: " + msg + " at line " + std::to_string(lineno), lineno, 1);
  };

  while (pos < text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() : eol + 1;

    if (const auto c = line.find_first_of("#%"); c != std::string_view::npos) line = line.substr(0, c);
    std::string compact;
    for (char c : line) {
      if (!std::isspace(static_cast<unsigned char>(c))) compact += c;
    }
    if (compact.empty()) {
      ++lineno;
      continue;
    }

    const auto lp = compact.find('(');
    const auto rp = compact.rfind(')');
    if (lp == std::string::npos || rp == std::string::npos || rp < lp || compact.back() != '.' ||
        rp != compact.size() - 2) {
      fail("expected 'Pred(arg,...).'");
    }
    const std::string pred = compact.substr(0, lp);
    if (!predicate_name(pred)) fail("bad predicate name '" + pred + "'");

    std::vector<std::string> args;
    std::string cur;
    for (std::size_t i = lp + 1; i < rp; ++i) {
      if (compact[i] == ',') {
        args.push_back(cur);
        cur.clear();
      } else {
        cur += compact[i];
      }
    }
    args.push_back(cur);

    Tuple tuple;
    std::vector<SortKind> sorts;
    for (const auto& a : args) {
      if (integer_token(a)) {
        tuple.push_back(static_cast<std::int32_t>(std::stol(a)));
        sorts.push_back(SortKind::Counter);
      } else if (constant_name(a)) {
        tuple.push_back(store.intern(a));
        sorts.push_back(SortKind::Constant);
      } else {
        fail("bad argument '" + a + "'");
      }
    }
    try {
      store.add(pred, std::move(tuple), sorts);
    } catch (const InputError& e) {
      fail(e.what());
    }
    ++lineno;
  }
  return store;
}

std::string render_fact(const FactStore& store, const std::string& pred, const Tuple& t) {
  const Relation* rel = store.find(pred);
  std::string out = pred + "(";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i > 0) out += ",";
    if (rel != nullptr && rel->sorts[i] == SortKind::Counter) {
      out += std::to_string(t[i]);
    } else {
      out += store.symbol(t[i]);
    }
  }
  out += ").";
  return out;
}

std::string render_facts(const FactStore& store) {
  std::string out;
  for (const auto& [pred, rel] : store.relations()) {
    std::vector<std::string> lines;
    lines.reserve(rel.tuples.size());
    for (const auto& t : rel.tuples) lines.push_back(render_fact(store, pred, t));
    std::sort(lines.begin(), lines.end());
    for (const auto& l : lines) out += l + "\n";
  }
  return out;
}

bool same_relation(const FactStore& a, const FactStore& b, const std::string& pred) {
  const Relation* ra = a.find(pred);
  const Relation* rb = b.find(pred);
  const std::size_t na = ra == nullptr ? 0 : ra->tuples.size();
  const std::size_t nb = rb == nullptr ? 0 : rb->tuples.size();
  if (na != nb) return false;
  if (na == 0) return true;
  if (ra->sorts != rb->sorts) return false;

  std::set<std::vector<std::string>> named_a, named_b;
  const auto lift = [](const FactStore& fs, const Relation& rel, std::set<std::vector<std::string>>& out) {
    for (const auto& t : rel.tuples) {
      std::vector<std::string> named;
      named.reserve(t.size());
      for (std::size_t i = 0; i < t.size(); ++i) {
        named.push_back(rel.sorts[i] == SortKind::Counter ? std::to_string(t[i]) : fs.symbol(t[i]));
      }
      out.insert(std::move(named));
    }
  };
  lift(a, *ra, named_a);
  lift(b, *rb, named_b);
  return named_a == named_b;
}

}  // namespace ctldl

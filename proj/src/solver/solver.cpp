#include "cscv/solver/solver.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "cscv/error.hpp"

namespace cscv::solver {

namespace {

struct Var {
  std::string name;
  Sort sort;
  std::vector<Value> domain;
};

void index_symbols(const Term& t, const std::unordered_map<std::string, std::size_t>& by_name,
                   std::unordered_map<const Term*, std::size_t>& nodes, std::size_t& last) {
  if (t.op == Op::Symbol) {
    std::size_t i = by_name.at(t.name);
    nodes.emplace(&t, i);
    last = std::max(last, i + 1);
    return;
  }
  for (const auto& a : t.args) index_symbols(*a, by_name, nodes, last);
}

}  // namespace

SolverResult solve_bounded(const std::vector<TermPtr>& terms, const Bounds& bounds, std::uint64_t cap) {
  auto syms = symbols_in(terms);
  std::sort(syms.begin(), syms.end());

  std::vector<Var> vars;
  std::uint64_t product = 1;
  for (const auto& [name, sort] : syms) {
    Var v{name, sort, {}};
    std::uint64_t size = 0;
    if (sort == Sort::Bool) {
      size = 2;
    } else if (sort == Sort::Address) {
      size = bounds.addresses.actors.size();
    } else {
      auto it = bounds.ints.find(name);
      if (it == bounds.ints.end()) throw Error(ErrorKind::Input, "symbol has no bound", name);
      const auto& [lo, hi] = it->second;
      if (hi < lo) {
        size = 0;
      } else {
        Int n = hi - lo + 1;
        size = n > Int(cap) ? cap + 1 : static_cast<std::uint64_t>(n);
      }
    }
    if (size == 0) {
      product = 0;
    } else if (product != 0) {
      product = product > (cap + 1) / size ? cap + 1 : product * size;
    }
    vars.push_back(std::move(v));
  }
  if (product > cap) {
    throw Error(ErrorKind::DomainTooLarge,
                "bounded domain exceeds " + std::to_string(cap) + " assignments");
  }
  if (product == 0 && !vars.empty()) return {Status::Unsat, {}, {}};

  for (auto& v : vars) {
    if (v.sort == Sort::Bool) {
      v.domain = {Value{false}, Value{true}};
    } else if (v.sort == Sort::Address) {
      for (const auto& a : bounds.addresses.actors) v.domain.emplace_back(a);
    } else {
      const auto& [lo, hi] = bounds.ints.at(v.name);
      for (Int x = lo; x <= hi; ++x) v.domain.emplace_back(x);
    }
  }

  std::unordered_map<std::string, std::size_t> by_name;
  for (std::size_t i = 0; i < vars.size(); ++i) by_name.emplace(vars[i].name, i);

  // Each term is checked as soon as its highest-ordered symbol is assigned.
  std::unordered_map<const Term*, std::size_t> nodes;
  std::vector<std::vector<const Term*>> checks(vars.size() + 1);
  for (const auto& t : terms) {
    std::size_t last = 0;
    index_symbols(*t, by_name, nodes, last);
    checks[last].push_back(t.get());
  }

  std::vector<const Value*> current(vars.size(), nullptr);
  auto lookup = [&](const Term& s) -> const Value& { return *current[nodes.at(&s)]; };
  auto holds = [&](std::size_t level) {
    for (const Term* t : checks[level]) {
      try {
        if (!std::get<bool>(evaluate(*t, lookup))) return false;
      } catch (const EvalTrap&) {
        return false;
      }
    }
    return true;
  };

  if (!holds(0)) return {Status::Unsat, {}, {}};
  if (vars.empty()) return {Status::Sat, {}, {}};

  std::vector<std::size_t> pos(vars.size(), 0);
  std::size_t level = 0;
  while (true) {
    if (pos[level] == vars[level].domain.size()) {
      if (level == 0) return {Status::Unsat, {}, {}};
      pos[level] = 0;
      --level;
      ++pos[level];
      continue;
    }
    current[level] = &vars[level].domain[pos[level]];
    if (!holds(level + 1)) {
      ++pos[level];
      continue;
    }
    if (level + 1 == vars.size()) break;
    ++level;
  }

  SolverResult r{Status::Sat, {}, {}};
  for (std::size_t i = 0; i < vars.size(); ++i) r.model.emplace(vars[i].name, *current[i]);
  return r;
}

namespace {

const std::unordered_set<std::string>& reserved_words() {
  static const std::unordered_set<std::string> words = {
      "_", "!", "as", "let", "exists", "forall", "match", "par", "BINARY", "DECIMAL", "HEXADECIMAL",
      "NUMERAL", "STRING", "assert", "check-sat", "declare-const", "declare-fun", "define-fun",
      "get-model", "pop", "push", "set-logic", "set-option", "exit", "true", "false", "not", "and",
      "or", "=>", "ite", "div", "mod", "abs", "distinct", "Int", "Bool"};
  return words;
}

bool simple_symbol(const std::string& s) {
  static const std::string extra = "~!@$%^&*_-+=<>.?/";
  if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || extra.find(c) != std::string::npos;
  });
}

std::string smt_symbol(const std::string& s) {
  if (simple_symbol(s) && !reserved_words().count(s)) return s;
  return "|" + s + "|";
}

std::string smt_int(const Int& v) {
  if (v < 0) return "(- " + Int(-v).str() + ")";
  return v.str();
}

class Lowering {
 public:
  explicit Lowering(const AddressDomain& domain) {
    for (const auto& a : domain.actors) index_of(a);
    actor_count_ = table_.size();
  }

  std::size_t index_of(const Address& a) {
    auto it = std::find(table_.begin(), table_.end(), a);
    if (it != table_.end()) return static_cast<std::size_t>(it - table_.begin());
    table_.push_back(a);
    return table_.size() - 1;
  }

  std::size_t actor_count() const { return actor_count_; }
  std::vector<Address> table() const { return table_; }

  void emit(std::ostream& os, const Term& t) {
    auto bin = [&](const char* op) {
      os << '(' << op << ' ';
      emit(os, *t.args[0]);
      os << ' ';
      emit(os, *t.args[1]);
      os << ')';
    };
    switch (t.op) {
      case Op::IntConst: os << smt_int(t.int_value); return;
      case Op::BoolConst: os << (t.bool_value ? "true" : "false"); return;
      case Op::AddrConst: os << index_of(t.addr); return;
      case Op::Symbol: os << smt_symbol(t.name); return;
      case Op::Add: bin("+"); return;
      case Op::Sub: bin("-"); return;
      case Op::Mul: bin("*"); return;
      case Op::Mod: bin("mod"); return;
      case Op::Div: {
        // SMT-LIB div is Euclidean; it agrees with floor division for positive divisors.
        const Term& d = *t.args[1];
        if (d.op == Op::IntConst && d.int_value > 0) {
          bin("div");
        } else if (d.op == Op::IntConst && d.int_value < 0) {
          os << "(div (- ";
          emit(os, *t.args[0]);
          os << ") " << Int(-d.int_value).str() << ')';
        } else {
          os << "(ite (> ";
          emit(os, d);
          os << " 0) (div ";
          emit(os, *t.args[0]);
          os << ' ';
          emit(os, d);
          os << ") (div (- ";
          emit(os, *t.args[0]);
          os << ") (- ";
          emit(os, d);
          os << ")))";
        }
        return;
      }
      case Op::Neg:
        os << "(- ";
        emit(os, *t.args[0]);
        os << ')';
        return;
      case Op::Eq: bin("="); return;
      case Op::Ne:
        os << "(not (= ";
        emit(os, *t.args[0]);
        os << ' ';
        emit(os, *t.args[1]);
        os << "))";
        return;
      case Op::Lt: bin("<"); return;
      case Op::Le: bin("<="); return;
      case Op::Gt: bin(">"); return;
      case Op::Ge: bin(">="); return;
      case Op::And: bin("and"); return;
      case Op::Or: bin("or"); return;
      case Op::Implies: bin("=>"); return;
      case Op::Not:
        os << "(not ";
        emit(os, *t.args[0]);
        os << ')';
        return;
      case Op::Ite:
        os << "(ite ";
        emit(os, *t.args[0]);
        os << ' ';
        emit(os, *t.args[1]);
        os << ' ';
        emit(os, *t.args[2]);
        os << ')';
        return;
    }
  }

 private:
  std::vector<Address> table_;
  std::size_t actor_count_ = 0;
};

}  // namespace

SmtQuery lower_query(const std::vector<TermPtr>& terms, const AddressDomain& domain) {
  SmtQuery q;
  q.symbols = symbols_in(terms);
  Lowering low(domain);
  std::ostringstream asserts;
  for (const auto& t : terms) {
    asserts << "(assert ";
    low.emit(asserts, *t);
    asserts << ")\n";
  }
  std::ostringstream os;
  for (const auto& [name, sort] : q.symbols) {
    os << "(declare-const " << smt_symbol(name) << (sort == Sort::Bool ? " Bool)\n" : " Int)\n");
  }
  for (const auto& [name, sort] : q.symbols) {
    if (sort != Sort::Address) continue;
    std::string s = smt_symbol(name);
    if (low.actor_count() == 0) {
      os << "(assert false)\n";
    } else {
      os << "(assert (and (<= 0 " << s << ") (<= " << s << ' ' << low.actor_count() - 1 << ")))\n";
    }
  }
  os << asserts.str();
  q.body = os.str();
  q.address_table = low.table();
  q.address_table.resize(low.actor_count());
  return q;
}

std::string emit_smtlib(const std::vector<TermPtr>& terms, const AddressDomain& domain) {
  return "(set-logic QF_NIA)\n" + lower_query(terms, domain).body + "(check-sat)\n(get-model)\n";
}

SolverResult BuiltinSolver::solve(const std::vector<TermPtr>& terms, const AddressDomain& domain) {
  Bounds b;
  b.addresses = domain;
  for (const auto& [name, sort] : symbols_in(terms)) {
    if (sort == Sort::Int) b.ints.emplace(name, IntRange{lo_, hi_});
  }
  try {
    return solve_bounded(terms, b, cap_);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::DomainTooLarge) throw;
    return {Status::Unknown, {}, e.what()};
  }
}

SolverResult FallbackSolver::solve(const std::vector<TermPtr>& terms, const AddressDomain& domain) {
  if (!degraded_) {
    try {
      return primary_->solve(terms, domain);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::BackendUnavailable) throw;
      degraded_ = true;
    }
  }
  return fallback_->solve(terms, domain);
}

}  // namespace cscv::solver

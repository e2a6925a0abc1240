#include "cscv/solver/term.hpp"

#include <sstream>

namespace cscv::solver {

namespace {

TermPtr make(Op op, Sort sort, std::vector<TermPtr> args) {
  auto t = std::make_shared<Term>();
  t->op = op;
  t->sort = sort;
  t->args = std::move(args);
  return t;
}

const Value& no_symbols(const Term& t) {
  throw std::logic_error("unexpected symbol " + t.name + " in constant folding");
}

// Folds when every argument is constant.
TermPtr fold(TermPtr t) {
  for (const auto& a : t->args) {
    if (!is_const(*a)) return t;
  }
  try {
    return const_of(evaluate(*t, no_symbols));
  } catch (const EvalTrap&) {
    return t;  // keep x / 0 symbolic; the engine guards divisors separately
  }
}

bool is_true(const TermPtr& t) { return t->op == Op::BoolConst && t->bool_value; }
bool is_false(const TermPtr& t) { return t->op == Op::BoolConst && !t->bool_value; }

}  // namespace

TermPtr int_const(Int v) {
  auto t = std::make_shared<Term>();
  t->op = Op::IntConst;
  t->sort = Sort::Int;
  t->int_value = std::move(v);
  return t;
}

TermPtr bool_const(bool v) {
  static const TermPtr t_true = [] {
    auto t = std::make_shared<Term>();
    t->op = Op::BoolConst;
    t->sort = Sort::Bool;
    t->bool_value = true;
    return t;
  }();
  static const TermPtr t_false = [] {
    auto t = std::make_shared<Term>();
    t->op = Op::BoolConst;
    t->sort = Sort::Bool;
    return t;
  }();
  return v ? t_true : t_false;
}

TermPtr addr_const(Address a) {
  auto t = std::make_shared<Term>();
  t->op = Op::AddrConst;
  t->sort = Sort::Address;
  t->addr = std::move(a);
  return t;
}

TermPtr symbol(std::string name, Sort sort) {
  auto t = std::make_shared<Term>();
  t->op = Op::Symbol;
  t->sort = sort;
  t->name = std::move(name);
  return t;
}

TermPtr const_of(const Value& v) {
  if (auto* i = std::get_if<Int>(&v)) return int_const(*i);
  if (auto* b = std::get_if<bool>(&v)) return bool_const(*b);
  return addr_const(std::get<Address>(v));
}

TermPtr add(TermPtr a, TermPtr b) { return fold(make(Op::Add, Sort::Int, {std::move(a), std::move(b)})); }
TermPtr sub(TermPtr a, TermPtr b) { return fold(make(Op::Sub, Sort::Int, {std::move(a), std::move(b)})); }
TermPtr mul(TermPtr a, TermPtr b) { return fold(make(Op::Mul, Sort::Int, {std::move(a), std::move(b)})); }
TermPtr floor_div(TermPtr a, TermPtr b) { return fold(make(Op::Div, Sort::Int, {std::move(a), std::move(b)})); }
TermPtr mod(TermPtr a, TermPtr b) { return fold(make(Op::Mod, Sort::Int, {std::move(a), std::move(b)})); }
TermPtr neg(TermPtr a) { return fold(make(Op::Neg, Sort::Int, {std::move(a)})); }
TermPtr eq(TermPtr a, TermPtr b) { return fold(make(Op::Eq, Sort::Bool, {std::move(a), std::move(b)})); }
TermPtr ne(TermPtr a, TermPtr b) { return fold(make(Op::Ne, Sort::Bool, {std::move(a), std::move(b)})); }
TermPtr lt(TermPtr a, TermPtr b) { return fold(make(Op::Lt, Sort::Bool, {std::move(a), std::move(b)})); }
TermPtr le(TermPtr a, TermPtr b) { return fold(make(Op::Le, Sort::Bool, {std::move(a), std::move(b)})); }
TermPtr gt(TermPtr a, TermPtr b) { return fold(make(Op::Gt, Sort::Bool, {std::move(a), std::move(b)})); }
TermPtr ge(TermPtr a, TermPtr b) { return fold(make(Op::Ge, Sort::Bool, {std::move(a), std::move(b)})); }

TermPtr land(TermPtr a, TermPtr b) {
  if (is_false(a) || is_false(b)) return bool_const(false);
  if (is_true(a)) return b;
  if (is_true(b)) return a;
  return make(Op::And, Sort::Bool, {std::move(a), std::move(b)});
}

TermPtr lor(TermPtr a, TermPtr b) {
  if (is_true(a) || is_true(b)) return bool_const(true);
  if (is_false(a)) return b;
  if (is_false(b)) return a;
  return make(Op::Or, Sort::Bool, {std::move(a), std::move(b)});
}

TermPtr lnot(TermPtr a) {
  if (a->op == Op::BoolConst) return bool_const(!a->bool_value);
  if (a->op == Op::Not) return a->args[0];
  return make(Op::Not, Sort::Bool, {std::move(a)});
}

TermPtr implies(TermPtr a, TermPtr b) {
  if (is_false(a) || is_true(b)) return bool_const(true);
  if (is_true(a)) return b;
  return make(Op::Implies, Sort::Bool, {std::move(a), std::move(b)});
}

TermPtr ite(TermPtr c, TermPtr t, TermPtr e) {
  if (is_true(c)) return t;
  if (is_false(c)) return e;
  Sort s = t->sort;
  return make(Op::Ite, s, {std::move(c), std::move(t), std::move(e)});
}

bool is_const(const Term& t) {
  return t.op == Op::IntConst || t.op == Op::BoolConst || t.op == Op::AddrConst;
}

std::optional<Value> const_value(const Term& t) {
  switch (t.op) {
    case Op::IntConst: return Value{t.int_value};
    case Op::BoolConst: return Value{t.bool_value};
    case Op::AddrConst: return Value{t.addr};
    default: return std::nullopt;
  }
}

namespace {

void symbols_rec(const Term& t, std::vector<std::pair<std::string, Sort>>& out, std::set<std::string>& seen) {
  if (t.op == Op::Symbol) {
    if (seen.insert(t.name).second) out.emplace_back(t.name, t.sort);
    return;
  }
  for (const auto& a : t.args) symbols_rec(*a, out, seen);
}

}  // namespace

std::vector<std::pair<std::string, Sort>> symbols_in(const std::vector<TermPtr>& terms) {
  std::vector<std::pair<std::string, Sort>> out;
  std::set<std::string> seen;
  for (const auto& t : terms) symbols_rec(*t, out, seen);
  return out;
}

void collect_symbols(const Term& t, std::set<std::string>& out) {
  if (t.op == Op::Symbol) {
    out.insert(t.name);
    return;
  }
  for (const auto& a : t.args) collect_symbols(*a, out);
}

Value evaluate(const Term& t, const std::function<const Value&(const Term&)>& lookup) {
  auto as_int = [&](const TermPtr& a) { return std::get<Int>(evaluate(*a, lookup)); };
  auto as_bool = [&](const TermPtr& a) { return std::get<bool>(evaluate(*a, lookup)); };
  switch (t.op) {
    case Op::IntConst: return t.int_value;
    case Op::BoolConst: return t.bool_value;
    case Op::AddrConst: return t.addr;
    case Op::Symbol: return lookup(t);
    case Op::Add: return Int(as_int(t.args[0]) + as_int(t.args[1]));
    case Op::Sub: return Int(as_int(t.args[0]) - as_int(t.args[1]));
    case Op::Mul: return Int(as_int(t.args[0]) * as_int(t.args[1]));
    case Op::Div: {
      Int d = as_int(t.args[1]);
      if (d == 0) throw EvalTrap{};
      return cscv::floor_div(as_int(t.args[0]), d);
    }
    case Op::Mod: {
      Int d = as_int(t.args[1]);
      if (d == 0) throw EvalTrap{};
      Int r = as_int(t.args[0]) % d;
      if (r < 0) r += abs(d);
      return r;
    }
    case Op::Neg: return Int(-as_int(t.args[0]));
    case Op::Eq: return evaluate(*t.args[0], lookup) == evaluate(*t.args[1], lookup);
    case Op::Ne: return evaluate(*t.args[0], lookup) != evaluate(*t.args[1], lookup);
    case Op::Lt: return as_int(t.args[0]) < as_int(t.args[1]);
    case Op::Le: return as_int(t.args[0]) <= as_int(t.args[1]);
    case Op::Gt: return as_int(t.args[0]) > as_int(t.args[1]);
    case Op::Ge: return as_int(t.args[0]) >= as_int(t.args[1]);
    case Op::And: return as_bool(t.args[0]) && as_bool(t.args[1]);
    case Op::Or: return as_bool(t.args[0]) || as_bool(t.args[1]);
    case Op::Not: return !as_bool(t.args[0]);
    case Op::Implies: return !as_bool(t.args[0]) || as_bool(t.args[1]);
    case Op::Ite: return as_bool(t.args[0]) ? evaluate(*t.args[1], lookup) : evaluate(*t.args[2], lookup);
  }
  throw std::logic_error("bad term");
}

Value evaluate(const Term& t, const Model& model) {
  return evaluate(t, [&](const Term& s) -> const Value& {
    auto it = model.find(s.name);
    if (it == model.end()) throw std::out_of_range("model lacks symbol " + s.name);
    return it->second;
  });
}

bool satisfies(const std::vector<TermPtr>& terms, const Model& model) {
  for (const auto& t : terms) {
    try {
      if (!std::get<bool>(evaluate(*t, model))) return false;
    } catch (const EvalTrap&) {
      return false;
    }
  }
  return true;
}

namespace {

std::string_view infix(Op op) {
  switch (op) {
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::Div: return "/";
    case Op::Mod: return "mod";
    case Op::Eq: return "==";
    case Op::Ne: return "!=";
    case Op::Lt: return "<";
    case Op::Le: return "<=";
    case Op::Gt: return ">";
    case Op::Ge: return ">=";
    case Op::And: return "&&";
    case Op::Or: return "||";
    case Op::Implies: return "->";
    default: return "?";
  }
}

void render(std::ostream& os, const Term& t) {
  switch (t.op) {
    case Op::IntConst: os << t.int_value.str(); return;
    case Op::BoolConst: os << (t.bool_value ? "true" : "false"); return;
    case Op::AddrConst: os << t.addr.str(); return;
    case Op::Symbol: os << t.name; return;
    case Op::Neg: os << "-("; render(os, *t.args[0]); os << ')'; return;
    case Op::Not: os << "!("; render(os, *t.args[0]); os << ')'; return;
    case Op::Ite:
      os << "ite(";
      render(os, *t.args[0]);
      os << ", ";
      render(os, *t.args[1]);
      os << ", ";
      render(os, *t.args[2]);
      os << ')';
      return;
    default:
      os << '(';
      render(os, *t.args[0]);
      os << ' ' << infix(t.op) << ' ';
      render(os, *t.args[1]);
      os << ')';
  }
}

}  // namespace

std::string to_string(const Term& t) {
  std::ostringstream os;
  render(os, t);
  return os.str();
}

}  // namespace cscv::solver

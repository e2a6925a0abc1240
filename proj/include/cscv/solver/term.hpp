#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cscv/value.hpp"

namespace cscv::solver {

enum class Sort { Int, Bool, Address };

enum class Op {
  IntConst,
  BoolConst,
  AddrConst,
  Symbol,
  Add,
  Sub,
  Mul,
  Div,  // floor division
  Mod,  // Euclidean remainder by a positive constant (wrap256 lowering)
  Neg,
  Eq,
  Ne,
  Lt,
  Le,
  Gt,
  Ge,
  And,
  Or,
  Not,
  Implies,
  Ite,
};

struct Term;
using TermPtr = std::shared_ptr<const Term>;

// Immutable constraint term. Symbols carry a name and a sort; address symbols
// range over a finite actor set supplied at solve time.
struct Term {
  Op op = Op::IntConst;
  Sort sort = Sort::Int;
  Int int_value;
  bool bool_value = false;
  Address addr;
  std::string name;
  std::vector<TermPtr> args;
};

using Model = std::map<std::string, Value>;

// Builders. They fold constants so fully concrete subtrees collapse to literals.
TermPtr int_const(Int v);
TermPtr bool_const(bool v);
TermPtr addr_const(Address a);
TermPtr symbol(std::string name, Sort sort);
TermPtr const_of(const Value& v);

TermPtr add(TermPtr a, TermPtr b);
TermPtr sub(TermPtr a, TermPtr b);
TermPtr mul(TermPtr a, TermPtr b);
TermPtr floor_div(TermPtr a, TermPtr b);
TermPtr mod(TermPtr a, TermPtr b);
TermPtr neg(TermPtr a);
TermPtr eq(TermPtr a, TermPtr b);
TermPtr ne(TermPtr a, TermPtr b);
TermPtr lt(TermPtr a, TermPtr b);
TermPtr le(TermPtr a, TermPtr b);
TermPtr gt(TermPtr a, TermPtr b);
TermPtr ge(TermPtr a, TermPtr b);
TermPtr land(TermPtr a, TermPtr b);
TermPtr lor(TermPtr a, TermPtr b);
TermPtr lnot(TermPtr a);
TermPtr implies(TermPtr a, TermPtr b);
TermPtr ite(TermPtr c, TermPtr t, TermPtr e);

bool is_const(const Term& t);
std::optional<Value> const_value(const Term& t);

// Symbols in first-use (pre-order) order, each with its sort.
std::vector<std::pair<std::string, Sort>> symbols_in(const std::vector<TermPtr>& terms);
void collect_symbols(const Term& t, std::set<std::string>& out);

struct EvalTrap {};  // thrown on division by zero

// Evaluates a term under an assignment. `lookup` maps a symbol node to its value.
Value evaluate(const Term& t, const std::function<const Value&(const Term&)>& lookup);
Value evaluate(const Term& t, const Model& model);

// True iff every term evaluates to true (a trap counts as false).
bool satisfies(const std::vector<TermPtr>& terms, const Model& model);

// Human-readable infix rendering for logs and test messages.
std::string to_string(const Term& t);

}  // namespace cscv::solver

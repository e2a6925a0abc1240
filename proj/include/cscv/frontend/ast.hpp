#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cscv/error.hpp"
#include "cscv/value.hpp"

namespace cscv::frontend {

enum class ExprKind {
  IntLit,
  BoolLit,
  AddrLit,
  Var,        // state variable or parameter
  Index,      // map entry: name[args[0]]
  MsgSender,
  MsgValue,
  Call,       // view call: name(args...)
  Unary,
  Binary,
  Old,        // properties only: old(args[0])
  Attacker,   // properties only
  Captured,   // spatialized old(): value captured at entry, `slot` is the capture index
};

enum class UnaryOp { Not, Neg };

enum class BinaryOp { Add, Sub, Mul, Div, Eq, Ne, Lt, Le, Gt, Ge, And, Or, Implies };

enum class RefKind { Unresolved, State, Param };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  ExprKind kind = ExprKind::IntLit;
  SourceLoc loc;
  Int int_value;
  bool bool_value = false;
  std::string name;  // identifier, callee, or address token
  RefKind ref = RefKind::Unresolved;
  int slot = -1;     // state index, parameter index, or callee function index
  UnaryOp uop = UnaryOp::Not;
  BinaryOp bop = BinaryOp::Add;
  std::vector<ExprPtr> args;
};

enum class StmtKind { Require, Assign, Call, If, Return };

struct Stmt {
  StmtKind kind = StmtKind::Require;
  SourceLoc loc;
  ExprPtr expr;    // require/if condition, assigned value, call target, return value (may be null)
  ExprPtr target;  // assignment lvalue
  ExprPtr amount;  // call amount
  std::vector<Stmt> then_body;
  std::vector<Stmt> else_body;
  bool has_else = false;
};

enum class FunctionKind { External, View };

struct Param {
  std::string name;
  VarType type = VarType::Int;
};

struct FunctionDecl {
  std::string name;
  FunctionKind kind = FunctionKind::External;
  std::vector<Param> params;
  std::optional<VarType> return_type;
  std::vector<Stmt> body;
  SourceLoc loc;
};

struct StateVar {
  std::string name;
  VarType type = VarType::Int;
  std::optional<Value> init;
  SourceLoc loc;
};

struct ContractAST {
  std::string name;
  bool wrap256 = false;
  std::vector<StateVar> state_vars;
  std::vector<FunctionDecl> functions;

  int find_state(std::string_view n) const;
  int find_function(std::string_view n) const;
  // Names of `external` functions in declaration order (the set F).
  std::vector<std::string> external_names() const;
};

bool operator==(const Expr& a, const Expr& b);
bool operator==(const Stmt& a, const Stmt& b);
bool operator==(const Param& a, const Param& b);
bool operator==(const FunctionDecl& a, const FunctionDecl& b);
bool operator==(const StateVar& a, const StateVar& b);
bool operator==(const ContractAST& a, const ContractAST& b);

bool expr_equal(const ExprPtr& a, const ExprPtr& b);

// Small constructors used by rewriting passes and tests.
ExprPtr make_int(Int v, SourceLoc loc = {});
ExprPtr make_bool(bool v, SourceLoc loc = {});
ExprPtr make_address(Address a, SourceLoc loc = {});
ExprPtr make_value(const Value& v, SourceLoc loc = {});

// Visit every expression node (pre-order) reachable from a statement list.
template <typename Fn>
void for_each_expr(const ExprPtr& e, Fn&& fn) {
  if (!e) return;
  fn(*e);
  for (const auto& a : e->args) for_each_expr(a, fn);
}

template <typename Fn>
void for_each_expr(const std::vector<Stmt>& body, Fn&& fn) {
  for (const auto& s : body) {
    for_each_expr(s.expr, fn);
    for_each_expr(s.target, fn);
    for_each_expr(s.amount, fn);
    for_each_expr(s.then_body, fn);
    for_each_expr(s.else_body, fn);
  }
}

}  // namespace cscv::frontend

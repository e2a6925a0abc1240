#include "cscv/frontend/ast.hpp"

namespace cscv::frontend {

int ContractAST::find_state(std::string_view n) const {
  for (std::size_t i = 0; i < state_vars.size(); ++i) {
    if (state_vars[i].name == n) return static_cast<int>(i);
  }
  return -1;
}

int ContractAST::find_function(std::string_view n) const {
  for (std::size_t i = 0; i < functions.size(); ++i) {
    if (functions[i].name == n) return static_cast<int>(i);
  }
  return -1;
}

std::vector<std::string> ContractAST::external_names() const {
  std::vector<std::string> out;
  for (const auto& f : functions) {
    if (f.kind == FunctionKind::External) out.push_back(f.name);
  }
  return out;
}

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return *a == *b;
}

// Source locations are deliberately not compared: equality is structural.
bool operator==(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.name != b.name || a.ref != b.ref || a.slot != b.slot) return false;
  switch (a.kind) {
    case ExprKind::IntLit:
      if (a.int_value != b.int_value) return false;
      break;
    case ExprKind::BoolLit:
      if (a.bool_value != b.bool_value) return false;
      break;
    case ExprKind::Unary:
      if (a.uop != b.uop) return false;
      break;
    case ExprKind::Binary:
      if (a.bop != b.bop) return false;
      break;
    default:
      break;
  }
  if (a.args.size() != b.args.size()) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (!expr_equal(a.args[i], b.args[i])) return false;
  }
  return true;
}

bool operator==(const Stmt& a, const Stmt& b) {
  return a.kind == b.kind && expr_equal(a.expr, b.expr) && expr_equal(a.target, b.target) &&
         expr_equal(a.amount, b.amount) && a.then_body == b.then_body &&
         a.else_body == b.else_body && a.has_else == b.has_else;
}

bool operator==(const Param& a, const Param& b) { return a.name == b.name && a.type == b.type; }

bool operator==(const FunctionDecl& a, const FunctionDecl& b) {
  return a.name == b.name && a.kind == b.kind && a.params == b.params &&
         a.return_type == b.return_type && a.body == b.body;
}

bool operator==(const StateVar& a, const StateVar& b) {
  return a.name == b.name && a.type == b.type && a.init == b.init;
}

bool operator==(const ContractAST& a, const ContractAST& b) {
  return a.name == b.name && a.wrap256 == b.wrap256 && a.state_vars == b.state_vars &&
         a.functions == b.functions;
}

ExprPtr make_int(Int v, SourceLoc loc) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::IntLit;
  e->int_value = std::move(v);
  e->loc = loc;
  return e;
}

ExprPtr make_bool(bool v, SourceLoc loc) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::BoolLit;
  e->bool_value = v;
  e->loc = loc;
  return e;
}

ExprPtr make_address(Address a, SourceLoc loc) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::AddrLit;
  e->name = a.str();
  e->loc = loc;
  return e;
}

ExprPtr make_value(const Value& v, SourceLoc loc) {
  if (auto* i = std::get_if<Int>(&v)) {
    // Negative constants print as unary minus; keep the tree shape the parser produces.
    if (*i < 0) {
      auto e = std::make_shared<Expr>();
      e->kind = ExprKind::Unary;
      e->uop = UnaryOp::Neg;
      e->loc = loc;
      e->args.push_back(make_int(-*i, loc));
      return e;
    }
    return make_int(*i, loc);
  }
  if (auto* b = std::get_if<bool>(&v)) return make_bool(*b, loc);
  return make_address(std::get<Address>(v), loc);
}

}  // namespace cscv::frontend

#include <sstream>

#include "cscv/frontend/parser.hpp"

namespace cscv::frontend {

namespace {

// Binding strength; higher binds tighter.
int precedence(const Expr& e) {
  if (e.kind == ExprKind::Unary) return 8;
  if (e.kind != ExprKind::Binary) return 9;
  switch (e.bop) {
    case BinaryOp::Implies: return 1;
    case BinaryOp::Or: return 2;
    case BinaryOp::And: return 3;
    case BinaryOp::Eq:
    case BinaryOp::Ne: return 4;
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge: return 5;
    case BinaryOp::Add:
    case BinaryOp::Sub: return 6;
    case BinaryOp::Mul:
    case BinaryOp::Div: return 7;
  }
  return 0;
}

std::string_view op_text(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::And: return "&&";
    case BinaryOp::Or: return "||";
    case BinaryOp::Implies: return "->";
  }
  return "?";
}

void print(std::ostream& os, const Expr& e);

void print_child(std::ostream& os, const Expr& child, int parent_prec, bool needs_strict) {
  int p = precedence(child);
  bool paren = needs_strict ? p <= parent_prec : p < parent_prec;
  if (paren) os << '(';
  print(os, child);
  if (paren) os << ')';
}

void print(std::ostream& os, const Expr& e) {
  switch (e.kind) {
    case ExprKind::IntLit: os << e.int_value.str(); break;
    case ExprKind::BoolLit: os << (e.bool_value ? "true" : "false"); break;
    case ExprKind::AddrLit: os << e.name; break;
    case ExprKind::Var: os << e.name; break;
    case ExprKind::Index:
      os << e.name << '[';
      print(os, *e.args[0]);
      os << ']';
      break;
    case ExprKind::MsgSender: os << "msg.sender"; break;
    case ExprKind::MsgValue: os << "msg.value"; break;
    case ExprKind::Attacker: os << "attacker"; break;
    case ExprKind::Captured: os << "$old" << e.slot; break;
    case ExprKind::Old:
      os << "old(";
      print(os, *e.args[0]);
      os << ')';
      break;
    case ExprKind::Call:
      os << e.name << '(';
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i) os << ", ";
        print(os, *e.args[i]);
      }
      os << ')';
      break;
    case ExprKind::Unary:
      os << (e.uop == UnaryOp::Not ? "!" : "-");
      print_child(os, *e.args[0], 8, false);
      break;
    case ExprKind::Binary: {
      int p = precedence(e);
      // Implication is right-associative; everything else is left-associative.
      bool right_assoc = e.bop == BinaryOp::Implies;
      print_child(os, *e.args[0], p, right_assoc);
      os << ' ' << op_text(e.bop) << ' ';
      print_child(os, *e.args[1], p, !right_assoc);
      break;
    }
  }
}

bool atomic(const Expr& e) {
  switch (e.kind) {
    case ExprKind::IntLit:
    case ExprKind::BoolLit:
    case ExprKind::AddrLit:
    case ExprKind::Var:
    case ExprKind::Index:
    case ExprKind::MsgSender:
    case ExprKind::MsgValue:
    case ExprKind::Call:
      return true;
    default:
      return false;
  }
}

void indent(std::ostream& os, int depth) {
  for (int i = 0; i < depth; ++i) os << "  ";
}

void print_body(std::ostream& os, const std::vector<Stmt>& body, int depth);

void print_stmt(std::ostream& os, const Stmt& s, int depth) {
  indent(os, depth);
  switch (s.kind) {
    case StmtKind::Require:
      os << "require(";
      print(os, *s.expr);
      os << ");\n";
      break;
    case StmtKind::Assign:
      print(os, *s.target);
      os << " = ";
      print(os, *s.expr);
      os << ";\n";
      break;
    case StmtKind::Call:
      // `call t (x)` would re-parse as a call of `t`; parenthesize both sides instead.
      if (atomic(*s.amount)) {
        os << "call ";
        print(os, *s.expr);
        os << ' ';
        print(os, *s.amount);
      } else {
        os << "call (";
        print(os, *s.expr);
        os << ") (";
        print(os, *s.amount);
        os << ')';
      }
      os << ";\n";
      break;
    case StmtKind::If:
      os << "if (";
      print(os, *s.expr);
      os << ") {\n";
      print_body(os, s.then_body, depth + 1);
      indent(os, depth);
      os << '}';
      if (s.has_else) {
        os << " else {\n";
        print_body(os, s.else_body, depth + 1);
        indent(os, depth);
        os << '}';
      }
      os << '\n';
      break;
    case StmtKind::Return:
      os << "return";
      if (s.expr) {
        os << ' ';
        print(os, *s.expr);
      }
      os << ";\n";
      break;
  }
}

void print_body(std::ostream& os, const std::vector<Stmt>& body, int depth) {
  for (const auto& s : body) print_stmt(os, s, depth);
}

}  // namespace

std::string print_expr(const ExprPtr& e, const ContractAST*) {
  std::ostringstream os;
  if (e) print(os, *e);
  return os.str();
}

std::string print_property(const TemporalProperty& p) {
  std::ostringstream os;
  os << (p.form == TemporalForm::Always ? "always " : "eventually ");
  print(os, *p.pred);
  return os.str();
}

std::string print_contract(const ContractAST& c) {
  std::ostringstream os;
  if (c.wrap256) os << "pragma wrap256;\n";
  os << "contract " << c.name << " {\n";
  for (const auto& v : c.state_vars) {
    os << "  state " << v.name << ": " << to_string(v.type);
    if (v.init) os << " = " << format_value(*v.init);
    os << ";\n";
  }
  for (const auto& f : c.functions) {
    os << "\n  " << (f.kind == FunctionKind::External ? "external" : "view") << " fn " << f.name << '(';
    for (std::size_t i = 0; i < f.params.size(); ++i) {
      if (i) os << ", ";
      os << f.params[i].name << ": " << to_string(f.params[i].type);
    }
    os << ')';
    if (f.return_type) os << " -> " << to_string(*f.return_type);
    os << " {\n";
    print_body(os, f.body, 2);
    os << "  }\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace cscv::frontend

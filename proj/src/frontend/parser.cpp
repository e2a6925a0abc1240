#include "cscv/frontend/parser.hpp"

#include <cctype>
#include <functional>
#include <set>
#include <unordered_set>

#include "cscv/frontend/lexer.hpp"

namespace cscv::frontend {

namespace {

const std::unordered_set<std::string> kReserved = {
    "contract", "state", "int",  "bool", "address", "map",  "external", "view", "fn",
    "require",  "call",  "if",   "else", "return",  "true", "false",    "msg",  "pragma"};

// ---------------------------------------------------------------------------
// Syntax: tokens -> unresolved tree (names only)
// ---------------------------------------------------------------------------

class Parser {
 public:
  Parser(std::vector<Token> toks, bool property_mode)
      : toks_(std::move(toks)), property_mode_(property_mode) {}

  ContractAST contract() {
    ContractAST c;
    if (is_ident("pragma")) {
      next();
      Token p = expect_ident("pragma name");
      if (p.text != "wrap256") throw Error(ErrorKind::Syntax, "unknown pragma '" + p.text + "'", p.text, p.loc);
      expect(";");
      c.wrap256 = true;
    }
    expect_keyword("contract");
    c.name = expect_name("contract name").text;
    expect("{");
    while (is_ident("state")) c.state_vars.push_back(state_decl());
    while (is_ident("external") || is_ident("view")) c.functions.push_back(fun_decl());
    expect("}");
    expect_end();
    return c;
  }

  std::pair<TemporalForm, ExprPtr> property() {
    TemporalForm form;
    if (is_ident("always")) {
      form = TemporalForm::Always;
    } else if (is_ident("eventually")) {
      form = TemporalForm::Eventually;
    } else {
      fail("'always'");
    }
    next();
    auto pred = expr();
    expect_end();
    return {form, pred};
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  bool property_mode_;
  int old_depth_ = 0;

  const Token& peek(std::size_t k = 0) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  Token next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void fail(const std::string& expected) const {
    const Token& t = peek();
    std::string found = t.kind == TokenKind::End ? "end of input" : "'" + t.text + "'";
    throw Error(ErrorKind::Syntax, "expected " + expected + ", found " + found, expected, t.loc);
  }

  bool is_punct(std::string_view p, std::size_t k = 0) const {
    return peek(k).kind == TokenKind::Punct && peek(k).text == p;
  }
  bool is_ident(std::string_view w, std::size_t k = 0) const {
    return peek(k).kind == TokenKind::Ident && peek(k).text == w;
  }

  void expect(std::string_view p) {
    if (!is_punct(p)) fail("'" + std::string(p) + "'");
    next();
  }
  void expect_keyword(std::string_view w) {
    if (!is_ident(w)) fail("'" + std::string(w) + "'");
    next();
  }
  void expect_end() {
    if (peek().kind != TokenKind::End) fail("end of input");
  }
  Token expect_ident(const std::string& what) {
    if (peek().kind != TokenKind::Ident) fail(what);
    return next();
  }
  // An identifier that is not a reserved word.
  Token expect_name(const std::string& what) {
    if (peek().kind != TokenKind::Ident || kReserved.count(peek().text)) fail(what);
    return next();
  }

  VarType type() {
    Token t = expect_ident("type");
    if (t.text == "int") return VarType::Int;
    if (t.text == "bool") return VarType::Bool;
    if (t.text == "address") return VarType::Address;
    if (t.text == "map") {
      expect("<");
      expect_keyword("address");
      expect(",");
      expect_keyword("int");
      expect(">");
      return VarType::Map;
    }
    pos_--;
    fail("type");
  }

  Value literal() {
    const Token& t = peek();
    if (is_punct("-") && peek(1).kind == TokenKind::Number) {
      next();
      return Value{-Int(next().text)};
    }
    if (t.kind == TokenKind::Number) return Value{Int(next().text)};
    if (t.kind == TokenKind::AddressLit) return Value{Address(next().text)};
    if (is_ident("true")) {
      next();
      return Value{true};
    }
    if (is_ident("false")) {
      next();
      return Value{false};
    }
    fail("literal");
  }

  StateVar state_decl() {
    StateVar v;
    v.loc = peek().loc;
    expect_keyword("state");
    v.name = expect_name("state variable name").text;
    expect(":");
    v.type = type();
    if (is_punct("=")) {
      next();
      v.init = literal();
    }
    expect(";");
    return v;
  }

  FunctionDecl fun_decl() {
    FunctionDecl f;
    f.loc = peek().loc;
    f.kind = next().text == "view" ? FunctionKind::View : FunctionKind::External;
    expect_keyword("fn");
    f.name = expect_name("function name").text;
    expect("(");
    if (!is_punct(")")) {
      do {
        Param p;
        p.name = expect_name("parameter name").text;
        expect(":");
        p.type = type();
        f.params.push_back(p);
      } while (is_punct(",") && (next(), true));
    }
    expect(")");
    if (is_punct("->")) {
      next();
      f.return_type = type();
    }
    f.body = block();
    return f;
  }

  std::vector<Stmt> block() {
    expect("{");
    std::vector<Stmt> body;
    while (!is_punct("}")) {
      if (peek().kind == TokenKind::End) fail("'}'");
      body.push_back(statement());
    }
    next();
    return body;
  }

  Stmt statement() {
    Stmt s;
    s.loc = peek().loc;
    if (is_ident("require")) {
      next();
      s.kind = StmtKind::Require;
      expect("(");
      s.expr = expr();
      expect(")");
      expect(";");
    } else if (is_ident("call")) {
      next();
      s.kind = StmtKind::Call;
      s.expr = expr();
      s.amount = expr();
      expect(";");
    } else if (is_ident("if")) {
      next();
      s.kind = StmtKind::If;
      expect("(");
      s.expr = expr();
      expect(")");
      s.then_body = block();
      if (is_ident("else")) {
        next();
        s.has_else = true;
        if (is_ident("if")) {
          s.else_body.push_back(statement());
        } else {
          s.else_body = block();
        }
      }
    } else if (is_ident("return")) {
      next();
      s.kind = StmtKind::Return;
      if (!is_punct(";")) s.expr = expr();
      expect(";");
    } else if (peek().kind == TokenKind::Ident && !kReserved.count(peek().text)) {
      s.kind = StmtKind::Assign;
      Token name = next();
      auto lv = std::make_shared<Expr>();
      lv->loc = name.loc;
      lv->name = name.text;
      lv->kind = ExprKind::Var;
      if (is_punct("[")) {
        next();
        lv->kind = ExprKind::Index;
        lv->args.push_back(expr());
        expect("]");
      }
      s.target = lv;
      expect("=");
      s.expr = expr();
      expect(";");
    } else {
      fail("statement");
    }
    return s;
  }

  // Precedence climbing, loosest first.
  ExprPtr expr() { return implies(); }

  static ExprPtr binary(BinaryOp op, ExprPtr l, ExprPtr r, SourceLoc loc) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Binary;
    e->bop = op;
    e->loc = loc;
    e->args = {std::move(l), std::move(r)};
    return e;
  }

  ExprPtr implies() {
    auto lhs = logic_or();
    if (is_punct("->")) {
      SourceLoc loc = next().loc;
      return binary(BinaryOp::Implies, lhs, implies(), loc);
    }
    return lhs;
  }

  template <typename Sub>
  ExprPtr left_assoc(Sub sub, std::initializer_list<std::pair<std::string_view, BinaryOp>> ops) {
    auto lhs = sub();
    for (;;) {
      bool matched = false;
      for (const auto& [text, op] : ops) {
        if (is_punct(text)) {
          SourceLoc loc = next().loc;
          lhs = binary(op, lhs, sub(), loc);
          matched = true;
          break;
        }
      }
      if (!matched) return lhs;
    }
  }

  ExprPtr logic_or() { return left_assoc([&] { return logic_and(); }, {{"||", BinaryOp::Or}}); }
  ExprPtr logic_and() { return left_assoc([&] { return equality(); }, {{"&&", BinaryOp::And}}); }
  ExprPtr equality() {
    return left_assoc([&] { return relational(); }, {{"==", BinaryOp::Eq}, {"!=", BinaryOp::Ne}});
  }
  ExprPtr relational() {
    return left_assoc([&] { return additive(); }, {{"<=", BinaryOp::Le},
                                                    {">=", BinaryOp::Ge},
                                                    {"<", BinaryOp::Lt},
                                                    {">", BinaryOp::Gt}});
  }
  ExprPtr additive() {
    return left_assoc([&] { return multiplicative(); }, {{"+", BinaryOp::Add}, {"-", BinaryOp::Sub}});
  }
  ExprPtr multiplicative() {
    return left_assoc([&] { return unary(); }, {{"*", BinaryOp::Mul}, {"/", BinaryOp::Div}});
  }

  ExprPtr unary() {
    if (is_punct("!") || is_punct("-")) {
      Token t = next();
      auto e = std::make_shared<Expr>();
      e->kind = ExprKind::Unary;
      e->uop = t.text == "!" ? UnaryOp::Not : UnaryOp::Neg;
      e->loc = t.loc;
      e->args.push_back(unary());
      return e;
    }
    return primary();
  }

  ExprPtr primary() {
    const Token& t = peek();
    auto e = std::make_shared<Expr>();
    e->loc = t.loc;
    if (t.kind == TokenKind::Number) {
      e->kind = ExprKind::IntLit;
      e->int_value = Int(next().text);
      return e;
    }
    if (t.kind == TokenKind::AddressLit) {
      e->kind = ExprKind::AddrLit;
      e->name = next().text;
      return e;
    }
    if (is_punct("(")) {
      next();
      auto inner = expr();
      expect(")");
      return inner;
    }
    if (is_ident("true") || is_ident("false")) {
      e->kind = ExprKind::BoolLit;
      e->bool_value = next().text == "true";
      return e;
    }
    if (is_ident("msg")) {
      next();
      expect(".");
      Token field = expect_ident("'sender' or 'value'");
      if (field.text == "sender") {
        e->kind = ExprKind::MsgSender;
      } else if (field.text == "value") {
        e->kind = ExprKind::MsgValue;
      } else {
        pos_--;
        fail("'sender' or 'value'");
      }
      return e;
    }
    if (property_mode_ && is_ident("attacker")) {
      next();
      e->kind = ExprKind::Attacker;
      return e;
    }
    if (property_mode_ && is_ident("old") && is_punct("(", 1)) {
      SourceLoc loc = next().loc;
      next();
      if (old_depth_ > 0) throw Error(ErrorKind::NestedOld, "old() must not nest", "old", loc);
      ++old_depth_;
      auto inner = expr();
      --old_depth_;
      expect(")");
      e->kind = ExprKind::Old;
      e->args.push_back(inner);
      return e;
    }
    Token name = expect_name("expression");
    e->name = name.text;
    if (is_punct("(")) {
      next();
      e->kind = ExprKind::Call;
      if (!is_punct(")")) {
        do {
          e->args.push_back(expr());
        } while (is_punct(",") && (next(), true));
      }
      expect(")");
    } else if (is_punct("[")) {
      next();
      e->kind = ExprKind::Index;
      e->args.push_back(expr());
      expect("]");
    } else {
      e->kind = ExprKind::Var;
    }
    return e;
  }
};

// ---------------------------------------------------------------------------
// Resolution and type checking
// ---------------------------------------------------------------------------

std::string type_name(VarType t) { return std::string(to_string(t)); }

struct Scope {
  const FunctionDecl* fn = nullptr;  // null in property mode
  bool property = false;
  bool in_old = false;
};

class Resolver {
 public:
  explicit Resolver(const ContractAST& c) : c_(c) {}

  ExprPtr resolve(const ExprPtr& raw, const Scope& scope, VarType& type) const {
    auto e = std::make_shared<Expr>(*raw);
    e->args.clear();
    switch (raw->kind) {
      case ExprKind::IntLit:
        type = VarType::Int;
        break;
      case ExprKind::BoolLit:
        type = VarType::Bool;
        break;
      case ExprKind::AddrLit:
        type = VarType::Address;
        break;
      case ExprKind::MsgSender:
      case ExprKind::MsgValue:
        if (scope.property) {
          throw Error(ErrorKind::Resolution, "msg fields are not available in properties", "msg", raw->loc);
        }
        type = raw->kind == ExprKind::MsgSender ? VarType::Address : VarType::Int;
        break;
      case ExprKind::Attacker:
        type = VarType::Address;
        break;
      case ExprKind::Var: {
        resolve_name(*e, scope);
        type = slot_type(*e, scope);
        if (type == VarType::Map) {
          throw Error(ErrorKind::Type, "map '" + e->name + "' can only be used indexed", e->name, e->loc);
        }
        break;
      }
      case ExprKind::Index: {
        resolve_name(*e, scope);
        if (e->ref != RefKind::State || c_.state_vars[e->slot].type != VarType::Map) {
          throw Error(ErrorKind::Type, "'" + e->name + "' is not a map", e->name, e->loc);
        }
        VarType it;
        e->args.push_back(resolve(raw->args[0], scope, it));
        require_type(it, VarType::Address, raw->args[0]->loc, "map index");
        type = VarType::Int;
        break;
      }
      case ExprKind::Call: {
        if (scope.property) {
          throw Error(ErrorKind::Kind, "function calls are not allowed in properties", raw->name, raw->loc);
        }
        int idx = c_.find_function(raw->name);
        if (idx < 0) throw Error(ErrorKind::Resolution, "unknown function '" + raw->name + "'", raw->name, raw->loc);
        const auto& callee = c_.functions[idx];
        if (callee.kind != FunctionKind::View) {
          throw Error(ErrorKind::Kind, "external function '" + raw->name + "' cannot be called from contract code",
                      raw->name, raw->loc);
        }
        if (callee.params.size() != raw->args.size()) {
          throw Error(ErrorKind::Type, "wrong number of arguments to '" + raw->name + "'", raw->name, raw->loc);
        }
        for (std::size_t i = 0; i < raw->args.size(); ++i) {
          VarType at;
          e->args.push_back(resolve(raw->args[i], scope, at));
          require_type(at, callee.params[i].type, raw->args[i]->loc, "argument");
        }
        e->slot = idx;
        type = callee.return_type.value_or(VarType::Int);
        break;
      }
      case ExprKind::Old: {
        if (!scope.property) throw Error(ErrorKind::Resolution, "old() is only valid in properties", "old", raw->loc);
        const auto& inner = raw->args[0];
        if (inner->kind != ExprKind::Var && inner->kind != ExprKind::Index) {
          throw Error(ErrorKind::Syntax, "old() takes a state lvalue", "old", inner->loc);
        }
        Scope s = scope;
        s.in_old = true;
        e->args.push_back(resolve(inner, s, type));
        break;
      }
      case ExprKind::Unary: {
        VarType t;
        e->args.push_back(resolve(raw->args[0], scope, t));
        VarType want = raw->uop == UnaryOp::Not ? VarType::Bool : VarType::Int;
        require_type(t, want, raw->loc, "operand");
        type = want;
        break;
      }
      case ExprKind::Binary: {
        VarType lt, rt;
        e->args.push_back(resolve(raw->args[0], scope, lt));
        e->args.push_back(resolve(raw->args[1], scope, rt));
        switch (raw->bop) {
          case BinaryOp::Add:
          case BinaryOp::Sub:
          case BinaryOp::Mul:
          case BinaryOp::Div:
            require_type(lt, VarType::Int, raw->args[0]->loc, "operand");
            require_type(rt, VarType::Int, raw->args[1]->loc, "operand");
            type = VarType::Int;
            break;
          case BinaryOp::Lt:
          case BinaryOp::Le:
          case BinaryOp::Gt:
          case BinaryOp::Ge:
            require_type(lt, VarType::Int, raw->args[0]->loc, "operand");
            require_type(rt, VarType::Int, raw->args[1]->loc, "operand");
            type = VarType::Bool;
            break;
          case BinaryOp::Eq:
          case BinaryOp::Ne:
            require_type(rt, lt, raw->args[1]->loc, "operand");
            type = VarType::Bool;
            break;
          case BinaryOp::And:
          case BinaryOp::Or:
          case BinaryOp::Implies:
            require_type(lt, VarType::Bool, raw->args[0]->loc, "operand");
            require_type(rt, VarType::Bool, raw->args[1]->loc, "operand");
            type = VarType::Bool;
            break;
        }
        break;
      }
      case ExprKind::Captured:
        throw std::logic_error("captured values never come from source text");
    }
    return e;
  }

  void resolve_name(Expr& e, const Scope& scope) const {
    if (scope.fn) {
      for (std::size_t i = 0; i < scope.fn->params.size(); ++i) {
        if (scope.fn->params[i].name == e.name) {
          e.ref = RefKind::Param;
          e.slot = static_cast<int>(i);
          return;
        }
      }
    }
    int s = c_.find_state(e.name);
    if (s >= 0) {
      e.ref = RefKind::State;
      e.slot = s;
      return;
    }
    if (scope.property) {
      throw Error(ErrorKind::UnknownVariable, "unknown state variable '" + e.name + "'", e.name, e.loc);
    }
    throw Error(ErrorKind::Resolution, "unresolved name '" + e.name + "'", e.name, e.loc);
  }

  VarType slot_type(const Expr& e, const Scope& scope) const {
    if (e.ref == RefKind::Param) return scope.fn->params[e.slot].type;
    return c_.state_vars[e.slot].type;
  }

  static void require_type(VarType got, VarType want, SourceLoc loc, const std::string& what) {
    if (got != want) {
      throw Error(ErrorKind::Type, what + " has type " + type_name(got) + ", expected " + type_name(want), {}, loc);
    }
  }

  std::vector<Stmt> resolve_body(const std::vector<Stmt>& body, const FunctionDecl& fn) const {
    std::vector<Stmt> out;
    Scope scope{&fn, false, false};
    bool returned = false;
    for (const auto& raw : body) {
      if (returned) throw Error(ErrorKind::Kind, "statement after return", fn.name, raw.loc);
      Stmt s;
      s.kind = raw.kind;
      s.loc = raw.loc;
      s.has_else = raw.has_else;
      VarType t;
      switch (raw.kind) {
        case StmtKind::Require:
          s.expr = resolve(raw.expr, scope, t);
          require_type(t, VarType::Bool, raw.expr->loc, "require condition");
          break;
        case StmtKind::Assign: {
          if (fn.kind == FunctionKind::View) {
            throw Error(ErrorKind::Kind, "assignment in view function '" + fn.name + "'", fn.name, raw.loc);
          }
          auto target = std::make_shared<Expr>(*raw.target);
          target->args.clear();
          resolve_name(*target, scope);
          if (target->ref == RefKind::Param) {
            throw Error(ErrorKind::Kind, "cannot assign to parameter '" + target->name + "'", target->name,
                        target->loc);
          }
          VarType declared = c_.state_vars[target->slot].type;
          VarType lhs;
          if (raw.target->kind == ExprKind::Index) {
            if (declared != VarType::Map) {
              throw Error(ErrorKind::Type, "'" + target->name + "' is not a map", target->name, target->loc);
            }
            VarType it;
            target->args.push_back(resolve(raw.target->args[0], scope, it));
            require_type(it, VarType::Address, raw.target->args[0]->loc, "map index");
            lhs = VarType::Int;
          } else {
            if (declared == VarType::Map) {
              throw Error(ErrorKind::Type, "cannot assign whole map '" + target->name + "'", target->name,
                          target->loc);
            }
            lhs = declared;
          }
          s.target = target;
          s.expr = resolve(raw.expr, scope, t);
          require_type(t, lhs, raw.expr->loc, "assigned value");
          break;
        }
        case StmtKind::Call:
          if (fn.kind == FunctionKind::View) {
            throw Error(ErrorKind::Kind, "call statement in view function '" + fn.name + "'", fn.name, raw.loc);
          }
          s.expr = resolve(raw.expr, scope, t);
          require_type(t, VarType::Address, raw.expr->loc, "call target");
          s.amount = resolve(raw.amount, scope, t);
          require_type(t, VarType::Int, raw.amount->loc, "call amount");
          break;
        case StmtKind::If:
          s.expr = resolve(raw.expr, scope, t);
          require_type(t, VarType::Bool, raw.expr->loc, "if condition");
          s.then_body = resolve_body(raw.then_body, fn);
          s.else_body = resolve_body(raw.else_body, fn);
          break;
        case StmtKind::Return:
          if (raw.expr) {
            if (!fn.return_type) {
              throw Error(ErrorKind::Type, "function '" + fn.name + "' returns no value", fn.name, raw.loc);
            }
            s.expr = resolve(raw.expr, scope, t);
            require_type(t, *fn.return_type, raw.expr->loc, "return value");
          } else if (fn.return_type) {
            throw Error(ErrorKind::Type, "function '" + fn.name + "' must return a value", fn.name, raw.loc);
          }
          returned = true;
          break;
      }
      out.push_back(std::move(s));
    }
    return out;
  }

 private:
  const ContractAST& c_;
};

bool always_returns(const std::vector<Stmt>& body) {
  if (body.empty()) return false;
  const Stmt& last = body.back();
  if (last.kind == StmtKind::Return) return true;
  if (last.kind == StmtKind::If && last.has_else) {
    return always_returns(last.then_body) && always_returns(last.else_body);
  }
  return false;
}

void check_view_recursion(const ContractAST& c) {
  // Depth-first search for cycles in the view call graph.
  std::vector<int> color(c.functions.size(), 0);
  std::function<void(int)> visit = [&](int f) {
    color[f] = 1;
    for_each_expr(c.functions[f].body, [&](const Expr& e) {
      if (e.kind != ExprKind::Call) return;
      if (color[e.slot] == 1) {
        throw Error(ErrorKind::Kind, "recursive view call to '" + e.name + "'", e.name, e.loc);
      }
      if (color[e.slot] == 0) visit(e.slot);
    });
    color[f] = 2;
  };
  for (std::size_t i = 0; i < c.functions.size(); ++i) {
    if (color[i] == 0) visit(static_cast<int>(i));
  }
}

ContractAST resolve_contract(const ContractAST& raw) {
  ContractAST c = raw;
  std::set<std::string> names;
  for (const auto& v : c.state_vars) {
    if (!names.insert(v.name).second) {
      throw Error(ErrorKind::Resolution, "duplicate state variable '" + v.name + "'", v.name, v.loc);
    }
    if (v.init) {
      if (v.type == VarType::Map) {
        throw Error(ErrorKind::Type, "map '" + v.name + "' cannot have an initializer", v.name, v.loc);
      }
      if (type_of(*v.init) != v.type) {
        throw Error(ErrorKind::Type, "initializer of '" + v.name + "' does not match its type", v.name, v.loc);
      }
    }
  }
  std::set<std::string> fnames;
  for (const auto& f : c.functions) {
    if (!fnames.insert(f.name).second) {
      throw Error(ErrorKind::Resolution, "duplicate function '" + f.name + "'", f.name, f.loc);
    }
    std::set<std::string> pnames;
    for (const auto& p : f.params) {
      if (!pnames.insert(p.name).second) {
        throw Error(ErrorKind::Resolution, "duplicate parameter '" + p.name + "'", p.name, f.loc);
      }
      if (p.type == VarType::Map) {
        throw Error(ErrorKind::Type, "parameter '" + p.name + "' cannot be a map", p.name, f.loc);
      }
      if (c.find_state(p.name) >= 0) {
        throw Error(ErrorKind::Resolution, "parameter '" + p.name + "' shadows a state variable", p.name, f.loc);
      }
    }
    if (f.return_type == VarType::Map) {
      throw Error(ErrorKind::Type, "function '" + f.name + "' cannot return a map", f.name, f.loc);
    }
    if (f.kind == FunctionKind::View) {
      if (!f.return_type) throw Error(ErrorKind::Kind, "view function '" + f.name + "' needs a return type", f.name, f.loc);
    }
  }
  Resolver r(c);
  for (auto& f : c.functions) {
    f.body = r.resolve_body(f.body, f);
    if (f.kind == FunctionKind::View && !always_returns(f.body)) {
      throw Error(ErrorKind::Kind, "view function '" + f.name + "' may finish without returning", f.name, f.loc);
    }
  }
  check_view_recursion(c);
  return c;
}

}  // namespace

ContractAST parse_contract(std::string_view source) {
  Parser p(tokenize(source), false);
  return resolve_contract(p.contract());
}

TemporalProperty parse_property(std::string_view source, const ContractAST& contract) {
  Parser p(tokenize(source), true);
  auto [form, raw] = p.property();
  Resolver r(contract);
  VarType t;
  Scope scope{nullptr, true, false};
  TemporalProperty prop;
  prop.form = form;
  prop.pred = r.resolve(raw, scope, t);
  if (t != VarType::Bool) {
    throw Error(ErrorKind::Type, "property predicate must be boolean", {}, raw->loc);
  }
  prop.text = std::string(source);
  while (!prop.text.empty() && std::isspace(static_cast<unsigned char>(prop.text.back()))) prop.text.pop_back();
  return prop;
}

std::set<int> property_vars(const TemporalProperty& p) {
  std::set<int> out;
  for_each_expr(p.pred, [&](const Expr& e) {
    if ((e.kind == ExprKind::Var || e.kind == ExprKind::Index) && e.ref == RefKind::State) out.insert(e.slot);
  });
  return out;
}

std::vector<ExprPtr> old_terms(const TemporalProperty& p) {
  std::vector<ExprPtr> out;
  std::function<void(const ExprPtr&)> walk = [&](const ExprPtr& e) {
    if (!e) return;
    if (e->kind == ExprKind::Old) {
      for (const auto& seen : out) {
        if (expr_equal(seen, e->args[0])) return;
      }
      out.push_back(e->args[0]);
      return;
    }
    for (const auto& a : e->args) walk(a);
  };
  walk(p.pred);
  return out;
}

}  // namespace cscv::frontend

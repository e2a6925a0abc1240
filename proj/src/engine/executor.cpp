#include "cscv/engine/executor.hpp"

#include <sstream>

namespace cscv::engine {

using frontend::BinaryOp;
using frontend::ContractAST;
using frontend::Expr;
using frontend::ExprKind;
using frontend::FunctionDecl;
using frontend::RefKind;
using frontend::Stmt;
using frontend::StmtKind;
using frontend::UnaryOp;
using solver::Sort;
using solver::TermPtr;
namespace t = solver;

std::string format_invocation(const Invocation& inv) {
  std::ostringstream os;
  os << inv.function << '(';
  for (std::size_t i = 0; i < inv.args.size(); ++i) os << (i ? ", " : "") << format_value(inv.args[i]);
  os << ") from " << inv.sender.str();
  if (inv.value != 0) os << " value " << inv.value.str();
  if (!inv.reentry.empty()) {
    os << " reentering [";
    for (std::size_t i = 0; i < inv.reentry.size(); ++i) os << (i ? "; " : "") << format_invocation(inv.reentry[i]);
    os << ']';
  }
  return os.str();
}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::Ok: return "ok";
    case Outcome::RequireFailed: return "require-failed";
    case Outcome::Trap: return "trap";
    case Outcome::PostconditionViolated: return "postcondition-violated";
  }
  return "?";
}

std::vector<TermPtr> SymbolicTrace::path_constraints() const {
  std::vector<TermPtr> out;
  out.reserve(branches.size());
  for (const auto& b : branches) out.push_back(b.constraint);
  return out;
}

std::string input_symbol(int reentry_index, const std::string& name) {
  if (reentry_index < 0) return name;
  return "r" + std::to_string(reentry_index) + "." + name;
}

namespace {

struct CV {
  Value c;
  TermPtr s;  // null when the value does not depend on any input
};

using MapCV = std::map<Address, CV>;
using Slot = std::variant<CV, MapCV>;

struct Frame {
  const FunctionDecl* fn = nullptr;
  std::vector<CV> params;
  CV sender{Address{}, nullptr};
  CV value{Int(0), nullptr};
  std::optional<CV> ret;
};

struct RequireFailure {};
struct TrapSignal {};

Sort sort_of(VarType t) {
  switch (t) {
    case VarType::Bool: return Sort::Bool;
    case VarType::Address: return Sort::Address;
    default: return Sort::Int;
  }
}

TermPtr term(const CV& v) { return v.s ? v.s : t::const_of(v.c); }

bool mentions_div_or_call(const Expr& e) {
  if (e.kind == ExprKind::Call || (e.kind == ExprKind::Binary && e.bop == BinaryOp::Div)) return true;
  for (const auto& a : e.args) {
    if (mentions_div_or_call(*a)) return true;
  }
  return false;
}

const Int& two_256() {
  static const Int v = Int(1) << 256;
  return v;
}

class Machine {
 public:
  Machine(const ContractAST& c, const ExecConfig& cfg, SymbolicTrace* trace) : c_(c), cfg_(cfg), trace_(trace) {}

  void load(const std::vector<SlotValue>& valuation, const std::map<Address, Int>& balances) {
    store_.clear();
    for (const auto& v : valuation) {
      if (const auto* m = std::get_if<MapValue>(&v)) {
        MapCV mc;
        for (const auto& [k, x] : *m) mc.emplace(k, CV{x, nullptr});
        store_.emplace_back(std::move(mc));
      } else {
        store_.emplace_back(CV{std::get<Value>(v), nullptr});
      }
    }
    balances_ = balances;
  }

  GlobalState snapshot(int depth) const {
    GlobalState s;
    for (const auto& slot : store_) {
      if (const auto* m = std::get_if<MapCV>(&slot)) {
        MapValue mv;
        for (const auto& [k, x] : *m) mv.emplace(k, std::get<Int>(x.c));
        s.valuation.emplace_back(std::move(mv));
      } else {
        s.valuation.emplace_back(std::get<CV>(slot).c);
      }
    }
    s.actor_balances = balances_;
    s.depth = depth;
    return s;
  }

  void run_top(const Invocation& inv) {
    top_ = &inv;
    cursor_ = 0;
    run_invocation(inv, -1);
  }

  std::optional<Value> run_view(int fn) {
    Frame f;
    f.fn = &c_.functions.at(static_cast<std::size_t>(fn));
    f.sender = CV{cfg_.attacker, nullptr};
    try {
      exec(f.fn->body, f);
    } catch (const RequireFailure&) {
      return std::nullopt;
    } catch (const TrapSignal&) {
      return std::nullopt;
    }
    if (!f.ret) return std::nullopt;
    return f.ret->c;
  }

  void capture(const std::vector<frontend::ExprPtr>& lvalues) {
    Frame f;
    for (const auto& lv : lvalues) captured_.push_back(CV{eval(*lv, f).c, nullptr});
  }

  // Concrete truth of the postcondition plus its symbolic form (guards folded in).
  std::pair<bool, TermPtr> check(const frontend::ExprPtr& post) {
    Frame f;
    post_guards_.emplace();
    CV v = eval(*post, f);
    TermPtr sym = term(v);
    for (auto it = post_guards_->rbegin(); it != post_guards_->rend(); ++it) sym = t::land(*it, sym);
    post_guards_.reset();
    return {std::get<bool>(v.c), sym};
  }

 private:
  void record(TermPtr cond, bool flippable) {
    if (t::is_const(*cond)) return;
    if (post_guards_) {
      post_guards_->push_back(std::move(cond));
      return;
    }
    if (trace_) trace_->branches.push_back({std::move(cond), flippable});
  }

  void branch_on(const CV& cond, bool flippable = true) {
    if (cond.s) record(std::get<bool>(cond.c) ? cond.s : t::lnot(cond.s), flippable);
  }

  CV input(int reentry, const std::string& name, Value concrete, Sort sort) {
    if (!trace_) return CV{std::move(concrete), nullptr};
    std::string sym = input_symbol(reentry, name);
    trace_->symbols.emplace_back(sym, sort);
    trace_->inputs[sym] = concrete;
    return CV{std::move(concrete), t::symbol(sym, sort)};
  }

  TermPtr balance_term(const TermPtr& who) const {
    TermPtr out = t::int_const(0);
    for (auto it = balances_.rbegin(); it != balances_.rend(); ++it) {
      out = t::ite(t::eq(who, t::addr_const(it->first)), t::int_const(it->second), out);
    }
    return out;
  }

  void run_invocation(const Invocation& inv, int reentry) {
    int idx = c_.find_function(inv.function);
    if (idx < 0 || c_.functions[static_cast<std::size_t>(idx)].kind != frontend::FunctionKind::External) {
      throw Error(ErrorKind::Input, "'" + inv.function + "' is not an external function", inv.function);
    }
    const FunctionDecl& fn = c_.functions[static_cast<std::size_t>(idx)];
    if (inv.args.size() != fn.params.size()) {
      throw Error(ErrorKind::Input, "wrong number of arguments for '" + fn.name + "'", fn.name);
    }
    Frame f;
    f.fn = &fn;
    for (std::size_t i = 0; i < fn.params.size(); ++i) {
      if (type_of(inv.args[i]) != fn.params[i].type) {
        throw Error(ErrorKind::Input, "argument type mismatch for '" + fn.params[i].name + "'", fn.params[i].name);
      }
      f.params.push_back(input(reentry, fn.params[i].name, inv.args[i], sort_of(fn.params[i].type)));
    }
    if (reentry < 0) {
      f.sender = input(reentry, "msg.sender", inv.sender, Sort::Address);
    } else {
      f.sender = CV{inv.sender, nullptr};
    }
    f.value = input(reentry, "msg.value", inv.value, Sort::Int);

    const Int& value = std::get<Int>(f.value.c);
    if (f.value.s) record(value >= 0 ? t::ge(f.value.s, t::int_const(0)) : t::lt(f.value.s, t::int_const(0)), false);
    if (value < 0) throw TrapSignal{};

    // The attacker's capital is unbounded (flash loans); everyone else pays from
    // their native balance.
    const Address& sender = std::get<Address>(f.sender.c);
    bool affordable = sender == cfg_.attacker;
    if (!affordable) {
      auto it = balances_.find(sender);
      affordable = value <= (it == balances_.end() ? Int(0) : it->second);
    }
    if (f.sender.s || f.value.s) {
      TermPtr cond = t::lor(t::eq(term(f.sender), t::addr_const(cfg_.attacker)),
                            t::le(term(f.value), balance_term(term(f.sender))));
      record(affordable ? cond : t::lnot(cond), false);
    }
    if (!affordable) throw TrapSignal{};
    if (sender != cfg_.attacker) balances_[sender] -= value;

    ++nesting_;
    exec(fn.body, f);
    --nesting_;
  }

  bool exec(const std::vector<Stmt>& body, Frame& f) {
    for (const auto& s : body) {
      switch (s.kind) {
        case StmtKind::Require: {
          CV cond = eval(*s.expr, f);
          branch_on(cond);
          if (!std::get<bool>(cond.c)) throw RequireFailure{};
          break;
        }
        case StmtKind::Assign: {
          CV v = eval(*s.expr, f);
          const Expr& target = *s.target;
          note_write(target.name);
          if (target.kind == ExprKind::Index) {
            CV idx = eval(*target.args[0], f);
            const Address& key = std::get<Address>(idx.c);
            if (idx.s) record(t::eq(idx.s, t::addr_const(key)), false);
            std::get<MapCV>(store_[static_cast<std::size_t>(target.slot)])[key] = std::move(v);
          } else {
            store_[static_cast<std::size_t>(target.slot)] = std::move(v);
          }
          break;
        }
        case StmtKind::Call: {
          CV to = eval(*s.expr, f);
          CV amount = eval(*s.amount, f);
          const Int& amt = std::get<Int>(amount.c);
          if (amount.s) record(amt >= 0 ? t::ge(amount.s, t::int_const(0)) : t::lt(amount.s, t::int_const(0)), false);
          if (amt < 0) throw TrapSignal{};
          const Address& dest = std::get<Address>(to.c);
          bool to_attacker = dest == cfg_.attacker;
          if (to.s) {
            TermPtr is_attacker = t::eq(to.s, t::addr_const(cfg_.attacker));
            record(to_attacker ? is_attacker : t::lnot(is_attacker), true);
          }
          if (!to_attacker) {
            balances_[dest] += amt;
          } else {
            if (nesting_ == 1 && trace_) ++trace_->attacker_calls;
            if (nesting_ <= cfg_.reentry_depth && top_ && cursor_ < top_->reentry.size()) {
              std::size_t k = cursor_++;
              run_invocation(top_->reentry[k], static_cast<int>(k));
            }
          }
          break;
        }
        case StmtKind::If: {
          CV cond = eval(*s.expr, f);
          branch_on(cond);
          bool returned = std::get<bool>(cond.c) ? exec(s.then_body, f) : exec(s.else_body, f);
          if (returned) return true;
          break;
        }
        case StmtKind::Return:
          if (s.expr) f.ret = eval(*s.expr, f);
          return true;
      }
    }
    return false;
  }

  void note_read(const std::string& name) {
    if (trace_ && nesting_ == 1) trace_->reads.insert(name);
  }
  void note_write(const std::string& name) {
    if (trace_ && nesting_ == 1) trace_->writes.insert(name);
  }

  CV wrap(CV v) const {
    if (!c_.wrap256) return v;
    v.c = wrap256(std::get<Int>(v.c));
    if (v.s) v.s = t::mod(v.s, t::int_const(two_256()));
    return v;
  }

  CV eval(const Expr& e, Frame& f) {
    switch (e.kind) {
      case ExprKind::IntLit: return CV{e.int_value, nullptr};
      case ExprKind::BoolLit: return CV{e.bool_value, nullptr};
      case ExprKind::AddrLit: return CV{Address(e.name), nullptr};
      case ExprKind::Attacker: return CV{cfg_.attacker, nullptr};
      case ExprKind::MsgSender: return f.sender;
      case ExprKind::MsgValue: return f.value;
      case ExprKind::Captured: return captured_.at(static_cast<std::size_t>(e.slot));
      case ExprKind::Old: throw std::logic_error("old() must be spatialized before execution");
      case ExprKind::Var:
        if (e.ref == RefKind::Param) return f.params.at(static_cast<std::size_t>(e.slot));
        note_read(e.name);
        return std::get<CV>(store_[static_cast<std::size_t>(e.slot)]);
      case ExprKind::Index: {
        note_read(e.name);
        CV idx = eval(*e.args[0], f);
        const MapCV& m = std::get<MapCV>(store_[static_cast<std::size_t>(e.slot)]);
        auto it = m.find(std::get<Address>(idx.c));
        CV out = it == m.end() ? CV{Int(0), nullptr} : it->second;
        if (idx.s) {
          TermPtr chain = t::int_const(0);
          for (auto r = m.rbegin(); r != m.rend(); ++r) {
            chain = t::ite(t::eq(idx.s, t::addr_const(r->first)), term(r->second), chain);
          }
          out.s = chain;
        }
        return out;
      }
      case ExprKind::Call: {
        Frame callee;
        callee.fn = &c_.functions.at(static_cast<std::size_t>(e.slot));
        for (const auto& a : e.args) callee.params.push_back(eval(*a, f));
        callee.sender = f.sender;
        callee.value = f.value;
        exec(callee.fn->body, callee);
        if (!callee.ret) throw std::logic_error("view finished without a value");
        return *callee.ret;
      }
      case ExprKind::Unary: {
        CV a = eval(*e.args[0], f);
        if (e.uop == UnaryOp::Not) return CV{!std::get<bool>(a.c), a.s ? t::lnot(a.s) : nullptr};
        return wrap(CV{Int(-std::get<Int>(a.c)), a.s ? t::neg(a.s) : nullptr});
      }
      case ExprKind::Binary: return binary(e, f);
    }
    throw std::logic_error("bad expression");
  }

  CV logical(const Expr& e, Frame& f) {
    CV a = eval(*e.args[0], f);
    bool av = std::get<bool>(a.c);
    // Value of the left operand that decides the result on its own.
    bool decisive = e.bop == BinaryOp::Or;
    bool short_value = e.bop != BinaryOp::And;
    if (e.bop == BinaryOp::Implies) decisive = false;

    if (mentions_div_or_call(*e.args[1])) {
      branch_on(a);
      if (av == decisive) return CV{short_value, nullptr};
      return eval(*e.args[1], f);
    }
    CV b = eval(*e.args[1], f);
    bool bv = std::get<bool>(b.c);
    bool v = e.bop == BinaryOp::And ? (av && bv) : e.bop == BinaryOp::Or ? (av || bv) : (!av || bv);
    TermPtr s;
    if (a.s || b.s) {
      if (e.bop == BinaryOp::And) s = t::land(term(a), term(b));
      else if (e.bop == BinaryOp::Or) s = t::lor(term(a), term(b));
      else s = t::implies(term(a), term(b));
    }
    return CV{v, s};
  }

  CV binary(const Expr& e, Frame& f) {
    if (e.bop == BinaryOp::And || e.bop == BinaryOp::Or || e.bop == BinaryOp::Implies) return logical(e, f);
    CV a = eval(*e.args[0], f);
    CV b = eval(*e.args[1], f);
    bool sym = a.s || b.s;
    auto ints = [&] { return std::pair<const Int&, const Int&>(std::get<Int>(a.c), std::get<Int>(b.c)); };
    switch (e.bop) {
      case BinaryOp::Add: {
        auto [x, y] = ints();
        return wrap(CV{Int(x + y), sym ? t::add(term(a), term(b)) : nullptr});
      }
      case BinaryOp::Sub: {
        auto [x, y] = ints();
        return wrap(CV{Int(x - y), sym ? t::sub(term(a), term(b)) : nullptr});
      }
      case BinaryOp::Mul: {
        auto [x, y] = ints();
        return wrap(CV{Int(x * y), sym ? t::mul(term(a), term(b)) : nullptr});
      }
      case BinaryOp::Div: {
        auto [x, y] = ints();
        if (b.s) record(y == 0 ? t::eq(b.s, t::int_const(0)) : t::ne(b.s, t::int_const(0)), false);
        if (y == 0) throw TrapSignal{};
        return wrap(CV{floor_div(x, y), sym ? t::floor_div(term(a), term(b)) : nullptr});
      }
      case BinaryOp::Eq: return CV{a.c == b.c, sym ? t::eq(term(a), term(b)) : nullptr};
      case BinaryOp::Ne: return CV{a.c != b.c, sym ? t::ne(term(a), term(b)) : nullptr};
      case BinaryOp::Lt: {
        auto [x, y] = ints();
        return CV{x < y, sym ? t::lt(term(a), term(b)) : nullptr};
      }
      case BinaryOp::Le: {
        auto [x, y] = ints();
        return CV{x <= y, sym ? t::le(term(a), term(b)) : nullptr};
      }
      case BinaryOp::Gt: {
        auto [x, y] = ints();
        return CV{x > y, sym ? t::gt(term(a), term(b)) : nullptr};
      }
      case BinaryOp::Ge: {
        auto [x, y] = ints();
        return CV{x >= y, sym ? t::ge(term(a), term(b)) : nullptr};
      }
      default: break;
    }
    throw std::logic_error("bad binary operator");
  }

  const ContractAST& c_;
  const ExecConfig& cfg_;
  SymbolicTrace* trace_;
  std::vector<Slot> store_;
  std::map<Address, Int> balances_;
  std::vector<CV> captured_;
  std::optional<std::vector<TermPtr>> post_guards_;
  const Invocation* top_ = nullptr;
  std::size_t cursor_ = 0;
  int nesting_ = 0;
};

}  // namespace

StepResult step_concolic(const GlobalState& state, const Invocation& inv,
                         const optimization::InstrumentedContract& instrumented, const ExecConfig& config) {
  StepResult r;
  r.post = state;
  Machine m(instrumented.base, config, &r.trace);
  m.load(state.valuation, state.actor_balances);
  m.capture(instrumented.pre_capture);
  try {
    m.run_top(inv);
  } catch (const RequireFailure&) {
    r.outcome = Outcome::RequireFailed;
    return r;
  } catch (const TrapSignal&) {
    r.outcome = Outcome::Trap;
    return r;
  }
  r.post = m.snapshot(state.depth + 1);
  r.outcome = Outcome::Ok;
  if (!instrumented.postcondition) return r;
  try {
    auto [holds, sym] = m.check(instrumented.postcondition);
    r.trace.postcondition = sym;
    if (!holds) r.outcome = Outcome::PostconditionViolated;
  } catch (const TrapSignal&) {
    r.outcome = Outcome::PostconditionViolated;
  }
  return r;
}

std::optional<Value> evaluate_view(const ContractAST& contract, int function, const std::vector<SlotValue>& valuation,
                                   const ExecConfig& config) {
  Machine m(contract, config, nullptr);
  m.load(valuation, {});
  return m.run_view(function);
}

}  // namespace cscv::engine

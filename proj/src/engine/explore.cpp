#include "cscv/engine/explore.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <set>
#include <unordered_map>

#include "cscv/jsonio.hpp"

namespace cscv::engine {

using frontend::ContractAST;
using frontend::Expr;
using frontend::ExprKind;
using frontend::ExprPtr;
using frontend::FunctionDecl;
using frontend::RefKind;
using frontend::Stmt;
using frontend::StmtKind;
using optimization::HeuristicKind;
using solver::Status;
using solver::TermPtr;

std::string_view to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::Violated: return "violated";
    case VerdictKind::Verified: return "verified";
    case VerdictKind::Unknown: return "unknown";
  }
  return "?";
}

solver::SolverResult SolverHandle::solve(const std::vector<TermPtr>& terms) {
  std::string key = solver::emit_smtlib(terms, domain_);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  ++calls_;
  auto r = backend_.solve(terms, domain_);
  if (r.status == Status::Unknown) saw_unknown_ = true;
  cache_.emplace(std::move(key), r);
  return r;
}

bool SolverHandle::asked(const std::vector<TermPtr>& terms) const {
  return cache_.count(solver::emit_smtlib(terms, domain_)) > 0;
}

ExecConfig Setup::exec_config(const Budget& budget) const {
  return ExecConfig{snapshot.actors, snapshot.attacker, budget.reentry_depth};
}

namespace {

constexpr std::size_t kMaxSeeds = 64;
constexpr std::size_t kMaxReentryVariants = 32;

void push_unique(std::vector<Value>& pool, Value v) {
  if (std::find(pool.begin(), pool.end(), v) == pool.end()) pool.push_back(std::move(v));
}

// Guard expressions of a body, plus every expression of the views it calls.
void guard_exprs(const ContractAST& c, const std::vector<Stmt>& body, std::vector<ExprPtr>& out,
                 std::set<int>& views) {
  auto visit_calls = [&](const ExprPtr& e) {
    frontend::for_each_expr(e, [&](const Expr& x) {
      if (x.kind != ExprKind::Call || !views.insert(x.slot).second) return;
      const auto& vb = c.functions[static_cast<std::size_t>(x.slot)].body;
      for (const auto& s : vb) {
        if (s.expr) out.push_back(s.expr);
      }
      guard_exprs(c, vb, out, views);
    });
  };
  for (const auto& s : body) {
    if (s.kind == StmtKind::Require || s.kind == StmtKind::If) out.push_back(s.expr);
    visit_calls(s.expr);
    visit_calls(s.target);
    visit_calls(s.amount);
    guard_exprs(c, s.then_body, out, views);
    guard_exprs(c, s.else_body, out, views);
  }
}

void add_current_values(const SlotValue& v, std::vector<Value>& pool) {
  if (const auto* m = std::get_if<MapValue>(&v)) {
    for (const auto& [k, x] : *m) push_unique(pool, x);
  } else if (std::holds_alternative<Int>(std::get<Value>(v))) {
    push_unique(pool, std::get<Value>(v));
  }
}

Value resolve_seed(const optimization::SeedLiteral& s, const Address& attacker) {
  return s.attacker ? Value{attacker} : s.value;
}

struct Pools {
  std::vector<Value> ints, addresses, bools;
  const std::vector<Value>& of(VarType t) const {
    if (t == VarType::Address) return addresses;
    if (t == VarType::Bool) return bools;
    return ints;
  }
};

Pools seed_pools(const GlobalState& state, const FunctionDecl& fn, const Setup& setup) {
  const ContractAST& c = setup.instrumented.base;
  const Address& attacker = setup.snapshot.attacker;
  Pools p;
  auto add_typed = [&](const Value& v) {
    switch (type_of(v)) {
      case VarType::Address: push_unique(p.addresses, v); break;
      case VarType::Bool: push_unique(p.bools, v); break;
      default: push_unique(p.ints, v); break;
    }
  };
  for (const auto& h : setup.ctx.heuristics.selected) {
    if (h.kind == HeuristicKind::ArgSeed && h.matches(fn.name)) {
      for (const auto& s : h.values) add_typed(resolve_seed(s, attacker));
    }
  }
  for (const auto& h : setup.ctx.heuristics.selected) {
    if (h.kind != HeuristicKind::StateSeed) continue;
    for (std::size_t i = 0; i < c.state_vars.size(); ++i) {
      if (h.matches(c.state_vars[i].name)) add_current_values(state.valuation[i], p.ints);
    }
    for (const auto& s : h.values) add_typed(resolve_seed(s, attacker));
  }
  push_unique(p.ints, Int(0));
  push_unique(p.ints, Int(1));
  auto literals = [&](const ExprPtr& e) {
    frontend::for_each_expr(e, [&](const Expr& x) {
      if (x.kind == ExprKind::IntLit) push_unique(p.ints, x.int_value);
      if (x.kind == ExprKind::Unary && x.uop == frontend::UnaryOp::Neg && x.args[0]->kind == ExprKind::IntLit) {
        push_unique(p.ints, Int(-x.args[0]->int_value));
      }
    });
  };
  literals(setup.ctx.property.pred);
  std::vector<ExprPtr> guards;
  std::set<int> views;
  guard_exprs(c, fn.body, guards, views);
  for (const auto& g : guards) literals(g);
  std::set<int> compared;
  for (const auto& g : guards) {
    frontend::for_each_expr(g, [&](const Expr& x) {
      if ((x.kind == ExprKind::Var || x.kind == ExprKind::Index) && x.ref == RefKind::State) compared.insert(x.slot);
    });
  }
  for (int slot : compared) add_current_values(state.valuation[static_cast<std::size_t>(slot)], p.ints);

  push_unique(p.addresses, attacker);
  for (const auto& a : setup.snapshot.actors) push_unique(p.addresses, a);
  push_unique(p.bools, false);
  push_unique(p.bools, true);
  return p;
}

std::vector<Invocation> seeds_for(const GlobalState& state, const std::string& f, const Setup& setup,
                                  std::size_t limit) {
  const ContractAST& c = setup.instrumented.base;
  const FunctionDecl& fn = c.functions.at(static_cast<std::size_t>(c.find_function(f)));
  Pools pools = seed_pools(state, fn, setup);
  std::vector<Invocation> out;
  std::vector<std::size_t> pos(fn.params.size(), 0);
  while (out.size() < limit) {
    Invocation inv;
    inv.function = f;
    inv.sender = setup.snapshot.attacker;
    for (std::size_t i = 0; i < fn.params.size(); ++i) inv.args.push_back(pools.of(fn.params[i].type)[pos[i]]);
    out.push_back(std::move(inv));
    // Odometer with the first parameter varying slowest.
    std::size_t i = fn.params.size();
    while (i > 0) {
      --i;
      if (++pos[i] < pools.of(fn.params[i].type).size()) break;
      pos[i] = 0;
      if (i == 0) return out;
    }
    if (fn.params.empty()) break;
  }
  return out;
}

Invocation apply_model(const Invocation& base, const solver::Model& model, const ContractAST& c) {
  Invocation inv = base;
  auto fill = [&](Invocation& target, int k) {
    const FunctionDecl& fn = c.functions.at(static_cast<std::size_t>(c.find_function(target.function)));
    for (std::size_t i = 0; i < fn.params.size(); ++i) {
      auto it = model.find(input_symbol(k, fn.params[i].name));
      if (it != model.end()) target.args[i] = it->second;
    }
    if (k < 0) {
      auto s = model.find("msg.sender");
      if (s != model.end()) target.sender = std::get<Address>(s->second);
    }
    auto v = model.find(input_symbol(k, "msg.value"));
    if (v != model.end()) target.value = std::get<Int>(v->second);
  };
  fill(inv, -1);
  for (std::size_t k = 0; k < inv.reentry.size(); ++k) fill(inv.reentry[k], static_cast<int>(k));
  return inv;
}

std::vector<TermPtr> flip_query(const SymbolicTrace& tr, std::size_t j) {
  std::vector<TermPtr> q;
  for (std::size_t i = 0; i < j; ++i) q.push_back(tr.branches[i].constraint);
  q.push_back(solver::lnot(tr.branches[j].constraint));
  return q;
}

class Explorer {
 public:
  Explorer(const Setup& setup, const Budget& budget, solver::Solver& backend, const TraceObserver& observer)
      : setup_(setup),
        budget_(budget),
        cfg_(setup.exec_config(budget)),
        solver_(backend, solver::AddressDomain{setup.snapshot.actors}),
        observer_(observer),
        start_(Clock::now()) {}

  Verdict run() {
    const ContractAST& c = setup_.instrumented.base;
    GlobalState s0 = initial_state(setup_.ctx, c, setup_.snapshot);
    nodes_.push_back({std::move(s0), -1, {}, {}});
    index_state(0);
    if (!c.external_names().empty()) {
      frontier_.push_back(0);
    }
    while (!frontier_.empty() && !violation_ && !time_out_) {
      int n = frontier_.front();
      frontier_.pop_front();
      if (nodes_[static_cast<std::size_t>(n)].state.depth >= budget_.diameter) {
        diameter_hit_ = true;
        continue;
      }
      for (const auto& f : order(n)) {
        if (expand(n, f) || time_out_) break;
      }
    }
    Verdict v;
    if (violation_) {
      v.kind = VerdictKind::Violated;
      v.vector = build_vector();
      if (!replay(*v.vector, setup_, budget_)) {
        throw Error(ErrorKind::ReplayDivergence, "reported attack vector does not replay");
      }
    } else if (time_out_) {
      v.reason = "time-exhausted";
    } else if (diameter_hit_) {
      v.reason = "diameter-exhausted";
    } else if (solver_.saw_unknown()) {
      v.reason = "solver-unknown";
    } else {
      v.kind = VerdictKind::Verified;
    }
    v.stats.transitions = transitions_;
    v.stats.states = nodes_.size();
    v.stats.solver_calls = solver_.calls();
    v.stats.elapsed_ms = static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start_).count());
    return v;
  }

 private:
  using Clock = std::chrono::steady_clock;

  struct Node {
    GlobalState state;
    int parent;
    Invocation via;
    std::string via_fn;
  };

  struct Run {
    Invocation inv;
    SymbolicTrace trace;
    Outcome outcome;
    std::size_t bound;  // branches below this index were fixed by the parent run
    std::vector<bool> flipped;
  };

  struct Batch {
    std::vector<Run> runs;
    std::set<std::string> keys;
    int flips = 0;
  };

  struct Violation {
    int node;
    Invocation inv;
    GlobalState post;
  };

  std::vector<std::string> order(int n) const {
    const Node& node = nodes_[static_cast<std::size_t>(n)];
    if (node.parent < 0) return setup_.ctx.relevance.initial;
    std::vector<std::string> out = setup_.ctx.relevance.of(node.via_fn);
    out.push_back(node.via_fn);
    return out;
  }

  bool out_of_time() {
    if (!time_out_ && std::chrono::duration<double>(Clock::now() - start_).count() > budget_.time_limit_s) {
      time_out_ = true;
    }
    return time_out_;
  }

  void index_state(int n) {
    seen_[canonical_hash(nodes_[static_cast<std::size_t>(n)].state)].push_back(n);
  }

  void add_state(int parent, const Invocation& inv, GlobalState post) {
    auto& bucket = seen_[canonical_hash(post)];
    for (int other : bucket) {
      if (same_state(nodes_[static_cast<std::size_t>(other)].state, post)) return;
    }
    int id = static_cast<int>(nodes_.size());
    bucket.push_back(id);
    bool frontier = post.depth < budget_.diameter;
    nodes_.push_back({std::move(post), parent, inv, inv.function});
    if (frontier) {
      frontier_.push_back(id);
    } else {
      diameter_hit_ = true;
    }
  }

  // Executes one candidate; true when it violates the postcondition.
  bool attempt(int n, const Invocation& inv, std::size_t bound, Batch& b) {
    if (!b.keys.insert(format_invocation(inv)).second) return false;
    if (out_of_time()) return false;
    const GlobalState& state = nodes_[static_cast<std::size_t>(n)].state;
    StepResult r = step_concolic(state, inv, setup_.instrumented, cfg_);
    ++transitions_;
    if (observer_) observer_(state, inv, r);
    if (r.outcome == Outcome::PostconditionViolated) {
      violation_ = Violation{n, inv, std::move(r.post)};
      return true;
    }
    if (r.outcome == Outcome::Ok) add_state(n, inv, r.post);
    std::size_t nb = r.trace.branches.size();
    b.runs.push_back({inv, std::move(r.trace), r.outcome, bound, std::vector<bool>(nb, false)});
    return false;
  }

  // Solves for inputs that keep the run's path but break the postcondition.
  bool falsify(int n, std::size_t i, Batch& b) {
    const Run& run = b.runs[i];
    if (run.outcome != Outcome::Ok || !run.trace.postcondition || solver::is_const(*run.trace.postcondition)) {
      return false;
    }
    auto q = run.trace.path_constraints();
    q.push_back(solver::lnot(run.trace.postcondition));
    if (solver_.asked(q)) return false;
    auto res = solver_.solve(q);
    if (res.status != Status::Sat) return false;
    Invocation inv = apply_model(run.inv, res.model, setup_.instrumented.base);
    return attempt(n, inv, run.bound, b);
  }

  bool run_all(int n, const std::vector<Invocation>& invs, Batch& b) {
    std::size_t first = b.runs.size();
    for (const auto& inv : invs) {
      if (attempt(n, inv, 0, b)) return true;
      if (time_out_) return false;
    }
    std::size_t last = b.runs.size();
    for (std::size_t i = first; i < last; ++i) {
      if (falsify(n, i, b)) return true;
      if (time_out_) return false;
    }
    return false;
  }

  std::vector<Invocation> reentry_variants(int n, const Batch& b) {
    const GlobalState& state = nodes_[static_cast<std::size_t>(n)].state;
    std::vector<Invocation> out;
    std::set<std::string> keys;
    auto add = [&](const Invocation& outer, Invocation inner) {
      if (out.size() >= kMaxReentryVariants) return;
      inner.sender = setup_.snapshot.attacker;
      inner.value = 0;
      Invocation v = outer;
      v.reentry = {std::move(inner)};
      if (keys.insert(format_invocation(v)).second) out.push_back(std::move(v));
    };
    std::vector<const Run*> sites;
    for (const auto& r : b.runs) {
      if (r.trace.attacker_calls > 0 && r.inv.reentry.empty()) sites.push_back(&r);
    }
    if (sites.empty()) return out;
    // Same call again first.
    for (const Run* r : sites) {
      Invocation inner = r->inv;
      add(r->inv, inner);
    }
    const std::string& f = sites.front()->inv.function;
    std::vector<std::string> targets;
    for (const auto& h : setup_.ctx.heuristics.selected) {
      if (h.kind == HeuristicKind::ReentryTarget && h.matches(f) &&
          setup_.instrumented.base.find_function(h.target) >= 0 &&
          setup_.instrumented.base.functions[static_cast<std::size_t>(setup_.instrumented.base.find_function(h.target))].kind ==
              frontend::FunctionKind::External &&
          std::find(targets.begin(), targets.end(), h.target) == targets.end()) {
        targets.push_back(h.target);
      }
    }
    if (std::find(targets.begin(), targets.end(), f) == targets.end()) targets.push_back(f);
    for (const auto& g : setup_.ctx.relevance.of(f)) {
      if (std::find(targets.begin(), targets.end(), g) == targets.end()) targets.push_back(g);
    }
    for (const auto& g : targets) {
      auto inner = seeds_for(state, g, setup_, kMaxReentryVariants);
      for (const Run* r : sites) {
        for (const auto& in : inner) add(r->inv, in);
      }
    }
    return out;
  }

  bool flips(int n, Batch& b) {
    bool progress = true;
    while (progress && b.flips < budget_.branch_flips) {
      progress = false;
      for (std::size_t i = 0; i < b.runs.size() && b.flips < budget_.branch_flips; ++i) {
        // Last unflipped branch of this run.
        std::size_t j = b.runs[i].trace.branches.size();
        bool found = false;
        while (j > b.runs[i].bound) {
          --j;
          if (b.runs[i].trace.branches[j].flippable && !b.runs[i].flipped[j]) {
            found = true;
            break;
          }
        }
        if (!found) continue;
        progress = true;
        b.runs[i].flipped[j] = true;
        auto q = flip_query(b.runs[i].trace, j);
        if (solver_.asked(q)) continue;
        ++b.flips;
        auto res = solver_.solve(q);
        if (res.status != Status::Sat) continue;
        Invocation inv = apply_model(b.runs[i].inv, res.model, setup_.instrumented.base);
        std::size_t before = b.runs.size();
        if (attempt(n, inv, j + 1, b)) return true;
        if (time_out_) return false;
        if (b.runs.size() > before && falsify(n, before, b)) return true;
        if (time_out_) return false;
      }
    }
    return false;
  }

  bool expand(int n, const std::string& f) {
    Batch b;
    if (run_all(n, seeds_for(nodes_[static_cast<std::size_t>(n)].state, f, setup_, kMaxSeeds), b)) return true;
    if (time_out_) return false;
    if (budget_.reentry_depth > 0) {
      if (run_all(n, reentry_variants(n, b), b)) return true;
      if (time_out_) return false;
    }
    return flips(n, b);
  }

  AttackVector build_vector() const {
    std::vector<int> chain;
    for (int n = violation_->node; n >= 0; n = nodes_[static_cast<std::size_t>(n)].parent) chain.push_back(n);
    std::reverse(chain.begin(), chain.end());
    AttackVector v;
    for (std::size_t i = 0; i < chain.size(); ++i) {
      const Node& node = nodes_[static_cast<std::size_t>(chain[i])];
      if (i > 0) v.calls.push_back(node.via);
      v.states.push_back(node.state);
    }
    v.calls.push_back(violation_->inv);
    v.states.push_back(violation_->post);
    v.violating_index = v.states.size() - 1;
    return v;
  }

  const Setup& setup_;
  Budget budget_;
  ExecConfig cfg_;
  SolverHandle solver_;
  const TraceObserver& observer_;
  Clock::time_point start_;

  std::vector<Node> nodes_;
  std::unordered_map<std::uint64_t, std::vector<int>> seen_;
  std::deque<int> frontier_;
  std::optional<Violation> violation_;
  std::uint64_t transitions_ = 0;
  bool time_out_ = false;
  bool diameter_hit_ = false;
};

}  // namespace

std::vector<Invocation> generate_inputs(const GlobalState& state, const std::string& f, const Setup& setup,
                                        const std::vector<std::pair<Invocation, SymbolicTrace>>& history,
                                        const Budget& budget, SolverHandle& solver) {
  if (history.empty()) return seeds_for(state, f, setup, kMaxSeeds);
  std::vector<Invocation> out;
  std::set<std::string> keys;
  for (const auto& [inv, tr] : history) keys.insert(format_invocation(inv));
  int attempts = 0;
  for (const auto& [inv, tr] : history) {
    if (inv.function != f) continue;
    for (std::size_t j = tr.branches.size(); j-- > 0 && attempts < budget.branch_flips;) {
      if (!tr.branches[j].flippable) continue;
      auto q = flip_query(tr, j);
      if (solver.asked(q)) continue;
      ++attempts;
      auto res = solver.solve(q);
      if (res.status != Status::Sat) continue;
      Invocation next = apply_model(inv, res.model, setup.instrumented.base);
      if (keys.insert(format_invocation(next)).second) out.push_back(std::move(next));
    }
  }
  return out;
}

Verdict explore(const Setup& setup, const Budget& budget, solver::Solver& solver, const TraceObserver& observer) {
  Explorer ex(setup, budget, solver, observer);
  return ex.run();
}

bool replay(const AttackVector& vector, const Setup& setup, const Budget& budget) {
  if (vector.states.size() != vector.calls.size() + 1) return false;
  GlobalState s = initial_state(setup.ctx, setup.instrumented.base, setup.snapshot);
  if (!same_state(s, vector.states[0])) return false;
  ExecConfig cfg = setup.exec_config(budget);
  bool hit = false;
  for (std::size_t i = 0; i < vector.calls.size(); ++i) {
    StepResult r = step_concolic(s, vector.calls[i], setup.instrumented, cfg);
    if (r.outcome == Outcome::RequireFailed || r.outcome == Outcome::Trap) {
      throw Error(ErrorKind::ReplayDivergence, "step " + std::to_string(i + 1) + " did not commit (" +
                                                   std::string(to_string(r.outcome)) + ")",
                  std::to_string(i + 1));
    }
    if (!same_state(r.post, vector.states[i + 1])) return false;
    bool violated = r.outcome == Outcome::PostconditionViolated;
    if (i + 1 == vector.violating_index) {
      if (!violated) return false;
      hit = true;
    } else if (violated && i + 1 < vector.violating_index) {
      return false;
    }
    s = std::move(r.post);
  }
  return hit;
}

namespace {

nlohmann::ordered_json call_json(const Invocation& inv) {
  nlohmann::ordered_json c;
  c["fn"] = inv.function;
  c["sender"] = inv.sender.str();
  c["value"] = to_json(inv.value);
  auto& args = c["args"] = nlohmann::ordered_json::array();
  for (const auto& a : inv.args) args.push_back(to_json(a));
  auto& re = c["reentry"] = nlohmann::ordered_json::array();
  for (const auto& r : inv.reentry) re.push_back(call_json(r));
  return c;
}

nlohmann::ordered_json state_json(const GlobalState& s, const ContractAST& contract) {
  nlohmann::ordered_json st;
  st["depth"] = s.depth;
  auto& vars = st["vars"] = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < contract.state_vars.size() && i < s.valuation.size(); ++i) {
    vars[contract.state_vars[i].name] = to_json(s.valuation[i]);
  }
  st["native"] = to_json(s.actor_balances);
  return st;
}

}  // namespace

std::string report_json(const Verdict& verdict, const std::string& property_text, const ContractAST& contract) {
  nlohmann::ordered_json out;
  out["verdict"] = to_string(verdict.kind);
  out["reason"] = verdict.reason.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(verdict.reason);
  out["property"] = property_text;
  auto& vec = out["vector"] = nlohmann::ordered_json::array();
  if (verdict.vector) {
    for (std::size_t i = 0; i < verdict.vector->states.size(); ++i) {
      vec.push_back({{"state", state_json(verdict.vector->states[i], contract)}});
      if (i < verdict.vector->calls.size()) vec.push_back({{"call", call_json(verdict.vector->calls[i])}});
    }
    out["violating_index"] = verdict.vector->violating_index;
  } else {
    out["violating_index"] = nullptr;
  }
  out["stats"] = {{"transitions", verdict.stats.transitions},
                  {"states", verdict.stats.states},
                  {"solver_calls", verdict.stats.solver_calls},
                  {"elapsed_ms", verdict.stats.elapsed_ms}};
  return out.dump(2);
}

}  // namespace cscv::engine

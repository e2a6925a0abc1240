#include "cscv/analysis/analysis.hpp"

#include <deque>
#include <json.hpp>

namespace cscv::analysis {

using frontend::ContractAST;
using frontend::ExprKind;
using frontend::ExprPtr;
using frontend::RefKind;
using frontend::Stmt;
using frontend::StmtKind;

namespace {

class Walker {
 public:
  explicit Walker(const ContractAST& c) : c_(c) {}

  NameSet reads(const ExprPtr& e) {
    NameSet out;
    add_reads(e, out);
    return out;
  }

  void add_reads(const ExprPtr& e, NameSet& out) {
    frontend::for_each_expr(e, [&](const frontend::Expr& x) {
      if ((x.kind == ExprKind::Var || x.kind == ExprKind::Index) && x.ref == RefKind::State) {
        out.insert(x.name);
      } else if (x.kind == ExprKind::Call) {
        const NameSet& v = view_reads(x.slot);
        out.insert(v.begin(), v.end());
      }
    });
  }

  const NameSet& view_reads(int fn) {
    auto it = view_reads_.find(fn);
    if (it != view_reads_.end()) return it->second;
    NameSet out;
    body_reads(c_.functions[static_cast<std::size_t>(fn)].body, out);
    return view_reads_.emplace(fn, std::move(out)).first->second;
  }

  void body_reads(const std::vector<Stmt>& body, NameSet& out) {
    for (const auto& s : body) {
      add_reads(s.expr, out);
      add_reads(s.amount, out);
      if (s.target && s.target->kind == ExprKind::Index) add_reads(s.target->args[0], out);
      body_reads(s.then_body, out);
      body_reads(s.else_body, out);
    }
  }

  void body_writes(const std::vector<Stmt>& body, NameSet& out) {
    for (const auto& s : body) {
      if (s.kind == StmtKind::Assign) out.insert(s.target->name);
      body_writes(s.then_body, out);
      body_writes(s.else_body, out);
    }
  }

  // Views called from e (transitively) whose body contains a require.
  bool calls_guarded_view(const ExprPtr& e) {
    bool found = false;
    frontend::for_each_expr(e, [&](const frontend::Expr& x) {
      if (x.kind == ExprKind::Call && view_guarded(x.slot)) found = true;
    });
    return found;
  }

  bool view_guarded(int fn) {
    auto it = view_guarded_.find(fn);
    if (it != view_guarded_.end()) return it->second;
    bool g = body_guarded(c_.functions[static_cast<std::size_t>(fn)].body);
    view_guarded_[fn] = g;
    return g;
  }

  bool body_guarded(const std::vector<Stmt>& body) {
    for (const auto& s : body) {
      if (s.kind == StmtKind::Require) return true;
      if (calls_guarded_view(s.expr) || calls_guarded_view(s.amount)) return true;
      if (s.target && s.target->kind == ExprKind::Index && calls_guarded_view(s.target->args[0])) return true;
      if (body_guarded(s.then_body) || body_guarded(s.else_body)) return true;
    }
    return false;
  }

 private:
  const ContractAST& c_;
  std::map<int, NameSet> view_reads_;
  std::map<int, bool> view_guarded_;
};

bool contains_return(const std::vector<Stmt>& body) {
  for (const auto& s : body) {
    if (s.kind == StmtKind::Return) return true;
    if (contains_return(s.then_body) || contains_return(s.else_body)) return true;
  }
  return false;
}

// Guards that can stop f anywhere: require conditions, guarded view calls, and
// the conditions of branches that return early.
void function_guards(Walker& w, const std::vector<Stmt>& body, NameSet& out) {
  auto guarded_reads = [&](const ExprPtr& e) {
    frontend::for_each_expr(e, [&](const frontend::Expr& x) {
      if (x.kind == ExprKind::Call && w.view_guarded(x.slot)) {
        const NameSet& v = w.view_reads(x.slot);
        out.insert(v.begin(), v.end());
      }
    });
  };
  for (const auto& s : body) {
    if (s.kind == StmtKind::Require) w.add_reads(s.expr, out);
    guarded_reads(s.expr);
    guarded_reads(s.amount);
    if (s.target && s.target->kind == ExprKind::Index) guarded_reads(s.target->args[0]);
    if (s.kind == StmtKind::If && (contains_return(s.then_body) || contains_return(s.else_body))) {
      w.add_reads(s.expr, out);
    }
    function_guards(w, s.then_body, out);
    function_guards(w, s.else_body, out);
  }
}

void assignment_edges(Walker& w, const std::vector<Stmt>& body, const NameSet& context,
                      DependencyGraph& g) {
  for (const auto& s : body) {
    if (s.kind == StmtKind::Assign) {
      NameSet& deps = g.edges[s.target->name];
      w.add_reads(s.expr, deps);
      if (s.target->kind == ExprKind::Index) w.add_reads(s.target->args[0], deps);
      deps.insert(context.begin(), context.end());
    } else if (s.kind == StmtKind::If) {
      NameSet inner = context;
      w.add_reads(s.expr, inner);
      assignment_edges(w, s.then_body, inner, g);
      assignment_edges(w, s.else_body, inner, g);
    }
  }
}

}  // namespace

const FunctionAccess& AccessSets::at(const std::string& fn) const {
  auto it = functions.find(fn);
  if (it == functions.end()) throw Error(ErrorKind::Resolution, "unknown function", fn);
  return it->second;
}

AccessSets access_sets(const ContractAST& contract) {
  Walker w(contract);
  AccessSets sets;
  for (const auto& f : contract.functions) {
    FunctionAccess a;
    w.body_reads(f.body, a.reads);
    w.body_writes(f.body, a.writes);
    sets.functions.emplace(f.name, std::move(a));
  }
  return sets;
}

DependencyGraph dependency_graph(const ContractAST& contract) {
  Walker w(contract);
  DependencyGraph g;
  for (const auto& f : contract.functions) {
    if (f.kind != frontend::FunctionKind::External) continue;
    NameSet guards;
    function_guards(w, f.body, guards);
    assignment_edges(w, f.body, guards, g);
  }
  return g;
}

NameSet dependency_closure(const NameSet& seeds, const DependencyGraph& graph) {
  NameSet closure = seeds;
  std::deque<std::string> work(seeds.begin(), seeds.end());
  while (!work.empty()) {
    std::string v = std::move(work.front());
    work.pop_front();
    auto it = graph.edges.find(v);
    if (it == graph.edges.end()) continue;
    for (const auto& w : it->second) {
      if (closure.insert(w).second) work.push_back(w);
    }
  }
  return closure;
}

NameSet dependency_closure(const NameSet& seeds, const ContractAST& contract) {
  return dependency_closure(seeds, dependency_graph(contract));
}

std::size_t shared_variable_count(const std::string& f, const std::string& g, const AccessSets& sets) {
  if (f == g) throw Error(ErrorKind::SameFunction, "shared count needs two distinct functions", f);
  const auto& a = sets.at(f);
  const auto& b = sets.at(g);
  NameSet touched_f = a.reads;
  touched_f.insert(a.writes.begin(), a.writes.end());
  std::size_t n = 0;
  for (const auto& v : touched_f) {
    if (b.reads.count(v) || b.writes.count(v)) ++n;
  }
  return n;
}

NameSet expr_reads(const ExprPtr& e, const ContractAST& contract) {
  Walker w(contract);
  return w.reads(e);
}

std::string dependencies_json(const ContractAST& contract) {
  nlohmann::json out;
  out["access"] = nlohmann::json::object();
  for (const auto& [fn, a] : access_sets(contract).functions) {
    out["access"][fn] = {{"reads", a.reads}, {"writes", a.writes}};
  }
  out["edges"] = nlohmann::json::array();
  for (const auto& [v, ws] : dependency_graph(contract).edges) {
    for (const auto& w : ws) out["edges"].push_back({v, w});
  }
  return out.dump(2);
}

}  // namespace cscv::analysis

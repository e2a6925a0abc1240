#include "cscv/optimization/optimize.hpp"

#include <algorithm>

#include "cscv/analysis/analysis.hpp"
#include "cscv/engine/executor.hpp"

namespace cscv::optimization {

using frontend::ContractAST;
using frontend::Expr;
using frontend::ExprKind;
using frontend::ExprPtr;
using frontend::Stmt;

namespace {

ExprPtr replace_old(const ExprPtr& e, const std::vector<ExprPtr>& captures) {
  if (e->kind == ExprKind::Old) {
    for (std::size_t i = 0; i < captures.size(); ++i) {
      if (frontend::expr_equal(captures[i], e->args[0])) {
        auto c = std::make_shared<Expr>();
        c->kind = ExprKind::Captured;
        c->loc = e->loc;
        c->slot = static_cast<int>(i);
        c->name = captures[i]->name;
        return c;
      }
    }
    throw std::logic_error("old() term missing from capture list");
  }
  if (e->args.empty()) return e;
  auto copy = std::make_shared<Expr>(*e);
  for (auto& a : copy->args) a = replace_old(a, captures);
  return copy;
}

ExprPtr substitute_calls(const ExprPtr& e, const std::map<int, Value>& values) {
  if (!e) return e;
  if (e->kind == ExprKind::Call) {
    auto it = values.find(e->slot);
    if (it != values.end()) return frontend::make_value(it->second, e->loc);
  }
  if (e->args.empty()) return e;
  auto copy = std::make_shared<Expr>(*e);
  for (auto& a : copy->args) a = substitute_calls(a, values);
  return copy;
}

void substitute_body(std::vector<Stmt>& body, const std::map<int, Value>& values) {
  for (auto& s : body) {
    s.expr = substitute_calls(s.expr, values);
    s.target = substitute_calls(s.target, values);
    s.amount = substitute_calls(s.amount, values);
    substitute_body(s.then_body, values);
    substitute_body(s.else_body, values);
  }
}

bool uses_msg(const ContractAST& c, const std::vector<Stmt>& body, std::set<int>& visiting) {
  bool found = false;
  frontend::for_each_expr(body, [&](const Expr& x) {
    if (x.kind == ExprKind::MsgSender || x.kind == ExprKind::MsgValue) found = true;
    if (x.kind == ExprKind::Call && visiting.insert(x.slot).second) {
      if (uses_msg(c, c.functions[static_cast<std::size_t>(x.slot)].body, visiting)) found = true;
    }
  });
  return found;
}

}  // namespace

InstrumentedContract spatialize(const frontend::TemporalProperty& property, const ContractAST& contract) {
  if (property.form != frontend::TemporalForm::Always) {
    throw Error(ErrorKind::UnsupportedForm, "only `always` properties can be spatialized", property.text);
  }
  InstrumentedContract ic;
  ic.base = contract;
  ic.pre_capture = frontend::old_terms(property);
  ic.postcondition = replace_old(property.pred, ic.pre_capture);
  for (const auto& f : contract.external_names()) ic.checks[f] = ic.postcondition;
  ic.property_text = property.text;
  return ic;
}

std::vector<std::string> constant_candidates(const ContractAST& contract) {
  auto sets = analysis::access_sets(contract);
  analysis::NameSet written;
  for (const auto& f : contract.external_names()) {
    const auto& w = sets.at(f).writes;
    written.insert(w.begin(), w.end());
  }
  auto graph = analysis::dependency_graph(contract);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < contract.functions.size(); ++i) {
    const auto& g = contract.functions[i];
    if (g.kind != frontend::FunctionKind::View || !g.params.empty()) continue;
    std::set<int> visiting{static_cast<int>(i)};
    if (uses_msg(contract, g.body, visiting)) continue;
    auto closure = analysis::dependency_closure(sets.at(g.name).reads, graph);
    bool disjoint = std::none_of(closure.begin(), closure.end(), [&](const std::string& v) { return written.count(v) > 0; });
    if (disjoint) out.push_back(g.name);
  }
  return out;
}

ConstantizeResult constantize(const ContractAST& contract, const context::Context& ctx,
                              const frontend::BlockSnapshot& snapshot, const context::ContextOptions& options) {
  ConstantizeResult result;
  result.contract = contract;
  auto sets = analysis::access_sets(contract);
  engine::ExecConfig cfg{snapshot.actors, snapshot.attacker, 0};

  std::map<int, Value> values;
  for (const auto& name : constant_candidates(contract)) {
    const auto& reads = sets.at(name).reads;
    std::vector<frontend::SlotValue> valuation;
    for (const auto& var : contract.state_vars) {
      auto it = ctx.evaluation.valuation.find(var.name);
      if (it != ctx.evaluation.valuation.end()) {
        valuation.push_back(it->second);
      } else if (reads.count(var.name)) {
        valuation.push_back(context::snapshot_value(var, snapshot, options));
      } else {
        valuation.push_back(context::zero_value(var.type, snapshot.actors));
      }
    }
    int idx = contract.find_function(name);
    if (auto v = engine::evaluate_view(contract, idx, valuation, cfg)) {
      values.emplace(idx, *v);
      result.substituted.emplace(name, *v);
    }
  }
  if (values.empty()) return result;
  for (auto& f : result.contract.functions) substitute_body(f.body, values);
  return result;
}

namespace {

void boost(std::vector<std::string>& ranking, const Heuristic& h) {
  std::vector<std::string> matched;
  for (const auto& f : ranking) {
    if (h.matches(f)) matched.push_back(f);
  }
  for (const auto& m : matched) {
    auto it = std::find(ranking.begin(), ranking.end(), m);
    auto pos = static_cast<long>(it - ranking.begin());
    long target = std::clamp(pos - static_cast<long>(h.delta), 0L, static_cast<long>(ranking.size()) - 1);
    ranking.erase(it);
    ranking.insert(ranking.begin() + target, m);
  }
}

}  // namespace

context::Context apply_heuristics(const context::Context& ctx, const HeuristicSet& h) {
  if (h.selected.empty()) return ctx;
  context::Context out = ctx;
  out.heuristics = h;
  for (const auto& heuristic : h.selected) {
    if (heuristic.kind != HeuristicKind::PriorityBoost) continue;
    boost(out.relevance.initial, heuristic);
    for (auto& [f, ranking] : out.relevance.ranking) boost(ranking, heuristic);
  }
  return out;
}

}  // namespace cscv::optimization

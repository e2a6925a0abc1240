#include "cscv/context/context.hpp"

#include <algorithm>

#include "cscv/analysis/analysis.hpp"
#include "cscv/jsonio.hpp"

namespace cscv::context {

using frontend::BlockSnapshot;
using frontend::ContractAST;
using frontend::StateVar;
using frontend::TemporalProperty;

const std::vector<std::string>& RelevanceFunction::of(const std::string& f) const {
  auto it = ranking.find(f);
  if (it == ranking.end()) throw Error(ErrorKind::Resolution, "no ranking for function", f);
  return it->second;
}

bool operator==(const Context& a, const Context& b) {
  return a.evaluation == b.evaluation && a.relevance == b.relevance && a.heuristics == b.heuristics &&
         a.property.form == b.property.form && a.property.text == b.property.text &&
         frontend::expr_equal(a.property.pred, b.property.pred);
}

SlotValue zero_value(VarType type, const std::vector<Address>& actors) {
  switch (type) {
    case VarType::Int: return Value{Int(0)};
    case VarType::Bool: return Value{false};
    case VarType::Address: return Value{Address("0x0")};
    case VarType::Map: {
      MapValue m;
      for (const auto& a : actors) m.emplace(a, 0);
      return m;
    }
  }
  return Value{Int(0)};
}

SlotValue snapshot_value(const StateVar& var, const BlockSnapshot& snapshot, const ContextOptions& options) {
  auto it = snapshot.state.find(var.name);
  if (var.type == VarType::Map) {
    MapValue m = std::get<MapValue>(zero_value(VarType::Map, snapshot.actors));
    if (it != snapshot.state.end()) {
      for (const auto& [k, v] : std::get<MapValue>(it->second)) m[k] = v;
    }
    return m;
  }
  if (it != snapshot.state.end()) return it->second;
  if (var.init) return *var.init;
  if (options.default_zero) return zero_value(var.type, snapshot.actors);
  throw Error(ErrorKind::MissingValue, "no value for state variable '" + var.name + "'", var.name);
}

EvaluationFunction build_evaluation_function(const TemporalProperty& property, const ContractAST& contract,
                                             const BlockSnapshot& snapshot, const ContextOptions& options) {
  analysis::NameSet seeds;
  for (int slot : frontend::property_vars(property)) {
    seeds.insert(contract.state_vars[static_cast<std::size_t>(slot)].name);
  }
  EvaluationFunction ev;
  ev.block = snapshot.block;
  ev.domain = analysis::dependency_closure(seeds, contract);
  for (const auto& var : contract.state_vars) {
    if (ev.domain.count(var.name)) ev.valuation.emplace(var.name, snapshot_value(var, snapshot, options));
  }
  return ev;
}

namespace {

template <typename Key>
std::vector<std::string> rank(std::vector<std::string> names, Key key) {
  std::sort(names.begin(), names.end(), [&](const std::string& a, const std::string& b) {
    auto ka = key(a), kb = key(b);
    if (ka != kb) return ka > kb;
    return a < b;
  });
  return names;
}

}  // namespace

RelevanceFunction build_relevance_function(const ContractAST& contract, const EvaluationFunction& evaluation) {
  auto fs = contract.external_names();
  if (fs.empty()) throw Error(ErrorKind::NoExternalFunctions, "contract has no external functions", contract.name);
  auto sets = analysis::access_sets(contract);

  RelevanceFunction rel;
  for (const auto& f : fs) {
    std::vector<std::string> others;
    for (const auto& g : fs) {
      if (g != f) others.push_back(g);
    }
    rel.ranking[f] = rank(others, [&](const std::string& g) { return analysis::shared_variable_count(f, g, sets); });
  }
  rel.initial = rank(fs, [&](const std::string& f) {
    const auto& a = sets.at(f);
    std::size_t n = 0;
    for (const auto& v : evaluation.domain) {
      if (a.reads.count(v) || a.writes.count(v)) ++n;
    }
    return n;
  });
  return rel;
}

Context build_context(const TemporalProperty& property, const ContractAST& contract, const BlockSnapshot& snapshot,
                      optimization::HeuristicSet heuristics, const ContextOptions& options) {
  Context ctx;
  ctx.evaluation = build_evaluation_function(property, contract, snapshot, options);
  ctx.relevance = build_relevance_function(contract, ctx.evaluation);
  ctx.heuristics = std::move(heuristics);
  ctx.property = property;
  return ctx;
}

std::string context_json(const Context& ctx) {
  nlohmann::ordered_json out;
  out["property"] = ctx.property.text;
  out["block"] = ctx.evaluation.block;
  out["domain"] = ctx.evaluation.domain;
  auto& val = out["valuation"] = nlohmann::ordered_json::object();
  for (const auto& [name, v] : ctx.evaluation.valuation) val[name] = to_json(v);
  out["initial_ranking"] = ctx.relevance.initial;
  auto& rel = out["relevance"] = nlohmann::ordered_json::object();
  for (const auto& [f, list] : ctx.relevance.ranking) rel[f] = list;
  auto& hs = out["heuristics"] = nlohmann::ordered_json::array();
  for (const auto& h : ctx.heuristics.selected) hs.push_back(h.id);
  return out.dump(2);
}

}  // namespace cscv::context

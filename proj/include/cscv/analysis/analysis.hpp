#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>

#include "cscv/frontend/ast.hpp"

namespace cscv::analysis {

using NameSet = std::set<std::string>;

struct FunctionAccess {
  NameSet reads;
  NameSet writes;
  bool operator==(const FunctionAccess&) const = default;
};

// Per-function state access, views inlined transitively. Maps count as a whole.
struct AccessSets {
  std::map<std::string, FunctionAccess> functions;

  const FunctionAccess& at(const std::string& fn) const;
  bool operator==(const AccessSets&) const = default;
};

// v -> w: the value of v after some function may depend on w.
struct DependencyGraph {
  std::map<std::string, NameSet> edges;

  bool operator==(const DependencyGraph&) const = default;
};

AccessSets access_sets(const frontend::ContractAST& contract);
DependencyGraph dependency_graph(const frontend::ContractAST& contract);

NameSet dependency_closure(const NameSet& seeds, const DependencyGraph& graph);
NameSet dependency_closure(const NameSet& seeds, const frontend::ContractAST& contract);

// |(reads(f) ∪ writes(f)) ∩ (reads(g) ∪ writes(g))|. Throws SameFunction when f == g.
std::size_t shared_variable_count(const std::string& f, const std::string& g, const AccessSets& sets);

// State variables read by an expression, view calls inlined.
NameSet expr_reads(const frontend::ExprPtr& e, const frontend::ContractAST& contract);

// {"access": {fn: {"reads": [...], "writes": [...]}}, "edges": [[v, w], ...]}
std::string dependencies_json(const frontend::ContractAST& contract);

}  // namespace cscv::analysis

#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "cscv/frontend/ast.hpp"
#include "cscv/frontend/property.hpp"
#include "cscv/frontend/snapshot.hpp"
#include "cscv/optimization/heuristics.hpp"

namespace cscv::context {

using frontend::SlotValue;

struct ContextOptions {
  bool default_zero = false;  // absent, uninitialized variables read as zero
};

struct EvaluationFunction {
  std::uint64_t block = 0;
  std::set<std::string> domain;
  std::map<std::string, SlotValue> valuation;
  bool operator==(const EvaluationFunction&) const = default;
};

struct RelevanceFunction {
  std::map<std::string, std::vector<std::string>> ranking;  // f -> F \ {f}
  std::vector<std::string> initial;                           // used at depth 0
  bool operator==(const RelevanceFunction&) const = default;

  const std::vector<std::string>& of(const std::string& f) const;
};

struct Context {
  EvaluationFunction evaluation;
  RelevanceFunction relevance;
  optimization::HeuristicSet heuristics;
  frontend::TemporalProperty property;
};

bool operator==(const Context& a, const Context& b);

EvaluationFunction build_evaluation_function(const frontend::TemporalProperty& property,
                                             const frontend::ContractAST& contract,
                                             const frontend::BlockSnapshot& snapshot,
                                             const ContextOptions& options = {});

RelevanceFunction build_relevance_function(const frontend::ContractAST& contract,
                                           const EvaluationFunction& evaluation);

Context build_context(const frontend::TemporalProperty& property, const frontend::ContractAST& contract,
                      const frontend::BlockSnapshot& snapshot, optimization::HeuristicSet heuristics,
                      const ContextOptions& options = {});

// Value of a state variable taken from the snapshot, else its initializer,
// else zero under default_zero. Maps get an entry for every actor.
// Throws MissingValue otherwise.
SlotValue snapshot_value(const frontend::StateVar& var, const frontend::BlockSnapshot& snapshot,
                         const ContextOptions& options);

// The declared type's zero: 0, false, 0x0 or an all-zero map over actors.
SlotValue zero_value(VarType type, const std::vector<Address>& actors);

std::string context_json(const Context& ctx);

}  // namespace cscv::context

#pragma once

#include <map>
#include <string>
#include <vector>

#include "cscv/context/context.hpp"
#include "cscv/frontend/ast.hpp"
#include "cscv/frontend/property.hpp"
#include "cscv/frontend/snapshot.hpp"
#include "cscv/optimization/heuristics.hpp"

namespace cscv::optimization {

// The contract with the property compiled into per-function checks: values of
// `pre_capture` are recorded when a top-level invocation starts, and
// `postcondition` (Captured nodes index into pre_capture) must hold when it ends.
struct InstrumentedContract {
  frontend::ContractAST base;
  std::vector<frontend::ExprPtr> pre_capture;
  frontend::ExprPtr postcondition;
  std::map<std::string, frontend::ExprPtr> checks;  // f -> postcondition, for every f in F
  std::string property_text;
};

// Throws UnsupportedForm unless the property is `always pred`.
InstrumentedContract spatialize(const frontend::TemporalProperty& property, const frontend::ContractAST& contract);

struct ConstantizeResult {
  frontend::ContractAST contract;
  std::map<std::string, Value> substituted;  // view name -> literal
};

// Replaces calls to parameterless views whose read closure no external
// function writes. Values come from the evaluation function, falling back to
// the snapshot, initializers and (with default_zero) zero.
ConstantizeResult constantize(const frontend::ContractAST& contract, const context::Context& ctx,
                              const frontend::BlockSnapshot& snapshot, const context::ContextOptions& options = {});

// Views eligible for constantization, regardless of whether they evaluate.
std::vector<std::string> constant_candidates(const frontend::ContractAST& contract);

// Records the heuristics in the context and applies priority boosts to every ranking.
context::Context apply_heuristics(const context::Context& ctx, const HeuristicSet& h);

}  // namespace cscv::optimization

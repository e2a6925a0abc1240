#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cscv/engine/state.hpp"
#include "cscv/optimization/optimize.hpp"
#include "cscv/solver/term.hpp"

namespace cscv::engine {

struct Invocation {
  std::string function;
  Address sender;
  Int value = 0;
  std::vector<Value> args;
  std::vector<Invocation> reentry;  // consumed in order at `call`s to the attacker

  bool operator==(const Invocation&) const = default;
};

std::string format_invocation(const Invocation& inv);

struct ExecConfig {
  std::vector<Address> actors;
  Address attacker;
  int reentry_depth = 1;
};

struct Branch {
  solver::TermPtr constraint;  // the condition as it held on this run
  bool flippable = true;       // false for assumptions (concretized indices, trap guards)
};

struct SymbolicTrace {
  std::vector<std::pair<std::string, solver::Sort>> symbols;
  solver::Model inputs;  // concrete value of every symbol on this run
  std::vector<Branch> branches;
  solver::TermPtr postcondition;  // symbolic check at exit; null unless the run completed
  std::set<std::string> reads;
  std::set<std::string> writes;
  int attacker_calls = 0;  // top-level `call`s that reached the attacker

  std::vector<solver::TermPtr> path_constraints() const;
};

enum class Outcome { Ok, RequireFailed, Trap, PostconditionViolated };

std::string_view to_string(Outcome o);

struct StepResult {
  GlobalState post;  // the input state again unless the run committed
  SymbolicTrace trace;
  Outcome outcome = Outcome::Ok;
};

// Symbol names for an invocation's inputs: "amount", "msg.sender", "msg.value",
// and "r<k>.amount", "r<k>.msg.value" for the k-th reentrant invocation.
std::string input_symbol(int reentry_index, const std::string& name);

StepResult step_concolic(const GlobalState& state, const Invocation& inv,
                         const optimization::InstrumentedContract& instrumented, const ExecConfig& config);

// Evaluates a parameterless view against a state. Empty on trap or failed require.
std::optional<Value> evaluate_view(const frontend::ContractAST& contract, int function,
                                   const std::vector<SlotValue>& valuation, const ExecConfig& config);

}  // namespace cscv::engine

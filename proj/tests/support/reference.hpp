#pragma once

// Test-side oracles. Nothing here calls into the engine, optimization or
// solver modules; they only share the AST and plain data types.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cscv/engine/executor.hpp"
#include "cscv/frontend/ast.hpp"
#include "cscv/frontend/property.hpp"
#include "cscv/frontend/snapshot.hpp"
#include "cscv/solver/term.hpp"

namespace cscv::testing {

using engine::Invocation;
using frontend::SlotValue;

struct RefState {
  std::vector<SlotValue> vars;  // declaration order
  std::map<Address, Int> native;
};

// Zero map entries and zero native balances carry no information.
std::string normalize(const RefState& s);
bool same(const RefState& a, const RefState& b);

RefState from_global(const engine::GlobalState& g);

// Plain tree-walking interpreter. Any require failure or trap reverts the
// whole transaction, nested reentries included.
class Reference {
 public:
  Reference(const frontend::ContractAST& contract, Address attacker, int reentry_depth = 1)
      : c_(contract), attacker_(std::move(attacker)), reentry_depth_(reentry_depth) {}

  // Post-state, or nullopt on revert. `attacker_calls` receives the number of
  // top-level payouts to the attacker.
  std::optional<RefState> run(const RefState& s, const Invocation& inv, int* attacker_calls = nullptr) const;

  // Evaluates pred with old(x) read from `pre`. A trap counts as a failure.
  bool holds(const frontend::ExprPtr& pred, const RefState& pre, const RefState& post) const;

  const frontend::ContractAST& contract() const { return c_; }
  const Address& attacker() const { return attacker_; }

 private:
  const frontend::ContractAST& c_;
  Address attacker_;
  int reentry_depth_;
};

// Index (1-based, counting committed transitions) of the first post-state
// where ALWAYS(pred) fails, evaluating every top-level post-state.
struct MonitorResult {
  std::optional<std::size_t> first_failure;
  std::size_t committed = 0;
};
MonitorResult monitor(const Reference& ref, const frontend::TemporalProperty& p, const RefState& s0,
                      const std::vector<Invocation>& trace);

struct OracleBounds {
  int depth = 3;
  Int arg_lo = 0;
  Int arg_hi = 8;
  int reentry_depth = 1;
};

struct OracleResult {
  bool violated = false;
  std::size_t min_depth = 0;
  std::vector<Invocation> witness;
  RefState violating;
  std::uint64_t runs = 0;
  std::size_t states = 0;
};

// Breadth-first enumeration of every invocation sequence within the bounds:
// all external functions, senders from the actors, arguments in the integer
// range (actors for addresses), at most one reentrant invocation by the
// attacker at a payout to the attacker.
OracleResult brute_force(const frontend::ContractAST& contract, const frontend::TemporalProperty& p,
                         const frontend::BlockSnapshot& snapshot, const RefState& s0, const OracleBounds& bounds);

// Independent evaluator for constraint terms; nullopt on division by zero.
std::optional<Value> eval_term(const solver::Term& t, const solver::Model& model);
bool all_true(const std::vector<solver::TermPtr>& terms, const solver::Model& model);

}  // namespace cscv::testing

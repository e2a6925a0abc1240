#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cscv/context/context.hpp"
#include "cscv/frontend/ast.hpp"
#include "cscv/frontend/snapshot.hpp"

namespace cscv::engine {

using frontend::SlotValue;

struct GlobalState {
  std::vector<SlotValue> valuation;  // one entry per state variable, declaration order
  std::map<Address, Int> actor_balances;
  int depth = 0;
};

// Canonical form: variables in declaration order, map entries in address
// order with zero entries dropped, then balances. Depth is not part of it.
std::string canonical_serialization(const GlobalState& s);
std::uint64_t canonical_hash(const GlobalState& s);
bool same_state(const GlobalState& a, const GlobalState& b);

// Domain variables take the evaluation function's values; the rest take their
// initializer or zero. Maps cover every actor.
GlobalState initial_state(const context::Context& ctx, const frontend::ContractAST& contract,
                          const frontend::BlockSnapshot& snapshot);

const SlotValue& lookup(const GlobalState& s, const frontend::ContractAST& contract, const std::string& name);

}  // namespace cscv::engine

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "cscv/frontend/ast.hpp"

namespace cscv::frontend {

using SlotValue = std::variant<Value, MapValue>;

// Valuation of a contract at one block. Scalars missing from the file are
// absent from `state`; map variables are always present (missing keys read 0).
struct BlockSnapshot {
  std::uint64_t block = 0;
  std::map<std::string, SlotValue> state;
  std::vector<Address> actors;
  Address attacker;
  std::map<Address, Int> native_balances;  // optional "balances" key
};

BlockSnapshot parse_snapshot(std::string_view source, const ContractAST& contract);

}  // namespace cscv::frontend

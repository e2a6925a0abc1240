#pragma once

#include <string>
#include <string_view>

#include "cscv/frontend/ast.hpp"
#include "cscv/frontend/property.hpp"
#include "cscv/frontend/snapshot.hpp"

namespace cscv::frontend {

// Parses and validates an MCL contract. The returned AST is fully resolved:
// every Var/Index node carries its state or parameter slot and every Call its
// callee index.
ContractAST parse_contract(std::string_view source);

// Parses `always <pred>` (or `eventually <pred>`, which only the spatializer
// rejects) and binds it to the contract's state variables.
TemporalProperty parse_property(std::string_view source, const ContractAST& contract);

// Pretty printers. print_contract output re-parses to a structurally equal AST.
std::string print_contract(const ContractAST& contract);
std::string print_expr(const ExprPtr& e, const ContractAST* contract = nullptr);
std::string print_property(const TemporalProperty& p);

}  // namespace cscv::frontend

#pragma once

#include <set>
#include <string>
#include <vector>

#include "cscv/frontend/ast.hpp"

namespace cscv::frontend {

enum class TemporalForm { Always, Eventually };

// A temporal property bound to one contract. `pred` may contain Old and
// Attacker nodes; Var/Index nodes refer to state slots.
struct TemporalProperty {
  TemporalForm form = TemporalForm::Always;
  ExprPtr pred;
  std::string text;
};

// State variable slots referenced anywhere in the predicate (including under old()).
std::set<int> property_vars(const TemporalProperty& p);

// Distinct lvalues appearing under old(), in first-occurrence order.
std::vector<ExprPtr> old_terms(const TemporalProperty& p);

}  // namespace cscv::frontend

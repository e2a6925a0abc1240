#include "cscv/engine/state.hpp"

#include <sstream>

namespace cscv::engine {

std::string canonical_serialization(const GlobalState& s) {
  std::ostringstream os;
  for (const auto& slot : s.valuation) {
    if (const auto* m = std::get_if<MapValue>(&slot)) {
      os << '{';
      for (const auto& [k, v] : *m) {
        if (v != 0) os << k.str() << ':' << v.str() << ',';
      }
      os << '}';
    } else {
      const Value& v = std::get<Value>(slot);
      os << v.index() << format_value(v);
    }
    os << ';';
  }
  os << '|';
  for (const auto& [a, b] : s.actor_balances) os << a.str() << ':' << b.str() << ',';
  return os.str();
}

std::uint64_t canonical_hash(const GlobalState& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canonical_serialization(s)) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

bool same_state(const GlobalState& a, const GlobalState& b) {
  return canonical_serialization(a) == canonical_serialization(b);
}

GlobalState initial_state(const context::Context& ctx, const frontend::ContractAST& contract,
                          const frontend::BlockSnapshot& snapshot) {
  GlobalState s;
  for (const auto& var : contract.state_vars) {
    auto it = ctx.evaluation.valuation.find(var.name);
    if (it != ctx.evaluation.valuation.end()) {
      SlotValue v = it->second;
      if (auto* m = std::get_if<MapValue>(&v)) {
        for (const auto& a : snapshot.actors) m->emplace(a, 0);
      }
      s.valuation.push_back(std::move(v));
    } else if (var.init) {
      s.valuation.emplace_back(*var.init);
    } else {
      s.valuation.push_back(context::zero_value(var.type, snapshot.actors));
    }
  }
  for (const auto& a : snapshot.actors) {
    auto it = snapshot.native_balances.find(a);
    s.actor_balances[a] = it == snapshot.native_balances.end() ? Int(0) : it->second;
  }
  return s;
}

const SlotValue& lookup(const GlobalState& s, const frontend::ContractAST& contract, const std::string& name) {
  int slot = contract.find_state(name);
  if (slot < 0) throw Error(ErrorKind::UnknownVariable, "unknown state variable '" + name + "'", name);
  return s.valuation.at(static_cast<std::size_t>(slot));
}

}  // namespace cscv::engine

#include "cscv/jsonio.hpp"

#include <cstdint>
#include <limits>

namespace cscv {

nlohmann::ordered_json to_json(const Int& v) {
  if (v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max()) {
    return static_cast<std::int64_t>(v);
  }
  return v.str();
}

nlohmann::ordered_json to_json(const Value& v) {
  if (auto* i = std::get_if<Int>(&v)) return to_json(*i);
  if (auto* b = std::get_if<bool>(&v)) return *b;
  return std::get<Address>(v).str();
}

nlohmann::ordered_json to_json(const MapValue& m) {
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  for (const auto& [k, v] : m) out[k.str()] = to_json(v);
  return out;
}

nlohmann::ordered_json to_json(const frontend::SlotValue& v) {
  if (auto* m = std::get_if<MapValue>(&v)) return to_json(*m);
  return to_json(std::get<Value>(v));
}

}  // namespace cscv

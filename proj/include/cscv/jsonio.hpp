#pragma once

#include <json.hpp>

#include "cscv/frontend/snapshot.hpp"
#include "cscv/value.hpp"

namespace cscv {

// Ints that fit in 64 bits become JSON numbers, larger ones decimal strings.
nlohmann::ordered_json to_json(const Int& v);
nlohmann::ordered_json to_json(const Value& v);
nlohmann::ordered_json to_json(const MapValue& m);
nlohmann::ordered_json to_json(const frontend::SlotValue& v);

}  // namespace cscv

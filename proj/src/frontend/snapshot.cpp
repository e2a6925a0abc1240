#include "cscv/frontend/snapshot.hpp"

#include <algorithm>
#include <cctype>

#include <json.hpp>

namespace cscv::frontend {

namespace {

using nlohmann::json;

Int json_int(const json& j, const std::string& what) {
  if (j.is_number_integer()) {
    return j.is_number_unsigned() ? Int(j.get<std::uint64_t>()) : Int(j.get<std::int64_t>());
  }
  // Large values may be given as decimal strings.
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    bool ok = !s.empty();
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!(std::isdigit(static_cast<unsigned char>(s[i])) || (i == 0 && s[i] == '-' && s.size() > 1))) ok = false;
    }
    if (ok) return Int(s);
  }
  throw Error(ErrorKind::TypeMismatch, "expected integer for '" + what + "'", what);
}

Address json_address(const json& j, const std::string& what) {
  if (!j.is_string()) throw Error(ErrorKind::TypeMismatch, "expected address for '" + what + "'", what);
  const auto& s = j.get_ref<const std::string&>();
  if (!Address::well_formed(s)) throw Error(ErrorKind::MalformedAddress, "malformed address '" + s + "'", s);
  return Address(s);
}

}  // namespace

BlockSnapshot parse_snapshot(std::string_view source, const ContractAST& contract) {
  json doc;
  try {
    doc = json::parse(source);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Syntax, std::string("snapshot is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorKind::Syntax, "snapshot must be a JSON object");

  BlockSnapshot snap;
  if (doc.contains("block")) {
    const auto& b = doc["block"];
    if (!b.is_number_unsigned() && !(b.is_number_integer() && b.get<std::int64_t>() >= 0)) {
      throw Error(ErrorKind::TypeMismatch, "block must be a non-negative integer", "block");
    }
    snap.block = b.get<std::uint64_t>();
  }

  for (std::size_t i = 0; i < contract.state_vars.size(); ++i) {
    if (contract.state_vars[i].type == VarType::Map) snap.state[contract.state_vars[i].name] = MapValue{};
  }

  if (doc.contains("state")) {
    const auto& st = doc["state"];
    if (!st.is_object()) throw Error(ErrorKind::Syntax, "'state' must be an object");
    for (const auto& [name, val] : st.items()) {
      int slot = contract.find_state(name);
      if (slot < 0) throw Error(ErrorKind::UnknownVariable, "snapshot names unknown variable '" + name + "'", name);
      switch (contract.state_vars[slot].type) {
        case VarType::Int:
          snap.state[name] = Value{json_int(val, name)};
          break;
        case VarType::Bool:
          if (!val.is_boolean()) throw Error(ErrorKind::TypeMismatch, "expected bool for '" + name + "'", name);
          snap.state[name] = Value{val.get<bool>()};
          break;
        case VarType::Address:
          snap.state[name] = Value{json_address(val, name)};
          break;
        case VarType::Map: {
          if (!val.is_object()) throw Error(ErrorKind::TypeMismatch, "expected object for map '" + name + "'", name);
          MapValue m;
          for (const auto& [key, entry] : val.items()) {
            if (!Address::well_formed(key)) {
              throw Error(ErrorKind::MalformedAddress, "malformed address '" + key + "'", key);
            }
            m[Address(key)] = json_int(entry, name);
          }
          snap.state[name] = std::move(m);
          break;
        }
      }
    }
  }

  if (!doc.contains("actors") || !doc["actors"].is_array()) {
    throw Error(ErrorKind::Syntax, "snapshot needs an 'actors' array");
  }
  for (const auto& a : doc["actors"]) {
    Address addr = json_address(a, "actors");
    if (std::find(snap.actors.begin(), snap.actors.end(), addr) != snap.actors.end()) {
      throw Error(ErrorKind::Input, "duplicate actor " + addr.str(), addr.str());
    }
    snap.actors.push_back(addr);
  }
  if (!doc.contains("attacker")) throw Error(ErrorKind::Syntax, "snapshot needs an 'attacker'");
  snap.attacker = json_address(doc["attacker"], "attacker");
  if (std::find(snap.actors.begin(), snap.actors.end(), snap.attacker) == snap.actors.end()) {
    throw Error(ErrorKind::AttackerNotInActors, "attacker " + snap.attacker.str() + " is not an actor",
                snap.attacker.str());
  }

  if (doc.contains("balances")) {
    const auto& b = doc["balances"];
    if (!b.is_object()) throw Error(ErrorKind::TypeMismatch, "'balances' must be an object", "balances");
    for (const auto& [key, entry] : b.items()) {
      if (!Address::well_formed(key)) throw Error(ErrorKind::MalformedAddress, "malformed address '" + key + "'", key);
      snap.native_balances[Address(key)] = json_int(entry, "balances");
    }
  }
  return snap;
}

}  // namespace cscv::frontend

#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>

#include <boost/multiprecision/cpp_int.hpp>

namespace cscv {

using Int = boost::multiprecision::cpp_int;

// Addresses are opaque tokens of the form 0x[0-9A-Fa-f]{1,8}; only equality
// and a total order (for canonical serialization) are meaningful.
class Address {
 public:
  Address() = default;
  explicit Address(std::string token) : token_(std::move(token)) {}

  const std::string& str() const noexcept { return token_; }

  static bool well_formed(std::string_view token);

  auto operator<=>(const Address&) const = default;

 private:
  std::string token_;
};

enum class VarType { Int, Bool, Address, Map };

std::string_view to_string(VarType t);

using Value = std::variant<Int, bool, Address>;
using MapValue = std::map<Address, Int>;

std::string format_value(const Value& v);
VarType type_of(const Value& v);

// Floor division (rounds toward negative infinity). Divisor must be non-zero.
Int floor_div(const Int& a, const Int& b);

// Reduce into [0, 2^256).
Int wrap256(const Int& v);

}  // namespace cscv

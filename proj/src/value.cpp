#include "cscv/value.hpp"

#include <cctype>

#include "cscv/error.hpp"

namespace cscv {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Syntax: return "SyntaxError";
    case ErrorKind::Resolution: return "ResolutionError";
    case ErrorKind::Kind: return "KindError";
    case ErrorKind::Type: return "TypeError";
    case ErrorKind::UnknownVariable: return "UnknownVariable";
    case ErrorKind::NestedOld: return "NestedOld";
    case ErrorKind::TypeMismatch: return "TypeMismatch";
    case ErrorKind::MalformedAddress: return "MalformedAddress";
    case ErrorKind::AttackerNotInActors: return "AttackerNotInActors";
    case ErrorKind::MissingValue: return "MissingValue";
    case ErrorKind::SameFunction: return "SameFunction";
    case ErrorKind::NoExternalFunctions: return "NoExternalFunctions";
    case ErrorKind::UnsupportedForm: return "UnsupportedForm";
    case ErrorKind::DomainTooLarge: return "DomainTooLarge";
    case ErrorKind::BackendUnavailable: return "BackendUnavailable";
    case ErrorKind::ReplayDivergence: return "ReplayDivergence";
    case ErrorKind::Input: return "InputError";
  }
  return "Error";
}

namespace {

std::string compose(ErrorKind kind, const std::string& message,
                    const std::optional<SourceLoc>& loc) {
  std::string out(to_string(kind));
  if (loc) {
    out += " at " + std::to_string(loc->line) + ":" + std::to_string(loc->col);
  }
  out += ": " + message;
  return out;
}

}  // namespace

Error::Error(ErrorKind kind, std::string message, std::string subject,
             std::optional<SourceLoc> loc)
    : std::runtime_error(compose(kind, message, loc)),
      kind_(kind),
      subject_(std::move(subject)),
      loc_(loc) {}

bool Address::well_formed(std::string_view token) {
  if (token.size() < 3 || token.size() > 10) return false;
  if (token[0] != '0' || token[1] != 'x') return false;
  for (std::size_t i = 2; i < token.size(); ++i) {
    if (!std::isxdigit(static_cast<unsigned char>(token[i]))) return false;
  }
  return true;
}

std::string_view to_string(VarType t) {
  switch (t) {
    case VarType::Int: return "int";
    case VarType::Bool: return "bool";
    case VarType::Address: return "address";
    case VarType::Map: return "map<address, int>";
  }
  return "?";
}

std::string format_value(const Value& v) {
  if (auto* i = std::get_if<Int>(&v)) return i->str();
  if (auto* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
  return std::get<Address>(v).str();
}

VarType type_of(const Value& v) {
  if (std::holds_alternative<Int>(v)) return VarType::Int;
  if (std::holds_alternative<bool>(v)) return VarType::Bool;
  return VarType::Address;
}

Int floor_div(const Int& a, const Int& b) {
  Int q = a / b;  // truncates toward zero
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

Int wrap256(const Int& v) {
  static const Int modulus = Int(1) << 256;
  Int r = v % modulus;
  if (r < 0) r += modulus;
  return r;
}

}  // namespace cscv

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cscv {

enum class ErrorKind {
  Syntax,
  Resolution,
  Kind,
  Type,
  UnknownVariable,
  NestedOld,
  TypeMismatch,
  MalformedAddress,
  AttackerNotInActors,
  MissingValue,
  SameFunction,
  NoExternalFunctions,
  UnsupportedForm,
  DomainTooLarge,
  BackendUnavailable,
  ReplayDivergence,
  Input,
};

std::string_view to_string(ErrorKind kind);

struct SourceLoc {
  int line = 1;
  int col = 1;
  bool operator==(const SourceLoc&) const = default;
};

// All diagnostics raised by the toolkit. `subject` carries the offending
// name (variable, function, step index) when there is one.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message, std::string subject = {},
        std::optional<SourceLoc> loc = std::nullopt);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& subject() const noexcept { return subject_; }
  const std::optional<SourceLoc>& loc() const noexcept { return loc_; }

 private:
  ErrorKind kind_;
  std::string subject_;
  std::optional<SourceLoc> loc_;
};

}  // namespace cscv

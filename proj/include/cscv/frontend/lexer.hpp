#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cscv/error.hpp"

namespace cscv::frontend {

enum class TokenKind { Ident, Number, AddressLit, Punct, End };

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;
  SourceLoc loc;
};

// Splits MCL / property text into tokens. `//` comments run to end of line.
// Throws Error{Syntax} on stray characters and Error{MalformedAddress} on
// `0x` tokens that are not 1-8 hex digits.
std::vector<Token> tokenize(std::string_view source);

}  // namespace cscv::frontend

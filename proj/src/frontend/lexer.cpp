#include "cscv/frontend/lexer.hpp"

#include <array>
#include <cctype>

#include "cscv/value.hpp"

namespace cscv::frontend {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

constexpr std::array<std::string_view, 8> kTwoCharOps = {"==", "!=", "<=", ">=", "&&", "||", "->", "//"};
constexpr std::string_view kSingleCharOps = "{}()[];:,.=<>+-*/!";

}  // namespace

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1;
  int col = 1;

  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };

  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    SourceLoc loc{line, col};
    if (c == '0' && i + 1 < src.size() && src[i + 1] == 'x') {
      std::size_t j = i + 2;
      while (j < src.size() && ident_char(src[j])) ++j;
      std::string text(src.substr(i, j - i));
      if (!Address::well_formed(text)) {
        throw Error(ErrorKind::MalformedAddress, "malformed address '" + text + "'", text, loc);
      }
      out.push_back({TokenKind::AddressLit, text, loc});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j < src.size() && ident_start(src[j])) {
        throw Error(ErrorKind::Syntax, "malformed number", {}, loc);
      }
      out.push_back({TokenKind::Number, std::string(src.substr(i, j - i)), loc});
      advance(j - i);
      continue;
    }
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      out.push_back({TokenKind::Ident, std::string(src.substr(i, j - i)), loc});
      advance(j - i);
      continue;
    }
    if (i + 1 < src.size()) {
      std::string_view two = src.substr(i, 2);
      bool matched = false;
      for (auto op : kTwoCharOps) {
        if (two == op) {
          out.push_back({TokenKind::Punct, std::string(two), loc});
          advance(2);
          matched = true;
          break;
        }
      }
      if (matched) continue;
    }
    if (kSingleCharOps.find(c) != std::string_view::npos) {
      out.push_back({TokenKind::Punct, std::string(1, c), loc});
      advance(1);
      continue;
    }
    throw Error(ErrorKind::Syntax, std::string("unexpected character '") + c + "'", {}, loc);
  }
  out.push_back({TokenKind::End, "", SourceLoc{line, col}});
  return out;
}

}  // namespace cscv::frontend

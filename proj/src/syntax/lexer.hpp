#pragma once

#include "qlam/syntax.hpp"

#include <string>
#include <vector>

namespace qlam::detail {

enum class Tok { Ident, Number, Sym, End };

struct Token {
  Tok kind;
  std::string text;  // identifier, symbol, or number spelling
  double value = 0;  // Number
  bool imaginary = false;
  SourcePos pos;
};

/// Identifiers: [A-Za-z_][A-Za-z0-9_']*. Comments run from `--` to end of line.
/// Symbols: ( ) [ ] , . : ; * + | = \ ! # - -o ->
std::vector<Token> tokenize(const std::string& src);

}  // namespace qlam::detail

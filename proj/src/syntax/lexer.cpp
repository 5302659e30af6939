#include "lexer.hpp"

#include <cctype>
#include <cstdlib>

namespace qlam::detail {

std::vector<Token> tokenize(const std::string& src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    unsigned char c = static_cast<unsigned char>(src[i]);
    if (std::isspace(c)) {
      advance(1);
      continue;
    }
    SourcePos pos{line, col};
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '-') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (std::isalpha(c) || c == '_') {
      size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '\''))
        ++j;
      out.push_back({Tok::Ident, src.substr(i, j - i), 0, false, pos});
      advance(j - i);
      continue;
    }
    if (std::isdigit(c)) {
      const char* begin = src.c_str() + i;
      char* end = nullptr;
      double v = std::strtod(begin, &end);
      size_t len = static_cast<size_t>(end - begin);
      Token t{Tok::Number, src.substr(i, len), v, false, pos};
      if (i + len < src.size() && src[i + len] == 'i' &&
          !(i + len + 1 < src.size() &&
            (std::isalnum(static_cast<unsigned char>(src[i + len + 1])) || src[i + len + 1] == '_'))) {
        t.imaginary = true;
        ++len;
      }
      out.push_back(t);
      advance(len);
      continue;
    }
    if (c == '-' && i + 1 < src.size() && (src[i + 1] == 'o' || src[i + 1] == '>')) {
      bool arrow = src[i + 1] == '>';
      // "-o" must not be the start of an identifier such as "-other".
      if (arrow || i + 2 >= src.size() ||
          !(std::isalnum(static_cast<unsigned char>(src[i + 2])) || src[i + 2] == '_')) {
        out.push_back({Tok::Sym, arrow ? "->" : "-o", 0, false, pos});
        advance(2);
        continue;
      }
    }
    static const std::string singles = "()[],.:;*+|=\\!#-";
    if (singles.find(static_cast<char>(c)) != std::string::npos) {
      out.push_back({Tok::Sym, std::string(1, static_cast<char>(c)), 0, false, pos});
      advance(1);
      continue;
    }
    throw ParseError(std::string("unexpected character '") + static_cast<char>(c) + "'", pos);
  }
  out.push_back({Tok::End, "<end of input>", 0, false, {line, col}});
  return out;
}

}  // namespace qlam::detail

#include "lexer.hpp"

#include <set>

namespace qlam {

ParseError::ParseError(const std::string& msg, SourcePos p)
    : std::runtime_error(std::to_string(p.line) + ":" + std::to_string(p.col) + ": " + msg), pos(p) {}

namespace {

using detail::Tok;
using detail::Token;

const std::set<std::string>& keywords() {
  static const std::set<std::string> k = {
      "lam", "let", "in", "letrec", "match", "with", "if", "then", "else", "inl", "inr", "cons",
      "split", "omega", "meas", "new", "tt", "ff", "nil", "qubit", "unit", "bit", "list"};
  return k;
}

class Parser {
 public:
  explicit Parser(const std::string& src) : toks_(detail::tokenize(src)) {}

  Program program() {
    Program prog;
    prog.term = term();
    if (is_sym(":")) {
      next();
      prog.declared_type = type();
    }
    expect_end();
    return prog;
  }

  TermPtr whole_term() {
    TermPtr t = term();
    expect_end();
    return t;
  }

  TypePtr whole_type() {
    TypePtr t = type();
    expect_end();
    return t;
  }

 private:
  std::vector<Token> toks_;
  size_t p_ = 0;

  const Token& peek(size_t k = 0) const { return toks_[std::min(p_ + k, toks_.size() - 1)]; }
  const Token& next() { return toks_[p_ < toks_.size() - 1 ? p_++ : p_]; }
  SourcePos pos() const { return peek().pos; }

  bool is_sym(const char* s, size_t k = 0) const { return peek(k).kind == Tok::Sym && peek(k).text == s; }
  bool is_kw(const char* s, size_t k = 0) const { return peek(k).kind == Tok::Ident && peek(k).text == s; }
  bool is_ident(size_t k = 0) const {
    return peek(k).kind == Tok::Ident && !keywords().count(peek(k).text);
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what + ", found '" + peek().text + "'", pos());
  }
  void expect_sym(const char* s) {
    if (!is_sym(s)) fail(std::string("expected '") + s + "'");
    next();
  }
  void expect_kw(const char* s) {
    if (!is_kw(s)) fail(std::string("expected '") + s + "'");
    next();
  }
  void expect_end() {
    if (peek().kind != Tok::End) fail("expected end of input");
  }
  std::string ident() {
    if (!is_ident()) fail("expected identifier");
    return next().text;
  }
  int integer() {
    const Token& t = peek();
    if (t.kind != Tok::Number || t.imaginary || t.text.find_first_not_of("0123456789") != std::string::npos)
      fail("expected a natural number");
    next();
    return std::stoi(t.text);
  }

  // `* ident :` introduces a second binder rather than a tensor type.
  bool binder_follows() const { return is_sym("*") && is_ident(1) && is_sym(":", 2); }

  static TermPtr at(SourcePos p, TermPtr t) { return with_pos(t, p); }

  // ---- types ----

  TypePtr type() {
    TypePtr a = sum_type();
    if (is_sym("-o")) {
      next();
      return Type::lin(a, type());
    }
    return a;
  }
  TypePtr sum_type() {
    TypePtr a = tensor_type();
    while (is_sym("+")) {
      next();
      a = Type::sum(a, tensor_type());
    }
    return a;
  }
  TypePtr tensor_type() {
    TypePtr a = postfix_type();
    while (is_sym("*") && !binder_follows()) {
      next();
      a = Type::tensor(a, postfix_type());
    }
    return a;
  }
  TypePtr postfix_type() {
    TypePtr a = atom_type();
    while (is_kw("list")) {
      next();
      a = Type::list(a);
    }
    return a;
  }
  TypePtr atom_type() {
    if (is_kw("qubit")) return next(), Type::qubit();
    if (is_kw("unit")) return next(), Type::unit();
    if (is_kw("bit")) return next(), Type::bit();
    if (is_sym("!")) {
      SourcePos p = pos();
      next();
      TypePtr inner = atom_type();
      if (inner->kind != TypeKind::LinArrow)
        throw ParseError("'!' applies only to arrow types, as in !(A -o B)", p);
      return Type::bang(inner->left, inner->right);
    }
    if (is_sym("(")) {
      next();
      TypePtr t = type();
      expect_sym(")");
      return t;
    }
    fail("expected a type");
  }

  // ---- terms ----

  TermPtr term() {
    SourcePos p = pos();
    if (is_kw("lam") || is_sym("\\")) {
      next();
      if (is_sym("(") && is_sym(")", 1)) {
        next();
        next();
        expect_sym(".");
        return at(p, mk::lam_unit(term()));
      }
      std::string x = ident();
      expect_sym(":");
      TypePtr a = type();
      if (is_sym("*")) {
        next();
        std::string y = ident();
        if (y == x) throw ParseError("pattern binds '" + x + "' twice", p);
        expect_sym(":");
        TypePtr b = type();
        expect_sym(".");
        return at(p, mk::lam_pair(x, a, y, b, term()));
      }
      expect_sym(".");
      return at(p, mk::abs(x, a, term()));
    }
    if (is_kw("let")) {
      next();
      if (is_sym("(") && is_sym(")", 1)) {
        next();
        next();
        expect_sym("=");
        TermPtr m = term();
        expect_kw("in");
        return at(p, mk::let_unit(m, term()));
      }
      std::string x = ident();
      expect_sym(":");
      TypePtr a = type();
      if (is_sym("*")) {
        next();
        std::string y = ident();
        if (y == x) throw ParseError("pattern binds '" + x + "' twice", p);
        expect_sym(":");
        TypePtr b = type();
        expect_sym("=");
        TermPtr m = term();
        expect_kw("in");
        return at(p, mk::let_tensor(x, a, y, b, m, term()));
      }
      expect_sym("=");
      TermPtr m = term();
      expect_kw("in");
      return at(p, mk::let_bind(x, a, m, term()));
    }
    if (is_kw("letrec")) {
      next();
      int bound = -1;
      if (is_sym("[")) {
        next();
        bound = integer();
        expect_sym("]");
      }
      std::string f = ident();
      expect_sym("(");
      std::string x = ident();
      if (x == f) throw ParseError("recursive function and its parameter share the name '" + f + "'", p);
      expect_sym(":");
      TypePtr a = type();
      expect_sym(")");
      expect_sym(":");
      TypePtr b = type();
      expect_sym("=");
      TermPtr m = term();
      expect_kw("in");
      TermPtr n = term();
      if (bound >= 0) return at(p, mk::letrec_n(bound, f, a, b, x, m, n));
      return at(p, mk::letrec(f, a, b, x, m, n));
    }
    if (is_kw("match")) {
      next();
      TermPtr scrut = term();
      expect_kw("with");
      expect_sym("(");
      std::string x = ident();
      expect_sym(":");
      TypePtr a = type();
      expect_sym("->");
      TermPtr m = term();
      expect_sym("|");
      std::string y = ident();
      expect_sym(":");
      TypePtr b = type();
      expect_sym("->");
      TermPtr n = term();
      expect_sym(")");
      return at(p, mk::match(scrut, x, a, m, y, b, n));
    }
    if (is_kw("if")) {
      next();
      TermPtr c = term();
      expect_kw("then");
      TermPtr th = term();
      expect_kw("else");
      return at(p, mk::if_(c, th, term()));
    }
    return seq();
  }

  TermPtr seq() {
    SourcePos p = pos();
    TermPtr m = tensor();
    if (is_sym(";")) {
      next();
      return at(p, mk::seq(m, term()));
    }
    return m;
  }

  TermPtr tensor() {
    SourcePos p = pos();
    TermPtr m = app();
    while (is_sym("*")) {
      next();
      m = at(p, mk::tensor(m, app()));
    }
    return m;
  }

  bool starts_prefix() const {
    if (is_ident() || is_sym("(") || is_sym("#")) return true;
    for (const char* k : {"inl", "inr", "cons", "tt", "ff", "nil", "meas", "new", "split", "omega"})
      if (is_kw(k)) return true;
    return false;
  }

  TermPtr app() {
    SourcePos p = pos();
    if (!starts_prefix()) fail("expected a term");
    TermPtr m = prefix();
    while (starts_prefix()) m = at(p, mk::app(m, prefix()));
    return m;
  }

  TermPtr prefix() {
    SourcePos p = pos();
    if (is_kw("inl")) return next(), at(p, mk::inl(prefix()));
    if (is_kw("inr")) return next(), at(p, mk::inr(prefix()));
    if (is_kw("cons")) {
      next();
      TermPtr h = prefix();
      return at(p, mk::cons(h, prefix()));
    }
    return atom();
  }

  TermPtr atom() {
    SourcePos p = pos();
    if (is_ident()) return at(p, mk::var(next().text));
    if (is_sym("(")) {
      next();
      if (is_sym(")")) {
        next();
        return at(p, mk::unit());
      }
      TermPtr t = term();
      expect_sym(")");
      return t;
    }
    if (is_kw("tt")) return next(), at(p, mk::tt());
    if (is_kw("ff")) return next(), at(p, mk::ff());
    if (is_kw("nil")) return next(), at(p, mk::nil());
    if (is_kw("meas")) return next(), at(p, mk::meas());
    if (is_kw("new")) return next(), at(p, mk::new_());
    if (is_kw("split") || is_kw("omega")) {
      bool is_split = is_kw("split");
      next();
      expect_sym("[");
      TypePtr a = type();
      expect_sym("]");
      return at(p, is_split ? mk::split(a) : mk::omega(a));
    }
    if (is_sym("#")) {
      next();
      if (peek().kind != Tok::Ident) fail("expected a gate name");
      std::string name = next().text;
      if (is_sym("[")) {
        CMatrix m = matrix();
        try {
          return at(p, mk::gate(make_gate(name, m)));
        } catch (const std::invalid_argument& e) {
          throw ParseError(e.what(), p);
        }
      }
      GatePtr g = builtin_gate(name);
      if (!g) throw ParseError("unknown gate '" + name + "'", p);
      return at(p, mk::gate(g));
    }
    fail("expected a term");
  }

  double real_number(bool* imaginary) {
    double sign = 1;
    if (is_sym("-")) {
      next();
      sign = -1;
    }
    if (peek().kind != Tok::Number) fail("expected a number");
    const Token& t = next();
    *imaginary = t.imaginary;
    return sign * t.value;
  }

  cplx complex_number() {
    bool im = false;
    double a = real_number(&im);
    if (im) return {0, a};
    if ((is_sym("+") || is_sym("-")) && peek(1).kind == Tok::Number && peek(1).imaginary) {
      double sign = is_sym("-") ? -1 : 1;
      next();
      return {a, sign * next().value};
    }
    return {a, 0};
  }

  CMatrix matrix() {
    expect_sym("[");
    std::vector<std::vector<cplx>> rows;
    do {
      if (!rows.empty()) next();
      expect_sym("[");
      std::vector<cplx> row{complex_number()};
      while (is_sym(",")) {
        next();
        row.push_back(complex_number());
      }
      expect_sym("]");
      rows.push_back(row);
    } while (is_sym(","));
    expect_sym("]");
    CMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
    for (size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != rows[0].size()) fail("ragged matrix literal");
      for (size_t c = 0; c < rows[r].size(); ++c)
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
    return m;
  }
};

}  // namespace

TermPtr parse_surface(const std::string& source) { return Parser(source).whole_term(); }

TermPtr parse_term(const std::string& source) { return desugar(parse_surface(source)); }

TypePtr parse_type(const std::string& source) { return Parser(source).whole_type(); }

Program parse_program(const std::string& source) {
  Program p = Parser(source).program();
  p.term = desugar(p.term);
  return p;
}

}  // namespace qlam

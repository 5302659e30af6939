#include "qlam/syntax.hpp"

#include <cstdio>

namespace qlam {

namespace {

std::string number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string complex_literal(cplx z) {
  if (z.imag() == 0) return number(z.real());
  if (z.real() == 0) return number(z.imag()) + "i";
  std::string im = number(std::abs(z.imag())) + "i";
  return number(z.real()) + (z.imag() < 0 ? "-" : "+") + im;
}

std::string gate_literal(const GateDef& g) {
  GatePtr b = builtin_gate(g.name);
  if (b && b->matrix.rows() == g.matrix.rows() && (b->matrix - g.matrix).cwiseAbs().maxCoeff() == 0)
    return "#" + g.name;
  std::string s = "#" + g.name + "[";
  for (Eigen::Index r = 0; r < g.matrix.rows(); ++r) {
    s += r ? ", [" : "[";
    for (Eigen::Index c = 0; c < g.matrix.cols(); ++c) {
      if (c) s += ", ";
      s += complex_literal(g.matrix(r, c));
    }
    s += "]";
  }
  return s + "]";
}

// Levels: 0 binders and sequencing, 1 tensor, 2 application, 3 prefix, 4 atom.
std::string print(const Term& t, int level) {
  auto paren = [level](int own, const std::string& s) { return level > own ? "(" + s + ")" : s; };
  auto ty = [](const TypePtr& a) { return to_string(*a); };
  switch (t.kind) {
    case TermKind::Var: return t.var;
    case TermKind::UnitVal: return "()";
    case TermKind::Meas: return "meas";
    case TermKind::New: return "new";
    case TermKind::True: return "tt";
    case TermKind::False: return "ff";
    case TermKind::Nil: return "nil";
    case TermKind::Gate: return gate_literal(*t.gate);
    case TermKind::Split: return "split[" + ty(t.type) + "]";
    case TermKind::Omega: return "omega[" + ty(t.type) + "]";
    case TermKind::Abs:
      return paren(0, "lam " + t.var + " : " + ty(t.type) + ". " + print(*t.t1, 0));
    case TermKind::LamUnit: return paren(0, "lam (). " + print(*t.t1, 0));
    case TermKind::LamPair:
      return paren(0, "lam " + t.var + " : " + ty(t.type) + " * " + t.var2 + " : " + ty(t.type2) + ". " +
                          print(*t.t1, 0));
    case TermKind::App: return paren(2, print(*t.t1, 2) + " " + print(*t.t2, 3));
    case TermKind::Tensor: return paren(1, print(*t.t1, 1) + " * " + print(*t.t2, 2));
    case TermKind::InL: return paren(3, "inl " + print(*t.t1, 3));
    case TermKind::InR: return paren(3, "inr " + print(*t.t1, 3));
    case TermKind::Cons: return paren(3, "cons " + print(*t.t1, 3) + " " + print(*t.t2, 3));
    case TermKind::LetUnit:
      return paren(0, "let () = " + print(*t.t1, 0) + " in " + print(*t.t2, 0));
    case TermKind::LetTensor:
      return paren(0, "let " + t.var + " : " + ty(t.type) + " * " + t.var2 + " : " + ty(t.type2) + " = " +
                          print(*t.t1, 0) + " in " + print(*t.t2, 0));
    case TermKind::LetBind:
      return paren(0, "let " + t.var + " : " + ty(t.type) + " = " + print(*t.t1, 0) + " in " + print(*t.t2, 0));
    case TermKind::Seq: return paren(0, print(*t.t1, 1) + "; " + print(*t.t2, 0));
    case TermKind::Match:
      return paren(0, "match " + print(*t.t1, 0) + " with (" + t.var + " : " + ty(t.type) + " -> " +
                          print(*t.t2, 0) + " | " + t.var2 + " : " + ty(t.type2) + " -> " + print(*t.t3, 0) + ")");
    case TermKind::If:
      return paren(0, "if " + print(*t.t1, 0) + " then " + print(*t.t2, 0) + " else " + print(*t.t3, 0));
    case TermKind::LetRec:
    case TermKind::LetRecN: {
      std::string head = t.kind == TermKind::LetRec ? "letrec " : "letrec[" + std::to_string(t.bound) + "] ";
      return paren(0, head + t.var + " (" + t.var2 + " : " + ty(t.type) + ") : " + ty(t.type2) + " = " +
                          print(*t.t1, 0) + " in " + print(*t.t2, 0));
    }
  }
  return "?";
}

}  // namespace

std::string pretty(const Term& m) { return print(m, 0); }

std::string show_value(const Term& v, const Type& a) {
  if (a.kind == TypeKind::Sum && a.left->kind == TypeKind::Unit && a.right->kind == TypeKind::Unit) {
    if (v.kind == TermKind::InL && v.t1->kind == TermKind::UnitVal) return "ff";
    if (v.kind == TermKind::InR && v.t1->kind == TermKind::UnitVal) return "tt";
  }
  if (a.kind == TypeKind::List) {
    std::vector<std::string> items;
    const Term* cur = &v;
    while (cur->kind == TermKind::InR && cur->t1->kind == TermKind::Tensor) {
      items.push_back(show_value(*cur->t1->t1, *a.left));
      cur = cur->t1->t2.get();
    }
    if (cur->kind == TermKind::InL && cur->t1->kind == TermKind::UnitVal) {
      std::string s = "[";
      for (size_t i = 0; i < items.size(); ++i) s += (i ? ", " : "") + items[i];
      return s + "]";
    }
  }
  if (a.kind == TypeKind::Tensor && v.kind == TermKind::Tensor)
    return "(" + show_value(*v.t1, *a.left) + " * " + show_value(*v.t2, *a.right) + ")";
  if (a.kind == TypeKind::Sum && v.kind == TermKind::InL) return "inl " + show_value(*v.t1, *a.left);
  if (a.kind == TypeKind::Sum && v.kind == TermKind::InR) return "inr " + show_value(*v.t1, *a.right);
  return pretty(v);
}

}  // namespace qlam

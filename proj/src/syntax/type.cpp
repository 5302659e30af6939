#include "qlam/syntax.hpp"

#include <cmath>
#include <map>

namespace qlam {

namespace {

TypePtr make(TypeKind k, TypePtr l = nullptr, TypePtr r = nullptr) {
  return std::make_shared<const Type>(Type{k, std::move(l), std::move(r)});
}

bool is_bit(const Type& t) {
  return t.kind == TypeKind::Sum && t.left->kind == TypeKind::Unit &&
         t.right->kind == TypeKind::Unit;
}

// Levels: 0 arrow, 1 sum, 2 tensor, 3 postfix, 4 atom.
std::string print(const Type& t, int level) {
  auto paren = [&](int own, std::string s) { return level > own ? "(" + s + ")" : s; };
  switch (t.kind) {
    case TypeKind::Qubit: return "qubit";
    case TypeKind::Unit: return "unit";
    case TypeKind::LinArrow:
      return paren(0, print(*t.left, 1) + " -o " + print(*t.right, 0));
    case TypeKind::BangArrow:
      return "!(" + print(*t.left, 1) + " -o " + print(*t.right, 0) + ")";
    case TypeKind::Sum:
      if (is_bit(t)) return "bit";
      return paren(1, print(*t.left, 1) + " + " + print(*t.right, 2));
    case TypeKind::Tensor:
      return paren(2, print(*t.left, 2) + " * " + print(*t.right, 3));
    case TypeKind::List: return print(*t.left, 3) + " list";
  }
  return "?";
}

}  // namespace

TypePtr Type::qubit() {
  static const TypePtr t = make(TypeKind::Qubit);
  return t;
}
TypePtr Type::unit() {
  static const TypePtr t = make(TypeKind::Unit);
  return t;
}
TypePtr Type::bit() {
  static const TypePtr t = make(TypeKind::Sum, unit(), unit());
  return t;
}
TypePtr Type::lin(TypePtr a, TypePtr b) { return make(TypeKind::LinArrow, std::move(a), std::move(b)); }
TypePtr Type::bang(TypePtr a, TypePtr b) { return make(TypeKind::BangArrow, std::move(a), std::move(b)); }
TypePtr Type::tensor(TypePtr a, TypePtr b) { return make(TypeKind::Tensor, std::move(a), std::move(b)); }
TypePtr Type::sum(TypePtr a, TypePtr b) { return make(TypeKind::Sum, std::move(a), std::move(b)); }
TypePtr Type::list(TypePtr a) { return make(TypeKind::List, std::move(a)); }

bool type_equal(const Type& a, const Type& b) {
  if (&a == &b) return true;
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case TypeKind::Qubit:
    case TypeKind::Unit: return true;
    case TypeKind::List: return type_equal(*a.left, *b.left);
    default: return type_equal(*a.left, *b.left) && type_equal(*a.right, *b.right);
  }
}

std::string to_string(const Type& t) { return print(t, 0); }

// ---------------------------------------------------------------------------

GatePtr make_gate(const std::string& name, const CMatrix& m) {
  if (m.rows() != m.cols() || m.rows() < 2)
    throw std::invalid_argument("gate " + name + ": matrix must be square of size >= 2");
  int arity = 0;
  Eigen::Index n = m.rows();
  while (n > 1) {
    if (n % 2 != 0) throw std::invalid_argument("gate " + name + ": size is not a power of two");
    n /= 2;
    ++arity;
  }
  CMatrix defect = m.adjoint() * m - CMatrix::Identity(m.rows(), m.cols());
  if (defect.cwiseAbs().maxCoeff() > 1e-9)
    throw std::invalid_argument("gate " + name + ": matrix is not unitary");
  return std::make_shared<const GateDef>(GateDef{name, arity, m});
}

namespace {

const std::map<std::string, GatePtr>& registry() {
  static const std::map<std::string, GatePtr> reg = [] {
    std::map<std::string, GatePtr> r;
    const double s = 1.0 / std::sqrt(2.0);
    const cplx i(0, 1);
    CMatrix m(2, 2);
    m << 1, 0, 0, 1;
    r["I"] = make_gate("I", m);
    m << 0, 1, 1, 0;
    r["X"] = make_gate("X", m);
    m << 0, -i, i, 0;
    r["Y"] = make_gate("Y", m);
    m << 1, 0, 0, -1;
    r["Z"] = make_gate("Z", m);
    m << s, s, s, -s;
    r["H"] = make_gate("H", m);
    m << 1, 0, 0, i;
    r["S"] = make_gate("S", m);
    m << 1, 0, 0, std::polar(1.0, M_PI / 4);
    r["T"] = make_gate("T", m);
    CMatrix c = CMatrix::Zero(4, 4);
    c(0, 0) = c(1, 1) = c(2, 3) = c(3, 2) = 1;
    r["CNOT"] = make_gate("CNOT", c);
    r["Nc"] = make_gate("Nc", c);
    c.setZero();
    c(0, 0) = c(1, 1) = c(2, 2) = 1;
    c(3, 3) = -1;
    r["CZ"] = make_gate("CZ", c);
    c.setZero();
    c(0, 0) = c(1, 2) = c(2, 1) = c(3, 3) = 1;
    r["SWAP"] = make_gate("SWAP", c);
    return r;
  }();
  return reg;
}

}  // namespace

GatePtr builtin_gate(const std::string& name) {
  auto it = registry().find(name);
  return it == registry().end() ? nullptr : it->second;
}

std::vector<std::string> builtin_gate_names() {
  std::vector<std::string> out;
  for (const auto& [k, v] : registry()) out.push_back(k);
  return out;
}

}  // namespace qlam

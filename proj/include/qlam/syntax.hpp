#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace qlam {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// ---------------------------------------------------------------------------
// Types

enum class TypeKind { Qubit, Unit, LinArrow, BangArrow, Tensor, Sum, List };

struct Type;
using TypePtr = std::shared_ptr<const Type>;

/// Immutable type node. `left`/`right` hold the two operands of binary
/// constructors; `List` uses `left` only.
struct Type {
  TypeKind kind;
  TypePtr left;
  TypePtr right;

  static TypePtr qubit();
  static TypePtr unit();
  static TypePtr bit();
  static TypePtr lin(TypePtr a, TypePtr b);
  static TypePtr bang(TypePtr a, TypePtr b);
  static TypePtr tensor(TypePtr a, TypePtr b);
  static TypePtr sum(TypePtr a, TypePtr b);
  static TypePtr list(TypePtr a);

  bool is_bang() const { return kind == TypeKind::BangArrow; }
};

bool type_equal(const Type& a, const Type& b);
inline bool type_equal(const TypePtr& a, const TypePtr& b) { return type_equal(*a, *b); }
std::string to_string(const Type& t);
inline std::string to_string(const TypePtr& t) { return to_string(*t); }

// ---------------------------------------------------------------------------
// Gates

struct GateDef {
  std::string name;
  int arity = 0;
  CMatrix matrix;
};
using GatePtr = std::shared_ptr<const GateDef>;

/// Built-in gate registry: I, X, Y, Z, H, S, T, CNOT (alias Nc), CZ, SWAP.
GatePtr builtin_gate(const std::string& name);
std::vector<std::string> builtin_gate_names();
/// Validates unitarity (max-norm of U*U - I at most 1e-9) and a power-of-two size.
GatePtr make_gate(const std::string& name, const CMatrix& m);

// ---------------------------------------------------------------------------
// Terms

enum class TermKind {
  Var, Abs, App, UnitVal, LetUnit, Tensor, LetTensor, InL, InR, Match,
  Split, LetRec, LetRecN, Omega, Meas, New, Gate,
  // Surface sugar, removed by desugar().
  True, False, Nil, Cons, LamUnit, If, LetBind, Seq, LamPair
};

struct SourcePos {
  int line = 0;
  int col = 0;
};

struct Term;
using TermPtr = std::shared_ptr<const Term>;

/// Immutable term node.
///
/// Field usage by kind:
///   Var       var
///   Abs       var:type . t1
///   App       t1 t2
///   LetUnit   let () = t1 in t2
///   Tensor    t1 * t2
///   LetTensor let var:type * var2:type2 = t1 in t2
///   InL/InR   t1
///   Match     match t1 with (var:type -> t2 | var2:type2 -> t3)
///   Split     type is the list element type
///   LetRec    letrec var (var2:type) : type2 = t1 in t2   (LetRecN adds `bound`)
///   Omega     type
///   Gate      gate
///   Cons      t1 t2;  LamUnit t1;  If t1 t2 t3;  Seq t1 t2
///   LetBind   let var:type = t1 in t2
///   LamPair   lam var:type * var2:type2 . t1
struct Term {
  TermKind kind;
  std::string var;
  std::string var2;
  TypePtr type;
  TypePtr type2;
  TermPtr t1, t2, t3;
  int bound = 0;
  GatePtr gate;
  SourcePos pos;
};

namespace mk {
TermPtr var(std::string x);
TermPtr abs(std::string x, TypePtr a, TermPtr body);
TermPtr app(TermPtr m, TermPtr n);
TermPtr unit();
TermPtr let_unit(TermPtr m, TermPtr n);
TermPtr tensor(TermPtr m, TermPtr n);
TermPtr let_tensor(std::string x, TypePtr a, std::string y, TypePtr b, TermPtr m, TermPtr n);
TermPtr inl(TermPtr m);
TermPtr inr(TermPtr m);
TermPtr match(TermPtr p, std::string x, TypePtr a, TermPtr m, std::string y, TypePtr b, TermPtr n);
TermPtr split(TypePtr a);
TermPtr letrec(std::string f, TypePtr a, TypePtr b, std::string x, TermPtr m, TermPtr n);
TermPtr letrec_n(int n, std::string f, TypePtr a, TypePtr b, std::string x, TermPtr m, TermPtr body);
TermPtr omega(TypePtr a);
TermPtr meas();
TermPtr new_();
TermPtr gate(GatePtr g);
TermPtr gate(const std::string& builtin_name);
// sugar
TermPtr tt();
TermPtr ff();
TermPtr nil();
TermPtr cons(TermPtr h, TermPtr t);
TermPtr lam_unit(TermPtr body);
TermPtr if_(TermPtr p, TermPtr then_branch, TermPtr else_branch);
TermPtr let_bind(std::string x, TypePtr a, TermPtr m, TermPtr n);
TermPtr seq(TermPtr m, TermPtr n);
TermPtr lam_pair(std::string x, TypePtr a, std::string y, TypePtr b, TermPtr body);
}  // namespace mk

/// Copy of `t` carrying source position `pos`.
TermPtr with_pos(const TermPtr& t, SourcePos pos);
/// Copy of `t` with the given children (kind, names, annotations kept).
TermPtr with_children(const Term& t, TermPtr c1, TermPtr c2 = nullptr, TermPtr c3 = nullptr);

bool is_value(const Term& m);
bool is_sugar(TermKind k);
bool contains_sugar(const Term& m);
bool contains_omega(const Term& m);

using VarSet = std::set<std::string>;
VarSet free_vars(const Term& m);
inline VarSet free_vars(const TermPtr& m) { return free_vars(*m); }
/// Every variable name occurring in `m`, bound or free.
VarSet all_names(const Term& m);

/// Capture-avoiding substitution m{v/x}.
TermPtr substitute(const TermPtr& m, const TermPtr& v, const std::string& x);
/// Expand surface sugar into core constructs. Idempotent.
TermPtr desugar(const TermPtr& m);
/// Rename bound variables to %0, %1, ... in traversal order.
TermPtr alpha_canonical(const TermPtr& m);
/// Rename binders that shadow an enclosing binder or a name in `avoid`.
TermPtr rename_apart(const TermPtr& m, const VarSet& avoid);
/// Structural equality ignoring source positions (no alpha).
bool term_equal(const Term& a, const Term& b);
bool alpha_equal(const TermPtr& a, const TermPtr& b);

std::string fresh_name(const std::string& base, const VarSet& avoid);

/// Replace every unindexed letrec by letrec^n.
TermPtr lower_approximant(const TermPtr& m, int n);
/// Replace every unindexed letrec f x = M in N by N{(lam x. omega)/f}.
TermPtr zero_approximant(const TermPtr& m);
bool is_finitary(const Term& m);

// ---------------------------------------------------------------------------
// Concrete syntax

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, SourcePos pos);
  SourcePos pos;
};

struct Program {
  TermPtr term;
  TypePtr declared_type;  // optional trailing ": A"
};

/// Parse a term and desugar it.
TermPtr parse_term(const std::string& source);
/// Parse a term without desugaring.
TermPtr parse_surface(const std::string& source);
TypePtr parse_type(const std::string& source);
/// Parse a .qlam program: a term optionally followed by ": type".
Program parse_program(const std::string& source);

/// Deterministic printer emitting the concrete grammar accepted by parse_surface.
std::string pretty(const Term& m);
inline std::string pretty(const TermPtr& m) { return pretty(*m); }
/// Print a closed value using tt/ff, list brackets and tensors where the type allows.
std::string show_value(const Term& v, const Type& a);

}  // namespace qlam

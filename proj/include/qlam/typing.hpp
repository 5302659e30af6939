#pragma once

#include "qlam/syntax.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace qlam {

struct Binding {
  std::string name;
  TypePtr type;
};

/// Ordered typing context. Bindings at a !-type form the exponential part,
/// all others the linear part.
class Context {
 public:
  Context() = default;
  explicit Context(std::vector<Binding> b);

  const std::vector<Binding>& bindings() const { return bindings_; }
  size_t size() const { return bindings_.size(); }
  bool empty() const { return bindings_.empty(); }
  const Binding* find(const std::string& x) const;
  bool contains(const std::string& x) const { return find(x) != nullptr; }

  /// Append a binding; the name must be new.
  Context extend(const std::string& x, TypePtr a) const;
  Context exponential_part() const;
  std::vector<std::string> linear_names() const;
  bool is_exponential() const;
  /// Keep bindings whose name satisfies `keep`, preserving order.
  template <class Pred>
  Context filter(Pred keep) const {
    std::vector<Binding> out;
    for (const auto& b : bindings_)
      if (keep(b)) out.push_back(b);
    return Context(std::move(out));
  }

  std::string to_string() const;

 private:
  std::vector<Binding> bindings_;
};

bool context_equal(const Context& a, const Context& b);

enum class Rule {
  Ax, AxD, Promote, UnitI, LolliI, LolliE, UnitE, TensorI, TensorE, SumIL, SumIR, SumE,
  ListI, Split, Rec, RecN, Omega, Meas, New, Gate
};
std::string rule_name(Rule r);

struct Derivation;
using DerivationPtr = std::shared_ptr<const Derivation>;

/// One node of the derivation tree: rule, conclusion ctx |- term : type, premises.
/// For ListI the single premise types the term at unit + (A * A list).
struct Derivation {
  Rule rule;
  Context ctx;
  TermPtr term;
  TypePtr type;
  std::vector<DerivationPtr> premises;
};

/// Structured text: one line per node, indented by depth, "rule: ctx |- term : type".
std::string print_derivation(const Derivation& d);
bool derivation_equal(const Derivation& a, const Derivation& b);
std::string judgement_string(const Derivation& d);

enum class TypeErrorKind {
  LinearVarUnused,
  LinearVarDuplicated,
  LinearVarSharedAcrossSplit,
  PromotionOfNonValue,
  PromotionUnderLinearContext,
  TypeMismatch,
  UnboundVariable,
  AnnotationRequired,
  InvalidContext,
};
std::string type_error_name(TypeErrorKind k);

class TypeError : public std::runtime_error {
 public:
  TypeError(TypeErrorKind kind, const std::string& msg, SourcePos pos, TypePtr expected = nullptr,
            TypePtr found = nullptr);
  TypeErrorKind kind;
  SourcePos pos;
  TypePtr expected;
  TypePtr found;
};

/// Type `m` in `ctx`. With `expected` set the term is checked against it,
/// otherwise its type is inferred; injections need an expected type.
/// Binders of `m` are renamed apart from `ctx` and from each other first, so
/// the terms stored in the derivation are alpha-equivalent to `m`.
DerivationPtr typecheck(const Context& ctx, const TermPtr& m, const TypePtr& expected = nullptr);

/// Route each linear binding to the side whose free-variable set contains it;
/// exponential bindings go to both sides.
std::pair<Context, Context> split_linear(const Context& ctx, const VarSet& fv_left, const VarSet& fv_right);

}  // namespace qlam

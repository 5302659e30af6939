#include "qlam/typing.hpp"

#include <algorithm>

namespace qlam {

// ---------------------------------------------------------------------------
// Context

Context::Context(std::vector<Binding> b) : bindings_(std::move(b)) {
  for (size_t i = 0; i < bindings_.size(); ++i)
    for (size_t j = i + 1; j < bindings_.size(); ++j)
      if (bindings_[i].name == bindings_[j].name)
        throw TypeError(TypeErrorKind::InvalidContext, "variable '" + bindings_[i].name + "' bound twice", {});
}

const Binding* Context::find(const std::string& x) const {
  for (const auto& b : bindings_)
    if (b.name == x) return &b;
  return nullptr;
}

Context Context::extend(const std::string& x, TypePtr a) const {
  std::vector<Binding> b = bindings_;
  b.push_back({x, std::move(a)});
  return Context(std::move(b));
}

Context Context::exponential_part() const {
  return filter([](const Binding& b) { return b.type->is_bang(); });
}

std::vector<std::string> Context::linear_names() const {
  std::vector<std::string> out;
  for (const auto& b : bindings_)
    if (!b.type->is_bang()) out.push_back(b.name);
  return out;
}

bool Context::is_exponential() const { return linear_names().empty(); }

std::string Context::to_string() const {
  std::string s;
  for (size_t i = 0; i < bindings_.size(); ++i)
    s += (i ? ", " : "") + bindings_[i].name + " : " + qlam::to_string(*bindings_[i].type);
  return s;
}

bool context_equal(const Context& a, const Context& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (a.bindings()[i].name != b.bindings()[i].name || !type_equal(*a.bindings()[i].type, *b.bindings()[i].type))
      return false;
  return true;
}

// ---------------------------------------------------------------------------
// Names and printing

std::string rule_name(Rule r) {
  switch (r) {
    case Rule::Ax: return "ax";
    case Rule::AxD: return "axd";
    case Rule::Promote: return "p";
    case Rule::UnitI: return "I_I";
    case Rule::LolliI: return "-oI";
    case Rule::LolliE: return "-oE";
    case Rule::UnitE: return "I_E";
    case Rule::TensorI: return "*I";
    case Rule::TensorE: return "*E";
    case Rule::SumIL: return "+I_l";
    case Rule::SumIR: return "+I_r";
    case Rule::SumE: return "+E";
    case Rule::ListI: return "listI";
    case Rule::Split: return "split";
    case Rule::Rec: return "rec";
    case Rule::RecN: return "recN";
    case Rule::Omega: return "omega";
    case Rule::Meas: return "meas";
    case Rule::New: return "new";
    case Rule::Gate: return "U";
  }
  return "?";
}

std::string type_error_name(TypeErrorKind k) {
  switch (k) {
    case TypeErrorKind::LinearVarUnused: return "LinearVarUnused";
    case TypeErrorKind::LinearVarDuplicated: return "LinearVarDuplicated";
    case TypeErrorKind::LinearVarSharedAcrossSplit: return "LinearVarSharedAcrossSplit";
    case TypeErrorKind::PromotionOfNonValue: return "PromotionOfNonValue";
    case TypeErrorKind::PromotionUnderLinearContext: return "PromotionUnderLinearContext";
    case TypeErrorKind::TypeMismatch: return "TypeMismatch";
    case TypeErrorKind::UnboundVariable: return "UnboundVariable";
    case TypeErrorKind::AnnotationRequired: return "AnnotationRequired";
    case TypeErrorKind::InvalidContext: return "InvalidContext";
  }
  return "?";
}

TypeError::TypeError(TypeErrorKind k, const std::string& msg, SourcePos p, TypePtr e, TypePtr f)
    : std::runtime_error(type_error_name(k) + " at " + std::to_string(p.line) + ":" + std::to_string(p.col) +
                         ": " + msg),
      kind(k),
      pos(p),
      expected(std::move(e)),
      found(std::move(f)) {}

std::string judgement_string(const Derivation& d) {
  return d.ctx.to_string() + " |- " + pretty(*d.term) + " : " + to_string(*d.type);
}

namespace {

void print_rec(const Derivation& d, int depth, std::string& out) {
  out += std::string(static_cast<size_t>(2 * depth), ' ') + rule_name(d.rule) + ": " + judgement_string(d) + "\n";
  for (const auto& p : d.premises) print_rec(*p, depth + 1, out);
}

}  // namespace

std::string print_derivation(const Derivation& d) {
  std::string out;
  print_rec(d, 0, out);
  return out;
}

bool derivation_equal(const Derivation& a, const Derivation& b) {
  if (a.rule != b.rule || !context_equal(a.ctx, b.ctx) || !term_equal(*a.term, *b.term) ||
      !type_equal(*a.type, *b.type) || a.premises.size() != b.premises.size())
    return false;
  for (size_t i = 0; i < a.premises.size(); ++i)
    if (!derivation_equal(*a.premises[i], *b.premises[i])) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Splitting

namespace {

// Marks a side containing Omega; linear variables used on neither side go there.
const std::string kAbsorbs = "#omega";

std::pair<Context, Context> split_impl(const Context& ctx, const VarSet& fv_left, const VarSet& fv_right,
                                       TypeErrorKind shared_kind, SourcePos pos) {
  std::vector<Binding> l, r;
  for (const auto& b : ctx.bindings()) {
    if (b.type->is_bang()) {
      l.push_back(b);
      r.push_back(b);
      continue;
    }
    bool in_l = fv_left.count(b.name) > 0, in_r = fv_right.count(b.name) > 0;
    if (in_l && in_r)
      throw TypeError(shared_kind, "linear variable '" + b.name + "' is used more than once", pos);
    if (!in_l && !in_r) {
      if (fv_right.count(kAbsorbs))
        in_r = true;
      else if (fv_left.count(kAbsorbs))
        in_l = true;
      else
        throw TypeError(TypeErrorKind::LinearVarUnused, "linear variable '" + b.name + "' is not used", pos);
    }
    (in_l ? l : r).push_back(b);
  }
  return {Context(std::move(l)), Context(std::move(r))};
}

}  // namespace

std::pair<Context, Context> split_linear(const Context& ctx, const VarSet& fv_left, const VarSet& fv_right) {
  return split_impl(ctx, fv_left, fv_right, TypeErrorKind::LinearVarSharedAcrossSplit, {});
}

// ---------------------------------------------------------------------------
// Checker

namespace {

VarSet minus(VarSet s, std::initializer_list<std::string> xs) {
  for (const auto& x : xs) s.erase(x);
  return s;
}

TypePtr qubit_power(int n) {
  TypePtr t = Type::qubit();
  for (int i = 1; i < n; ++i) t = Type::tensor(t, Type::qubit());
  return t;
}

class Checker {
 public:
  DerivationPtr derive(const Context& ctx, const TermPtr& m, const TypePtr& exp) {
    const Term& t = *m;
    switch (t.kind) {
      case TermKind::Var: return var(ctx, m, exp);
      case TermKind::UnitVal:
        only(ctx, {}, t.pos);
        return coerce(node(Rule::UnitI, ctx, m, Type::unit()), exp);
      case TermKind::Meas:
        return constant(ctx, m, exp, Rule::Meas, Type::lin(Type::qubit(), Type::bit()));
      case TermKind::New:
        return constant(ctx, m, exp, Rule::New, Type::lin(Type::bit(), Type::qubit()));
      case TermKind::Gate: {
        TypePtr q = qubit_power(t.gate->arity);
        return constant(ctx, m, exp, Rule::Gate, Type::lin(q, q));
      }
      case TermKind::Split:
        return constant(ctx, m, exp, Rule::Split,
                        Type::lin(Type::list(t.type), Type::sum(Type::unit(), Type::tensor(t.type, Type::list(t.type)))));
      case TermKind::Omega:
        // Omega absorbs linear variables, so that letrec^0 unfolds to a typable lam x. Omega.
        return coerce(node(Rule::Omega, ctx, m, t.type), exp);
      case TermKind::Abs: return abs(ctx, m, exp);
      case TermKind::App: return app(ctx, m, exp);
      case TermKind::Tensor: return tensor(ctx, m, exp);
      case TermKind::InL:
      case TermKind::InR: return injection(ctx, m, exp);
      case TermKind::LetUnit: {
        auto [cl, cr] = split(ctx, occurring(*t.t1), occurring(*t.t2), t.pos);
        auto d1 = derive(cl, t.t1, Type::unit());
        auto d2 = derive(cr, t.t2, exp);
        return node(Rule::UnitE, ctx, m, d2->type, {d1, d2});
      }
      case TermKind::LetTensor: {
        auto [cl, cr] = split(ctx, occurring(*t.t1), minus(occurring(*t.t2), {t.var, t.var2}), t.pos);
        auto d1 = derive(cl, t.t1, Type::tensor(t.type, t.type2));
        auto d2 = derive(cr.extend(t.var, t.type).extend(t.var2, t.type2), t.t2, exp);
        return node(Rule::TensorE, ctx, m, d2->type, {d1, d2});
      }
      case TermKind::Match: return match(ctx, m, exp);
      case TermKind::LetRec:
      case TermKind::LetRecN: return letrec(ctx, m, exp);
      default:
        throw TypeError(TypeErrorKind::InvalidContext, "surface sugar must be desugared before type checking", t.pos);
    }
  }

 private:
  static DerivationPtr node(Rule r, const Context& ctx, const TermPtr& m, TypePtr a,
                            std::vector<DerivationPtr> premises = {}) {
    return std::make_shared<const Derivation>(Derivation{r, ctx, m, std::move(a), std::move(premises)});
  }

  // The linear part of ctx must be exactly `allowed`.
  static void only(const Context& ctx, const VarSet& allowed, SourcePos pos) {
    for (const auto& x : ctx.linear_names())
      if (!allowed.count(x))
        throw TypeError(TypeErrorKind::LinearVarUnused, "linear variable '" + x + "' is not used", pos);
  }

  // Free variables, plus the absorbing marker when the term contains Omega.
  static VarSet occurring(const Term& t) {
    VarSet v = free_vars(t);
    if (contains_omega(t)) v.insert(kAbsorbs);
    return v;
  }

  static std::pair<Context, Context> split(const Context& ctx, const VarSet& l, const VarSet& r, SourcePos pos) {
    return split_impl(ctx, l, r, TypeErrorKind::LinearVarDuplicated, pos);
  }

  static DerivationPtr coerce(const DerivationPtr& d, const TypePtr& exp) {
    if (!exp || type_equal(*d->type, *exp)) return d;
    const Term& t = *d->term;
    if (exp->is_bang() && d->type->kind == TypeKind::LinArrow && type_equal(*d->type->left, *exp->left) &&
        type_equal(*d->type->right, *exp->right)) {
      if (!is_value(t))
        throw TypeError(TypeErrorKind::PromotionOfNonValue, "only values can be promoted to " + to_string(*exp),
                        t.pos, exp, d->type);
      if (!d->ctx.is_exponential())
        throw TypeError(TypeErrorKind::PromotionUnderLinearContext,
                        "promotion to " + to_string(*exp) + " needs a context without linear variables", t.pos, exp,
                        d->type);
      return node(Rule::Promote, d->ctx, d->term, exp, {d});
    }
    if (exp->kind == TypeKind::List) {
      TypePtr unfolded = Type::sum(Type::unit(), Type::tensor(exp->left, exp));
      if (type_equal(*d->type, *unfolded)) return node(Rule::ListI, d->ctx, d->term, exp, {d});
    }
    throw TypeError(TypeErrorKind::TypeMismatch, "expected " + to_string(*exp) + " but found " + to_string(*d->type),
                    t.pos, exp, d->type);
  }

  DerivationPtr var(const Context& ctx, const TermPtr& m, const TypePtr& exp) {
    const Term& t = *m;
    const Binding* b = ctx.find(t.var);
    if (!b) throw TypeError(TypeErrorKind::UnboundVariable, "unbound variable '" + t.var + "'", t.pos);
    if (!b->type->is_bang()) {
      only(ctx, {t.var}, t.pos);
      return coerce(node(Rule::Ax, ctx, m, b->type), exp);
    }
    only(ctx, {}, t.pos);
    return coerce(node(Rule::AxD, ctx, m, Type::lin(b->type->left, b->type->right)), exp);
  }

  DerivationPtr constant(const Context& ctx, const TermPtr& m, const TypePtr& exp, Rule r, TypePtr a) {
    only(ctx, {}, m->pos);
    return coerce(node(r, ctx, m, std::move(a)), exp);
  }

  DerivationPtr abs(const Context& ctx, const TermPtr& m, const TypePtr& exp) {
    const Term& t = *m;
    if (exp && exp->is_bang()) {
      if (!ctx.is_exponential())
        throw TypeError(TypeErrorKind::PromotionUnderLinearContext,
                        "promotion to " + to_string(*exp) + " needs a context without linear variables", t.pos, exp);
      auto inner = derive(ctx, m, Type::lin(exp->left, exp->right));
      return node(Rule::Promote, ctx, m, exp, {inner});
    }
    TypePtr body_exp;
    if (exp && exp->kind == TypeKind::LinArrow && type_equal(*exp->left, *t.type)) body_exp = exp->right;
    auto body = derive(ctx.extend(t.var, t.type), t.t1, body_exp);
    return coerce(node(Rule::LolliI, ctx, m, Type::lin(t.type, body->type), {body}), exp);
  }

  DerivationPtr app(const Context& ctx, const TermPtr& m, const TypePtr& exp) {
    const Term& t = *m;
    auto [cl, cr] = split(ctx, occurring(*t.t1), occurring(*t.t2), t.pos);
    DerivationPtr f;
    if (t.t1->kind == TermKind::Abs && exp)
      f = derive(cl, t.t1, Type::lin(t.t1->type, exp));
    else
      f = derive(cl, t.t1, nullptr);
    if (f->type->kind != TypeKind::LinArrow)
      throw TypeError(TypeErrorKind::TypeMismatch, "expected a function but found " + to_string(*f->type), t.t1->pos,
                      nullptr, f->type);
    auto arg = derive(cr, t.t2, f->type->left);
    return coerce(node(Rule::LolliE, ctx, m, f->type->right, {f, arg}), exp);
  }

  DerivationPtr tensor(const Context& ctx, const TermPtr& m, const TypePtr& exp) {
    const Term& t = *m;
    auto [cl, cr] = split(ctx, occurring(*t.t1), occurring(*t.t2), t.pos);
    bool guided = exp && exp->kind == TypeKind::Tensor;
    auto d1 = derive(cl, t.t1, guided ? exp->left : nullptr);
    auto d2 = derive(cr, t.t2, guided ? exp->right : nullptr);
    return coerce(node(Rule::TensorI, ctx, m, Type::tensor(d1->type, d2->type), {d1, d2}), exp);
  }

  DerivationPtr injection(const Context& ctx, const TermPtr& m, const TypePtr& exp) {
    const Term& t = *m;
    bool left = t.kind == TermKind::InL;
    if (!exp)
      throw TypeError(TypeErrorKind::AnnotationRequired,
                      std::string("cannot infer the type of ") + (left ? "inl" : "inr") + "; annotate the context",
                      t.pos);
    if (exp->kind == TypeKind::List) {
      auto inner = derive(ctx, m, Type::sum(Type::unit(), Type::tensor(exp->left, exp)));
      return node(Rule::ListI, ctx, m, exp, {inner});
    }
    if (exp->kind != TypeKind::Sum)
      throw TypeError(TypeErrorKind::TypeMismatch, "expected " + to_string(*exp) + " but found an injection", t.pos,
                      exp);
    auto d = derive(ctx, t.t1, left ? exp->left : exp->right);
    return node(left ? Rule::SumIL : Rule::SumIR, ctx, m, exp, {d});
  }

  DerivationPtr match(const Context& ctx, const TermPtr& m, const TypePtr& exp) {
    const Term& t = *m;
    VarSet branches = minus(occurring(*t.t2), {t.var});
    VarSet rhs = minus(occurring(*t.t3), {t.var2});
    branches.insert(rhs.begin(), rhs.end());
    auto [cl, cr] = split(ctx, occurring(*t.t1), branches, t.pos);
    auto dp = derive(cl, t.t1, Type::sum(t.type, t.type2));
    Context cx = cr.extend(t.var, t.type), cy = cr.extend(t.var2, t.type2);
    DerivationPtr dl, dr;
    if (exp) {
      dl = derive(cx, t.t2, exp);
      dr = derive(cy, t.t3, exp);
    } else {
      try {
        dl = derive(cx, t.t2, nullptr);
      } catch (const TypeError& e) {
        if (e.kind != TypeErrorKind::AnnotationRequired) throw;
        dr = derive(cy, t.t3, nullptr);
        dl = derive(cx, t.t2, dr->type);
      }
      if (!dr) dr = derive(cy, t.t3, dl->type);
    }
    return node(Rule::SumE, ctx, m, dl->type, {dp, dl, dr});
  }

  DerivationPtr letrec(const Context& ctx, const TermPtr& m, const TypePtr& exp) {
    const Term& t = *m;
    VarSet body_fv = minus(free_vars(*t.t1), {t.var, t.var2});
    for (const auto& x : ctx.linear_names())
      if (body_fv.count(x))
        throw TypeError(TypeErrorKind::UnboundVariable,
                        "linear variable '" + x + "' cannot be used inside the recursive function '" + t.var + "'",
                        t.pos);
    TypePtr fty = Type::bang(t.type, t.type2);
    auto dm = derive(ctx.exponential_part().extend(t.var, fty).extend(t.var2, t.type), t.t1, t.type2);
    auto dn = derive(ctx.extend(t.var, fty), t.t2, exp);
    return node(t.kind == TermKind::LetRec ? Rule::Rec : Rule::RecN, ctx, m, dn->type, {dm, dn});
  }
};

}  // namespace

DerivationPtr typecheck(const Context& ctx, const TermPtr& m, const TypePtr& expected) {
  VarSet avoid;
  for (const auto& b : ctx.bindings()) avoid.insert(b.name);
  TermPtr renamed = rename_apart(m, avoid);
  Checker c;
  return c.derive(ctx, renamed, expected);
}

}  // namespace qlam

#include "qlam/syntax.hpp"

#include <algorithm>
#include <array>
#include <map>

namespace qlam {

namespace {

TermPtr node(Term t) { return std::make_shared<const Term>(std::move(t)); }

Term base(TermKind k) {
  Term t;
  t.kind = k;
  return t;
}

// Binder fields of a node: bit 1 = var, bit 2 = var2.
int binder_fields(TermKind k) {
  switch (k) {
    case TermKind::Abs:
    case TermKind::LetBind: return 1;
    case TermKind::LetTensor:
    case TermKind::Match:
    case TermKind::LetRec:
    case TermKind::LetRecN:
    case TermKind::LamPair: return 3;
    default: return 0;
  }
}

// Whether binder field `which` (1 = var, 2 = var2) of `t` scopes over child `i`.
bool scopes_over(const Term& t, int which, int i) {
  switch (t.kind) {
    case TermKind::Abs: return which == 1 && i == 0;
    case TermKind::LetTensor: return i == 1;
    case TermKind::Match: return (which == 1 && i == 1) || (which == 2 && i == 2);
    case TermKind::LetRec:
    case TermKind::LetRecN: return which == 1 ? true : i == 0;
    case TermKind::LetBind: return which == 1 && i == 1;
    case TermKind::LamPair: return i == 0;
    default: return false;
  }
}

// Whether binder field `which` is the visible binding of its name in child `i`
// (a second binder of the same name on the same node shadows the first).
bool visible_in(const Term& t, int which, int i) {
  if (!scopes_over(t, which, i)) return false;
  if (which == 1 && (binder_fields(t.kind) & 2) && t.var == t.var2 && scopes_over(t, 2, i)) return false;
  return true;
}

// Names bound by `t` inside child `i`.
std::vector<std::string> bound_in_child(const Term& t, int i) {
  std::vector<std::string> out;
  int f = binder_fields(t.kind);
  if ((f & 1) && scopes_over(t, 1, i)) out.push_back(t.var);
  if ((f & 2) && scopes_over(t, 2, i)) out.push_back(t.var2);
  return out;
}

std::array<TermPtr, 3> kids(const Term& t) { return {t.t1, t.t2, t.t3}; }

}  // namespace

// ---------------------------------------------------------------------------
// Constructors

namespace mk {
TermPtr var(std::string x) {
  Term t = base(TermKind::Var);
  t.var = std::move(x);
  return node(std::move(t));
}
TermPtr abs(std::string x, TypePtr a, TermPtr body) {
  Term t = base(TermKind::Abs);
  t.var = std::move(x);
  t.type = std::move(a);
  t.t1 = std::move(body);
  return node(std::move(t));
}
TermPtr app(TermPtr m, TermPtr n) {
  Term t = base(TermKind::App);
  t.t1 = std::move(m);
  t.t2 = std::move(n);
  return node(std::move(t));
}
TermPtr unit() { return node(base(TermKind::UnitVal)); }
TermPtr let_unit(TermPtr m, TermPtr n) {
  Term t = base(TermKind::LetUnit);
  t.t1 = std::move(m);
  t.t2 = std::move(n);
  return node(std::move(t));
}
TermPtr tensor(TermPtr m, TermPtr n) {
  Term t = base(TermKind::Tensor);
  t.t1 = std::move(m);
  t.t2 = std::move(n);
  return node(std::move(t));
}
TermPtr let_tensor(std::string x, TypePtr a, std::string y, TypePtr b, TermPtr m, TermPtr n) {
  Term t = base(TermKind::LetTensor);
  t.var = std::move(x);
  t.type = std::move(a);
  t.var2 = std::move(y);
  t.type2 = std::move(b);
  t.t1 = std::move(m);
  t.t2 = std::move(n);
  return node(std::move(t));
}
TermPtr inl(TermPtr m) {
  Term t = base(TermKind::InL);
  t.t1 = std::move(m);
  return node(std::move(t));
}
TermPtr inr(TermPtr m) {
  Term t = base(TermKind::InR);
  t.t1 = std::move(m);
  return node(std::move(t));
}
TermPtr match(TermPtr p, std::string x, TypePtr a, TermPtr m, std::string y, TypePtr b, TermPtr n) {
  Term t = base(TermKind::Match);
  t.t1 = std::move(p);
  t.var = std::move(x);
  t.type = std::move(a);
  t.t2 = std::move(m);
  t.var2 = std::move(y);
  t.type2 = std::move(b);
  t.t3 = std::move(n);
  return node(std::move(t));
}
TermPtr split(TypePtr a) {
  Term t = base(TermKind::Split);
  t.type = std::move(a);
  return node(std::move(t));
}
TermPtr letrec(std::string f, TypePtr a, TypePtr b, std::string x, TermPtr m, TermPtr n) {
  Term t = base(TermKind::LetRec);
  t.var = std::move(f);
  t.var2 = std::move(x);
  t.type = std::move(a);
  t.type2 = std::move(b);
  t.t1 = std::move(m);
  t.t2 = std::move(n);
  return node(std::move(t));
}
TermPtr letrec_n(int n, std::string f, TypePtr a, TypePtr b, std::string x, TermPtr m, TermPtr body) {
  Term t = base(TermKind::LetRecN);
  t.bound = n;
  t.var = std::move(f);
  t.var2 = std::move(x);
  t.type = std::move(a);
  t.type2 = std::move(b);
  t.t1 = std::move(m);
  t.t2 = std::move(body);
  return node(std::move(t));
}
TermPtr omega(TypePtr a) {
  Term t = base(TermKind::Omega);
  t.type = std::move(a);
  return node(std::move(t));
}
TermPtr meas() { return node(base(TermKind::Meas)); }
TermPtr new_() { return node(base(TermKind::New)); }
TermPtr gate(GatePtr g) {
  Term t = base(TermKind::Gate);
  t.gate = std::move(g);
  return node(std::move(t));
}
TermPtr gate(const std::string& builtin_name) {
  GatePtr g = builtin_gate(builtin_name);
  if (!g) throw std::invalid_argument("unknown gate " + builtin_name);
  return gate(g);
}
TermPtr tt() { return node(base(TermKind::True)); }
TermPtr ff() { return node(base(TermKind::False)); }
TermPtr nil() { return node(base(TermKind::Nil)); }
TermPtr cons(TermPtr h, TermPtr tl) {
  Term t = base(TermKind::Cons);
  t.t1 = std::move(h);
  t.t2 = std::move(tl);
  return node(std::move(t));
}
TermPtr lam_unit(TermPtr body) {
  Term t = base(TermKind::LamUnit);
  t.t1 = std::move(body);
  return node(std::move(t));
}
TermPtr if_(TermPtr p, TermPtr then_branch, TermPtr else_branch) {
  Term t = base(TermKind::If);
  t.t1 = std::move(p);
  t.t2 = std::move(then_branch);
  t.t3 = std::move(else_branch);
  return node(std::move(t));
}
TermPtr let_bind(std::string x, TypePtr a, TermPtr m, TermPtr n) {
  Term t = base(TermKind::LetBind);
  t.var = std::move(x);
  t.type = std::move(a);
  t.t1 = std::move(m);
  t.t2 = std::move(n);
  return node(std::move(t));
}
TermPtr seq(TermPtr m, TermPtr n) {
  Term t = base(TermKind::Seq);
  t.t1 = std::move(m);
  t.t2 = std::move(n);
  return node(std::move(t));
}
TermPtr lam_pair(std::string x, TypePtr a, std::string y, TypePtr b, TermPtr body) {
  Term t = base(TermKind::LamPair);
  t.var = std::move(x);
  t.type = std::move(a);
  t.var2 = std::move(y);
  t.type2 = std::move(b);
  t.t1 = std::move(body);
  return node(std::move(t));
}
}  // namespace mk

TermPtr with_pos(const TermPtr& t, SourcePos pos) {
  Term copy = *t;
  copy.pos = pos;
  return node(std::move(copy));
}

TermPtr with_children(const Term& t, TermPtr c1, TermPtr c2, TermPtr c3) {
  Term copy = t;
  copy.t1 = std::move(c1);
  copy.t2 = std::move(c2);
  copy.t3 = std::move(c3);
  return node(std::move(copy));
}

// ---------------------------------------------------------------------------
// Predicates

bool is_sugar(TermKind k) { return k >= TermKind::True; }

bool contains_omega(const Term& m) {
  if (m.kind == TermKind::Omega) return true;
  for (const TermPtr& c : {m.t1, m.t2, m.t3})
    if (c && contains_omega(*c)) return true;
  return false;
}

bool contains_sugar(const Term& m) {
  if (is_sugar(m.kind)) return true;
  for (const auto& c : kids(m))
    if (c && contains_sugar(*c)) return true;
  return false;
}

bool is_value(const Term& m) {
  switch (m.kind) {
    case TermKind::Var:
    case TermKind::Abs:
    case TermKind::UnitVal:
    case TermKind::Split:
    case TermKind::Meas:
    case TermKind::New:
    case TermKind::Gate:
    case TermKind::True:
    case TermKind::False:
    case TermKind::Nil:
    case TermKind::LamUnit:
    case TermKind::LamPair: return true;
    case TermKind::Tensor:
    case TermKind::Cons: return is_value(*m.t1) && is_value(*m.t2);
    case TermKind::InL:
    case TermKind::InR: return is_value(*m.t1);
    default: return false;
  }
}

// ---------------------------------------------------------------------------
// Variables

namespace {

void free_rec(const Term& t, std::multiset<std::string>& bound, VarSet& out) {
  if (t.kind == TermKind::Var) {
    if (!bound.count(t.var)) out.insert(t.var);
    return;
  }
  auto ch = kids(t);
  for (int i = 0; i < 3; ++i) {
    if (!ch[i]) continue;
    auto b = bound_in_child(t, i);
    for (const auto& x : b) bound.insert(x);
    free_rec(*ch[i], bound, out);
    for (const auto& x : b) bound.erase(bound.find(x));
  }
}

void names_rec(const Term& t, VarSet& out) {
  if (!t.var.empty()) out.insert(t.var);
  if (!t.var2.empty()) out.insert(t.var2);
  for (const auto& c : kids(t))
    if (c) names_rec(*c, out);
}

}  // namespace

VarSet free_vars(const Term& m) {
  std::multiset<std::string> bound;
  VarSet out;
  free_rec(m, bound, out);
  return out;
}

VarSet all_names(const Term& m) {
  VarSet out;
  names_rec(m, out);
  return out;
}

std::string fresh_name(const std::string& base_name, const VarSet& avoid) {
  if (!avoid.count(base_name)) return base_name;
  for (int k = 1;; ++k) {
    std::string cand = base_name + "'" + std::to_string(k);
    if (!avoid.count(cand)) return cand;
  }
}

namespace {

// Rename the binder stored in field `which` (1 = var, 2 = var2) of node `t`.
TermPtr rename_binder(const Term& t, int which, const std::string& to) {
  const std::string from = which == 1 ? t.var : t.var2;
  auto ch = kids(t);
  std::array<TermPtr, 3> out = ch;
  for (int i = 0; i < 3; ++i)
    if (ch[i] && visible_in(t, which, i)) out[i] = substitute(ch[i], mk::var(to), from);
  Term copy = t;
  if (which == 1) copy.var = to; else copy.var2 = to;
  copy.t1 = out[0];
  copy.t2 = out[1];
  copy.t3 = out[2];
  return node(std::move(copy));
}

TermPtr subst_rec(const TermPtr& m, const TermPtr& v, const std::string& x, const VarSet& fv_v) {
  const Term& t = *m;
  if (t.kind == TermKind::Var) return t.var == x ? v : m;
  VarSet fv_m = free_vars(t);
  if (!fv_m.count(x)) return m;

  TermPtr cur = m;
  int fields = binder_fields(t.kind);
  for (int which = 1; which <= 2; ++which) {
    if (!(fields & which)) continue;
    const std::string& name = which == 1 ? cur->var : cur->var2;
    if (!fv_v.count(name) || name == x) continue;
    VarSet avoid = all_names(*cur);
    avoid.insert(fv_v.begin(), fv_v.end());
    avoid.insert(x);
    cur = rename_binder(*cur, which, fresh_name(name, avoid));
  }

  const Term& c = *cur;
  auto ch = kids(c);
  std::array<TermPtr, 3> out = ch;
  for (int i = 0; i < 3; ++i) {
    if (!ch[i]) continue;
    auto b = bound_in_child(c, i);
    if (std::find(b.begin(), b.end(), x) != b.end()) continue;
    out[i] = subst_rec(ch[i], v, x, fv_v);
  }
  return with_children(c, out[0], out[1], out[2]);
}

}  // namespace

TermPtr substitute(const TermPtr& m, const TermPtr& v, const std::string& x) {
  return subst_rec(m, v, x, free_vars(*v));
}

// ---------------------------------------------------------------------------
// Desugaring

namespace {
TermPtr desugar_node(const TermPtr& m);
}

TermPtr desugar(const TermPtr& m) {
  if (!is_sugar(m->kind)) return desugar_node(m);
  return with_pos(desugar_node(m), m->pos);
}

namespace {
TermPtr desugar_node(const TermPtr& m) {
  const Term& t = *m;
  auto d = [](const TermPtr& c) { return c ? desugar(c) : nullptr; };
  switch (t.kind) {
    case TermKind::True: return mk::inr(mk::unit());
    case TermKind::False:
    case TermKind::Nil: return mk::inl(mk::unit());
    case TermKind::Cons: return mk::inr(mk::tensor(d(t.t1), d(t.t2)));
    case TermKind::LamUnit: {
      TermPtr body = d(t.t1);
      std::string z = fresh_name("z", all_names(*body));
      return mk::abs(z, Type::unit(), mk::let_unit(mk::var(z), body));
    }
    case TermKind::If: {
      TermPtr p = d(t.t1), th = d(t.t2), el = d(t.t3);
      VarSet avoid = all_names(*th);
      VarSet more = all_names(*el);
      avoid.insert(more.begin(), more.end());
      std::string x = fresh_name("u", avoid);
      avoid.insert(x);
      std::string y = fresh_name("u", avoid);
      return mk::match(p, x, Type::unit(), mk::let_unit(mk::var(x), el), y, Type::unit(),
                       mk::let_unit(mk::var(y), th));
    }
    case TermKind::LetBind: return mk::app(mk::abs(t.var, t.type, d(t.t2)), d(t.t1));
    case TermKind::Seq: return mk::let_unit(d(t.t1), d(t.t2));
    case TermKind::LamPair: {
      TermPtr body = d(t.t1);
      VarSet avoid = all_names(*body);
      avoid.insert(t.var);
      avoid.insert(t.var2);
      std::string z = fresh_name("p", avoid);
      return mk::abs(z, Type::tensor(t.type, t.type2),
                     mk::let_tensor(t.var, t.type, t.var2, t.type2, mk::var(z), body));
    }
    default: {
      if (!t.t1 && !t.t2 && !t.t3) return m;
      return with_children(t, d(t.t1), d(t.t2), d(t.t3));
    }
  }
}
}  // namespace

// ---------------------------------------------------------------------------
// Alpha conversion

namespace {

using Env = std::map<std::string, std::string>;

template <class Namer>
TermPtr rebind(const TermPtr& m, const Env& env, Namer& namer) {
  const Term& t = *m;
  if (t.kind == TermKind::Var) {
    auto it = env.find(t.var);
    if (it == env.end()) return m;
    if (it->second == t.var) return m;
    return mk::var(it->second);
  }
  Term copy = t;
  int fields = binder_fields(t.kind);
  std::string nv = t.var, nv2 = t.var2;
  if (fields & 1) nv = namer(t.var, env);
  if (fields & 2) nv2 = namer(t.var2, env);
  copy.var = nv;
  copy.var2 = nv2;
  auto ch = kids(t);
  std::array<TermPtr, 3> out{};
  for (int i = 0; i < 3; ++i) {
    if (!ch[i]) continue;
    Env e = env;
    if ((fields & 1) && visible_in(t, 1, i)) e[t.var] = nv;
    if ((fields & 2) && visible_in(t, 2, i)) e[t.var2] = nv2;
    out[i] = rebind(ch[i], e, namer);
  }
  copy.t1 = out[0];
  copy.t2 = out[1];
  copy.t3 = out[2];
  return node(std::move(copy));
}

}  // namespace

TermPtr alpha_canonical(const TermPtr& m) {
  int counter = 0;
  auto namer = [&counter](const std::string&, const Env&) { return "%" + std::to_string(counter++); };
  return rebind(m, Env{}, namer);
}

TermPtr rename_apart(const TermPtr& m, const VarSet& avoid) {
  VarSet used = all_names(*m);
  used.insert(avoid.begin(), avoid.end());
  auto namer = [&](const std::string& name, const Env& env) {
    bool clash = avoid.count(name) > 0;
    for (const auto& [k, v] : env)
      if (v == name || k == name) clash = true;
    if (!clash) return name;
    std::string f = fresh_name(name, used);
    used.insert(f);
    return f;
  };
  return rebind(m, Env{}, namer);
}

bool term_equal(const Term& a, const Term& b) {
  if (&a == &b) return true;
  if (a.kind != b.kind || a.var != b.var || a.var2 != b.var2 || a.bound != b.bound) return false;
  auto teq = [](const TypePtr& x, const TypePtr& y) {
    if (!x || !y) return !x && !y;
    return type_equal(*x, *y);
  };
  if (!teq(a.type, b.type) || !teq(a.type2, b.type2)) return false;
  if (a.kind == TermKind::Gate) {
    if (a.gate->name != b.gate->name || a.gate->matrix.rows() != b.gate->matrix.rows()) return false;
    if ((a.gate->matrix - b.gate->matrix).cwiseAbs().maxCoeff() > 1e-12) return false;
  }
  auto ca = kids(a), cb = kids(b);
  for (int i = 0; i < 3; ++i) {
    if (!ca[i] || !cb[i]) {
      if (ca[i] || cb[i]) return false;
      continue;
    }
    if (!term_equal(*ca[i], *cb[i])) return false;
  }
  return true;
}

bool alpha_equal(const TermPtr& a, const TermPtr& b) {
  return term_equal(*alpha_canonical(a), *alpha_canonical(b));
}

// ---------------------------------------------------------------------------
// Approximants

TermPtr lower_approximant(const TermPtr& m, int n) {
  const Term& t = *m;
  auto r = [n](const TermPtr& c) { return c ? lower_approximant(c, n) : nullptr; };
  if (t.kind == TermKind::LetRec)
    return mk::letrec_n(n, t.var, t.type, t.type2, t.var2, r(t.t1), r(t.t2));
  if (!t.t1 && !t.t2 && !t.t3) return m;
  return with_children(t, r(t.t1), r(t.t2), r(t.t3));
}

TermPtr zero_approximant(const TermPtr& m) {
  const Term& t = *m;
  auto r = [](const TermPtr& c) { return c ? zero_approximant(c) : nullptr; };
  if (t.kind == TermKind::LetRec) {
    TermPtr stub = mk::abs(t.var2, t.type, mk::omega(t.type2));
    return substitute(r(t.t2), stub, t.var);
  }
  if (!t.t1 && !t.t2 && !t.t3) return m;
  return with_children(t, r(t.t1), r(t.t2), r(t.t3));
}

bool is_finitary(const Term& m) {
  if (m.kind == TermKind::LetRec) return false;
  for (const auto& c : kids(m))
    if (c && !is_finitary(*c)) return false;
  return true;
}

}  // namespace qlam

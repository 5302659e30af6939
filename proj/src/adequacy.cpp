#include "qlam/adequacy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

namespace qlam {

std::string to_string(Verdict v) { return v == Verdict::Pass ? "PASS" : "FAIL"; }

std::string source_hash(const TermPtr& m) {
  // FNV-1a, 64 bit.
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : pretty(alpha_canonical(m))) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

struct Demand {
  int copies = 0;  // uses of exponential variables
  int conses = 0;  // list introductions

  Demand& operator+=(const Demand& o) {
    copies += o.copies;
    conses += o.conses;
    return *this;
  }
};

Demand max_of(const Demand& a, const Demand& b) {
  return {std::max(a.copies, b.copies), std::max(a.conses, b.conses)};
}

// Upper bound on what one evaluation can demand: the body of letrec^n runs at
// most n times, and only one branch of a match runs.
Demand demand(const Derivation& d) {
  const auto& p = d.premises;
  switch (d.rule) {
    case Rule::Ax:
    case Rule::AxD: {
      const Binding* b = d.ctx.find(d.term->var);
      return {b && b->type->is_bang() ? 1 : 0, 0};
    }
    case Rule::SumE: {
      Demand out = demand(*p[0]);
      out += max_of(demand(*p[1]), demand(*p[2]));
      return out;
    }
    case Rule::RecN: {
      Demand body = demand(*p[0]);
      Demand out{body.copies * d.term->bound, body.conses * d.term->bound};
      out += demand(*p[1]);
      return out;
    }
    case Rule::ListI: {
      Demand out = demand(*p[0]);
      if (d.term->kind == TermKind::InR) out.conses += 1;
      return out;
    }
    default: {
      Demand out;
      for (const auto& q : p) out += demand(*q);
      return out;
    }
  }
}

// Typecheck at unit; a program that only has some other type raises NotUnitType.
DerivationPtr check_unit(const TermPtr& m) {
  VarSet fv = free_vars(m);
  if (!fv.empty()) throw NotClosed("program has free variable '" + *fv.begin() + "'");
  try {
    return typecheck(Context(), m, Type::unit());
  } catch (const TypeError& e) {
    DerivationPtr inferred;
    try {
      inferred = typecheck(Context(), m);
    } catch (const TypeError&) {
      throw e;
    }
    throw NotUnitType("program has type " + to_string(inferred->type) + ", expected unit");
  }
}

double unit_value(const cpm::Morphism& f) {
  cpm::CMatrix one = cpm::CMatrix::Identity(1, 1);
  double v = 0;
  for (const auto& [b, x] : f.apply(0, one)) v += x(0, 0).real();
  return v;
}

}  // namespace

TruncationConfig static_truncation(const TermPtr& m, TruncationConfig base) {
  Demand dm = demand(*check_unit(m));
  base.bang_max = std::max(1, dm.copies);
  base.list_max = std::max(1, dm.conses);
  return base;
}

AdequacyReport check_adequacy(const TermPtr& m, const TruncationConfig& t, const AdequacyOptions& opts) {
  DerivationPtr d = check_unit(m);

  AdequacyReport r;
  r.source_hash = source_hash(m);
  r.finitary = is_finitary(*m);
  Denotation den = denote_term(*d, t);
  r.denot = unit_value(den.morphism);
  r.fix_converged = den.converged;
  HaltBounds h = halt_probability(make_closure(m), opts.max_steps, opts.prune_eps);
  r.halt_lower = h.lower;
  r.residual = h.residual;
  bool ok = r.denot >= r.halt_lower - opts.tol && r.denot <= r.halt_lower + r.residual + opts.tol;
  if (r.finitary) ok = ok && r.residual <= opts.tol;
  r.verdict = ok ? Verdict::Pass : Verdict::Fail;
  return r;
}

// ---------------------------------------------------------------------------
// Generators and consumers

namespace {

TermPtr coin() { return mk::app(mk::meas(), mk::app(mk::gate("H"), mk::app(mk::new_(), mk::ff()))); }

TermPtr call_unit(const TermPtr& f) { return mk::app(f, mk::unit()); }

TermPtr con(const TypePtr& a);

TermPtr gen(const TypePtr& a) {
  switch (a->kind) {
    case TypeKind::Qubit: return mk::lam_unit(mk::app(mk::new_(), mk::ff()));
    case TypeKind::Unit: return mk::lam_unit(mk::unit());
    case TypeKind::LinArrow:
      return mk::lam_unit(mk::abs("x", a->left, mk::let_unit(mk::app(con(a->left), mk::var("x")),
                                                                call_unit(gen(a->right)))));
    case TypeKind::BangArrow: {
      TypePtr lin = Type::lin(a->left, a->right);
      return mk::lam_unit(mk::abs("x", a->left, mk::app(call_unit(gen(lin)), mk::var("x"))));
    }
    case TypeKind::Tensor:
      return mk::lam_unit(mk::tensor(call_unit(gen(a->left)), call_unit(gen(a->right))));
    case TypeKind::Sum:
      // The binding annotates the injections, which cannot be inferred.
      return mk::lam_unit(mk::let_bind(
          "s", a, mk::if_(coin(), mk::inl(call_unit(gen(a->left))), mk::inr(call_unit(gen(a->right)))), mk::var("s")));
    case TypeKind::List: {
      TermPtr body = mk::let_unit(
          mk::var("u"), mk::if_(coin(), mk::nil(),
                                mk::cons(call_unit(gen(a->left)), call_unit(mk::var("f")))));
      return (mk::letrec("f", Type::unit(), a, "u", body, mk::var("f")));
    }
  }
  throw std::logic_error("generate_term: unknown type");
}

TermPtr con(const TypePtr& a) {
  switch (a->kind) {
    case TypeKind::Qubit:
      return (mk::abs("x", a, mk::if_(mk::app(mk::meas(), mk::var("x")), mk::unit(), mk::unit())));
    case TypeKind::Unit: return (mk::lam_unit(mk::unit()));
    case TypeKind::LinArrow:
      return mk::abs("f", a, mk::app(con(a->right),
                                     mk::app(mk::var("f"), call_unit(gen(a->left)))));
    case TypeKind::BangArrow: {
      TermPtr once = mk::app(con(Type::lin(a->left, a->right)), mk::var("f"));
      TermPtr body = mk::if_(coin(), mk::unit(), mk::seq(once, mk::app(mk::var("g"), mk::var("f"))));
      return (mk::letrec("g", a, Type::unit(), "f", body, mk::var("g")));
    }
    case TypeKind::Tensor:
      return (mk::abs(
          "x", a,
          mk::let_tensor("z1", a->left, "z2", a->right, mk::var("x"),
                         mk::seq(mk::app(con(a->left), mk::var("z1")),
                                 mk::app(con(a->right), mk::var("z2"))))));
    case TypeKind::Sum:
      return mk::abs("x", a,
                     mk::match(mk::var("x"), "z1", a->left, mk::app(con(a->left), mk::var("z1")), "z2",
                               a->right, mk::app(con(a->right), mk::var("z2"))));
    case TypeKind::List: {
      TypePtr cell = Type::tensor(a->left, a);
      TermPtr rest = mk::let_tensor("y1", a->left, "y2", a, mk::var("z2"),
                                    mk::seq(mk::app(con(a->left), mk::var("y1")),
                                            mk::app(mk::var("f"), mk::var("y2"))));
      TermPtr body =
          mk::match(mk::app(mk::split(a->left), mk::var("x")), "z1", Type::unit(), mk::var("z1"), "z2", cell, rest);
      return (mk::letrec("f", a, Type::unit(), "x", body, mk::var("f")));
    }
  }
  throw std::logic_error("consume_term: unknown type");
}

}  // namespace

TermPtr generate_term(const TypePtr& a) { return desugar(gen(a)); }
TermPtr consume_term(const TypePtr& a) { return desugar(con(a)); }

TermPtr biased_coin(double rho) {
  if (!(rho >= 0 && rho <= 1)) throw std::invalid_argument("biased_coin: rho must lie in [0, 1]");
  const double c = std::sqrt(rho), s = std::sqrt(1 - rho);
  CMatrix v(2, 2);
  v << c, -s, s, c;
  return mk::app(mk::meas(), mk::app(mk::gate(make_gate("V", v)), mk::app(mk::new_(), mk::ff())));
}

// ---------------------------------------------------------------------------
// Program synthesis

namespace {

constexpr int kMaxCopies = 4;
constexpr int kMaxListLength = 4;
// With !(!A -o B) in scope the symmetry groups grow like (K!)^K.
constexpr int kMaxNestedCopies = 2;

bool has_nested_bang(const Type& a) {
  if (a.kind == TypeKind::BangArrow && (a.left->is_bang() || a.right->is_bang())) return true;
  return (a.left && has_nested_bang(*a.left)) || (a.right && has_nested_bang(*a.right));
}

bool nested_bang_in_scope(const Derivation& d) {
  for (const auto& b : d.ctx.bindings())
    if (has_nested_bang(*b.type)) return true;
  if (has_nested_bang(*d.type)) return true;
  for (const auto& p : d.premises)
    if (nested_bang_in_scope(*p)) return true;
  return false;
}

// Small enough to denote quickly.
bool tractable(const TermPtr& m) {
  TruncationConfig t = static_truncation(m);
  if (t.list_max > kMaxListLength || t.bang_max > kMaxCopies) return false;
  return t.bang_max <= kMaxNestedCopies || !nested_bang_in_scope(*typecheck(Context(), m, Type::unit()));
}

class Synth {
 public:
  Synth(std::uint64_t seed, int budget) : rng_(seed), budget_(budget) {}

  TermPtr unit_term() {
    if (spent()) return pick(4) == 0 ? consume(Type::bit(), bit_leaf()) : mk::unit();
    switch (pick(10)) {
      case 0: return mk::unit();
      case 1: {
        TypePtr a = random_type(1 + pick(3));
        return mk::app(consume_term(a), call_unit(generate_term(a)));
      }
      case 2: return consume(Type::bit(), bit_term());
      case 3: return mk::seq(unit_term(), unit_term());
      case 4: return mk::if_(bit_term(), unit_term(), unit_term());
      case 5: return pick(3) == 0 ? mk::omega(Type::unit()) : consume(Type::qubit(), qubit_term());
      case 6: {
        // Coin-guarded loop, cut at a small depth.
        int n = 1 + pick(3);
        TermPtr body = mk::let_unit(mk::var("u"), mk::if_(bit_term(), unit_term(), mk::app(mk::var("f"), mk::unit())));
        return mk::letrec_n(n, "f", Type::unit(), Type::unit(), "u", body, mk::app(mk::var("f"), mk::unit()));
      }
      case 7: return consume(Type::qubit(), qubit_term());
      case 8: {
        TermPtr pair = mk::app(mk::gate("CNOT"), mk::tensor(qubit_term(), qubit_term()));
        return mk::app(consume_term(Type::tensor(Type::qubit(), Type::qubit())), pair);
      }
      default: {
        // A duplicable measurement routine used twice.
        TypePtr fn = Type::bang(Type::qubit(), Type::bit());
        TermPtr use1 = consume(Type::bit(), mk::app(mk::var("h"), qubit_term()));
        TermPtr use2 = consume(Type::bit(), mk::app(mk::var("h"), qubit_term()));
        TermPtr routine = mk::abs("x", Type::qubit(), mk::app(mk::meas(), mk::app(random_gate(), mk::var("x"))));
        return mk::app(mk::abs("h", fn, mk::seq(use1, use2)), routine);
      }
    }
  }

  TermPtr bit_leaf() {
    switch (pick(3)) {
      case 0: return mk::tt();
      case 1: return mk::ff();
      default: return biased_coin(unit_interval());
    }
  }

 private:
  std::mt19937_64 rng_;
  int budget_;

  int pick(int n) { return static_cast<int>(rng_() % static_cast<std::uint64_t>(n)); }
  double unit_interval() { return std::uniform_real_distribution<double>(0, 1)(rng_); }
  bool spent() { return budget_-- <= 0; }

  TermPtr consume(const TypePtr& a, TermPtr m) { return mk::app(consume_term(a), std::move(m)); }

  TermPtr random_gate() {
    static const char* names[] = {"H", "X", "Y", "Z", "S", "T"};
    return mk::gate(names[pick(6)]);
  }


  TermPtr bit_term() {
    if (spent()) return bit_leaf();
    switch (pick(4)) {
      case 0: return bit_leaf();
      case 1: return mk::app(mk::meas(), qubit_term());
      case 2: return mk::if_(bit_term(), bit_term(), bit_term());
      default: return call_unit(generate_term(Type::bit()));
    }
  }

  TermPtr qubit_term() {
    if (spent()) return mk::app(mk::new_(), bit_leaf());
    switch (pick(4)) {
      case 0: return mk::app(mk::new_(), bit_term());
      case 1: return mk::app(random_gate(), qubit_term());
      case 2: {
        TermPtr pair = mk::app(mk::gate(pick(2) ? "CNOT" : "CZ"), mk::tensor(qubit_term(), qubit_term()));
        return mk::let_tensor("a", Type::qubit(), "b", Type::qubit(), pair,
                              mk::seq(consume(Type::qubit(), mk::var("b")), mk::var("a")));
      }
      default: return call_unit(generate_term(Type::qubit()));
    }
  }

  // Types with small webs; ! only at the top of a function type.
  TypePtr random_type(int size) {
    if (size <= 1) {
      switch (pick(3)) {
        case 0: return Type::qubit();
        case 1: return Type::unit();
        default: return Type::bit();
      }
    }
    switch (pick(5)) {
      case 0: return Type::tensor(random_type(size / 2), random_type(size - size / 2));
      case 1: return Type::sum(random_type(size / 2), random_type(size - size / 2));
      case 2: return Type::lin(random_type(1), random_type(size - 1));
      case 3: return Type::bang(random_type(1), random_type(1));
      default: return Type::list(random_type(1));
    }
  }
};

}  // namespace

TermPtr random_finitary_program(std::uint64_t seed, int budget) {
  // Redraw until the truncation that covers the program stays small.
  for (std::uint64_t attempt = 0;; ++attempt) {
    const std::uint64_t s = seed * 0x100000001b3ULL + attempt;
    TermPtr m = lower_approximant(desugar(Synth(s, budget).unit_term()), 1 + static_cast<int>(s % 3));
    if (tractable(m)) return m;
  }
}

TermPtr random_letrec_program(std::uint64_t seed, int budget) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    std::mt19937_64 rng(seed * 0x100000001b3ULL + attempt);
    auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };
    // Exit probability at least 0.3 keeps the fixpoint iteration short. The
    // recursive branch does not measure, so the reduction tree stays a spine.
    const double rho = 0.3 + 0.6 * std::uniform_real_distribution<double>(0, 1)(rng);
    Synth inner(rng(), budget);
    TermPtr exit_branch = lower_approximant(desugar(inner.unit_term()), 1 + pick(2));
    TermPtr m;
    switch (pick(3)) {
      case 0: {
        TermPtr body = mk::let_unit(mk::var("u"), mk::if_(biased_coin(rho), mk::app(mk::var("f"), mk::unit()), exit_branch));
        m = mk::letrec("f", Type::unit(), Type::unit(), "u", body, mk::app(mk::var("f"), mk::unit()));
        break;
      }
      case 1: {
        // The guard measures the qubit handed down by the previous call.
        const double c = std::sqrt(rho), s = std::sqrt(1 - rho);
        CMatrix v(2, 2);
        v << c, -s, s, c;
        TermPtr guard = mk::app(mk::meas(), mk::app(mk::gate(make_gate("V", v)), mk::var("q")));
        TermPtr fresh = mk::app(mk::new_(), mk::ff());
        TermPtr body = mk::if_(guard, mk::app(mk::var("f"), fresh), exit_branch);
        m = mk::letrec("f", Type::qubit(), Type::unit(), "q", body, mk::app(mk::var("f"), fresh));
        break;
      }
      default: {
        TermPtr body = mk::let_unit(mk::var("u"), mk::if_(biased_coin(rho), mk::app(mk::var("f"), mk::unit()),
                                                            mk::seq(exit_branch, inner.bit_leaf())));
        TermPtr use = mk::app(consume_term(Type::bit()), mk::app(mk::var("f"), mk::unit()));
        m = mk::letrec("f", Type::unit(), Type::bit(), "u", body, use);
        break;
      }
    }
    m = desugar(m);
    if (tractable(m)) return m;
  }
}

}  // namespace qlam

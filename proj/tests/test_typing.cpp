#include "support.hpp"

#include <doctest.h>

using namespace qlam;

namespace {

TypeErrorKind error_kind(const std::string& src, const std::string& type = "", const Context& ctx = {}) {
  try {
    typecheck(ctx, parse_term(src), type.empty() ? nullptr : parse_type(type));
  } catch (const TypeError& e) {
    return e.kind;
  }
  FAIL("expected a type error for " << src);
  return TypeErrorKind::InvalidContext;
}

DerivationPtr check(const std::string& src, const std::string& type = "", const Context& ctx = {}) {
  return typecheck(ctx, parse_term(src), type.empty() ? nullptr : parse_type(type));
}

}  // namespace

TEST_CASE("the corpus has its declared types") {
  for (const auto& e : example_programs()) {
    if (e.name == "ill-linear") continue;
    Program p = parse_program(e.source);
    REQUIRE_MESSAGE(p.declared_type, e.name);
    DerivationPtr d = typecheck(Context(), p.term, p.declared_type);
    CHECK_MESSAGE(type_equal(d->type, p.declared_type), e.name);
  }
}

TEST_CASE("inferred judgements") {
  CHECK(to_string(check("meas (#H (new tt))")->type) == "bit");
  CHECK(to_string(check("lam x:qubit. #Nc (x * new ff)")->type) == "qubit -o qubit * qubit");
  CHECK(to_string(check("lam x:qubit * y:qubit. (meas x) * y")->type) == "qubit * qubit -o bit * qubit");
  CHECK(to_string(check("split[qubit]")->type) == "qubit list -o unit + qubit * qubit list");
  CHECK(to_string(check("letrec f (x:qubit) : bit = meas x in f (new ff)")->type) == "bit");
  CHECK(to_string(check("#Nc")->type) == "qubit * qubit -o qubit * qubit");
}

TEST_CASE("promotion of closed values") {
  DerivationPtr d = check("lam x:qubit. #Nc (x * new ff)", "!(qubit -o qubit * qubit)");
  CHECK(d->rule == Rule::Promote);
  REQUIRE(d->premises.size() == 1);
  CHECK(d->premises[0]->rule == Rule::LolliI);
  CHECK(to_string(d->premises[0]->type) == "qubit -o qubit * qubit");
  // Constants are duplicable.
  CHECK(check("meas", "!(qubit -o bit)")->rule == Rule::Promote);
}

TEST_CASE("exponential variables may be dropped, copied and derelicted") {
  check("lam f:!(unit -o unit). ()", "!(unit -o unit) -o unit");
  check("lam f:!(unit -o unit). (f (); f ())", "!(unit -o unit) -o unit");
  DerivationPtr d = check("lam f:!(qubit -o bit). f", "!(qubit -o bit) -o (qubit -o bit)");
  CHECK(d->premises[0]->rule == Rule::AxD);
  CHECK(to_string(check("lam f:!(qubit -o bit). f", "!(qubit -o bit) -o !(qubit -o bit)")->premises[0]->type) ==
        "!(qubit -o bit)");
}

TEST_CASE("lists are built through the list introduction coercion") {
  DerivationPtr d = check("cons (new ff) nil", "qubit list");
  CHECK(d->rule == Rule::ListI);
  REQUIRE(d->premises.size() == 1);
  CHECK(to_string(d->premises[0]->type) == "unit + qubit * qubit list");
}

TEST_CASE("type error kinds") {
  CHECK(error_kind("lam x:qubit. ()") == TypeErrorKind::LinearVarUnused);
  CHECK(error_kind("lam x:qubit. x * x") == TypeErrorKind::LinearVarDuplicated);
  Context fctx({{"f", parse_type("!(unit -o (qubit -o bit))")}});
  CHECK(error_kind("f ()", "!(qubit -o bit)", fctx) == TypeErrorKind::PromotionOfNonValue);
  CHECK(error_kind("(lam f:unit -o unit. f) (lam x:unit. x)", "!(unit -o unit)") ==
        TypeErrorKind::PromotionUnderLinearContext);
  CHECK(error_kind("lam q:qubit. lam x:unit. let () = x in meas q", "qubit -o !(unit -o bit)") ==
        TypeErrorKind::PromotionUnderLinearContext);
  CHECK(error_kind("meas ()") == TypeErrorKind::TypeMismatch);
  CHECK(error_kind("tt", "qubit") == TypeErrorKind::TypeMismatch);
  CHECK(error_kind("x") == TypeErrorKind::UnboundVariable);
  CHECK(error_kind("inl ()") == TypeErrorKind::AnnotationRequired);
  CHECK(error_kind("match meas (new ff) with (x:unit -> () | y:unit -> let () = y in ())") ==
        TypeErrorKind::LinearVarUnused);
  CHECK_THROWS_AS(Context({{"x", Type::qubit()}, {"x", Type::unit()}}), TypeError);
}

TEST_CASE("omega absorbs linear variables") {
  check("lam x:qubit. omega[unit]", "qubit -o unit");
  check("lam x:qubit. let () = () in omega[bit]", "qubit -o bit");
  check("lam x:qubit. lam b:bit. match b with (u:unit -> let () = u in meas x | v:unit -> let () = v in omega[bit])",
        "qubit -o bit -o bit");
  CHECK(error_kind("lam x:qubit. lam b:bit. match b with (u:unit -> let () = u in ff | v:unit -> let () = v in omega[bit])",
                   "qubit -o bit -o bit") == TypeErrorKind::LinearVarUnused);
}

TEST_CASE("linear context splitting") {
  Context ctx({{"f", Type::bang(Type::unit(), Type::unit())}, {"x", Type::qubit()}, {"y", Type::qubit()}});
  auto [l, r] = split_linear(ctx, {"f", "x"}, {"y"});
  CHECK(l.to_string() == Context({{"f", ctx.bindings()[0].type}, {"x", Type::qubit()}}).to_string());
  CHECK(r.contains("f"));
  CHECK(r.contains("y"));
  CHECK_FALSE(r.contains("x"));
  try {
    split_linear(ctx, {"x", "y"}, {"x"});
    FAIL("expected an error");
  } catch (const TypeError& e) {
    CHECK(e.kind == TypeErrorKind::LinearVarSharedAcrossSplit);
  }
}

TEST_CASE("derivations are unique and binder-insensitive") {
  for (const auto& e : example_programs()) {
    if (e.name == "ill-linear") continue;
    Program p = parse_program(e.source);
    DerivationPtr a = typecheck(Context(), p.term, p.declared_type);
    DerivationPtr b = typecheck(Context(), p.term, p.declared_type);
    CHECK(derivation_equal(*a, *b));
    DerivationPtr c = typecheck(Context(), alpha_canonical(p.term), p.declared_type);
    CHECK(c->rule == a->rule);
    CHECK(print_derivation(*c).size() > 0);
  }
}

TEST_CASE("typing in a context of qubits") {
  Context ctx({{"q1", Type::qubit()}, {"q2", Type::qubit()}});
  CHECK(to_string(check("#Nc (q1 * q2)", "", ctx)->type) == "qubit * qubit");
  CHECK(error_kind("meas q1", "", ctx) == TypeErrorKind::LinearVarUnused);
}

TEST_CASE("generated programs are well typed at unit") {
  for (std::uint64_t s = 0; s < 100; ++s) {
    CHECK_NOTHROW(typecheck(Context(), random_finitary_program(s, 10), Type::unit()));
    if (s < 30) CHECK_NOTHROW(typecheck(Context(), random_letrec_program(s, 10), Type::unit()));
  }
}

TEST_CASE("derivation printing") {
  std::string s = print_derivation(*check("lam x:qubit. x", "qubit -o qubit"));
  CHECK(s.find("-oI:") != std::string::npos);
  CHECK(s.find("ax:") != std::string::npos);
  CHECK(s.find("x : qubit |- x : qubit") != std::string::npos);
}

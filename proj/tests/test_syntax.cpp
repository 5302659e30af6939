#include "support.hpp"

#include <doctest.h>

using namespace qlam;

TEST_CASE("type grammar precedence") {
  auto q = Type::qubit(), u = Type::unit();
  CHECK(type_equal(parse_type("qubit -o qubit -o qubit"), Type::lin(q, Type::lin(q, q))));
  CHECK(type_equal(parse_type("qubit + unit * qubit"), Type::sum(q, Type::tensor(u, q))));
  CHECK(type_equal(parse_type("qubit * qubit list"), Type::tensor(q, Type::list(q))));
  CHECK(type_equal(parse_type("(qubit * qubit) list"), Type::list(Type::tensor(q, q))));
  CHECK(type_equal(parse_type("bit"), Type::sum(u, u)));
  CHECK(type_equal(parse_type("!(qubit -o bit)"), Type::bang(q, Type::bit())));
  CHECK(type_equal(parse_type("qubit * qubit -o bit + unit"), Type::lin(Type::tensor(q, q), Type::sum(Type::bit(), u))));
  CHECK_THROWS_AS(parse_type("qubit -o"), ParseError);
  CHECK_THROWS_AS(parse_type("!qubit"), ParseError);
}

TEST_CASE("type printing round-trips") {
  for (const char* s : {"qubit", "unit", "bit * bit -o qubit", "!(unit -o (qubit -o bit * bit) * (bit * bit -o qubit))",
                        "qubit list", "(qubit + unit) * bit", "(qubit -o qubit) -o qubit", "(bit list) list"}) {
    TypePtr t = parse_type(s);
    CHECK(type_equal(parse_type(to_string(t)), t));
  }
}

TEST_CASE("sugar expands to core constructs") {
  CHECK(term_equal(*parse_term("tt"), *mk::inr(mk::unit())));
  CHECK(term_equal(*parse_term("ff"), *mk::inl(mk::unit())));
  CHECK(term_equal(*parse_term("nil"), *mk::inl(mk::unit())));
  CHECK(term_equal(*parse_term("cons h t"), *mk::inr(mk::tensor(mk::var("h"), mk::var("t")))));
  TermPtr ite = parse_term("if p then a else b");
  REQUIRE(ite->kind == TermKind::Match);
  CHECK(ite->t1->kind == TermKind::Var);
  // The false branch sits under inl.
  CHECK(ite->t2->kind == TermKind::LetUnit);
  CHECK(term_equal(*ite->t2->t2, *mk::var("b")));
  CHECK(term_equal(*ite->t3->t2, *mk::var("a")));
  CHECK_FALSE(contains_sugar(*parse_term("lam x:qubit * y:qubit. let z:bit = meas x in (z; meas y)")));
}

TEST_CASE("desugar is idempotent") {
  for (const auto& e : example_programs()) {
    if (e.name == "ill-linear") continue;
    TermPtr m = parse_program(e.source).term;
    CHECK_MESSAGE(term_equal(*desugar(m), *m), e.name);
  }
}

TEST_CASE("pretty printing round-trips the corpus and generated programs") {
  for (const auto& e : example_programs()) {
    TermPtr m = parse_program(e.source).term;
    CHECK_MESSAGE(term_equal(*parse_term(pretty(m)), *m), e.name);
  }
  for (std::uint64_t s = 0; s < 50; ++s) {
    TermPtr m = random_finitary_program(s, 10);
    CHECK(term_equal(*parse_term(pretty(m)), *m));
  }
}

TEST_CASE("free variables") {
  CHECK(free_vars(parse_term("lam x:qubit. x * y")) == VarSet{"y"});
  CHECK(free_vars(parse_term("let a:qubit * b:qubit = p in a * c")) == VarSet{"c", "p"});
  CHECK(free_vars(parse_term("match p with (x:unit -> x | y:unit -> z)")) == VarSet{"p", "z"});
  CHECK(free_vars(parse_term("letrec f (x:qubit) : qubit = f x in f w")) == VarSet{"w"});
}

TEST_CASE("substitution avoids capture") {
  TermPtr body = parse_term("lam y:qubit. x * y");
  TermPtr r = substitute(body, mk::var("y"), "x");
  REQUIRE(r->kind == TermKind::Abs);
  CHECK(r->var != "y");
  CHECK(free_vars(r) == VarSet{"y"});
  CHECK(alpha_equal(substitute(parse_term("x * z"), parse_term("()"), "x"), parse_term("() * z")));
  // Bound occurrences are untouched.
  CHECK(alpha_equal(substitute(parse_term("lam x:unit. x"), parse_term("()"), "x"), parse_term("lam x:unit. x")));
}

TEST_CASE("alpha equivalence and canonical forms") {
  CHECK(alpha_equal(parse_term("lam x:qubit. x"), parse_term("lam y:qubit. y")));
  CHECK_FALSE(alpha_equal(parse_term("lam x:qubit. x"), parse_term("lam x:unit. x")));
  CHECK_FALSE(alpha_equal(parse_term("lam x:qubit. z"), parse_term("lam y:qubit. w")));
  CHECK(term_equal(*alpha_canonical(parse_term("lam a:qubit. a")), *alpha_canonical(parse_term("lam b:qubit. b"))));
  TermPtr shadow = parse_term("lam x:qubit. (lam x:qubit. x) x");
  TermPtr apart = rename_apart(shadow, {});
  CHECK(alpha_equal(apart, shadow));
  CHECK(apart->var != apart->t1->t1->var);
}

TEST_CASE("values") {
  CHECK(is_value(*parse_term("lam x:qubit. x")));
  CHECK(is_value(*parse_term("() * inl ()")));
  CHECK(is_value(*parse_term("#H")));
  CHECK(is_value(*parse_term("meas")));
  CHECK(is_value(*parse_term("split[qubit]")));
  CHECK_FALSE(is_value(*parse_term("new ff")));
  CHECK_FALSE(is_value(*parse_term("(lam x:unit. x) ()")));
  CHECK_FALSE(is_value(*parse_term("omega[unit]")));
}

TEST_CASE("approximants") {
  TermPtr loop = parse_term("letrec f (x:unit) : unit = f x in f ()");
  CHECK_FALSE(is_finitary(*loop));
  TermPtr l3 = lower_approximant(loop, 3);
  CHECK(is_finitary(*l3));
  CHECK(l3->kind == TermKind::LetRecN);
  CHECK(l3->bound == 3);
  TermPtr z = zero_approximant(loop);
  CHECK(is_finitary(*z));
  CHECK(alpha_equal(z, parse_term("(lam x:unit. omega[unit]) ()")));
}

TEST_CASE("gates") {
  CHECK(builtin_gate("Nc")->arity == 2);
  CHECK(builtin_gate("H")->arity == 1);
  CHECK_THROWS(make_gate("bad", CMatrix::Ones(2, 2)));
  CHECK_THROWS(make_gate("odd", CMatrix::Identity(3, 3)));
  TermPtr g = parse_term("#U[[0, 1], [-1, 0]]");
  REQUIRE(g->kind == TermKind::Gate);
  CHECK(g->gate->matrix(1, 0) == cplx(-1, 0));
}

TEST_CASE("parse errors carry positions") {
  try {
    parse_term("lam x:qubit.\n  (x");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.pos.line == 2);
  }
  CHECK_THROWS_AS(parse_program("tt : "), ParseError);
  CHECK_THROWS_AS(parse_term("#NOPE"), ParseError);
}

TEST_CASE("show_value uses booleans, lists and tensors") {
  CHECK(show_value(*parse_term("inr ()"), *Type::bit()) == "tt");
  CHECK(show_value(*parse_term("inl () * inr ()"), *parse_type("bit * bit")) == "(ff * tt)");
}

#include "support.hpp"

#include <doctest.h>

#include <functional>

using namespace qlam;
using namespace qlam::testing;

namespace {

/// All list-free, exponential-free types with at most `size` constructors.
std::vector<TypePtr> small_types(int size) {
  std::vector<std::vector<TypePtr>> by_size(static_cast<std::size_t>(size) + 1);
  by_size[1] = {Type::unit(), Type::qubit(), Type::bit()};
  for (int n = 3; n <= size; ++n)
    for (int l = 1; l + 1 < n; ++l)
      for (const auto& a : by_size[static_cast<std::size_t>(l)])
        for (const auto& b : by_size[static_cast<std::size_t>(n - 1 - l)]) {
          by_size[static_cast<std::size_t>(n)].push_back(Type::tensor(a, b));
          by_size[static_cast<std::size_t>(n)].push_back(Type::sum(a, b));
          by_size[static_cast<std::size_t>(n)].push_back(Type::lin(a, b));
        }
  std::vector<TypePtr> out;
  for (const auto& v : by_size) out.insert(out.end(), v.begin(), v.end());
  return out;
}

}  // namespace

TEST_CASE("corpus programs of unit type") {
  for (const char* name : {"coin-unit", "coin-or-omega", "omega"}) {
    TermPtr m = load_example(name).program.term;
    AdequacyReport r = check_adequacy(m, static_truncation(m), {200, 1e-12, 1e-6});
    CHECK_MESSAGE(r.verdict == Verdict::Pass, name);
  }
  TermPtr coin = load_example("coin-unit").program.term;
  AdequacyReport r = check_adequacy(coin, static_truncation(coin));
  CHECK(std::abs(r.denot - 1) < 1e-12);
  CHECK(std::abs(r.halt_lower - 1) < 1e-12);
  CHECK(r.residual == 0);
  CHECK(r.finitary);

  TermPtr half = load_example("coin-or-omega").program.term;
  r = check_adequacy(half, {}, {200, 1e-12, 1e-6});
  CHECK(std::abs(r.denot - 0.5) < 1e-9);
  CHECK(std::abs(r.halt_lower - 0.5) < 1e-9);

  TermPtr loop = load_example("omega").program.term;
  r = check_adequacy(loop, {}, {200, 1e-12, 1e-6});
  CHECK(r.denot == 0);
  CHECK(r.halt_lower == 0);
  CHECK(r.residual > 0.99);
}

TEST_CASE("adequacy rejects non-unit and open programs") {
  CHECK_THROWS_AS(check_adequacy(load_example("cointoss").program.term, {}), NotUnitType);
  CHECK_THROWS_AS(check_adequacy(parse_term("let () = u in ()"), {}), NotClosed);
}

TEST_CASE("a failing comparison is reported") {
  // A truncation that drops the list lengths the program reaches.
  TermPtr m = parse_term(
      "match split[unit] (cons () nil) with (e : unit -> e | c : unit * unit list -> "
      "let h : unit * t : unit list = c in let () = h in "
      "match split[unit] t with (e2 : unit -> e2 | c2 : unit * unit list -> omega[unit]))");
  REQUIRE(is_finitary(*m));
  TruncationConfig t;
  t.list_max = 0;
  AdequacyReport r = check_adequacy(m, t);
  CHECK(r.verdict == Verdict::Fail);
  CHECK(check_adequacy(m, static_truncation(m)).verdict == Verdict::Pass);
}

TEST_CASE("biased coin") {
  const double rho = 0.25;
  TermPtr c = desugar(biased_coin(rho));
  OutcomeDistribution d = eval_distribution(make_closure(c));
  double ff = 0;
  for (const auto& o : d.outcomes) ff += o.closure.term->kind == TermKind::InL ? o.prob : 0;
  CHECK(std::abs(ff - rho) < 1e-12);

  const int runs = 100000;
  int count = 0;
  for (int s = 0; s < runs; ++s) {
    SampleResult r = sample(make_closure(c), static_cast<std::uint64_t>(s));
    count += r.closure.term->kind == TermKind::InL;
  }
  // Three standard deviations.
  CHECK(std::abs(count - runs * rho) < 3 * std::sqrt(runs * rho * (1 - rho)));
  CHECK_THROWS(biased_coin(-0.1));
  CHECK_THROWS(biased_coin(1.5));
}

TEST_CASE("generators and consumers have nonzero denotation") {
  int checked = 0;
  for (const auto& a : small_types(5)) {
    TermPtr m = mk::app(consume_term(a), mk::app(generate_term(a), mk::unit()));
    Denotation d = denote_program(m, static_truncation(m), Type::unit());
    auto out = closed_output(d);
    const double v = out.empty() ? 0 : out.begin()->second(0, 0).real();
    CHECK_MESSAGE(v > 1e-9, to_string(a));
    CHECK_MESSAGE(v < 1 + 1e-9, to_string(a));
    ++checked;
  }
  CHECK(checked > 50);
}

TEST_CASE("finitary fuzz") {
  for (std::uint64_t s = 0; s < 40; ++s) {
    TermPtr m = random_finitary_program(s, 10);
    CHECK(is_finitary(*m));
    AdequacyReport r = check_adequacy(m, static_truncation(m));
    CHECK_MESSAGE(r.verdict == Verdict::Pass, "seed " << s << ": " << pretty(m) << " denot=" << r.denot
                                                     << " halt=" << r.halt_lower << " residual=" << r.residual);
  }
}

TEST_CASE("letrec fuzz respects the sandwich") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    TermPtr m = random_letrec_program(s, 10);
    TruncationConfig t = static_truncation(m);
    t.fix_iters = 200;
    AdequacyReport r = check_adequacy(m, t, {2000, 1e-12, 1e-6});
    CHECK_MESSAGE(r.verdict == Verdict::Pass, "seed " << s << ": " << pretty(m));
    CHECK(r.halt_lower <= r.denot + 1e-6);
    CHECK(r.denot <= r.halt_lower + r.residual + 1e-6);
  }
}

TEST_CASE("generated programs are reproducible") {
  CHECK(term_equal(*random_finitary_program(7, 10), *random_finitary_program(7, 10)));
  CHECK(term_equal(*random_letrec_program(7, 10), *random_letrec_program(7, 10)));
}

TEST_CASE("source hash") {
  TermPtr a = parse_term("(lam x : unit. x) ()");
  TermPtr b = parse_term("(lam y : unit. y) ()");
  TermPtr c = parse_term("(lam y : unit. ()) ()");
  CHECK(source_hash(a) == source_hash(b));
  CHECK(source_hash(a) != source_hash(c));
  CHECK(source_hash(a) == source_hash(parse_term(pretty(a))));
  CHECK(source_hash(a).size() >= 16);
}

TEST_CASE("static truncation covers reachable lists") {
  TruncationConfig t = static_truncation(parse_term(
      "match split[unit] (cons () (cons () (cons () nil))) with (e : unit -> e | c : unit * unit list -> omega[unit])"));
  CHECK(t.list_max >= 3);
  TermPtr coin = load_example("coin-unit").program.term;
  TruncationConfig u = static_truncation(coin);
  CHECK(u.list_max >= 0);
  CHECK(u.bang_max >= 1);
}

#include "support.hpp"

#include <doctest.h>

#include <numeric>

using namespace qlam;
using namespace qlam::testing;
using namespace qlam::cpm;

namespace {

/// Dense oracle for X -> sum_k K X K^dagger on vectorized inputs.
CMatrix kraus_matrix(const std::vector<CMatrix>& ks) {
  const Eigen::Index n = ks[0].cols(), m = ks[0].rows();
  CMatrix out = CMatrix::Zero(m * m, n * n);
  for (Eigen::Index j = 0; j < n * n; ++j) {
    CMatrix e = CMatrix::Zero(n, n);
    e(j % n, j / n) = 1;
    CMatrix y = CMatrix::Zero(m, m);
    for (const auto& k : ks) y += k * e * k.adjoint();
    out.col(j) = Eigen::Map<const Eigen::VectorXcd>(y.data(), m * m);
  }
  return out;
}

std::vector<CMatrix> random_kraus(std::mt19937_64& rng, int in, int out, int count) {
  std::normal_distribution<double> g;
  std::vector<CMatrix> ks;
  for (int k = 0; k < count; ++k) {
    CMatrix a(out, in);
    for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = cplx(g(rng), g(rng));
    ks.push_back(a);
  }
  return ks;
}

std::uint64_t factorial(int n) { return n <= 1 ? 1 : n * factorial(n - 1); }

}  // namespace

TEST_CASE("labels have canonical keys") {
  auto s = lbl::star();
  CHECK(s->key == "*");
  CHECK(lbl::pair(lbl::lft(s), lbl::rgt(s))->key == "(L(*),R(*))");
  CHECK(lbl::mset({lbl::rgt(s), lbl::lft(s)})->key == lbl::mset({lbl::lft(s), lbl::rgt(s)})->key);
  CHECK(lbl::list({lbl::rgt(s), lbl::lft(s)})->key != lbl::list({lbl::lft(s), lbl::rgt(s)})->key);
  for (const char* k : {"*", "L(*)", "((*,R(*)),[*,*])", "<*,L(*)>", "[]", "<>", "[L(*),R(L(*))]"})
    CHECK(lbl::parse(k)->key == k);
  CHECK_THROWS(lbl::parse("(*"));
}

TEST_CASE("superoperators agree with dense oracles") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 4), m = 1 + static_cast<int>(rng() % 4);
    auto ks = random_kraus(rng, n, m, 1 + static_cast<int>(rng() % 3));
    Superop f = Superop::from_kraus(ks);
    CHECK(max_abs(f.dense() - kraus_matrix(ks)) < 1e-12);
    CMatrix x = random_density(rng, n);
    CMatrix y = CMatrix::Zero(m, m);
    for (const auto& k : ks) y += k * x * k.adjoint();
    CHECK(max_abs(f.apply(x) - y) < 1e-12);
    CHECK(f.is_cp());

    const int p = 1 + static_cast<int>(rng() % 3);
    auto ks2 = random_kraus(rng, m, p, 2);
    Superop g = Superop::from_kraus(ks2);
    CHECK(max_abs(f.then(g).dense() - kraus_matrix(ks2) * kraus_matrix(ks)) < 1e-10);

  }
}

TEST_CASE("kronecker product of superoperators") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    const int n1 = 1 + static_cast<int>(rng() % 3), m1 = 1 + static_cast<int>(rng() % 3);
    const int n2 = 1 + static_cast<int>(rng() % 3), m2 = 1 + static_cast<int>(rng() % 3);
    auto k1 = random_kraus(rng, n1, m1, 2), k2 = random_kraus(rng, n2, m2, 2);
    Superop f = Superop::from_kraus(k1), g = Superop::from_kraus(k2);
    CMatrix x = random_density(rng, n1), y = random_density(rng, n2);
    CHECK(max_abs(f.kron(g).apply(kron(x, y)) - kron(f.apply(x), g.apply(y))) < 1e-10);
  }
}

TEST_CASE("conjugation, permutation and the Choi matrix") {
  std::mt19937_64 rng(29);
  CMatrix u = random_unitary(rng, 3);
  CMatrix x = random_density(rng, 3);
  CHECK(max_abs(Superop::conjugation(u).apply(x) - u * x * u.adjoint()) < 1e-12);
  Superop p = Superop::permutation({2, 0, 1});
  CMatrix pm = CMatrix::Zero(3, 3);
  pm(2, 0) = pm(0, 1) = pm(1, 2) = 1;
  CHECK(max_abs(p.apply(x) - pm * x * pm.transpose()) < 1e-15);
  // The transpose map is positive but not completely positive.
  CMatrix t = CMatrix::Zero(4, 4);
  t(0, 0) = t(3, 3) = t(1, 2) = t(2, 1) = 1;
  CHECK_FALSE(Superop::from_dense(2, 2, t).is_cp());
  CHECK(Superop::identity(2).is_cp());
  CMatrix choi = Superop::identity(2).choi();
  CHECK(max_abs(choi - (CMatrix(4, 4) << 1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 1).finished()) < 1e-15);
}

TEST_CASE("group averages agree with explicit sums") {
  std::mt19937_64 rng(31);
  auto [sym, eq] = symmetric_power(qubit_object(), 3);
  REQUIRE(sym->size() == 1);
  const PermGroup& g = *(*sym)[0].group;
  CHECK(g.order() == 6);
  auto elems = g.elements();
  CHECK(elems.size() == 6);
  CMatrix x = random_density(rng, 8);
  CMatrix expect = CMatrix::Zero(8, 8);
  for (const auto& perm : elems) {
    CMatrix pm = CMatrix::Zero(8, 8);
    for (std::size_t s = 0; s < perm.size(); ++s) pm(perm[s], static_cast<Eigen::Index>(s)) = 1;
    expect += pm * x * pm.transpose();
  }
  expect /= 6.0;
  CHECK(max_abs(g.average(x) - expect) < 1e-12);
  CHECK(max_abs(g.average(g.average(x)) - g.average(x)) < 1e-12);
}

TEST_CASE("symmetrized CNOT") {
  auto [sym, eq] = symmetric_power(qubit_object(), 2);
  const PermGroup& g = *(*sym)[0].group;
  CMatrix nc = builtin_gate("CNOT")->matrix;
  CMatrix expect(4, 4);
  expect << 2, 0, 0, 0, 0, 1, 0, 1, 0, 0, 1, 1, 0, 1, 1, 0;
  CHECK(max_abs(g.average(nc) - expect / 2.0) == 0.0);
}

TEST_CASE("exponential of a qubit") {
  ObjPtr b = bang(qubit_object(), 4);
  REQUIRE(b->size() == 5);
  std::vector<std::int64_t> dims;
  std::vector<std::uint64_t> orders;
  for (const auto& e : b->elements()) {
    dims.push_back(e.dim);
    orders.push_back(e.group->order());
  }
  std::sort(dims.begin(), dims.end());
  std::sort(orders.begin(), orders.end());
  CHECK(dims == std::vector<std::int64_t>{1, 2, 4, 8, 16});
  CHECK(orders == std::vector<std::uint64_t>{1, 1, 2, 6, 24});
  for (const auto& e : b->elements()) CHECK(e.group->order() == factorial(static_cast<int>(mset_items(*e.label).size())));
}

TEST_CASE("exponential of a bit counts multisets") {
  ObjPtr bit = biproduct(unit_object(), unit_object());
  ObjPtr b = bang(bit, 3);
  // Multisets of size <= 3 over two labels: 1 + 2 + 3 + 4.
  CHECK(b->size() == 10);
  for (const auto& e : b->elements()) {
    CHECK(e.dim == 1);
    CHECK(e.group->is_trivial());
  }
}

TEST_CASE("lists of qubits") {
  ObjPtr l = list_object(qubit_object(), 3);
  REQUIRE(l->size() == 4);
  for (const auto& e : l->elements()) CHECK(e.dim == (std::int64_t(1) << e.label->items.size()));
}

TEST_CASE("group cap") {
  const auto cap = group_cap();
  set_group_cap(100);
  CHECK_THROWS_AS(bang(qubit_object(), 5), GroupTooLarge);
  set_group_cap(cap);
  CHECK_NOTHROW(bang(qubit_object(), 5));
}

TEST_CASE("tensor and biproduct webs") {
  ObjPtr q = qubit_object(), u = unit_object();
  ObjPtr t = tensor(q, tensor(q, q));
  REQUIRE(t->size() == 1);
  CHECK(t->elements()[0].dim == 8);
  ObjPtr s = biproduct(q, tensor(q, q));
  REQUIRE(s->size() == 2);
  CHECK(s->find("L(*)") >= 0);
  CHECK((*s)[static_cast<std::size_t>(s->find("R((*,*))"))].dim == 4);
}

TEST_CASE("morphism algebra") {
  std::mt19937_64 rng(37);
  ObjPtr q = qubit_object();
  Morphism f(q, q), g(q, q);
  f.set(0, 0, Superop::from_kraus(random_kraus(rng, 2, 2, 2)));
  g.set(0, 0, Superop::from_kraus(random_kraus(rng, 2, 2, 2)));
  CHECK(morphism_distance(compose(identity(q), f), f) < 1e-12);
  CHECK(morphism_distance(compose(f, identity(q)), f) < 1e-12);
  CHECK(morphism_distance(add(f, scale(f, -1.0)), zero(q, q)) < 1e-12);
  CMatrix x = random_density(rng, 2);
  CHECK(max_abs(compose(f, g).apply(0, x).at(0) - g.at(0, 0).apply(f.at(0, 0).apply(x))) < 1e-10);
  CHECK(loewner_leq(f, add(f, g)));
  CHECK_FALSE(loewner_leq(add(f, g), f));
  CHECK(is_cp(f));
}

TEST_CASE("serialization round trip") {
  auto l = load_example("teleport-applied");
  Denotation d = denote_term(*l.derivation, {});
  Morphism back = deserialize(serialize(d.morphism));
  CHECK(object_equal(*back.src(), *d.morphism.src()));
  CHECK(object_equal(*back.tgt(), *d.morphism.tgt()));
  for (const auto& e : diff(back, d.morphism)) CHECK(e.max_norm < 1e-15);
  CHECK_THROWS_AS(deserialize("{not json"), CpmError);
}

#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>

using namespace qlam;
using namespace qlam::testing;

namespace {

/// Amplitudes with qubit `p` fixed to `b` and removed.
CVector restrict_qubit(const CVector& v, int n, int p, int b) {
  CVector out(v.size() / 2);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (((i >> (n - p)) & 1) == b) out(k++) = v(i);
  return out;
}

}  // namespace

TEST_CASE("basis states") {
  QState s = QState::basis({1, 0, 1});
  CHECK(s.num_qubits() == 3);
  CHECK(s.amplitudes()(0b101) == cplx(1, 0));
  CHECK(QState().num_qubits() == 0);
  CHECK(QState().amplitudes()(0) == cplx(1, 0));
  CHECK_THROWS_AS(QState(2, CVector::Zero(3)), QStateError);
}

TEST_CASE("gate application matches the dense operator") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 5);
    const int k = 1 + static_cast<int>(rng() % std::min(n, 3));
    std::vector<int> pos(static_cast<std::size_t>(n));
    std::iota(pos.begin(), pos.end(), 1);
    std::shuffle(pos.begin(), pos.end(), rng);
    pos.resize(static_cast<std::size_t>(k));
    CMatrix u = random_unitary(rng, 1 << k);
    QState q(n, random_state(rng, n));
    QState r = apply_unitary(q, u, pos);
    CVector expect = embed_gate(n, u, pos) * q.amplitudes();
    CHECK(max_abs(r.amplitudes() - expect) < 1e-12);
  }
}

TEST_CASE("appending a qubit is a tensor product") {
  std::mt19937_64 rng(3);
  for (int b : {0, 1}) {
    QState q(2, random_state(rng, 2));
    CVector e = CVector::Zero(2);
    e(b) = 1;
    CHECK(max_abs(append_qubit(q, b).amplitudes() - kron(q.amplitudes(), e)) < 1e-15);
  }
}

TEST_CASE("measurement matches projectors") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 5);
    const int p = 1 + static_cast<int>(rng() % n);
    CVector v = random_state(rng, n);
    MeasureResult m = measure(QState(n, v), p);
    for (int b : {0, 1}) {
      const MeasureBranch& br = b == 0 ? m.outcome0 : m.outcome1;
      CVector part = restrict_qubit(v, n, p, b);
      CHECK(std::abs(br.prob - part.squaredNorm()) < 1e-12);
      REQUIRE(br.used);
      CHECK(br.state.num_qubits() == n - 1);
      CHECK(equal_up_to_phase(br.state, QState(n - 1, part / part.norm()), 1e-10));
    }
    CHECK(std::abs(m.outcome0.prob + m.outcome1.prob - 1) < 1e-12);
  }
}

TEST_CASE("measuring a basis state is deterministic") {
  MeasureResult m = measure(QState::basis({0, 1}), 2);
  CHECK(m.outcome1.prob == doctest::Approx(1.0));
  CHECK(m.outcome0.prob == doctest::Approx(0.0));
  CHECK(m.outcome1.state.amplitudes()(0) == cplx(1, 0));
}

TEST_CASE("qubit permutation") {
  std::mt19937_64 rng(9);
  QState q(3, random_state(rng, 3));
  QState r = permute_qubits(q, {3, 1, 2});
  for (Eigen::Index i = 0; i < 8; ++i) {
    // New qubit j carries old qubit perm[j].
    int b1 = (i >> 2) & 1, b2 = (i >> 1) & 1, b3 = i & 1;
    Eigen::Index old = (Eigen::Index(b2) << 2) | (Eigen::Index(b3) << 1) | b1;
    CHECK(std::abs(r.amplitudes()(i) - q.amplitudes()(old)) < 1e-15);
  }
}

TEST_CASE("phase-insensitive equality") {
  std::mt19937_64 rng(1);
  QState q(2, random_state(rng, 2));
  CHECK(equal_up_to_phase(q, QState(2, q.amplitudes() * std::polar(1.0, 0.7))));
  CHECK_FALSE(equal_up_to_phase(q, QState::basis({0, 0})));
  CHECK_FALSE(equal_up_to_phase(q, QState::basis({0})));
}

TEST_CASE("density matrix") {
  QState q(1, (CVector(2) << cplx(1, 0), cplx(0, 1)).finished() / std::sqrt(2.0));
  CMatrix rho = q.density();
  CHECK(std::abs(rho(0, 1) - cplx(0, -0.5)) < 1e-15);
  CHECK(std::abs(rho.trace() - cplx(1, 0)) < 1e-15);
}

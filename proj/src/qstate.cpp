#include "qlam/qstate.hpp"

#include <cmath>
#include <cstdio>

namespace qlam {

QState::QState() : n_(0), amps_(CVector::Ones(1)) {}

QState::QState(int n, CVector amps) : n_(n), amps_(std::move(amps)) {
  if (n < 0 || amps_.size() != (Eigen::Index{1} << n))
    throw QStateError("state vector length does not match qubit count");
  if (std::abs(amps_.norm() - 1.0) > 1e-9) throw QStateError("state vector is not normalized");
}

QState QState::basis(const std::vector<int>& bits) {
  int n = static_cast<int>(bits.size());
  Eigen::Index idx = 0;
  for (int b : bits) idx = (idx << 1) | (b ? 1 : 0);
  CVector v = CVector::Zero(Eigen::Index{1} << n);
  v(idx) = 1;
  return QState(n, v);
}

CMatrix QState::density() const { return amps_ * amps_.adjoint(); }

std::string QState::to_string() const {
  std::string s;
  char buf[128];
  for (Eigen::Index i = 0; i < amps_.size(); ++i) {
    if (std::abs(amps_(i)) < 1e-12) continue;
    std::string ket;
    for (int k = n_ - 1; k >= 0; --k) ket += ((i >> k) & 1) ? '1' : '0';
    std::snprintf(buf, sizeof buf, "%s(%.6g%+.6gi)|%s>", s.empty() ? "" : " + ", amps_(i).real(), amps_(i).imag(),
                  ket.c_str());
    s += buf;
  }
  return s.empty() ? "0" : s;
}

QState apply_unitary(const QState& q, const CMatrix& u, const std::vector<int>& positions) {
  const int n = q.num_qubits();
  const int k = static_cast<int>(positions.size());
  if (u.rows() != (Eigen::Index{1} << k) || u.cols() != u.rows())
    throw QStateError("gate arity does not match the number of positions");
  for (int i = 0; i < k; ++i) {
    if (positions[i] < 1 || positions[i] > n) throw QStateError("PositionOutOfRange");
    for (int j = 0; j < i; ++j)
      if (positions[i] == positions[j]) throw QStateError("DuplicatePosition");
  }
  // Bit shift of qubit p inside the amplitude index.
  std::vector<int> shift(k);
  Eigen::Index mask = 0;
  for (int i = 0; i < k; ++i) {
    shift[i] = n - positions[i];
    mask |= Eigen::Index{1} << shift[i];
  }
  const Eigen::Index dim = Eigen::Index{1} << n, sub = Eigen::Index{1} << k;
  const CVector& a = q.amplitudes();
  CVector out(dim);
  std::vector<Eigen::Index> idx(static_cast<size_t>(sub));
  for (Eigen::Index rest = 0; rest < dim; ++rest) {
    if (rest & mask) continue;
    for (Eigen::Index s = 0; s < sub; ++s) {
      Eigen::Index full = rest;
      for (int i = 0; i < k; ++i)
        if ((s >> (k - 1 - i)) & 1) full |= Eigen::Index{1} << shift[i];
      idx[static_cast<size_t>(s)] = full;
    }
    for (Eigen::Index r = 0; r < sub; ++r) {
      cplx acc = 0;
      for (Eigen::Index c = 0; c < sub; ++c) acc += u(r, c) * a(idx[static_cast<size_t>(c)]);
      out(idx[static_cast<size_t>(r)]) = acc;
    }
  }
  return QState(n, out);
}

QState append_qubit(const QState& q, int b) {
  const CVector& a = q.amplitudes();
  CVector out = CVector::Zero(a.size() * 2);
  for (Eigen::Index i = 0; i < a.size(); ++i) out(2 * i + (b ? 1 : 0)) = a(i);
  return QState(q.num_qubits() + 1, out);
}

MeasureResult measure(const QState& q, int position) {
  const int n = q.num_qubits();
  if (position < 1 || position > n) throw QStateError("PositionOutOfRange");
  const int shift = n - position;
  const Eigen::Index low = Eigen::Index{1} << shift;
  const Eigen::Index half = Eigen::Index{1} << (n - 1);
  CVector v0(half), v1(half);
  const CVector& a = q.amplitudes();
  for (Eigen::Index r = 0; r < half; ++r) {
    Eigen::Index hi = (r >> shift) << (shift + 1), lo = r & (low - 1);
    v0(r) = a(hi | lo);
    v1(r) = a(hi | low | lo);
  }
  MeasureResult res;
  auto finish = [&](CVector v, MeasureBranch& br) {
    double p = v.squaredNorm();
    br.prob = p;
    // Branches with probability below 1e-14 are rounding residue of exact zeros.
    if (p > 1e-14) {
      v /= std::sqrt(p);
      // Re-normalize once more to absorb rounding.
      v /= v.norm();
      br.state = QState(n - 1, v);
      br.used = true;
    } else {
      CVector z = CVector::Zero(half);
      z(0) = 1;
      br.state = QState(n - 1, z);
      br.used = false;
    }
  };
  finish(v0, res.outcome0);
  finish(v1, res.outcome1);
  return res;
}

bool equal_up_to_phase(const QState& a, const QState& b, double tol) {
  if (a.num_qubits() != b.num_qubits()) return false;
  return std::abs(std::abs(a.amplitudes().dot(b.amplitudes())) - 1.0) <= tol;
}

QState permute_qubits(const QState& q, const std::vector<int>& perm) {
  const int n = q.num_qubits();
  if (static_cast<int>(perm.size()) != n) throw QStateError("permutation size mismatch");
  const Eigen::Index dim = Eigen::Index{1} << n;
  CVector out(dim);
  const CVector& a = q.amplitudes();
  for (Eigen::Index i = 0; i < dim; ++i) {
    // Bit of new qubit j (1-based) in i is at shift n-j; it equals old qubit perm[j-1].
    Eigen::Index old = 0;
    for (int j = 1; j <= n; ++j)
      if ((i >> (n - j)) & 1) old |= Eigen::Index{1} << (n - perm[static_cast<size_t>(j - 1)]);
    out(i) = a(old);
  }
  return QState(n, out);
}

}  // namespace qlam

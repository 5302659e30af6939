#include "qlam/cpm.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace qlam::cpm {

namespace {

using Trip = Eigen::Triplet<cplx>;

constexpr double kDropTol = 1e-15;

SpMat build(std::int64_t rows, std::int64_t cols, const std::vector<Trip>& trips) {
  SpMat m(rows, cols);
  m.setFromTriplets(trips.begin(), trips.end());
  m.prune([](Eigen::Index, Eigen::Index, const cplx& v) { return std::abs(v) > kDropTol; });
  m.makeCompressed();
  return m;
}

template <typename F>
void for_each_nz(const SpMat& m, F&& f) {
  for (Eigen::Index k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it) f(it.row(), it.col(), it.value());
}

// Image of s under element g of the factor.
inline std::int64_t act(const GroupFactor& f, int g, std::int64_t s) {
  std::int64_t digit = (s / f.stride) % f.dim;
  return s + (f.elems[static_cast<std::size_t>(g * f.dim + digit)] - digit) * f.stride;
}

}  // namespace

Superop::Superop(std::int64_t in_dim, std::int64_t out_dim, SpMat mat) : in_(in_dim), out_(out_dim), mat_(std::move(mat)) {
  if (mat_.rows() != out_ * out_ || mat_.cols() != in_ * in_) throw CpmError("superoperator matrix has the wrong shape");
}

Superop Superop::identity(std::int64_t n) {
  SpMat m(n * n, n * n);
  m.setIdentity();
  return Superop(n, n, m);
}

Superop Superop::zero(std::int64_t in_dim, std::int64_t out_dim) {
  return Superop(in_dim, out_dim, SpMat(out_dim * out_dim, in_dim * in_dim));
}

Superop Superop::conjugation(const CMatrix& u) {
  const std::int64_t m = u.rows(), n = u.cols();
  // vec(U X U^*) = (conj(U) kron U) vec(X)
  std::vector<Trip> trips;
  for (std::int64_t j = 0; j < n; ++j)
    for (std::int64_t l = 0; l < m; ++l) {
      cplx cu = std::conj(u(l, j));
      if (cu == cplx(0)) continue;
      for (std::int64_t i = 0; i < n; ++i)
        for (std::int64_t k = 0; k < m; ++k) {
          cplx v = u(k, i) * cu;
          if (v != cplx(0)) trips.emplace_back(k + l * m, i + j * n, v);
        }
    }
  return Superop(n, m, build(m * m, n * n, trips));
}

Superop Superop::permutation(const std::vector<std::int64_t>& perm) {
  const auto n = static_cast<std::int64_t>(perm.size());
  std::vector<Trip> trips;
  trips.reserve(static_cast<std::size_t>(n * n));
  for (std::int64_t j = 0; j < n; ++j)
    for (std::int64_t i = 0; i < n; ++i)
      trips.emplace_back(perm[static_cast<std::size_t>(i)] + perm[static_cast<std::size_t>(j)] * n, i + j * n, 1.0);
  return Superop(n, n, build(n * n, n * n, trips));
}

Superop Superop::from_dense(std::int64_t in_dim, std::int64_t out_dim, const CMatrix& mat) {
  std::vector<Trip> trips;
  for (Eigen::Index c = 0; c < mat.cols(); ++c)
    for (Eigen::Index r = 0; r < mat.rows(); ++r)
      if (std::abs(mat(r, c)) > kDropTol) trips.emplace_back(r, c, mat(r, c));
  return Superop(in_dim, out_dim, build(mat.rows(), mat.cols(), trips));
}

Superop Superop::from_kraus(const std::vector<CMatrix>& kraus) {
  if (kraus.empty()) throw CpmError("empty Kraus family");
  Superop acc = conjugation(kraus[0]);
  for (std::size_t i = 1; i < kraus.size(); ++i) acc = acc + conjugation(kraus[i]);
  return acc;
}

CMatrix Superop::apply(const CMatrix& x) const {
  if (x.rows() != in_ || x.cols() != in_) throw CpmError("superoperator applied to a matrix of the wrong size");
  Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(x.data(), in_ * in_);
  Eigen::VectorXcd y = mat_ * v;
  return Eigen::Map<const CMatrix>(y.data(), out_, out_);
}

Superop Superop::then(const Superop& next) const {
  if (out_ != next.in_) throw CpmError("superoperator composition: dimension mismatch");
  SpMat m = (next.mat_ * mat_).pruned(kDropTol, 1.0);
  return Superop(in_, next.out_, m);
}

Superop Superop::operator+(const Superop& o) const {
  if (in_ != o.in_ || out_ != o.out_) throw CpmError("superoperator sum: dimension mismatch");
  SpMat m = (mat_ + o.mat_).pruned(kDropTol, 1.0);
  return Superop(in_, out_, m);
}

Superop Superop::operator-(const Superop& o) const { return *this + o.scaled(-1.0); }

Superop Superop::scaled(cplx s) const { return Superop(in_, out_, (mat_ * s).pruned(kDropTol, 1.0)); }

Superop Superop::kron(const Superop& g) const {
  const std::int64_t n1 = in_, m1 = out_, n2 = g.in_, m2 = g.out_;
  std::vector<Trip> trips;
  trips.reserve(static_cast<std::size_t>(mat_.nonZeros() * g.mat_.nonZeros()));
  for_each_nz(mat_, [&](Eigen::Index r1, Eigen::Index c1, cplx v1) {
    const std::int64_t ri = r1 % m1, rj = r1 / m1, ci = c1 % n1, cj = c1 / n1;
    for_each_nz(g.mat_, [&](Eigen::Index r2, Eigen::Index c2, cplx v2) {
      const std::int64_t rk = r2 % m2, rl = r2 / m2, ck = c2 % n2, cl = c2 / n2;
      const std::int64_t row = (ri * m2 + rk) + (rj * m2 + rl) * m1 * m2;
      const std::int64_t col = (ci * n2 + ck) + (cj * n2 + cl) * n1 * n2;
      trips.emplace_back(row, col, v1 * v2);
    });
  });
  return Superop(n1 * n2, m1 * m2, build(m1 * m1 * m2 * m2, n1 * n1 * n2 * n2, trips));
}

Superop Superop::average_input(const PermGroup& g) const {
  if (g.degree() != in_) throw CpmError("input averaging: dimension mismatch");
  SpMat cur = mat_;
  for (const auto& f : g.factors()) {
    std::vector<Trip> trips;
    trips.reserve(static_cast<std::size_t>(cur.nonZeros() * f.order));
    const double w = 1.0 / f.order;
    for_each_nz(cur, [&](Eigen::Index r, Eigen::Index c, cplx v) {
      const std::int64_t c1 = c % in_, c2 = c / in_;
      for (int e = 0; e < f.order; ++e) trips.emplace_back(r, act(f, e, c1) + act(f, e, c2) * in_, v * w);
    });
    cur = build(cur.rows(), cur.cols(), trips);
  }
  return Superop(in_, out_, cur);
}

Superop Superop::average_output(const PermGroup& h) const {
  if (h.degree() != out_) throw CpmError("output averaging: dimension mismatch");
  SpMat cur = mat_;
  for (const auto& f : h.factors()) {
    std::vector<Trip> trips;
    trips.reserve(static_cast<std::size_t>(cur.nonZeros() * f.order));
    const double w = 1.0 / f.order;
    for_each_nz(cur, [&](Eigen::Index r, Eigen::Index c, cplx v) {
      const std::int64_t r1 = r % out_, r2 = r / out_;
      for (int e = 0; e < f.order; ++e) trips.emplace_back(act(f, e, r1) + act(f, e, r2) * out_, c, v * w);
    });
    cur = build(cur.rows(), cur.cols(), trips);
  }
  return Superop(in_, out_, cur);
}

CMatrix Superop::choi() const {
  const std::int64_t n = in_, m = out_;
  CMatrix j = CMatrix::Zero(n * m, n * m);
  for_each_nz(mat_, [&](Eigen::Index r, Eigen::Index c, cplx v) {
    const std::int64_t k = r % m, l = r / m, i = c % n, jj = c / n;
    j(i * m + k, jj * m + l) += v;
  });
  return j;
}

bool Superop::is_cp(double tol) const {
  if (in_ == 0 || out_ == 0) return true;
  CMatrix j = choi();
  const double scale = std::max(1.0, j.cwiseAbs().maxCoeff());
  if ((j - j.adjoint()).cwiseAbs().maxCoeff() > tol * scale) return false;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(j, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol * scale;
}

double Superop::max_abs() const {
  double m = 0;
  for_each_nz(mat_, [&](Eigen::Index, Eigen::Index, cplx v) { m = std::max(m, std::abs(v)); });
  return m;
}

Superop project_invariant(const Superop& f, const PermGroup& g, const PermGroup& h) {
  return f.average_input(g).average_output(h);
}

double superop_distance(const Superop& a, const Superop& b) {
  if (a.in_dim() != b.in_dim() || a.out_dim() != b.out_dim()) throw CpmError("superoperator distance: dimension mismatch");
  return (a - b).max_abs();
}

}  // namespace qlam::cpm

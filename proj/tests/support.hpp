#pragma once

#include "qlam/adequacy.hpp"
#include "qlam/denote.hpp"
#include "qlam/machine.hpp"
#include "qlam/programs.hpp"
#include "qlam/syntax.hpp"
#include "qlam/typing.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace qlam::testing {

struct Loaded {
  Program program;
  DerivationPtr derivation;
};

inline Loaded load_example(const std::string& name) {
  Loaded l;
  l.program = parse_program(example_source(name));
  l.derivation = typecheck(Context(), l.program.term, l.program.declared_type);
  return l;
}

inline double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Full 2^n x 2^n operator of a k-qubit gate on the given 1-based positions,
/// built entry by entry from bit strings.
inline CMatrix embed_gate(int n, const CMatrix& u, const std::vector<int>& pos) {
  const Eigen::Index dim = Eigen::Index(1) << n;
  const int k = static_cast<int>(pos.size());
  auto bit = [n](Eigen::Index idx, int p) { return (idx >> (n - p)) & 1; };
  auto sub = [&](Eigen::Index idx) {
    Eigen::Index s = 0;
    for (int i = 0; i < k; ++i) s = (s << 1) | bit(idx, pos[static_cast<std::size_t>(i)]);
    return s;
  };
  auto rest_equal = [&](Eigen::Index a, Eigen::Index b) {
    for (int p = 1; p <= n; ++p) {
      bool touched = false;
      for (int q : pos) touched |= q == p;
      if (!touched && bit(a, p) != bit(b, p)) return false;
    }
    return true;
  };
  CMatrix out = CMatrix::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j)
      if (rest_equal(i, j)) out(i, j) = u(sub(i), sub(j));
  return out;
}

inline CVector random_state(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  CVector v(Eigen::Index(1) << n);
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = cplx(g(rng), g(rng));
  return v / v.norm();
}

inline CMatrix random_unitary(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> g;
  CMatrix a(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) a(i, j) = cplx(g(rng), g(rng));
  Eigen::HouseholderQR<CMatrix> qr(a);
  return qr.householderQ() * CMatrix::Identity(dim, dim);
}

inline CMatrix random_density(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> g;
  CMatrix a(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) a(i, j) = cplx(g(rng), g(rng));
  CMatrix rho = a * a.adjoint();
  return rho / rho.trace().real();
}

/// Output family of a closed program at the unit input, keyed by web label.
inline std::map<std::string, CMatrix> closed_output(const Denotation& d) {
  std::map<std::string, CMatrix> out;
  for (const auto& [b, x] : d.morphism.apply(0, CMatrix::Identity(1, 1)))
    out[(*d.morphism.tgt())[static_cast<std::size_t>(b)].label->key] = x;
  return out;
}

/// Max-norm distance between two label-keyed families; missing entries count as zero.
inline double family_distance(const std::map<std::string, CMatrix>& a, const std::map<std::string, CMatrix>& b) {
  double worst = 0;
  for (const auto& [k, x] : a) {
    auto it = b.find(k);
    if (it == b.end())
      worst = std::max(worst, max_abs(x));
    else if (it->second.rows() != x.rows() || it->second.cols() != x.cols())
      return INFINITY;
    else
      worst = std::max(worst, max_abs(x - it->second));
  }
  for (const auto& [k, y] : b)
    if (!a.count(k)) worst = std::max(worst, max_abs(y));
  return worst;
}

}  // namespace qlam::testing

namespace qlam::testing {

/// Teleportation pair applied to (): the 4x4 output densities A_{xy,zt}
/// transcribed by hand, without the global factor 1/4. Bits are 0 = ff, 1 = tt.
inline CMatrix teleport_block(int xy, int zt) {
  CMatrix id(4, 4), x(4, 4), z(4, 4), y(4, 4);
  id << 1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 1;
  x << 0, 0, 0, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 0, 0, 0;
  z << 1, 0, 0, -1, 0, 0, 0, 0, 0, 0, 0, 0, -1, 0, 0, 1;
  y << 0, 0, 0, 0, 0, 1, -1, 0, 0, -1, 1, 0, 0, 0, 0, 0;
  // Rows xy, columns zt.
  const CMatrix* table[4][4] = {{&id, &x, &z, &y}, {&x, &id, &y, &z}, {&z, &y, &id, &x}, {&y, &z, &x, &id}};
  return *table[xy][zt];
}

inline std::string bit_label(int b) { return b ? "R(*)" : "L(*)"; }

/// Web label of the teleport output for f-outcome xy and g-input zt.
inline std::string teleport_label(int xy, int zt) {
  return "((*,(" + bit_label(xy >> 1) + "," + bit_label(xy & 1) + ")),((" + bit_label(zt >> 1) + "," +
         bit_label(zt & 1) + "),*))";
}

/// Largest deviation of a teleport denotation from the transcribed table.
inline double teleport_table_error(const std::map<std::string, CMatrix>& out) {
  double worst = 0;
  std::size_t matched = 0;
  for (int xy = 0; xy < 4; ++xy)
    for (int zt = 0; zt < 4; ++zt) {
      auto it = out.find(teleport_label(xy, zt));
      CMatrix expect = teleport_block(xy, zt) / 4.0;
      if (it == out.end()) {
        worst = std::max(worst, max_abs(expect));
        continue;
      }
      ++matched;
      if (it->second.rows() != 4 || it->second.cols() != 4) return INFINITY;
      worst = std::max(worst, max_abs(it->second - expect));
    }
  if (matched < out.size())
    for (const auto& [k, m] : out) {
      bool known = false;
      for (int xy = 0; xy < 4; ++xy)
        for (int zt = 0; zt < 4; ++zt) known |= k == teleport_label(xy, zt);
      if (!known) worst = std::max(worst, max_abs(m));
    }
  return worst;
}

struct SoundnessReport {
  double worst = 0;
  std::size_t closures = 0;
  std::size_t steps = 0;
};

/// Walk the whole reduction tree of `m` and compare [[c]] with the
/// probability-weighted sum over the successors of c at every node.
inline SoundnessReport soundness_along_traces(const TermPtr& m, const TypePtr& type, const TruncationConfig& t,
                                              std::size_t max_closures = 5000) {
  SoundnessReport r;
  std::vector<Closure> frontier{make_closure(m)};
  FreshNames fresh;
  while (!frontier.empty() && r.closures < max_closures) {
    Closure c = std::move(frontier.back());
    frontier.pop_back();
    ++r.closures;
    auto ts = step(c, fresh);
    if (ts.empty()) continue;
    auto here = denote_closure(c, t, type);
    std::map<std::string, CMatrix> sum;
    for (const auto& tr : ts) {
      ++r.steps;
      for (const auto& [k, x] : denote_closure(tr.next, t, type)) {
        auto it = sum.find(k);
        if (it == sum.end())
          sum.emplace(k, tr.prob * x);
        else
          it->second += tr.prob * x;
      }
      frontier.push_back(tr.next);
    }
    r.worst = std::max(r.worst, family_distance(here, sum));
  }
  return r;
}

}  // namespace qlam::testing

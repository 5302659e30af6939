#include "qlam/cpm.hpp"

#include <cmath>

namespace qlam::cpm {

namespace {

constexpr double kEntryDropTol = 1e-12;
constexpr double kDivergenceBound = 1e12;

void check_same(const ObjPtr& a, const ObjPtr& b, const char* what) {
  if (a != b && !object_equal(*a, *b)) throw CpmError(std::string(what) + ": object mismatch");
}

}  // namespace

Morphism::Morphism(ObjPtr src, ObjPtr tgt) : src_(std::move(src)), tgt_(std::move(tgt)) {
  merge_truncation(src_->truncation(), tgt_->truncation());
}

void Morphism::add(int a, int b, const Superop& s) {
  if (s.in_dim() != (*src_)[static_cast<std::size_t>(a)].dim || s.out_dim() != (*tgt_)[static_cast<std::size_t>(b)].dim)
    throw CpmError("entry dimensions do not match the web");
  auto it = entries_.find({a, b});
  if (it == entries_.end())
    entries_.emplace(std::make_pair(a, b), s);
  else
    it->second = it->second + s;
}

void Morphism::set(int a, int b, Superop s) {
  if (s.in_dim() != (*src_)[static_cast<std::size_t>(a)].dim || s.out_dim() != (*tgt_)[static_cast<std::size_t>(b)].dim)
    throw CpmError("entry dimensions do not match the web");
  entries_[{a, b}] = std::move(s);
}

const Superop* Morphism::get(int a, int b) const {
  auto it = entries_.find({a, b});
  return it == entries_.end() ? nullptr : &it->second;
}

Superop Morphism::at(int a, int b) const {
  if (const Superop* s = get(a, b)) return *s;
  return Superop::zero((*src_)[static_cast<std::size_t>(a)].dim, (*tgt_)[static_cast<std::size_t>(b)].dim);
}

Superop Morphism::at(const std::string& a, const std::string& b) const {
  int i = src_->find(a), j = tgt_->find(b);
  if (i < 0 || j < 0) throw CpmError("no web element " + (i < 0 ? a : b));
  return at(i, j);
}

void Morphism::prune(double tol) {
  for (auto it = entries_.begin(); it != entries_.end();) {
    if (it->second.max_abs() < tol)
      it = entries_.erase(it);
    else
      ++it;
  }
}

double Morphism::max_abs() const {
  double m = 0;
  for (const auto& [k, s] : entries_) m = std::max(m, s.max_abs());
  return m;
}

std::map<int, CMatrix> Morphism::apply(int a, const CMatrix& x) const {
  std::map<int, CMatrix> out;
  for (const auto& [k, s] : entries_)
    if (k.first == a) out.emplace(k.second, s.apply(x));
  return out;
}

Morphism identity(const ObjPtr& a) {
  Morphism m(a, a);
  for (std::size_t i = 0; i < a->size(); ++i) {
    const auto& e = (*a)[i];
    m.set(static_cast<int>(i), static_cast<int>(i), Superop::identity(e.dim).average_input(*e.group));
  }
  return m;
}

Morphism zero(const ObjPtr& a, const ObjPtr& b) { return Morphism(a, b); }

Morphism compose(const Morphism& f, const Morphism& g) {
  check_same(f.tgt(), g.src(), "composition");
  // Index g's entries by source for the inner sum.
  std::map<int, std::vector<std::pair<int, const Superop*>>> by_src;
  for (const auto& [k, s] : g.entries()) by_src[k.first].emplace_back(k.second, &s);
  Morphism out(f.src(), g.tgt());
  for (const auto& [k, s] : f.entries()) {
    auto it = by_src.find(k.second);
    if (it == by_src.end()) continue;
    for (const auto& [c, t] : it->second) out.add(k.first, c, s.then(*t));
  }
  out.prune(kEntryDropTol);
  if (out.max_abs() > kDivergenceBound) throw DivergentDenotation("entry magnitude exceeds 1e12");
  return out;
}

Morphism add(const Morphism& f, const Morphism& g) {
  check_same(f.src(), g.src(), "sum");
  check_same(f.tgt(), g.tgt(), "sum");
  Morphism out = f;
  for (const auto& [k, s] : g.entries()) out.add(k.first, k.second, s);
  out.prune(kEntryDropTol);
  return out;
}

Morphism scale(const Morphism& f, cplx s) {
  Morphism out(f.src(), f.tgt());
  for (const auto& [k, e] : f.entries()) out.set(k.first, k.second, e.scaled(s));
  out.prune(kEntryDropTol);
  return out;
}

double morphism_distance(const Morphism& a, const Morphism& b) {
  check_same(a.src(), b.src(), "distance");
  check_same(a.tgt(), b.tgt(), "distance");
  double d = 0;
  for (const auto& [k, s] : a.entries()) d = std::max(d, superop_distance(s, b.at(k.first, k.second)));
  for (const auto& [k, s] : b.entries())
    if (!a.get(k.first, k.second)) d = std::max(d, s.max_abs());
  return d;
}

double invariance_defect(const Morphism& f) {
  double d = 0;
  for (const auto& [k, s] : f.entries()) {
    const auto& ga = *(*f.src())[static_cast<std::size_t>(k.first)].group;
    const auto& gb = *(*f.tgt())[static_cast<std::size_t>(k.second)].group;
    d = std::max(d, superop_distance(project_invariant(s, ga, gb), s));
  }
  return d;
}

bool is_cp(const Morphism& f, double tol, std::int64_t max_choi_dim) {
  for (const auto& [k, s] : f.entries())
    if (s.in_dim() * s.out_dim() <= max_choi_dim && !s.is_cp(tol)) return false;
  return true;
}

bool loewner_leq(const Morphism& f, const Morphism& g, double tol, std::int64_t max_choi_dim) {
  check_same(f.src(), g.src(), "Loewner comparison");
  check_same(f.tgt(), g.tgt(), "Loewner comparison");
  for (const auto& [k, s] : g.entries()) {
    if (s.in_dim() * s.out_dim() > max_choi_dim) continue;
    if (!(s - f.at(k.first, k.second)).is_cp(tol)) return false;
  }
  for (const auto& [k, s] : f.entries())
    if (!g.get(k.first, k.second) && s.max_abs() > tol) return false;
  return true;
}

}  // namespace qlam::cpm

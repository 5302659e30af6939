#include "qlam/cpm.hpp"

#include <atomic>

namespace qlam::cpm {

namespace {
std::atomic<std::uint64_t> g_cap{5040};
}

std::uint64_t group_cap() { return g_cap.load(); }
void set_group_cap(std::uint64_t cap) { g_cap.store(cap); }

PermGroup::PermGroup(std::int64_t degree, std::vector<GroupFactor> factors) : degree_(degree) {
  for (auto& f : factors) {
    if (f.order <= 1) continue;
    if (static_cast<std::int64_t>(f.elems.size()) != static_cast<std::int64_t>(f.order) * f.dim)
      throw CpmError("group factor element table has the wrong size");
    if (f.stride <= 0 || degree % (f.stride * f.dim) != 0) throw CpmError("group factor does not fit the degree");
    factors_.push_back(std::move(f));
  }
  if (order() > group_cap()) throw GroupTooLarge("permutation group of order " + std::to_string(order()));
}

GroupPtr PermGroup::trivial(std::int64_t degree) { return std::make_shared<const PermGroup>(degree, std::vector<GroupFactor>{}); }

GroupPtr PermGroup::from_elements(int degree, const std::vector<std::vector<int>>& elems) {
  GroupFactor f{1, degree, static_cast<int>(elems.size()), {}};
  for (const auto& e : elems) {
    if (static_cast<int>(e.size()) != degree) throw CpmError("permutation has the wrong degree");
    f.elems.insert(f.elems.end(), e.begin(), e.end());
  }
  return std::make_shared<const PermGroup>(degree, std::vector<GroupFactor>{std::move(f)});
}

GroupPtr PermGroup::product(const GroupPtr& g, const GroupPtr& h) {
  std::vector<GroupFactor> fs;
  for (auto f : g->factors_) {
    f.stride *= h->degree_;
    fs.push_back(std::move(f));
  }
  for (const auto& f : h->factors_) fs.push_back(f);
  return std::make_shared<const PermGroup>(g->degree_ * h->degree_, std::move(fs));
}

std::uint64_t PermGroup::order() const {
  std::uint64_t o = 1;
  for (const auto& f : factors_) o *= static_cast<std::uint64_t>(f.order);
  return o;
}

std::vector<std::vector<std::int64_t>> PermGroup::elements() const {
  std::vector<std::int64_t> id(static_cast<std::size_t>(degree_));
  for (std::int64_t i = 0; i < degree_; ++i) id[static_cast<std::size_t>(i)] = i;
  std::vector<std::vector<std::int64_t>> out{id};
  for (const auto& f : factors_) {
    std::vector<std::vector<std::int64_t>> next;
    for (const auto& p : out) {
      for (int g = 0; g < f.order; ++g) {
        std::vector<std::int64_t> q(p.size());
        for (std::size_t s = 0; s < p.size(); ++s) {
          std::int64_t t = p[s];
          std::int64_t digit = (t / f.stride) % f.dim;
          q[s] = t + (f.elems[static_cast<std::size_t>(g * f.dim + digit)] - digit) * f.stride;
        }
        next.push_back(std::move(q));
      }
    }
    out = std::move(next);
  }
  return out;
}

CMatrix PermGroup::average(const CMatrix& m) const {
  if (m.rows() != degree_ || m.cols() != degree_) throw CpmError("group average: dimension mismatch");
  CMatrix acc = m;
  for (const auto& f : factors_) {
    CMatrix sum = CMatrix::Zero(degree_, degree_);
    std::vector<std::int64_t> img(static_cast<std::size_t>(degree_));
    for (int g = 0; g < f.order; ++g) {
      for (std::int64_t s = 0; s < degree_; ++s) {
        std::int64_t digit = (s / f.stride) % f.dim;
        img[static_cast<std::size_t>(s)] = s + (f.elems[static_cast<std::size_t>(g * f.dim + digit)] - digit) * f.stride;
      }
      for (std::int64_t c = 0; c < degree_; ++c)
        for (std::int64_t r = 0; r < degree_; ++r)
          sum(img[static_cast<std::size_t>(r)], img[static_cast<std::size_t>(c)]) += acc(r, c);
    }
    acc = sum / static_cast<double>(f.order);
  }
  return acc;
}

CMatrix group_average(const PermGroup& g, const CMatrix& m) { return g.average(m); }

bool group_equal(const PermGroup& a, const PermGroup& b) {
  if (a.degree() != b.degree() || a.factors().size() != b.factors().size()) return false;
  for (std::size_t i = 0; i < a.factors().size(); ++i) {
    const auto& x = a.factors()[i];
    const auto& y = b.factors()[i];
    if (x.stride != y.stride || x.dim != y.dim || x.order != y.order || x.elems != y.elems) return false;
  }
  return true;
}

}  // namespace qlam::cpm

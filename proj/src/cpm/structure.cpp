#include "qlam/cpm.hpp"

namespace qlam::cpm {

namespace {

using Trip = Eigen::Triplet<cplx>;

template <typename F>
void for_each_nz(const SpMat& m, F&& f) {
  for (Eigen::Index k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it) f(it.row(), it.col(), it.value());
}

Superop from_triplets(std::int64_t in, std::int64_t out, const std::vector<Trip>& trips) {
  SpMat m(out * out, in * in);
  m.setFromTriplets(trips.begin(), trips.end());
  return Superop(in, out, m);
}

std::int64_t dim_of(const ObjPtr& a, const LabelPtr& l) {
  int i = a->find(*l);
  if (i < 0) throw CpmError("label " + l->key + " not in object");
  return (*a)[static_cast<std::size_t>(i)].dim;
}

// Same-layout relabelling.
Rewire relabel(LabelPtr target, std::int64_t dim) { return Rewire{std::move(target), {dim}, {0}, 1.0}; }

// Label of component j in a right-nested n-ary biproduct.
LabelPtr wrap(std::size_t j, std::size_t n, LabelPtr l) {
  if (n == 1) return l;
  if (j == 0) return lbl::lft(std::move(l));
  return lbl::rgt(wrap(j - 1, n - 1, std::move(l)));
}

}  // namespace

Superop factor_permutation(const std::vector<std::int64_t>& dims, const std::vector<int>& order) {
  const std::size_t k = dims.size();
  if (order.size() != k) throw CpmError("factor permutation: order has the wrong length");
  std::int64_t total = 1;
  for (auto d : dims) total *= d;
  std::vector<std::int64_t> src_stride(k), tgt_stride(k);
  {
    std::int64_t s = 1;
    for (std::size_t i = k; i-- > 0;) {
      src_stride[i] = s;
      s *= dims[i];
    }
    s = 1;
    for (std::size_t t = k; t-- > 0;) {
      tgt_stride[t] = s;
      s *= dims[static_cast<std::size_t>(order[t])];
    }
  }
  std::vector<std::int64_t> perm(static_cast<std::size_t>(total));
  for (std::int64_t s = 0; s < total; ++s) {
    std::int64_t t = 0;
    for (std::size_t p = 0; p < k; ++p) {
      const auto f = static_cast<std::size_t>(order[p]);
      t += ((s / src_stride[f]) % dims[f]) * tgt_stride[p];
    }
    perm[static_cast<std::size_t>(s)] = t;
  }
  return Superop::permutation(perm);
}

std::vector<int> match_items(const std::vector<LabelPtr>& source, const std::vector<LabelPtr>& target) {
  if (source.size() != target.size()) throw CpmError("item matching: size mismatch");
  std::vector<bool> used(source.size(), false);
  std::vector<int> order(target.size());
  for (std::size_t t = 0; t < target.size(); ++t) {
    bool found = false;
    for (std::size_t s = 0; s < source.size(); ++s) {
      if (!used[s] && source[s]->key == target[t]->key) {
        used[s] = true;
        order[t] = static_cast<int>(s);
        found = true;
        break;
      }
    }
    if (!found) throw CpmError("item matching: no source item for " + target[t]->key);
  }
  return order;
}

Morphism structural(const ObjPtr& src, const ObjPtr& tgt,
                    const std::function<std::vector<Rewire>(const WebElement&)>& gen) {
  Morphism m(src, tgt);
  for (std::size_t a = 0; a < src->size(); ++a) {
    const auto& e = (*src)[a];
    for (const auto& r : gen(e)) {
      int b = tgt->find(*r.target);
      if (b < 0) throw CpmError("structural map: target label " + r.target->key + " missing");
      Superop p = factor_permutation(r.dims, r.order);
      if (p.in_dim() != e.dim || p.out_dim() != (*tgt)[static_cast<std::size_t>(b)].dim)
        throw CpmError("structural map: factor sizes do not match at " + e.label->key);
      Superop s = p.average_input(*e.group);
      if (r.weight != cplx(1.0)) s = s.scaled(r.weight);
      m.add(static_cast<int>(a), b, s);
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Tensor

ObjPtr tensor(const ObjPtr& a, const ObjPtr& b) {
  std::vector<WebElement> es;
  es.reserve(a->size() * b->size());
  for (const auto& x : a->elements())
    for (const auto& y : b->elements())
      es.push_back({lbl::pair(x.label, y.label), x.dim * y.dim, PermGroup::product(x.group, y.group)});
  return make_object(std::move(es), merge_truncation(a->truncation(), b->truncation()));
}

Morphism tensor(const Morphism& f, const Morphism& g) {
  ObjPtr src = tensor(f.src(), g.src()), tgt = tensor(f.tgt(), g.tgt());
  Morphism m(src, tgt);
  const int ns = static_cast<int>(g.src()->size()), nt = static_cast<int>(g.tgt()->size());
  for (const auto& [k1, s1] : f.entries())
    for (const auto& [k2, s2] : g.entries())
      m.set(k1.first * ns + k2.first, k1.second * nt + k2.second, s1.kron(s2));
  return m;
}

Morphism lunit(const ObjPtr& a) {
  return structural(tensor(unit_object(), a), a, [](const WebElement& e) {
    return std::vector<Rewire>{relabel(e.label->items[1], e.dim)};
  });
}

Morphism lunit_inv(const ObjPtr& a) {
  return structural(a, tensor(unit_object(), a), [](const WebElement& e) {
    return std::vector<Rewire>{relabel(lbl::pair(lbl::star(), e.label), e.dim)};
  });
}

Morphism runit(const ObjPtr& a) {
  return structural(tensor(a, unit_object()), a, [](const WebElement& e) {
    return std::vector<Rewire>{relabel(e.label->items[0], e.dim)};
  });
}

Morphism runit_inv(const ObjPtr& a) {
  return structural(a, tensor(a, unit_object()), [](const WebElement& e) {
    return std::vector<Rewire>{relabel(lbl::pair(e.label, lbl::star()), e.dim)};
  });
}

Morphism assoc(const ObjPtr& a, const ObjPtr& b, const ObjPtr& c) {
  return structural(tensor(tensor(a, b), c), tensor(a, tensor(b, c)), [](const WebElement& e) {
    const auto& ab = e.label->items[0];
    return std::vector<Rewire>{
        relabel(lbl::pair(ab->items[0], lbl::pair(ab->items[1], e.label->items[1])), e.dim)};
  });
}

Morphism assoc_inv(const ObjPtr& a, const ObjPtr& b, const ObjPtr& c) {
  return structural(tensor(a, tensor(b, c)), tensor(tensor(a, b), c), [](const WebElement& e) {
    const auto& bc = e.label->items[1];
    return std::vector<Rewire>{
        relabel(lbl::pair(lbl::pair(e.label->items[0], bc->items[0]), bc->items[1]), e.dim)};
  });
}

Morphism symmetry(const ObjPtr& a, const ObjPtr& b) {
  return structural(tensor(a, b), tensor(b, a), [&](const WebElement& e) {
    const auto& x = e.label->items[0];
    const auto& y = e.label->items[1];
    return std::vector<Rewire>{Rewire{lbl::pair(y, x), {dim_of(a, x), dim_of(b, y)}, {1, 0}, 1.0}};
  });
}

// ---------------------------------------------------------------------------
// Biproducts

ObjPtr biproduct(const ObjPtr& a, const ObjPtr& b) {
  std::vector<WebElement> es;
  for (const auto& x : a->elements()) es.push_back({lbl::lft(x.label), x.dim, x.group});
  for (const auto& y : b->elements()) es.push_back({lbl::rgt(y.label), y.dim, y.group});
  return make_object(std::move(es), merge_truncation(a->truncation(), b->truncation()));
}

ObjPtr biproduct(const std::vector<ObjPtr>& family) {
  if (family.empty()) throw CpmError("empty biproduct");
  if (family.size() == 1) return family[0];
  return biproduct(family[0], biproduct(std::vector<ObjPtr>(family.begin() + 1, family.end())));
}

Morphism inj(const std::vector<ObjPtr>& family, std::size_t j) {
  const std::size_t n = family.size();
  return structural(family.at(j), biproduct(family), [&](const WebElement& e) {
    return std::vector<Rewire>{relabel(wrap(j, n, e.label), e.dim)};
  });
}

Morphism proj(const std::vector<ObjPtr>& family, std::size_t j) {
  const std::size_t n = family.size();
  ObjPtr sum = biproduct(family);
  const ObjPtr& comp = family.at(j);
  Morphism m(sum, comp);
  for (std::size_t b = 0; b < comp->size(); ++b) {
    const auto& e = (*comp)[b];
    int a = sum->find(*wrap(j, n, e.label));
    m.set(a, static_cast<int>(b), Superop::identity(e.dim).average_input(*e.group));
  }
  return m;
}

Morphism cotuple(const std::vector<Morphism>& fs) {
  if (fs.empty()) throw CpmError("empty cotuple");
  std::vector<ObjPtr> family;
  for (const auto& f : fs) family.push_back(f.src());
  ObjPtr sum = biproduct(family);
  Morphism m(sum, fs[0].tgt());
  for (std::size_t j = 0; j < fs.size(); ++j) {
    if (!object_equal(*fs[j].tgt(), *fs[0].tgt())) throw CpmError("cotuple: target mismatch");
    for (const auto& [k, s] : fs[j].entries()) {
      int a = sum->find(*wrap(j, fs.size(), (*fs[j].src())[static_cast<std::size_t>(k.first)].label));
      m.add(a, k.second, s);
    }
  }
  return m;
}

Morphism tuple(const std::vector<Morphism>& fs) {
  if (fs.empty()) throw CpmError("empty tuple");
  std::vector<ObjPtr> family;
  for (const auto& f : fs) family.push_back(f.tgt());
  ObjPtr sum = biproduct(family);
  Morphism m(fs[0].src(), sum);
  for (std::size_t j = 0; j < fs.size(); ++j) {
    if (!object_equal(*fs[j].src(), *fs[0].src())) throw CpmError("tuple: source mismatch");
    for (const auto& [k, s] : fs[j].entries()) {
      int b = sum->find(*wrap(j, fs.size(), (*fs[j].tgt())[static_cast<std::size_t>(k.second)].label));
      m.add(k.first, b, s);
    }
  }
  return m;
}

Morphism pdistr(const ObjPtr& a, const ObjPtr& b, const ObjPtr& c) {
  return structural(tensor(a, biproduct(b, c)), biproduct(tensor(a, b), tensor(a, c)), [](const WebElement& e) {
    const auto& x = e.label->items[0];
    const auto& s = e.label->items[1];
    LabelPtr p = lbl::pair(x, s->items[0]);
    return std::vector<Rewire>{relabel(s->kind == LabelKind::Lft ? lbl::lft(p) : lbl::rgt(p), e.dim)};
  });
}

Morphism pdistr_inv(const ObjPtr& a, const ObjPtr& b, const ObjPtr& c) {
  return structural(biproduct(tensor(a, b), tensor(a, c)), tensor(a, biproduct(b, c)), [](const WebElement& e) {
    const auto& p = e.label->items[0];
    LabelPtr y = e.label->kind == LabelKind::Lft ? lbl::lft(p->items[1]) : lbl::rgt(p->items[1]);
    return std::vector<Rewire>{relabel(lbl::pair(p->items[0], y), e.dim)};
  });
}

// ---------------------------------------------------------------------------
// Lists

ObjPtr list_object(const ObjPtr& a, int max_len) {
  if (max_len < 0) throw CpmError("negative list bound");
  std::vector<WebElement> es;
  struct Partial {
    std::vector<LabelPtr> items;
    std::int64_t dim;
    GroupPtr group;
  };
  std::vector<Partial> level{{{}, 1, PermGroup::trivial(1)}};
  for (int n = 0;; ++n) {
    for (const auto& p : level) es.push_back({lbl::list(p.items), p.dim, p.group});
    if (n == max_len) break;
    std::vector<Partial> next;
    for (const auto& p : level)
      for (const auto& x : a->elements()) {
        Partial q{p.items, p.dim * x.dim, PermGroup::product(p.group, x.group)};
        q.items.push_back(x.label);
        next.push_back(std::move(q));
      }
    level = std::move(next);
  }
  Truncation t = a->truncation();
  return make_object(std::move(es), merge_truncation(t, Truncation{max_len, -1}));
}

Morphism list_fold(const ObjPtr& a, int max_len) {
  ObjPtr lst = list_object(a, max_len);
  ObjPtr src = biproduct(unit_object(), tensor(a, lst));
  return structural(src, lst, [&](const WebElement& e) {
    std::vector<Rewire> out;
    if (e.label->kind == LabelKind::Lft) {
      out.push_back(relabel(lbl::list({}), 1));
    } else {
      const auto& p = e.label->items[0];
      const auto& tail = p->items[1]->items;
      if (static_cast<int>(tail.size()) + 1 <= max_len) {
        std::vector<LabelPtr> items{p->items[0]};
        items.insert(items.end(), tail.begin(), tail.end());
        out.push_back(relabel(lbl::list(std::move(items)), e.dim));
      }
    }
    return out;
  });
}

Morphism list_unfold(const ObjPtr& a, int max_len) {
  ObjPtr lst = list_object(a, max_len);
  ObjPtr tgt = biproduct(unit_object(), tensor(a, lst));
  return structural(lst, tgt, [](const WebElement& e) {
    const auto& items = e.label->items;
    if (items.empty()) return std::vector<Rewire>{relabel(lbl::lft(lbl::star()), 1)};
    LabelPtr tail = lbl::list(std::vector<LabelPtr>(items.begin() + 1, items.end()));
    return std::vector<Rewire>{relabel(lbl::rgt(lbl::pair(items[0], tail)), e.dim)};
  });
}

// ---------------------------------------------------------------------------
// Compact closure

Morphism eta(const ObjPtr& a) {
  ObjPtr tgt = tensor(a, a);
  Morphism m(unit_object(), tgt);
  for (const auto& e : a->elements()) {
    const std::int64_t d = e.dim, dd = d * d;
    std::vector<Trip> trips;
    for (std::int64_t i = 0; i < d; ++i)
      for (std::int64_t j = 0; j < d; ++j) trips.emplace_back((i * d + i) + (j * d + j) * dd, 0, 1.0);
    Superop s = from_triplets(1, dd, trips).average_output(*PermGroup::product(e.group, e.group));
    m.set(0, tgt->find(*lbl::pair(e.label, e.label)), s);
  }
  return m;
}

Morphism eps(const ObjPtr& a) {
  ObjPtr src = tensor(a, a);
  Morphism m(src, unit_object());
  for (const auto& e : a->elements()) {
    const std::int64_t d = e.dim, dd = d * d;
    std::vector<Trip> trips;
    for (std::int64_t i = 0; i < d; ++i)
      for (std::int64_t j = 0; j < d; ++j) trips.emplace_back(0, (i * d + i) + (j * d + j) * dd, 1.0);
    Superop s = from_triplets(dd, 1, trips).average_input(*PermGroup::product(e.group, e.group));
    m.set(src->find(*lbl::pair(e.label, e.label)), 0, s);
  }
  return m;
}

Morphism eval(const ObjPtr& a, const ObjPtr& b) {
  ObjPtr src = tensor(tensor(a, b), a);
  Morphism m(src, b);
  for (const auto& x : a->elements())
    for (std::size_t bi = 0; bi < b->size(); ++bi) {
      const auto& y = (*b)[bi];
      const std::int64_t da = x.dim, db = y.dim, n = da * db * da;
      std::vector<Trip> trips;
      for (std::int64_t i = 0; i < da; ++i)
        for (std::int64_t j = 0; j < da; ++j)
          for (std::int64_t k = 0; k < db; ++k)
            for (std::int64_t l = 0; l < db; ++l) {
              std::int64_t p = (i * db + k) * da + i, q = (j * db + l) * da + j;
              trips.emplace_back(k + l * db, p + q * n, 1.0);
            }
      const auto& g = (*src)[static_cast<std::size_t>(src->find(*lbl::pair(lbl::pair(x.label, y.label), x.label)))];
      Superop s = from_triplets(n, db, trips).average_input(*g.group);
      m.set(src->find(*g.label), static_cast<int>(bi), s);
    }
  return m;
}

Morphism curry(const Morphism& f, const ObjPtr& c, const ObjPtr& a, const ObjPtr& b) {
  ObjPtr ca = tensor(c, a), ab = tensor(a, b);
  if (!object_equal(*f.src(), *ca) || !object_equal(*f.tgt(), *b)) throw CpmError("curry: object mismatch");
  Morphism m(c, ab);
  for (const auto& [k, s] : f.entries()) {
    const auto& pl = (*ca)[static_cast<std::size_t>(k.first)].label;
    const std::int64_t dc = dim_of(c, pl->items[0]), da = dim_of(a, pl->items[1]);
    const std::int64_t db = (*b)[static_cast<std::size_t>(k.second)].dim, dab = da * db, dca = dc * da;
    std::vector<Trip> trips;
    for_each_nz(s.mat(), [&](Eigen::Index r, Eigen::Index col, cplx v) {
      const std::int64_t kk = r % db, l = r / db, p = col % dca, q = col / dca;
      const std::int64_t x = p / da, i = p % da, y = q / da, j = q % da;
      trips.emplace_back((i * db + kk) + (j * db + l) * dab, x + y * dc, v);
    });
    int tgt = ab->find(*lbl::pair(pl->items[1], (*b)[static_cast<std::size_t>(k.second)].label));
    m.add(c->find(*pl->items[0]), tgt, from_triplets(dc, dab, trips));
  }
  return m;
}

Morphism uncurry(const Morphism& g, const ObjPtr& c, const ObjPtr& a, const ObjPtr& b) {
  ObjPtr ca = tensor(c, a), ab = tensor(a, b);
  if (!object_equal(*g.src(), *c) || !object_equal(*g.tgt(), *ab)) throw CpmError("uncurry: object mismatch");
  Morphism m(ca, b);
  for (const auto& [k, s] : g.entries()) {
    const auto& cl = (*c)[static_cast<std::size_t>(k.first)].label;
    const auto& pl = (*ab)[static_cast<std::size_t>(k.second)].label;
    const std::int64_t dc = s.in_dim(), da = dim_of(a, pl->items[0]), db = dim_of(b, pl->items[1]);
    const std::int64_t dab = da * db, dca = dc * da;
    std::vector<Trip> trips;
    for_each_nz(s.mat(), [&](Eigen::Index r, Eigen::Index col, cplx v) {
      const std::int64_t r1 = r % dab, r2 = r / dab, x = col % dc, y = col / dc;
      const std::int64_t i = r1 / db, kk = r1 % db, j = r2 / db, l = r2 % db;
      trips.emplace_back(kk + l * db, (x * da + i) + (y * da + j) * dca, v);
    });
    m.add(ca->find(*lbl::pair(cl, pl->items[0])), b->find(*pl->items[1]), from_triplets(dca, db, trips));
  }
  return m;
}

}  // namespace qlam::cpm

#include "qlam/cpm.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace qlam::cpm {

namespace {

std::vector<WebElement> sorted_web(const ObjPtr& a) {
  std::vector<WebElement> es = a->elements();
  std::sort(es.begin(), es.end(), [](const WebElement& x, const WebElement& y) { return x.label->key < y.label->key; });
  return es;
}

std::vector<std::vector<int>> full_elements(const PermGroup& g) {
  std::vector<std::vector<int>> out;
  for (const auto& e : g.elements()) out.emplace_back(e.begin(), e.end());
  return out;
}

// Keep each permutation once. The table lists the image of a homomorphism, so
// averaging over distinct images gives the same projector.
void dedupe_elements(GroupFactor& f) {
  std::set<std::vector<int>> seen;
  std::vector<int> out;
  for (int g = 0; g < f.order; ++g) {
    std::vector<int> p(f.elems.begin() + static_cast<std::ptrdiff_t>(g) * f.dim,
                       f.elems.begin() + static_cast<std::ptrdiff_t>(g + 1) * f.dim);
    if (seen.insert(p).second) out.insert(out.end(), p.begin(), p.end());
  }
  f.order = static_cast<int>(seen.size());
  f.elems = std::move(out);
}

// Group of a multiset whose items (sorted) have the given web elements:
// one wreath factor (S_m acting on copies, G_a on each copy) per block of equal labels.
GroupPtr multiset_group(const std::vector<const WebElement*>& items) {
  std::int64_t degree = 1;
  for (const auto* e : items) degree *= e->dim;
  std::vector<GroupFactor> factors;
  std::int64_t stride = degree;
  std::size_t i = 0;
  while (i < items.size()) {
    std::size_t j = i;
    while (j < items.size() && items[j]->label->key == items[i]->label->key) ++j;
    const int m = static_cast<int>(j - i);
    const WebElement& a = *items[i];
    std::int64_t block = 1;
    for (int t = 0; t < m; ++t) block *= a.dim;
    stride /= block;
    if (block == 1) {
      i = j;
      continue;
    }
    // Order check before materializing.
    std::uint64_t order = 1;
    const std::uint64_t ga = a.group->order();
    for (int t = 1; t <= m; ++t) {
      order *= static_cast<std::uint64_t>(t) * ga;
      if (order > group_cap()) throw GroupTooLarge("symmetric power group exceeds the cap");
    }
    if (order > 1) {
      auto gel = full_elements(*a.group);
      GroupFactor f{stride, static_cast<int>(block), static_cast<int>(order), {}};
      f.elems.reserve(static_cast<std::size_t>(order * static_cast<std::uint64_t>(block)));
      std::vector<int> h(static_cast<std::size_t>(m));
      std::iota(h.begin(), h.end(), 0);
      const int d = static_cast<int>(a.dim);
      do {
        std::vector<std::size_t> gs(static_cast<std::size_t>(m), 0);
        for (;;) {
          for (std::int64_t s = 0; s < block; ++s) {
            // digits of s, copy 0 most significant
            std::vector<int> dig(static_cast<std::size_t>(m));
            std::int64_t r = s;
            for (int t = m - 1; t >= 0; --t) {
              dig[static_cast<std::size_t>(t)] = static_cast<int>(r % d);
              r /= d;
            }
            std::int64_t img = 0;
            for (int t = 0; t < m; ++t)
              img = img * d + gel[gs[static_cast<std::size_t>(t)]][static_cast<std::size_t>(dig[static_cast<std::size_t>(h[static_cast<std::size_t>(t)])])];
            f.elems.push_back(static_cast<int>(img));
          }
          int t = m - 1;
          while (t >= 0 && ++gs[static_cast<std::size_t>(t)] == gel.size()) gs[static_cast<std::size_t>(t--)] = 0;
          if (t < 0) break;
        }
      } while (std::next_permutation(h.begin(), h.end()));
      dedupe_elements(f);
      if (f.order > 1) factors.push_back(std::move(f));
    }
    i = j;
  }
  return std::make_shared<const PermGroup>(degree, std::move(factors));
}

// Web elements of multisets of cardinality k over a (sorted web).
void multisets_of(const std::vector<WebElement>& web, int k, std::vector<WebElement>& out) {
  std::vector<std::size_t> idx(static_cast<std::size_t>(k), 0);
  if (web.empty() && k > 0) return;
  for (;;) {
    std::vector<const WebElement*> items;
    std::vector<LabelPtr> labels;
    std::int64_t dim = 1;
    for (auto i : idx) {
      items.push_back(&web[i]);
      labels.push_back(web[i].label);
      dim *= web[i].dim;
    }
    out.push_back({lbl::mset(labels), dim, multiset_group(items)});
    // next non-decreasing index tuple
    int t = k - 1;
    while (t >= 0 && idx[static_cast<std::size_t>(t)] == web.size() - 1) --t;
    if (t < 0) break;
    ++idx[static_cast<std::size_t>(t)];
    for (int u = t + 1; u < k; ++u) idx[static_cast<std::size_t>(u)] = idx[static_cast<std::size_t>(t)];
  }
}

std::vector<std::int64_t> item_dims(const ObjPtr& a, const std::vector<LabelPtr>& items) {
  std::vector<std::int64_t> d;
  for (const auto& l : items) {
    int i = a->find(*l);
    if (i < 0) throw CpmError("label " + l->key + " not in base object");
    d.push_back((*a)[static_cast<std::size_t>(i)].dim);
  }
  return d;
}

Rewire rewire(LabelPtr target, std::vector<std::int64_t> dims, std::vector<int> order) {
  return Rewire{std::move(target), std::move(dims), std::move(order), 1.0};
}

// The base object of a ! object: the elements of its cardinality-one multisets.
ObjPtr base_of(const ObjPtr& bang_a) {
  std::vector<WebElement> es;
  for (const auto& e : bang_a->elements()) {
    if (e.label->kind != LabelKind::MSet) throw CpmError("not a ! object");
    if (e.label->items.size() == 1) es.push_back({e.label->items[0], e.dim, e.group});
  }
  return make_object(std::move(es), bang_a->truncation());
}

LabelPtr tuple_label(const std::vector<LabelPtr>& items) {
  LabelPtr acc = items.at(0);
  for (std::size_t i = 1; i < items.size(); ++i) acc = lbl::pair(acc, items[i]);
  return acc;
}

// Distinct arrangements of sorted items.
std::vector<std::vector<LabelPtr>> arrangements(const std::vector<LabelPtr>& sorted) {
  std::vector<std::vector<LabelPtr>> out;
  std::vector<LabelPtr> seq = sorted;
  do out.push_back(seq);
  while (std::next_permutation(seq.begin(), seq.end(), label_less));
  return out;
}

}  // namespace

ObjPtr tensor_power(const ObjPtr& a, int k) {
  if (k < 0) throw CpmError("negative tensor power");
  if (k == 0) return unit_object();
  ObjPtr acc = a;
  for (int i = 1; i < k; ++i) acc = tensor(acc, a);
  return acc;
}

std::pair<ObjPtr, Morphism> symmetric_power(const ObjPtr& a, int k) {
  if (k < 0) throw CpmError("negative symmetric power");
  std::vector<WebElement> es;
  multisets_of(sorted_web(a), k, es);
  ObjPtr sym = make_object(std::move(es), a->truncation());
  ObjPtr pow = tensor_power(a, k);
  if (k == 0) {
    Morphism eq(sym, pow);
    eq.set(0, 0, Superop::identity(1));
    return {sym, eq};
  }
  Morphism eq = structural(sym, pow, [&](const WebElement& e) {
    std::vector<Rewire> out;
    for (const auto& seq : arrangements(e.label->items))
      out.push_back(rewire(tuple_label(seq), item_dims(a, e.label->items), match_items(e.label->items, seq)));
    return out;
  });
  return {sym, eq};
}

ObjPtr bang(const ObjPtr& a, int max_card) {
  if (max_card < 0) throw CpmError("negative ! bound");
  std::vector<WebElement> es;
  auto web = sorted_web(a);
  for (int k = 0; k <= max_card; ++k) multisets_of(web, k, es);
  return make_object(std::move(es), merge_truncation(a->truncation(), Truncation{-1, max_card}));
}

Morphism weak(const ObjPtr& bang_a) {
  return structural(bang_a, unit_object(), [](const WebElement& e) {
    std::vector<Rewire> out;
    if (e.label->items.empty()) out.push_back(rewire(lbl::star(), {1}, {0}));
    return out;
  });
}

std::vector<std::vector<std::vector<LabelPtr>>> ordered_decompositions(const std::vector<LabelPtr>& items, int parts) {
  std::vector<std::vector<std::vector<LabelPtr>>> out;
  if (parts <= 0) {
    if (items.empty()) out.emplace_back();
    return out;
  }
  // Blocks of equal labels.
  std::vector<std::pair<LabelPtr, int>> blocks;
  for (const auto& l : items) {
    if (!blocks.empty() && blocks.back().first->key == l->key)
      ++blocks.back().second;
    else
      blocks.emplace_back(l, 1);
  }
  std::vector<std::vector<LabelPtr>> cur(static_cast<std::size_t>(parts));
  std::function<void(std::size_t)> rec_block;
  std::function<void(std::size_t, int, int)> distribute = [&](std::size_t b, int part, int left) {
    if (part == parts - 1) {
      for (int t = 0; t < left; ++t) cur[static_cast<std::size_t>(part)].push_back(blocks[b].first);
      rec_block(b + 1);
      for (int t = 0; t < left; ++t) cur[static_cast<std::size_t>(part)].pop_back();
      return;
    }
    for (int take = 0; take <= left; ++take) {
      for (int t = 0; t < take; ++t) cur[static_cast<std::size_t>(part)].push_back(blocks[b].first);
      distribute(b, part + 1, left - take);
      for (int t = 0; t < take; ++t) cur[static_cast<std::size_t>(part)].pop_back();
    }
  };
  rec_block = [&](std::size_t b) {
    if (b == blocks.size()) {
      out.push_back(cur);
      return;
    }
    distribute(b, 0, blocks[b].second);
  };
  rec_block(0);
  return out;
}

Morphism contr(const ObjPtr& bang_a) {
  ObjPtr base = base_of(bang_a);
  return structural(bang_a, tensor(bang_a, bang_a), [&](const WebElement& e) {
    std::vector<Rewire> out;
    const auto& items = e.label->items;
    for (const auto& parts : ordered_decompositions(items, 2)) {
      std::vector<LabelPtr> seq = parts[0];
      seq.insert(seq.end(), parts[1].begin(), parts[1].end());
      out.push_back(rewire(lbl::pair(lbl::mset(parts[0]), lbl::mset(parts[1])), item_dims(base, items),
                           match_items(items, seq)));
    }
    return out;
  });
}

Morphism der(const ObjPtr& bang_a, const ObjPtr& a) {
  return structural(bang_a, a, [](const WebElement& e) {
    std::vector<Rewire> out;
    if (e.label->items.size() == 1) out.push_back(rewire(e.label->items[0], {e.dim}, {0}));
    return out;
  });
}

Morphism dig(const ObjPtr& bang_a, const ObjPtr& bang_bang_a) {
  ObjPtr base = base_of(bang_a);
  // Group the elements of !!A by their multiset union.
  std::map<std::string, std::vector<LabelPtr>> by_union;
  for (const auto& e : bang_bang_a->elements()) {
    std::vector<LabelPtr> all;
    for (const auto& nu : e.label->items) all.insert(all.end(), nu->items.begin(), nu->items.end());
    by_union[lbl::mset(all)->key].push_back(e.label);
  }
  return structural(bang_a, bang_bang_a, [&](const WebElement& e) {
    std::vector<Rewire> out;
    auto it = by_union.find(e.label->key);
    if (it == by_union.end()) return out;
    const auto& items = e.label->items;
    for (const auto& m : it->second) {
      std::vector<LabelPtr> seq;
      for (const auto& nu : m->items) seq.insert(seq.end(), nu->items.begin(), nu->items.end());
      out.push_back(rewire(m, item_dims(base, items), match_items(items, seq)));
    }
    return out;
  });
}

Morphism promote(const Morphism& f, const ObjPtr& bang_a, const ObjPtr& bang_b) {
  if (base_of(bang_a)->size() != f.src()->size()) throw CpmError("promotion: source is not the ! of the morphism source");
  const ObjPtr& A = f.src();
  const ObjPtr& B = f.tgt();
  // Rank of target labels in key order, and entries of f by source label key.
  std::map<std::string, int> rank;
  {
    std::vector<std::string> keys;
    for (const auto& e : B->elements()) keys.push_back(e.label->key);
    std::sort(keys.begin(), keys.end());
    for (std::size_t i = 0; i < keys.size(); ++i) rank[keys[i]] = static_cast<int>(i);
  }
  std::map<std::string, std::vector<std::pair<LabelPtr, const Superop*>>> by_src;
  for (const auto& [k, s] : f.entries())
    by_src[(*A)[static_cast<std::size_t>(k.first)].label->key].emplace_back((*B)[static_cast<std::size_t>(k.second)].label, &s);

  Morphism m(bang_a, bang_b);
  for (std::size_t ai = 0; ai < bang_a->size(); ++ai) {
    const auto& e = (*bang_a)[ai];
    const auto& items = e.label->items;
    const std::size_t k = items.size();
    auto dims = item_dims(A, items);
    for (const auto& seq : arrangements(items)) {
      Superop p = factor_permutation(dims, match_items(items, seq));
      std::vector<LabelPtr> targets;
      std::function<void(std::size_t, int, const Superop&)> rec = [&](std::size_t i, int min_rank, const Superop& acc) {
        if (i == k) {
          int bi = bang_b->find(*lbl::mset(targets));
          if (bi < 0) throw CpmError("promotion: target multiset missing");
          m.add(static_cast<int>(ai), bi, p.then(acc));
          return;
        }
        auto it = by_src.find(seq[i]->key);
        if (it == by_src.end()) return;
        for (const auto& [b, s] : it->second) {
          int r = rank.at(b->key);
          if (r < min_rank) continue;
          targets.push_back(b);
          rec(i + 1, r, acc.kron(*s));
          targets.pop_back();
        }
      };
      rec(0, 0, Superop::identity(1));
    }
  }
  Morphism out(bang_a, bang_b);
  for (const auto& [key, s] : m.entries()) {
    const auto& ga = *(*bang_a)[static_cast<std::size_t>(key.first)].group;
    const auto& gb = *(*bang_b)[static_cast<std::size_t>(key.second)].group;
    out.set(key.first, key.second, project_invariant(s, ga, gb));
  }
  out.prune();
  return out;
}

Morphism bierman(const ObjPtr& bang_a, const ObjPtr& bang_b, const ObjPtr& bang_ab) {
  ObjPtr base_a = base_of(bang_a), base_b = base_of(bang_b);
  return structural(tensor(bang_a, bang_b), bang_ab, [&](const WebElement& e) {
    std::vector<Rewire> out;
    const auto& mu = e.label->items[0]->items;
    const auto& nu = e.label->items[1]->items;
    if (mu.size() != nu.size()) return out;
    auto dims = item_dims(base_a, mu);
    auto dims_b = item_dims(base_b, nu);
    dims.insert(dims.end(), dims_b.begin(), dims_b.end());
    std::set<std::string> seen;
    for (const auto& perm : arrangements(nu)) {
      std::vector<LabelPtr> pairs;
      for (std::size_t i = 0; i < mu.size(); ++i) pairs.push_back(lbl::pair(mu[i], perm[i]));
      LabelPtr eta = lbl::mset(pairs);
      if (!seen.insert(eta->key).second) continue;
      if (bang_ab->find(*eta) < 0) continue;
      // Assign each pair component to an unused copy on its side.
      std::vector<LabelPtr> as, bs;
      for (const auto& pr : eta->items) {
        as.push_back(pr->items[0]);
        bs.push_back(pr->items[1]);
      }
      auto oa = match_items(mu, as), ob = match_items(nu, bs);
      std::vector<int> order;
      for (std::size_t i = 0; i < as.size(); ++i) {
        order.push_back(oa[i]);
        order.push_back(static_cast<int>(mu.size()) + ob[i]);
      }
      out.push_back(rewire(eta, dims, order));
    }
    return out;
  });
}

Morphism bierman_unit(const ObjPtr& bang_one) {
  Morphism m(unit_object(), bang_one);
  for (std::size_t i = 0; i < bang_one->size(); ++i) {
    const auto& e = (*bang_one)[i];
    bool all_star = e.dim == 1;
    for (const auto& l : e.label->items) all_star = all_star && l->kind == LabelKind::Star;
    if (all_star) m.set(0, static_cast<int>(i), Superop::identity(1));
  }
  return m;
}

FixpointResult fixpoint(const Morphism& phi, const Morphism& contr_c, const Morphism& weak_c, int max_iters, double tol) {
  const ObjPtr& bang_a = phi.tgt();
  int empty = bang_a->find(*lbl::mset({}));
  if (empty < 0) throw CpmError("fixpoint: target is not a ! object");
  Morphism unit_to_empty(unit_object(), bang_a);
  unit_to_empty.set(0, empty, Superop::identity(1));
  Morphism cur = compose(weak_c, unit_to_empty);
  Morphism id_c = identity(contr_c.src());
  bool monotone = true;
  for (int n = 1; n <= max_iters; ++n) {
    Morphism next = compose(compose(contr_c, tensor(id_c, cur)), phi);
    if (!loewner_leq(cur, next)) monotone = false;
    double d = morphism_distance(cur, next);
    cur = std::move(next);
    if (d <= tol) return {cur, n, true, monotone};
  }
  return {cur, max_iters, false, monotone};
}

}  // namespace qlam::cpm

#include "qlam/denote.hpp"

#include <algorithm>
#include <functional>

namespace qlam {

using namespace cpm;

namespace {

// Labels l1..ln of a context label ((*, l1), ...), ln).
std::vector<LabelPtr> unnest(const LabelPtr& l, std::size_t n) {
  std::vector<LabelPtr> out(n);
  LabelPtr cur = l;
  for (std::size_t i = n; i-- > 0;) {
    out[i] = cur->items[1];
    cur = cur->items[0];
  }
  return out;
}

LabelPtr nest(const std::vector<LabelPtr>& ls) {
  LabelPtr acc = lbl::star();
  for (const auto& l : ls) acc = lbl::pair(acc, l);
  return acc;
}

std::int64_t dim_in(const ObjPtr& o, const LabelPtr& l) {
  int i = o->find(*l);
  if (i < 0) throw CpmError("label " + l->key + " not in object");
  return (*o)[static_cast<std::size_t>(i)].dim;
}

// Object of A -o B for a !(A -o B) binding.
ObjPtr bang_base(const Type& t, const TruncationConfig& c) {
  return tensor(denote_type(*t.left, c), denote_type(*t.right, c));
}

std::vector<std::int64_t> item_dims(const ObjPtr& base, const std::vector<LabelPtr>& items) {
  std::vector<std::int64_t> d;
  for (const auto& l : items) d.push_back(dim_in(base, l));
  return d;
}

Superop entry(std::int64_t in, std::int64_t out, std::vector<std::pair<std::int64_t, std::int64_t>> rc) {
  std::vector<Eigen::Triplet<cplx>> trips;
  for (auto [r, c] : rc) trips.emplace_back(r, c, 1.0);
  SpMat m(out * out, in * in);
  m.setFromTriplets(trips.begin(), trips.end());
  return Superop(in, out, m);
}

class Denoter {
 public:
  explicit Denoter(const TruncationConfig& t) : t_(t) {}

  bool converged = true;
  int max_iters = 0;

  Morphism run(const Derivation& d) {
    const ObjPtr ctx = denote_context(d.ctx, t_);
    const auto& p = d.premises;
    switch (d.rule) {
      case Rule::Ax: return compose(context_map(d.ctx, {single(d)}, t_), lunit(denote_type(*d.type, t_)));
      case Rule::AxD: {
        const Binding* b = d.ctx.find(d.term->var);
        ObjPtr bang_obj = denote_type(*b->type, t_);
        Morphism m = compose(context_map(d.ctx, {single(d)}, t_), lunit(bang_obj));
        return compose(m, der(bang_obj, denote_type(*d.type, t_)));
      }
      case Rule::Promote: return cokleisli_promote(run(*p[0]), d.ctx, t_);
      case Rule::UnitI: return context_map(d.ctx, {Context()}, t_);
      case Rule::Meas:
      case Rule::New:
      case Rule::Gate:
      case Rule::Split:
        return compose(context_map(d.ctx, {Context()}, t_), constant_morphism(d.rule, *d.term, t_));
      case Rule::Omega: return zero(ctx, denote_type(*d.type, t_));
      case Rule::LolliI: {
        const Type& a = *d.type;
        return curry(run(*p[0]), ctx, denote_type(*a.left, t_), denote_type(*a.right, t_));
      }
      case Rule::LolliE: {
        Morphism pre = context_map(d.ctx, {p[0]->ctx, p[1]->ctx}, t_);
        Morphism both = tensor(run(*p[0]), run(*p[1]));
        const Type& f = *p[0]->type;
        return compose(compose(pre, both), eval(denote_type(*f.left, t_), denote_type(*f.right, t_)));
      }
      case Rule::UnitE: {
        Morphism pre = context_map(d.ctx, {p[0]->ctx, p[1]->ctx}, t_);
        ObjPtr rest = denote_context(p[1]->ctx, t_);
        Morphism m = compose(pre, tensor(run(*p[0]), identity(rest)));
        return compose(compose(m, lunit(rest)), run(*p[1]));
      }
      case Rule::TensorI: {
        Morphism pre = context_map(d.ctx, {p[0]->ctx, p[1]->ctx}, t_);
        return compose(pre, tensor(run(*p[0]), run(*p[1])));
      }
      case Rule::TensorE: {
        // premise 1 context is the rest extended by x:A, y:B
        Context rest = drop_last(p[1]->ctx, 2);
        ObjPtr r = denote_context(rest, t_);
        const Type& ab = *p[0]->type;
        ObjPtr a = denote_type(*ab.left, t_), b = denote_type(*ab.right, t_);
        Morphism m = compose(context_map(d.ctx, {p[0]->ctx, rest}, t_), tensor(run(*p[0]), identity(r)));
        m = compose(compose(m, symmetry(tensor(a, b), r)), assoc_inv(r, a, b));
        return compose(m, run(*p[1]));
      }
      case Rule::SumIL:
      case Rule::SumIR: {
        const Type& s = *d.type;
        std::vector<ObjPtr> fam{denote_type(*s.left, t_), denote_type(*s.right, t_)};
        return compose(run(*p[0]), inj(fam, d.rule == Rule::SumIL ? 0 : 1));
      }
      case Rule::SumE: {
        Context rest = drop_last(p[1]->ctx, 1);
        ObjPtr r = denote_context(rest, t_);
        const Type& s = *p[0]->type;
        ObjPtr a = denote_type(*s.left, t_), b = denote_type(*s.right, t_);
        Morphism m = compose(context_map(d.ctx, {p[0]->ctx, rest}, t_), tensor(run(*p[0]), identity(r)));
        m = compose(compose(m, symmetry(biproduct(a, b), r)), pdistr(r, a, b));
        return compose(m, cotuple({run(*p[1]), run(*p[2])}));
      }
      case Rule::ListI: {
        ObjPtr a = denote_type(*d.type->left, t_);
        return compose(run(*p[0]), list_fold(a, t_.list_max));
      }
      case Rule::Rec:
      case Rule::RecN: return letrec(d);
    }
    throw CpmError("unknown rule");
  }

 private:
  const TruncationConfig& t_;

  static Context single(const Derivation& d) {
    const Binding* b = d.ctx.find(d.term->var);
    return Context({*b});
  }

  static Context drop_last(const Context& c, std::size_t n) {
    std::vector<Binding> bs(c.bindings().begin(), c.bindings().end() - static_cast<std::ptrdiff_t>(n));
    return Context(std::move(bs));
  }

  Morphism letrec(const Derivation& d) {
    const auto& dm = *d.premises[0];
    const auto& dn = *d.premises[1];
    // dm: !Delta, f, x |- M : B
    Context with_f = drop_last(dm.ctx, 1);
    Context delta = drop_last(with_f, 1);
    const Type& fty = *with_f.bindings().back().type;
    ObjPtr a = denote_type(*fty.left, t_), b = denote_type(*fty.right, t_);
    Morphism lam = curry(run(dm), denote_context(with_f, t_), a, b);

    ObjPtr dobj = denote_context(delta, t_);
    Morphism g = zero(dobj, tensor(a, b));
    Morphism contr_delta = context_map(delta, {delta, delta}, t_);
    Morphism id_delta = identity(dobj);
    const bool indexed = d.rule == Rule::RecN;
    const int limit = indexed ? d.term->bound : t_.fix_iters;
    bool done = indexed;
    int n = 0;
    for (; n < limit; ++n) {
      Morphism lifted = cokleisli_promote(g, delta, t_);
      Morphism next = compose(compose(contr_delta, tensor(id_delta, lifted)), lam);
      if (!loewner_leq(g, next, 1e-7))
        throw NonMonotoneIteration("fixpoint iteration is not increasing at step " + std::to_string(n + 1));
      double dist = morphism_distance(g, next);
      g = std::move(next);
      if (!indexed && dist <= t_.fix_tol) {
        done = true;
        ++n;
        break;
      }
    }
    if (!indexed) {
      max_iters = std::max(max_iters, n);
      if (!done) converged = false;
    }
    Morphism fix = cokleisli_promote(g, delta, t_);
    Morphism pre = context_map(d.ctx, {d.ctx, delta}, t_);
    Morphism m = compose(pre, tensor(identity(denote_context(d.ctx, t_)), fix));
    return compose(m, run(dn));
  }
};

}  // namespace

// ---------------------------------------------------------------------------

ObjPtr denote_type(const Type& a, const TruncationConfig& t) {
  switch (a.kind) {
    case TypeKind::Qubit: return qubit_object();
    case TypeKind::Unit: return unit_object();
    case TypeKind::LinArrow:
    case TypeKind::Tensor: return tensor(denote_type(*a.left, t), denote_type(*a.right, t));
    case TypeKind::BangArrow: return bang(tensor(denote_type(*a.left, t), denote_type(*a.right, t)), t.bang_max);
    case TypeKind::Sum: return biproduct(denote_type(*a.left, t), denote_type(*a.right, t));
    case TypeKind::List: return list_object(denote_type(*a.left, t), t.list_max);
  }
  throw CpmError("unknown type");
}

ObjPtr denote_context(const Context& ctx, const TruncationConfig& t) {
  ObjPtr acc = unit_object();
  for (const auto& b : ctx.bindings()) acc = tensor(acc, denote_type(*b.type, t));
  return acc;
}

Morphism context_map(const Context& src, const std::vector<Context>& targets, const TruncationConfig& t) {
  if (targets.empty() || targets.size() > 2) throw CpmError("context_map: one or two targets expected");
  const auto& bs = src.bindings();
  const std::size_t n = bs.size();
  std::vector<ObjPtr> objs, bases(n);
  for (std::size_t i = 0; i < n; ++i) {
    objs.push_back(denote_type(*bs[i].type, t));
    if (bs[i].type->is_bang()) bases[i] = bang_base(*bs[i].type, t);
  }
  // Occurrences of each source variable: (target, position).
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> occ(n);
  for (std::size_t tg = 0; tg < targets.size(); ++tg) {
    const auto& tb = targets[tg].bindings();
    for (std::size_t pos = 0; pos < tb.size(); ++pos) {
      std::size_t i = 0;
      while (i < n && bs[i].name != tb[pos].name) ++i;
      if (i == n) throw CpmError("context_map: variable " + tb[pos].name + " not in source");
      occ[i].emplace_back(tg, pos);
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!bs[i].type->is_bang() && occ[i].size() != 1)
      throw CpmError("context_map: linear variable " + bs[i].name + " must occur exactly once");

  ObjPtr src_obj = denote_context(src, t);
  ObjPtr tgt_obj = denote_context(targets[0], t);
  if (targets.size() == 2) tgt_obj = tensor(tgt_obj, denote_context(targets[1], t));

  return structural(src_obj, tgt_obj, [&](const WebElement& e) {
    std::vector<Rewire> out;
    auto ls = unnest(e.label, n);
    // Source factors: one per linear variable, one per multiset item.
    std::vector<std::int64_t> dims;
    std::vector<int> offset(n);
    for (std::size_t i = 0; i < n; ++i) {
      offset[i] = static_cast<int>(dims.size());
      if (bases[i]) {
        auto d = item_dims(bases[i], ls[i]->items);
        dims.insert(dims.end(), d.begin(), d.end());
      } else {
        dims.push_back(dim_in(objs[i], ls[i]));
      }
    }
    // Decomposition choices for the exponential variables.
    std::vector<std::vector<std::vector<std::vector<LabelPtr>>>> choices(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!bases[i]) continue;
      choices[i] = ordered_decompositions(ls[i]->items, static_cast<int>(occ[i].size()));
      if (choices[i].empty()) return out;
    }
    std::vector<std::size_t> pick(n, 0);
    for (;;) {
      // Target labels and factor order.
      std::vector<std::vector<LabelPtr>> tl(targets.size());
      std::vector<std::vector<std::vector<int>>> tf(targets.size());
      for (std::size_t tg = 0; tg < targets.size(); ++tg) {
        tl[tg].resize(targets[tg].size());
        tf[tg].resize(targets[tg].size());
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (!bases[i]) {
          auto [tg, pos] = occ[i][0];
          tl[tg][pos] = ls[i];
          tf[tg][pos] = {offset[i]};
          continue;
        }
        const auto& parts = choices[i][pick[i]];
        std::vector<LabelPtr> concat;
        for (const auto& part : parts) concat.insert(concat.end(), part.begin(), part.end());
        auto order = match_items(ls[i]->items, concat);
        std::size_t used = 0;
        for (std::size_t o = 0; o < occ[i].size(); ++o) {
          auto [tg, pos] = occ[i][o];
          tl[tg][pos] = lbl::mset(parts[o]);
          for (std::size_t k = 0; k < parts[o].size(); ++k) tf[tg][pos].push_back(offset[i] + order[used++]);
        }
      }
      std::vector<int> order;
      for (const auto& per_target : tf)
        for (const auto& fs : per_target) order.insert(order.end(), fs.begin(), fs.end());
      LabelPtr target = nest(tl[0]);
      if (targets.size() == 2) target = lbl::pair(target, nest(tl[1]));
      out.push_back(Rewire{target, dims, order, 1.0});

      std::size_t i = 0;
      for (; i < n; ++i) {
        if (!bases[i]) continue;
        if (++pick[i] < choices[i].size()) break;
        pick[i] = 0;
      }
      if (i == n) break;
    }
    return out;
  });
}

Morphism cokleisli_promote(const Morphism& phi, const Context& ctx, const TruncationConfig& t) {
  const auto& bs = ctx.bindings();
  const std::size_t n = bs.size();
  std::vector<ObjPtr> bases;
  for (const auto& b : bs) {
    if (!b.type->is_bang()) throw CpmError("promotion needs a context of !-typed variables");
    bases.push_back(bang_base(*b.type, t));
  }
  const ObjPtr& src = phi.src();
  const ObjPtr& b_obj = phi.tgt();
  ObjPtr bang_b = bang(b_obj, t.bang_max);

  std::map<std::string, int> rank;
  {
    std::vector<std::string> keys;
    for (const auto& e : b_obj->elements()) keys.push_back(e.label->key);
    std::sort(keys.begin(), keys.end());
    for (std::size_t i = 0; i < keys.size(); ++i) rank[keys[i]] = static_cast<int>(i);
  }
  std::map<int, std::vector<std::pair<int, const Superop*>>> by_src;
  for (const auto& [k, s] : phi.entries()) by_src[k.first].emplace_back(k.second, &s);

  Morphism acc(src, bang_b);
  for (std::size_t ai = 0; ai < src->size(); ++ai) {
    const auto& e = (*src)[ai];
    auto ls = unnest(e.label, n);
    std::vector<std::int64_t> dims;
    for (std::size_t i = 0; i < n; ++i) {
      auto d = item_dims(bases[i], ls[i]->items);
      dims.insert(dims.end(), d.begin(), d.end());
    }
    std::vector<int> offset(n);
    {
      int o = 0;
      for (std::size_t i = 0; i < n; ++i) {
        offset[i] = o;
        o += static_cast<int>(ls[i]->items.size());
      }
    }
    for (int k = 0; k <= t.bang_max; ++k) {
      std::vector<std::vector<std::vector<std::vector<LabelPtr>>>> choices(n);
      bool possible = true;
      for (std::size_t i = 0; i < n && possible; ++i) {
        choices[i] = ordered_decompositions(ls[i]->items, k);
        possible = !choices[i].empty();
      }
      if (!possible) continue;
      std::vector<std::size_t> pick(n, 0);
      for (;;) {
        // Context label of each of the k copies, and the factor order.
        std::vector<int> copy_src(static_cast<std::size_t>(k));
        std::vector<int> order;
        std::vector<std::vector<int>> var_order(n);
        for (std::size_t i = 0; i < n; ++i) {
          std::vector<LabelPtr> concat;
          for (const auto& part : choices[i][pick[i]]) concat.insert(concat.end(), part.begin(), part.end());
          var_order[i] = match_items(ls[i]->items, concat);
        }
        std::vector<std::size_t> used(n, 0);
        bool ok = true;
        for (int j = 0; j < k && ok; ++j) {
          std::vector<LabelPtr> parts;
          for (std::size_t i = 0; i < n; ++i) {
            const auto& part = choices[i][pick[i]][static_cast<std::size_t>(j)];
            parts.push_back(lbl::mset(part));
            for (std::size_t q = 0; q < part.size(); ++q) order.push_back(offset[i] + var_order[i][used[i]++]);
          }
          copy_src[static_cast<std::size_t>(j)] = src->find(*nest(parts));
          ok = copy_src[static_cast<std::size_t>(j)] >= 0 && by_src.count(copy_src[static_cast<std::size_t>(j)]);
        }
        if (ok) {
          Superop p = factor_permutation(dims, order);
          std::vector<LabelPtr> targets;
          std::function<void(int, int, const Superop&)> rec = [&](int j, int min_rank, const Superop& cur) {
            if (j == k) {
              int bi = bang_b->find(*lbl::mset(targets));
              acc.add(static_cast<int>(ai), bi, p.then(cur));
              return;
            }
            for (const auto& [bidx, s] : by_src.at(copy_src[static_cast<std::size_t>(j)])) {
              const auto& bl = (*b_obj)[static_cast<std::size_t>(bidx)].label;
              int r = rank.at(bl->key);
              if (r < min_rank) continue;
              targets.push_back(bl);
              rec(j + 1, r, cur.kron(*s));
              targets.pop_back();
            }
          };
          rec(0, 0, Superop::identity(1));
        }
        std::size_t i = 0;
        for (; i < n; ++i) {
          if (++pick[i] < choices[i].size()) break;
          pick[i] = 0;
        }
        if (i == n) break;
      }
    }
  }
  Morphism out(src, bang_b);
  for (const auto& [key, s] : acc.entries()) {
    const auto& ga = *(*src)[static_cast<std::size_t>(key.first)].group;
    const auto& gb = *(*bang_b)[static_cast<std::size_t>(key.second)].group;
    out.set(key.first, key.second, project_invariant(s, ga, gb));
  }
  out.prune();
  return out;
}

Morphism constant_morphism(Rule r, const Term& c, const TruncationConfig& t) {
  ObjPtr bit = biproduct(unit_object(), unit_object());
  ObjPtr a, b;
  std::function<Morphism()> base;
  switch (r) {
    case Rule::Meas: {
      a = qubit_object();
      b = bit;
      base = [&] {
        Morphism m(a, b);
        m.set(0, b->find(*lbl::lft(lbl::star())), entry(2, 1, {{0, 0}}));
        m.set(0, b->find(*lbl::rgt(lbl::star())), entry(2, 1, {{0, 3}}));
        return m;
      };
      break;
    }
    case Rule::New: {
      a = bit;
      b = qubit_object();
      base = [&] {
        Morphism m(a, b);
        m.set(a->find(*lbl::lft(lbl::star())), 0, entry(1, 2, {{0, 0}}));
        m.set(a->find(*lbl::rgt(lbl::star())), 0, entry(1, 2, {{3, 0}}));
        return m;
      };
      break;
    }
    case Rule::Gate: {
      TypePtr q = Type::qubit();
      for (int i = 1; i < c.gate->arity; ++i) q = Type::tensor(q, Type::qubit());
      a = b = denote_type(*q, t);
      base = [&] {
        Morphism m(a, b);
        m.set(0, 0, Superop::conjugation(c.gate->matrix));
        return m;
      };
      break;
    }
    case Rule::Split: {
      ObjPtr elem = denote_type(*c.type, t);
      a = list_object(elem, t.list_max);
      b = biproduct(unit_object(), tensor(elem, a));
      base = [elem, &t] { return list_unfold(elem, t.list_max); };
      break;
    }
    default: throw CpmError("not a constant");
  }
  return curry(compose(lunit(a), base()), unit_object(), a, b);
}

Denotation denote_term(const Derivation& d, const TruncationConfig& t) {
  Denoter den(t);
  Morphism m = den.run(d);
  return Denotation{std::move(m), t, den.converged, den.max_iters};
}

Denotation denote_program(const TermPtr& closed, const TruncationConfig& t, const TypePtr& expected) {
  return denote_term(*typecheck(Context(), closed, expected), t);
}

std::map<std::string, CMatrix> denote_closure(const Closure& c, const CMatrix& rho, const TruncationConfig& t,
                                              const TypePtr& expected) {
  check_linking(c, true);
  Context ctx = closure_context(c);
  auto d = typecheck(ctx, c.term, expected);
  Denotation den = denote_term(*d, t);
  std::map<std::string, CMatrix> out;
  for (const auto& [b, x] : den.morphism.apply(0, rho)) out.emplace((*den.morphism.tgt())[static_cast<std::size_t>(b)].label->key, x);
  return out;
}

std::map<std::string, CMatrix> denote_closure(const Closure& c, const TruncationConfig& t, const TypePtr& expected) {
  return denote_closure(c, c.state.density(), t, expected);
}

}  // namespace qlam

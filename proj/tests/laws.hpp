#pragma once

// Randomized categorical laws. Each law draws one random instance (element
// dims <= 4, K <= 3) and returns its largest defect.

#include "qlam/cpm.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace qlam::testing::laws {

using namespace qlam::cpm;

inline ObjPtr bit_object() { return biproduct(unit_object(), unit_object()); }

inline ObjPtr random_base(std::mt19937_64& rng) {
  switch (rng() % 6) {
    case 0: return unit_object();
    case 1: return qubit_object();
    case 2: return bit_object();
    case 3: return biproduct(qubit_object(), unit_object());
    case 4: return tensor(qubit_object(), qubit_object());
    default: return list_object(qubit_object(), 2);
  }
}

/// A base object or an exponential of one.
inline ObjPtr random_object(std::mt19937_64& rng) {
  if (rng() % 3 != 0) return random_base(rng);
  const int k = 1 + static_cast<int>(rng() % 2);
  return bang(rng() % 2 ? qubit_object() : bit_object(), k);
}

/// Base object and its exponential, with elements of dimension at most 4.
inline std::pair<ObjPtr, ObjPtr> random_bang(std::mt19937_64& rng) {
  switch (rng() % 3) {
    case 0: {
      ObjPtr a = qubit_object();
      return {a, bang(a, 1 + static_cast<int>(rng() % 2))};
    }
    case 1: {
      ObjPtr a = bit_object();
      return {a, bang(a, 1 + static_cast<int>(rng() % 3))};
    }
    default: {
      ObjPtr a = unit_object();
      return {a, bang(a, 1 + static_cast<int>(rng() % 3))};
    }
  }
}

inline Superop random_cp(std::mt19937_64& rng, std::int64_t in, std::int64_t out) {
  std::normal_distribution<double> g;
  std::vector<CMatrix> ks;
  for (int k = 0; k < 2; ++k) {
    CMatrix a(out, in);
    for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = cplx(g(rng), g(rng)) / static_cast<double>(in + out);
    ks.push_back(a);
  }
  return Superop::from_kraus(ks);
}

/// Random invariant CP morphism with roughly half of its entries nonzero.
inline Morphism random_morphism(std::mt19937_64& rng, const ObjPtr& a, const ObjPtr& b) {
  Morphism f(a, b);
  for (std::size_t i = 0; i < a->size(); ++i)
    for (std::size_t j = 0; j < b->size(); ++j)
      if (rng() % 2)
        f.set(static_cast<int>(i), static_cast<int>(j),
              project_invariant(random_cp(rng, (*a)[i].dim, (*b)[j].dim), *(*a)[i].group, *(*b)[j].group));
  return f;
}

inline Morphism id(const ObjPtr& a) { return identity(a); }

template <class Pred>
Morphism restrict_targets(const Morphism& f, Pred keep) {
  Morphism out(f.src(), f.tgt());
  for (const auto& [k, s] : f.entries())
    if (keep(*(*f.tgt())[static_cast<std::size_t>(k.second)].label)) out.set(k.first, k.second, s);
  return out;
}

/// Total number of base items in a label of !!!A.
inline std::size_t depth_size(const Label& l) {
  std::size_t n = 0;
  for (const auto& m : l.items) n += m->items.size();
  return n;
}

inline double worst(std::initializer_list<double> xs) { return *std::max_element(xs.begin(), xs.end()); }

inline double monoidal_coherence(std::mt19937_64& rng) {
  ObjPtr a = random_base(rng), b = random_base(rng), c = random_base(rng);
  return worst({morphism_distance(compose(assoc(a, b, c), assoc_inv(a, b, c)), id(tensor(tensor(a, b), c))),
                morphism_distance(compose(symmetry(a, b), symmetry(b, a)), id(tensor(a, b))),
                morphism_distance(compose(lunit(a), lunit_inv(a)), id(tensor(unit_object(), a))),
                morphism_distance(compose(runit_inv(a), runit(a)), id(a))});
}

inline double snake(std::mt19937_64& rng) {
  ObjPtr a = random_object(rng);
  Morphism s1 = compose(
      compose(compose(compose(lunit_inv(a), tensor(eta(a), id(a))), assoc(a, a, a)), tensor(id(a), eps(a))), runit(a));
  Morphism s2 = compose(
      compose(compose(compose(runit_inv(a), tensor(id(a), eta(a))), assoc_inv(a, a, a)), tensor(eps(a), id(a))),
      lunit(a));
  return worst({morphism_distance(s1, id(a)), morphism_distance(s2, id(a))});
}

inline double comonoid(std::mt19937_64& rng) {
  auto [a, ba] = random_bang(rng);
  Morphism c = contr(ba);
  return worst({morphism_distance(compose(compose(c, tensor(c, id(ba))), assoc(ba, ba, ba)), compose(c, tensor(id(ba), c))),
                morphism_distance(compose(compose(c, tensor(weak(ba), id(ba))), lunit(ba)), id(ba)),
                morphism_distance(compose(compose(c, tensor(id(ba), weak(ba))), runit(ba)), id(ba)),
                morphism_distance(compose(c, symmetry(ba, ba)), c)});
}

inline double comonad(std::mt19937_64& rng) {
  ObjPtr a = rng() % 4 == 0 ? qubit_object() : (rng() % 2 ? bit_object() : unit_object());
  const int k = a->elements()[0].dim > 1 ? 1 : 1 + static_cast<int>(rng() % 2);
  ObjPtr ba = bang(a, k), bba = bang(ba, k), bbba = bang(bba, k);
  Morphism d = dig(ba, bba);
  // Coassociativity is compared where the flattened intermediate of dig;dig fits the bound.
  auto fits = [k](const Label& l) { return depth_size(l) <= static_cast<std::size_t>(k); };
  return worst({morphism_distance(compose(d, der(bba, ba)), id(ba)),
                morphism_distance(compose(d, promote(der(ba, a), bba, ba)), id(ba)),
                morphism_distance(restrict_targets(compose(d, dig(bba, bbba)), fits),
                                  restrict_targets(compose(d, promote(d, bba, bbba)), fits))});
}

inline double naturality(std::mt19937_64& rng) {
  ObjPtr a = rng() % 2 ? bit_object() : unit_object();
  ObjPtr b = rng() % 3 == 0 ? qubit_object() : bit_object();
  int k = 1 + static_cast<int>(rng() % 3);
  if (b->elements()[0].dim > 1) k = std::min(k, 2);
  ObjPtr ba = bang(a, k), bb = bang(b, k);
  Morphism f = random_morphism(rng, a, b);
  Morphism pf = promote(f, ba, bb);
  return worst({morphism_distance(compose(pf, der(bb, b)), compose(der(ba, a), f)),
                morphism_distance(compose(pf, contr(bb)), compose(contr(ba), tensor(pf, pf))),
                morphism_distance(compose(pf, weak(bb)), weak(ba))});
}

inline double functoriality(std::mt19937_64& rng) {
  const int k = 1 + static_cast<int>(rng() % 3);
  ObjPtr a = bit_object(), b = rng() % 2 ? bit_object() : unit_object(), c = bit_object();
  ObjPtr ba = bang(a, k), bb = bang(b, k), bc = bang(c, k);
  Morphism f = random_morphism(rng, a, b), g = random_morphism(rng, b, c);
  return worst({morphism_distance(promote(compose(f, g), ba, bc), compose(promote(f, ba, bb), promote(g, bb, bc))),
                morphism_distance(promote(id(a), ba, ba), id(ba))});
}

inline double pdistr_iso(std::mt19937_64& rng) {
  ObjPtr a = random_object(rng), b = random_base(rng), c = random_base(rng);
  Morphism d = pdistr(a, b, c), di = pdistr_inv(a, b, c);
  return worst({morphism_distance(compose(d, di), id(tensor(a, biproduct(b, c)))),
                morphism_distance(compose(di, d), id(biproduct(tensor(a, b), tensor(a, c))))});
}

inline double curry_eval(std::mt19937_64& rng) {
  ObjPtr c = random_base(rng), a = random_base(rng), b = random_base(rng);
  if (rng() % 4 == 0) c = bang(bit_object(), 2);
  Morphism f = random_morphism(rng, tensor(c, a), b);
  Morphism lf = curry(f, c, a, b);
  Morphism g = random_morphism(rng, c, tensor(a, b));
  return worst({morphism_distance(compose(tensor(lf, id(a)), eval(a, b)), f),
                morphism_distance(uncurry(lf, c, a, b), f),
                morphism_distance(curry(uncurry(g, c, a, b), c, a, b), g)});
}

inline double biproducts(std::mt19937_64& rng) {
  std::vector<ObjPtr> fam{random_base(rng), random_base(rng), random_base(rng)};
  double w = 0;
  for (std::size_t j = 0; j < fam.size(); ++j)
    for (std::size_t k = 0; k < fam.size(); ++k)
      w = std::max(w, morphism_distance(compose(inj(fam, j), proj(fam, k)), j == k ? id(fam[j]) : zero(fam[j], fam[k])));
  ObjPtr c = random_base(rng);
  std::vector<Morphism> fs;
  for (const auto& o : fam) fs.push_back(random_morphism(rng, o, c));
  for (std::size_t j = 0; j < fam.size(); ++j) w = std::max(w, morphism_distance(compose(inj(fam, j), cotuple(fs)), fs[j]));
  return w;
}

inline double list_iso(std::mt19937_64& rng) {
  ObjPtr a = rng() % 2 ? qubit_object() : bit_object();
  const int l = 1 + static_cast<int>(rng() % 2);
  return morphism_distance(compose(list_unfold(a, l), list_fold(a, l)), id(list_object(a, l)));
}

/// Invariance defect of structural maps; returns 1 when some map fails the CP check.
inline double structural_invariance_cp(std::mt19937_64& rng, double tol) {
  auto [a, ba] = random_bang(rng);
  auto [b, bb] = random_bang(rng);
  const int k = std::min(ba->truncation().bang_max, bb->truncation().bang_max);
  ObjPtr ka = bang(a, k), kb = bang(b, k);
  ObjPtr o = random_base(rng);
  std::vector<Morphism> maps{contr(ba), weak(ba), der(ba, a), eta(o), eps(o), symmetry(o, ba),
                             bierman(ka, kb, bang(tensor(a, b), k)), pdistr(o, a, b)};
  if (a->elements()[0].dim == 1) maps.push_back(dig(ba, bang(ba, ba->truncation().bang_max)));
  maps.push_back(promote(random_morphism(rng, a, b), ka, kb));
  double w = 0;
  for (const auto& m : maps) {
    w = std::max(w, invariance_defect(m));
    if (!is_cp(m, tol)) w = std::max(w, 1.0);
  }
  return w;
}

struct Law {
  std::string name;
  std::function<double(std::mt19937_64&)> instance;
  std::uint64_t seed;
};

inline std::vector<Law> all_laws(double tol) {
  return {{"monoidal coherence", monoidal_coherence, 100},
          {"snake equations", snake, 101},
          {"commutative comonoid", comonoid, 102},
          {"comonad", comonad, 103},
          {"naturality of der/contr/weak", naturality, 104},
          {"functoriality of promotion", functoriality, 105},
          {"pdistr iso", pdistr_iso, 106},
          {"Lambda/Eval adjunction", curry_eval, 107},
          {"biproduct laws", biproducts, 108},
          {"list fold/unfold", list_iso, 109},
          {"invariance and CP of structural maps", [tol](std::mt19937_64& r) { return structural_invariance_cp(r, tol); }, 110}};
}

}  // namespace qlam::testing::laws

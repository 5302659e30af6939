#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace qlam::cpm {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using SpMat = Eigen::SparseMatrix<cplx>;

class CpmError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class GroupTooLarge : public CpmError {
 public:
  using CpmError::CpmError;
};
class DivergentDenotation : public CpmError {
 public:
  using CpmError::CpmError;
};

// ---------------------------------------------------------------------------
// Web labels

enum class LabelKind { Star, Lft, Rgt, Pair, MSet, List };

struct Label;
using LabelPtr = std::shared_ptr<const Label>;

/// Web index. `key` is a canonical spelling that also defines the total order:
///   *   L(a)   R(a)   (a,b)   [a,b,...] (sorted)   <a,b,...>
struct Label {
  LabelKind kind;
  std::vector<LabelPtr> items;
  std::string key;
};

namespace lbl {
LabelPtr star();
LabelPtr lft(LabelPtr a);
LabelPtr rgt(LabelPtr a);
LabelPtr pair(LabelPtr a, LabelPtr b);
LabelPtr mset(std::vector<LabelPtr> items);  // sorts
LabelPtr list(std::vector<LabelPtr> items);
LabelPtr parse(const std::string& key);
}  // namespace lbl

inline bool label_less(const LabelPtr& a, const LabelPtr& b) { return a->key < b->key; }

// ---------------------------------------------------------------------------
// Permutation groups

/// A group acting on {0..degree-1}, stored as a direct product of factors.
/// Factor f acts on the digit (index / stride) % dim of the mixed-radix index;
/// its elements are listed explicitly (identity first). Trivial factors are
/// omitted, so the trivial group has no factors.
struct GroupFactor {
  std::int64_t stride;
  int dim;
  int order;
  std::vector<int> elems;  // order * dim entries; elems[g*dim + i] = g(i)
};

class PermGroup;
using GroupPtr = std::shared_ptr<const PermGroup>;

class PermGroup {
 public:
  PermGroup(std::int64_t degree, std::vector<GroupFactor> factors);

  static GroupPtr trivial(std::int64_t degree);
  /// Group generated as the set of the given permutations (must already be closed).
  static GroupPtr from_elements(int degree, const std::vector<std::vector<int>>& elems);
  /// Direct product acting on (i, j) -> i * deg(h) + j.
  static GroupPtr product(const GroupPtr& g, const GroupPtr& h);

  std::int64_t degree() const { return degree_; }
  std::uint64_t order() const;
  bool is_trivial() const { return factors_.empty(); }
  const std::vector<GroupFactor>& factors() const { return factors_; }

  /// All elements as full permutations (testing and small groups only).
  std::vector<std::vector<std::int64_t>> elements() const;
  /// G.M = (1/#G) sum_g P_g M P_g^T.
  CMatrix average(const CMatrix& m) const;

 private:
  std::int64_t degree_;
  std::vector<GroupFactor> factors_;
};

bool group_equal(const PermGroup& a, const PermGroup& b);

/// Maximum group order materialized by constructors (default 5040).
std::uint64_t group_cap();
void set_group_cap(std::uint64_t cap);

CMatrix group_average(const PermGroup& g, const CMatrix& m);

// ---------------------------------------------------------------------------
// Superoperators

/// Linear map C^{n x n} -> C^{m x m} stored as an m^2 x n^2 matrix acting on
/// column-major vectorizations.
class Superop {
 public:
  Superop() : in_(0), out_(0) {}
  Superop(std::int64_t in_dim, std::int64_t out_dim, SpMat mat);

  static Superop identity(std::int64_t n);
  static Superop zero(std::int64_t in_dim, std::int64_t out_dim);
  /// X -> U X U^dagger.
  static Superop conjugation(const CMatrix& u);
  /// X -> P X P^T with P e_s = e_{perm[s]}.
  static Superop permutation(const std::vector<std::int64_t>& perm);
  static Superop from_dense(std::int64_t in_dim, std::int64_t out_dim, const CMatrix& mat);
  /// X -> sum_k K_k X K_k^dagger.
  static Superop from_kraus(const std::vector<CMatrix>& kraus);

  std::int64_t in_dim() const { return in_; }
  std::int64_t out_dim() const { return out_; }
  const SpMat& mat() const { return mat_; }
  CMatrix dense() const { return CMatrix(mat_); }

  CMatrix apply(const CMatrix& x) const;
  /// Diagrammatic composition: first *this, then `next`.
  Superop then(const Superop& next) const;
  Superop operator+(const Superop& o) const;
  Superop operator-(const Superop& o) const;
  Superop scaled(cplx s) const;
  /// The map X (x) Y -> f(X) (x) g(Y).
  Superop kron(const Superop& g) const;
  /// f o S_G (average over G on the input side).
  Superop average_input(const PermGroup& g) const;
  /// S_H o f.
  Superop average_output(const PermGroup& h) const;

  /// Choi matrix sum_ij E_ij (x) f(E_ij).
  CMatrix choi() const;
  bool is_cp(double tol = 1e-9) const;
  double max_abs() const;
  std::int64_t nnz() const { return mat_.nonZeros(); }

 private:
  std::int64_t in_, out_;
  SpMat mat_;
};

Superop project_invariant(const Superop& f, const PermGroup& g, const PermGroup& h);
/// Max-norm of the difference.
double superop_distance(const Superop& a, const Superop& b);

// ---------------------------------------------------------------------------
// Objects

/// Truncation stamp: -1 means the object involves no list (resp. no !).
struct Truncation {
  int list_max = -1;
  int bang_max = -1;
};

struct WebElement {
  LabelPtr label;
  std::int64_t dim;
  GroupPtr group;
};

class Object {
 public:
  Object(std::vector<WebElement> elems, Truncation t);

  std::size_t size() const { return elems_.size(); }
  const WebElement& operator[](std::size_t i) const { return elems_[i]; }
  const std::vector<WebElement>& elements() const { return elems_; }
  /// Index of a label or -1.
  int find(const Label& l) const;
  int find(const std::string& key) const;
  const Truncation& truncation() const { return trunc_; }
  std::string summary() const;

 private:
  std::vector<WebElement> elems_;
  std::unordered_map<std::string, int> index_;
  Truncation trunc_;
};
using ObjPtr = std::shared_ptr<const Object>;

bool object_equal(const Object& a, const Object& b);
Truncation merge_truncation(const Truncation& a, const Truncation& b);

ObjPtr unit_object();
ObjPtr qubit_object();
ObjPtr make_object(std::vector<WebElement> elems, Truncation t = {});

// ---------------------------------------------------------------------------
// Morphisms

/// Family of superoperators indexed by (source element, target element);
/// absent entries are zero.
class Morphism {
 public:
  Morphism(ObjPtr src, ObjPtr tgt);

  const ObjPtr& src() const { return src_; }
  const ObjPtr& tgt() const { return tgt_; }
  const std::map<std::pair<int, int>, Superop>& entries() const { return entries_; }

  /// Accumulate into entry (a, b).
  void add(int a, int b, const Superop& s);
  void set(int a, int b, Superop s);
  const Superop* get(int a, int b) const;
  /// Entry or zero superop of the right shape.
  Superop at(int a, int b) const;
  Superop at(const std::string& a, const std::string& b) const;
  /// Drop entries whose max-norm is below `tol`.
  void prune(double tol = 1e-12);
  double max_abs() const;

  /// Apply to an input living at source element `a`; returns the output family.
  std::map<int, CMatrix> apply(int a, const CMatrix& x) const;

 private:
  ObjPtr src_, tgt_;
  std::map<std::pair<int, int>, Superop> entries_;
};

double morphism_distance(const Morphism& a, const Morphism& b);
/// Max over entries of ||S_a;f;S_b - f||.
double invariance_defect(const Morphism& f);
/// Every entry CP (Choi spot check on entries up to `max_choi_dim`).
bool is_cp(const Morphism& f, double tol = 1e-9, std::int64_t max_choi_dim = 256);
/// f below g in the Loewner order entrywise.
bool loewner_leq(const Morphism& f, const Morphism& g, double tol = 1e-9, std::int64_t max_choi_dim = 256);

// ---------------------------------------------------------------------------
// Category structure

Morphism identity(const ObjPtr& a);
Morphism zero(const ObjPtr& a, const ObjPtr& b);
Morphism compose(const Morphism& f, const Morphism& g);  // f ; g
Morphism add(const Morphism& f, const Morphism& g);
Morphism scale(const Morphism& f, cplx s);

/// Factor permutation: `dims` are the factor sizes in source order and the
/// factor at target position t is source factor order[t].
Superop factor_permutation(const std::vector<std::int64_t>& dims, const std::vector<int>& order);
/// Positions assigning each target item to an unused equal source item, in order.
std::vector<int> match_items(const std::vector<LabelPtr>& source, const std::vector<LabelPtr>& target);

struct Rewire {
  LabelPtr target;
  std::vector<std::int64_t> dims;  // factor sizes in source order
  std::vector<int> order;          // target factor t is source factor order[t]
  cplx weight = 1.0;
};
/// Morphism with entries weight * (S_a ; P) for each rewiring of each source element.
Morphism structural(const ObjPtr& src, const ObjPtr& tgt,
                    const std::function<std::vector<Rewire>(const WebElement&)>& gen);

// Monoidal structure
ObjPtr tensor(const ObjPtr& a, const ObjPtr& b);
Morphism tensor(const Morphism& f, const Morphism& g);
Morphism lunit(const ObjPtr& a);      // 1 (x) A -> A
Morphism lunit_inv(const ObjPtr& a);  // A -> 1 (x) A
Morphism runit(const ObjPtr& a);      // A (x) 1 -> A
Morphism runit_inv(const ObjPtr& a);
Morphism assoc(const ObjPtr& a, const ObjPtr& b, const ObjPtr& c);      // (A(x)B)(x)C -> A(x)(B(x)C)
Morphism assoc_inv(const ObjPtr& a, const ObjPtr& b, const ObjPtr& c);  // A(x)(B(x)C) -> (A(x)B)(x)C
Morphism symmetry(const ObjPtr& a, const ObjPtr& b);                    // A(x)B -> B(x)A

// Biproducts
ObjPtr biproduct(const ObjPtr& a, const ObjPtr& b);
/// Right-nested: A0 + (A1 + (... + An)).
ObjPtr biproduct(const std::vector<ObjPtr>& family);
Morphism inj(const std::vector<ObjPtr>& family, std::size_t j);
Morphism proj(const std::vector<ObjPtr>& family, std::size_t j);
/// [f0, ..., fn] : A0 + ... + An -> C
Morphism cotuple(const std::vector<Morphism>& fs);
/// <f0, ..., fn> : C -> A0 + ... + An
Morphism tuple(const std::vector<Morphism>& fs);
/// A (x) (B + C) -> (A (x) B) + (A (x) C)
Morphism pdistr(const ObjPtr& a, const ObjPtr& b, const ObjPtr& c);
Morphism pdistr_inv(const ObjPtr& a, const ObjPtr& b, const ObjPtr& c);

// Lists
ObjPtr list_object(const ObjPtr& a, int max_len);
/// 1 + (A (x) A list) -> A list (conses beyond the bound are dropped).
Morphism list_fold(const ObjPtr& a, int max_len);
/// A list -> 1 + (A (x) A list)
Morphism list_unfold(const ObjPtr& a, int max_len);

// Compact closure (A* = A, A -o B := A (x) B)
Morphism eta(const ObjPtr& a);  // 1 -> A (x) A
Morphism eps(const ObjPtr& a);  // A (x) A -> 1
/// Eval : (A (x) B) (x) A -> B
Morphism eval(const ObjPtr& a, const ObjPtr& b);
/// Lambda(f) : C -> A (x) B for f : C (x) A -> B
Morphism curry(const Morphism& f, const ObjPtr& c, const ObjPtr& a, const ObjPtr& b);
/// Inverse of curry: g : C -> A (x) B gives C (x) A -> B
Morphism uncurry(const Morphism& g, const ObjPtr& c, const ObjPtr& a, const ObjPtr& b);

// Symmetric powers and the exponential
ObjPtr tensor_power(const ObjPtr& a, int k);
/// Symmetric power with its equalizer into the left-nested tensor power.
std::pair<ObjPtr, Morphism> symmetric_power(const ObjPtr& a, int k);
ObjPtr bang(const ObjPtr& a, int max_card);
/// Multiset items of a web label of a ! object.
const std::vector<LabelPtr>& mset_items(const Label& l);

Morphism weak(const ObjPtr& bang_a);                          // !A -> 1
Morphism contr(const ObjPtr& bang_a);                         // !A -> !A (x) !A
Morphism der(const ObjPtr& bang_a, const ObjPtr& a);          // !A -> A
Morphism dig(const ObjPtr& bang_a, const ObjPtr& bang_bang_a);  // !A -> !!A
/// !f : !A -> !B
Morphism promote(const Morphism& f, const ObjPtr& bang_a, const ObjPtr& bang_b);
/// !A (x) !B -> !(A (x) B)
Morphism bierman(const ObjPtr& bang_a, const ObjPtr& bang_b, const ObjPtr& bang_ab);
/// 1 -> !1
Morphism bierman_unit(const ObjPtr& bang_one);

/// Ordered decompositions of a sorted multiset into `parts` sorted multisets.
std::vector<std::vector<std::vector<LabelPtr>>> ordered_decompositions(const std::vector<LabelPtr>& items,
                                                                       int parts);

/// Least fixpoint of phi : C (x) !A -> !A over a comonoid C given by its
/// contraction and weakening, iterating f0 = weak ; [] and
/// f_{n+1} = contr ; (id (x) f_n) ; phi.
struct FixpointResult {
  Morphism value;
  int iterations;
  bool converged;
  bool monotone;
};
FixpointResult fixpoint(const Morphism& phi, const Morphism& contr_c, const Morphism& weak_c, int max_iters,
                        double tol);

// ---------------------------------------------------------------------------
// Serialization (JSON)

std::string serialize(const Morphism& f);
/// Parses the format produced by serialize(); objects are rebuilt from the
/// stored web.
Morphism deserialize(const std::string& text);

struct EntryDiff {
  std::string src, tgt;
  double max_norm;
};
/// Per-entry max-norm differences over the union of entry keys.
std::vector<EntryDiff> diff(const Morphism& a, const Morphism& b);

}  // namespace qlam::cpm

#pragma once

#include "qlam/cpm.hpp"
#include "qlam/machine.hpp"
#include "qlam/typing.hpp"

#include <map>
#include <string>
#include <vector>

namespace qlam {

/// Truncation bounds: lists up to length L, multisets in ! up to cardinality K,
/// at most N fixpoint iterations for letrec.
struct TruncationConfig {
  int list_max = 4;
  int bang_max = 2;
  int fix_iters = 64;
  double fix_tol = 1e-10;
  double matrix_tol = 1e-9;
};

class NonMonotoneIteration : public cpm::CpmError {
 public:
  using cpm::CpmError::CpmError;
};

/// Morphism [[A1 (x) ... (x) An]] -> [[A]]. Values computed through letrec are
/// lower approximants; `converged` is false if some fixpoint hit the iteration cap.
struct Denotation {
  cpm::Morphism morphism;
  TruncationConfig trunc;
  bool converged = true;
  int max_fix_iterations = 0;
};

cpm::ObjPtr denote_type(const Type& a, const TruncationConfig& t);
/// The context x1:A1, ..., xn:An as ((1 (x) [[A1]]) (x) ...) (x) [[An]].
cpm::ObjPtr denote_context(const Context& ctx, const TruncationConfig& t);

/// Structural map from `src` to the tensor of the target contexts (one or two).
/// Exponential variables are contracted or weakened as needed; linear ones
/// must occur in exactly one target.
cpm::Morphism context_map(const Context& src, const std::vector<Context>& targets, const TruncationConfig& t);

/// CoKleisli promotion of phi : [[ctx]] -> B over a context of !-typed variables.
cpm::Morphism cokleisli_promote(const cpm::Morphism& phi, const Context& ctx, const TruncationConfig& t);

/// Interpretation of the constants at the empty context: 1 -> [[A -o B]].
cpm::Morphism constant_morphism(Rule r, const Term& constant, const TruncationConfig& t);

Denotation denote_term(const Derivation& d, const TruncationConfig& t);
/// Typecheck in the empty context (against `expected` when given), then interpret.
Denotation denote_program(const TermPtr& closed, const TruncationConfig& t, const TypePtr& expected = nullptr);

/// [[M]](q q*) for a closure [q, l, M]: output family indexed by web label key.
/// The term is typed in the closure's context, against `expected` when given.
std::map<std::string, cpm::CMatrix> denote_closure(const Closure& c, const TruncationConfig& t,
                                                   const TypePtr& expected = nullptr);
/// Same, with an arbitrary input density matrix on the closure's qubits.
std::map<std::string, cpm::CMatrix> denote_closure(const Closure& c, const cpm::CMatrix& rho, const TruncationConfig& t,
                                                   const TypePtr& expected = nullptr);

}  // namespace qlam

#pragma once

#include "qlam/denote.hpp"
#include "qlam/machine.hpp"
#include "qlam/syntax.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>

namespace qlam {

class NotUnitType : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotClosed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Verdict { Pass, Fail };
std::string to_string(Verdict v);

struct AdequacyReport {
  std::string source_hash;
  double denot = 0;
  double halt_lower = 0;
  double residual = 0;
  bool finitary = false;
  bool fix_converged = true;
  Verdict verdict = Verdict::Fail;
};

struct AdequacyOptions {
  std::size_t max_steps = 10000;
  double prune_eps = 1e-12;
  double tol = 1e-6;
};

/// Compare [[M]] at * with the operational halting bounds of M.
/// PASS iff halt_lower - tol <= denot <= halt_lower + residual + tol; for a
/// finitary M additionally residual <= tol, so that |denot - Halt| <= tol.
AdequacyReport check_adequacy(const TermPtr& m, const TruncationConfig& t, const AdequacyOptions& opts = {});

/// Stable hex digest of the alpha-canonical printed form.
std::string source_hash(const TermPtr& m);

/// Truncation bounds covering every list length and every number of copies
/// of an exponential value that a finitary program can reach.
TruncationConfig static_truncation(const TermPtr& m, TruncationConfig base = {});

/// Generator (unit -o A) and consumer (A -o unit) of the type-indexed families.
/// Recursive members use unindexed letrec.
TermPtr generate_term(const TypePtr& a);
TermPtr consume_term(const TypePtr& a);
/// meas (V (new ff)) with V the real rotation by phi, cos^2 phi = rho:
/// ff with probability rho, tt with probability 1 - rho.
TermPtr biased_coin(double rho);

/// Closed finitary program of type unit built from the families above, biased
/// coins, registry gates and letrec^n with small n.
TermPtr random_finitary_program(std::uint64_t seed, int budget);
/// Closed program of type unit with unindexed, coin-guarded letrec.
TermPtr random_letrec_program(std::uint64_t seed, int budget);

}  // namespace qlam

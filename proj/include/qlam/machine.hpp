#pragma once

#include "qlam/qstate.hpp"
#include "qlam/syntax.hpp"
#include "qlam/typing.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qlam {

class MachineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// [q, l, M]: state vector, linking of the free variables of M to qubit
/// indices (1-based), and the term.
struct Closure {
  QState state;
  std::map<std::string, int> linking;
  TermPtr term;
};

Closure make_closure(TermPtr closed_term);
/// Throws MachineError("ErroneousLinking: ...") unless dom(linking) = FV(term),
/// the linking is injective into 1..n, and (when `total`) onto 1..n.
void check_linking(const Closure& c, bool total = true);
/// Context ordered by qubit index, every variable at type qubit.
Context closure_context(const Closure& c);
std::string to_string(const Closure& c);

/// Names for qubits created by `new`, unique within one run.
class FreshNames {
 public:
  std::string next(const std::map<std::string, int>& avoid);

 private:
  std::uint64_t counter_ = 0;
};

struct Transition {
  double prob;
  Closure next;
  std::string rule;
};

enum class TermStatus { Value, Blocked, Reducible };
/// Value, Omega in evaluation position, or neither.
TermStatus term_status(const Term& m);

/// One machine step. Empty for values and blocked terms. Zero-probability
/// measurement branches are dropped.
std::vector<Transition> step(const Closure& c, FreshNames& fresh);

struct Outcome {
  Closure closure;  // canonical representative
  double prob;
};

struct OutcomeDistribution {
  std::vector<Outcome> outcomes;  // value closures, in first-reached order
  double blocked = 0;             // mass of Omega-blocked terminal closures
  double residual = 0;            // mass cut by max_steps or pruning
  std::size_t steps_explored = 0;
  double total_value_mass() const;
};

struct EvalOptions {
  std::size_t max_steps = 10000;
  double prune_eps = 1e-12;
};

using TraceFn = std::function<void(std::size_t depth, double prob, const std::string& rule, const Closure& c)>;

/// Depth-first exploration of the reduction tree, outcome 0 before outcome 1.
OutcomeDistribution eval_distribution(const Closure& c, const EvalOptions& opts = {}, const TraceFn& trace = {});

/// Rename free variables to q1..qn in order of first occurrence and reorder
/// the state accordingly.
Closure canonicalize(const Closure& c);
/// Canonical-form equality with states compared up to global phase.
bool closure_equivalent(const Closure& a, const Closure& b, double tol = 1e-9);

enum class SampleStatus { Value, Blocked, Timeout };
struct SampleResult {
  SampleStatus status;
  Closure closure;
  std::size_t steps;
};
SampleResult sample(const Closure& c, std::uint64_t seed, std::size_t max_steps = 10000,
                    const TraceFn& trace = {});

struct HaltBounds {
  double lower;
  double residual;
};
HaltBounds halt_probability(const Closure& c, std::size_t max_steps = 10000, double prune_eps = 1e-12);

}  // namespace qlam

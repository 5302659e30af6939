#pragma once

#include "qlam/syntax.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace qlam {

class QStateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Pure state on n qubits. Qubit 1 is the leftmost tensor factor, i.e. the most
/// significant bit of the amplitude index.
class QState {
 public:
  QState();  // n = 0, amplitude 1
  QState(int n, CVector amps);

  static QState basis(const std::vector<int>& bits);

  int num_qubits() const { return n_; }
  const CVector& amplitudes() const { return amps_; }
  double norm() const { return amps_.norm(); }
  /// Density matrix q q*.
  CMatrix density() const;

  std::string to_string() const;

 private:
  int n_;
  CVector amps_;
};

/// Apply a k-qubit unitary to the qubits at the given 1-based positions.
QState apply_unitary(const QState& q, const CMatrix& u, const std::vector<int>& positions);
/// q tensor |b>, the new qubit becoming index n+1.
QState append_qubit(const QState& q, int b);

struct MeasureBranch {
  double prob = 0;
  QState state;
  bool used = true;  // false when prob is zero and `state` is a placeholder
};
struct MeasureResult {
  MeasureBranch outcome0;
  MeasureBranch outcome1;
};
/// Measure the qubit at `position` (1-based) in the computational basis and
/// remove it; qubits above it shift down by one.
MeasureResult measure(const QState& q, int position);

/// |<a|b>| == 1 within tol and equal sizes.
bool equal_up_to_phase(const QState& a, const QState& b, double tol = 1e-9);
/// Reorder qubits: new qubit i is old qubit perm[i-1] (both 1-based).
QState permute_qubits(const QState& q, const std::vector<int>& perm);

}  // namespace qlam

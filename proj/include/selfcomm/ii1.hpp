#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "selfcomm/decompose.hpp"
#include "selfcomm/spectral.hpp"

namespace selfcomm {

struct Atom {
  double alpha = 0.0;  // spectral value
  double mu = 0.0;     // dimension of its spectral projection

  bool operator==(const Atom&) const = default;
};

/// Self-adjoint element of a type II_1 factor with finite spectrum, described
/// by its scalar spectral measure: values strictly increasing, weights
/// positive and summing to one.
class SpectralElement {
 public:
  explicit SpectralElement(std::vector<Atom> atoms, double weight_tol = 1e-12);

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  double norm() const;
  /// sum alpha_i mu_i
  double quasitrace() const;

  bool operator==(const SpectralElement&) const = default;

 private:
  std::vector<Atom> atoms_;
};

/// Rounding of every weight down to the grid {0, 1/n, ..., 1}, realized in
/// Mat_n as a diagonal matrix: atom i fills counts[i] consecutive slots (in
/// atom order) and the remaining slots hold zero.
struct DyadicApproximation {
  Index n = 0;
  std::vector<double> theta;
  std::vector<Index> counts;   // n * theta
  double beta = 0.0;           // q(X)
  double beta_n = 0.0;         // q(H_n)
  RealVector h_diagonal;
  RealVector b_diagonal;       // h_diagonal + (beta - beta_n)
  std::vector<Atom> source;    // atoms this was quantized from

  HermitianMatrix h() const { return HermitianMatrix::diagonal(h_diagonal); }
  HermitianMatrix b() const { return HermitianMatrix::diagonal(b_diagonal); }
};

/// Throws InvalidArgument for n < 2.
DyadicApproximation quantize(const SpectralElement& elem, Index n);

struct ApproxError {
  double delta_q = 0.0;  // |q(X) - q(H_n)|
  double d = 0.0;        // Haagerup distance d(X, H_n)
};

/// Closed forms for X and H_n in a common refinement. Throws
/// MismatchedProvenance if `approx` was not quantized from `elem`.
ApproxError approx_error(const SpectralElement& elem, const DyadicApproximation& approx);

/// m ||X|| / n
double bound_q(const SpectralElement& elem, Index n);
/// (m ||X||^2 / n)^(1/3)
double bound_d(const SpectralElement& elem, Index n);

/// Exact Haagerup distance between X and an element that is diagonal in the
/// slot layout of `approx` (one value per slot). X's leftover mass on each
/// atom, mu_i - theta_i, is laid out over the trailing zero slots in atom
/// order, which realizes both elements as commuting operators.
double refinement_distance(const SpectralElement& elem, const DyadicApproximation& approx,
                           const RealVector& slot_values);

/// Equal-weight binning of a sampled quantile function into at most m atoms
/// (bins with equal means merge), shifted so the quasitrace equals the sample
/// mean. Throws EmptyInput or InvalidArgument.
SpectralElement discretize(std::span<const double> quantile_samples, std::size_t m);

// ---------------------------------------------------------------------------

struct ApproximationRow {
  Index n = 0;
  double delta_q = 0.0;
  double bound_q = 0.0;
  double d_quantized = 0.0;     // d(X, H_n)
  double d = 0.0;               // d(X, A_n - B_n)
  double bound_d = 0.0;
  double max_norm = 0.0;        // max(||A_n||, ||B_n||)
  double norm_budget = 0.0;     // ||X|| + bound_q + 1/n
  double decomposition_residual = 0.0;
  bool decomposition_pass = false;
};

struct PipelineStage {
  DyadicApproximation approx;
  CommutatorDecomposition decomposition;
  ApproximationRow row;
};

/// Quantize, recenter and decompose for every n in the schedule. Results keep
/// schedule order; `workers` > 1 runs stages concurrently. Throws NotTraceless
/// when |q(X)| > 1e-12 and InvalidArgument for schedule entries below 2.
std::vector<PipelineStage> pipeline(const SpectralElement& elem, std::span<const Index> schedule,
                                    const Tolerances& tol = {}, unsigned workers = 1);

// ---------------------------------------------------------------------------

/// Finite truncation of a bounded sequence, read through its last
/// `tail_window` terms.
template <class T>
struct UltraSequence {
  std::vector<T> terms;
  std::size_t tail_window = 2;
};

struct UltraLimit {
  double value = 0.0;        // mean over the tail window
  double oscillation = 0.0;  // max - min over the tail window
  bool converged = false;    // oscillation <= tol; false flags a non-Cauchy tail
};

UltraLimit ultralimit(const UltraSequence<double>& seq, double tol);

struct NullDifference {
  bool is_null = false;
  UltraLimit distance;   // tail of d(X_n, Y_n)
  UltraLimit x_norm;     // tail of ||X_n||
  UltraLimit y_norm;
};

/// Whether (X_n) and (Y_n) define the same element of the quotient: the
/// tail of d(X_n, Y_n) must settle below tol.
NullDifference null_difference(const UltraSequence<Matrix>& x, const UltraSequence<Matrix>& y, double tol);

}  // namespace selfcomm

#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "selfcomm/error.hpp"
#include "selfcomm/tolerances.hpp"

namespace selfcomm {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Largest singular value.
double operator_norm(const Matrix& m);

/// Dense complex square matrix that passed a hermiticity check on construction.
/// Entries are stored as given; no symmetrization happens.
class HermitianMatrix {
 public:
  /// Throws NotHermitian if ||m - m*||_F > tol * (1 + ||m||_F), or if m is
  /// empty or not square.
  explicit HermitianMatrix(Matrix m, double tol = Tolerances{}.hermiticity);

  static HermitianMatrix zero(Index n);
  static HermitianMatrix identity(Index n);
  static HermitianMatrix diagonal(const RealVector& values);

  Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  operator const Matrix&() const { return m_; }

  /// Spectral radius, which is the operator norm for Hermitian matrices.
  double norm() const;

 private:
  Matrix m_;
};

/// Orthogonal projection P = P* = P^2, checked on construction.
class Projection {
 public:
  explicit Projection(Matrix p, double tol = 1e-9);

  /// V V* for a matrix with orthonormal columns.
  static Projection from_basis(const Matrix& columns, Index dim);
  static Projection zero(Index n);
  static Projection identity(Index n);
  /// e_k e_k*.
  static Projection coordinate(Index n, Index k);

  const Matrix& matrix() const { return p_; }
  operator const Matrix&() const { return p_; }
  Index dim() const { return p_.rows(); }
  Index rank() const { return rank_; }
  /// Normalized dimension D(P) = rank / n.
  double dimension() const { return static_cast<double>(rank_) / static_cast<double>(dim()); }

 private:
  Projection(Matrix p, Index rank) : p_(std::move(p)), rank_(rank) {}

  Matrix p_;
  Index rank_ = 0;
};

/// Eigendecomposition with eigenvalues grouped into clusters of numerically
/// equal values. Cluster i owns columns [offset(i), offset(i) + multiplicity(i))
/// of `basis`; clusters are listed in increasing order of value.
struct SpectralDecomposition {
  std::vector<double> values;          // cluster means, strictly increasing
  std::vector<Index> multiplicities;   // k_i, summing to n
  RealVector eigenvalues;              // raw eigenvalue of every basis column
  Matrix basis;                        // unitary, columns grouped by cluster

  Index dim() const { return basis.rows(); }
  std::size_t size() const { return values.size(); }
  Index offset(std::size_t i) const;
  Index cluster_of(Index column) const;
  /// Spectral projection E_i.
  Projection projection(std::size_t i) const;
  /// Scalar spectral measure of the i-th eigenvalue, k_i / n.
  double measure(std::size_t i) const;
};

/// Clusters eigenvalues by single linkage with absolute gap
/// tol.cluster_gap * (1 + ||X||). Throws ClusterAmbiguity when a chain of
/// small gaps produces a cluster wider than that gap.
SpectralDecomposition eigendecompose(const HermitianMatrix& x, const Tolerances& tol = {});

/// Eigenvalues in increasing order, no clustering.
RealVector eigenvalues(const HermitianMatrix& x);

/// Groups sorted values into single-linkage clusters of gap `gap`; returns the
/// start index of every cluster plus a final sentinel equal to values.size().
std::vector<std::size_t> cluster_boundaries(std::span<const double> sorted_values, double gap);

/// trace / n. Real for Hermitian input.
Complex normalized_trace(const Matrix& x);
double normalized_trace(const HermitianMatrix& x);

struct QuasitraceReport {
  std::size_t samples = 0;
  // Largest residual per axiom (i)..(iv).
  double max_residual[4] = {0, 0, 0, 0};
  // Most negative value seen for q(AA*) (axiom (ii) positivity).
  double min_positive_part = 0;
  double tolerance = 0;
};

/// Checks the four quasitrace axioms for the normalized matrix trace on each
/// sample pair. The self-adjoint parts of each pair feed axioms (i) and (iii);
/// both matrices feed (ii) and (iv). Axiom (iv) is checked in the normalized
/// convention q_2(diag(A, 0)) = q(A) / 2.
/// Throws AxiomViolation naming the first failing axiom.
QuasitraceReport check_quasitrace_axioms(std::span<const std::pair<Matrix, Matrix>> samples,
                                         double tol = 1e-10);

/// q((X - Y)*(X - Y))^(1/3) with q the normalized trace.
double haagerup_distance(const Matrix& x, const Matrix& y);

/// AB = BA = AB* = B*A = 0, each product within tol * (1 + ||A||_F ||B||_F).
bool is_orthogonal(const Matrix& a, const Matrix& b, double tol = 1e-9);

/// P <= Q, i.e. QP = P within tol.
bool projection_leq(const Projection& p, const Projection& q, double tol = 1e-9);

/// Range projection of A. Eigenvalues with |alpha| <= tol.residual * (1 + ||A||)
/// count as zero.
Projection support_projection(const HermitianMatrix& a, const Tolerances& tol = {});

/// Projection onto the span of the union of ranges, computed as the support
/// of the sum.
Projection join_projections(std::span<const Projection> family, const Tolerances& tol = {});

/// A (x) I_m, the unital embedding Mat_n -> Mat_{nm}.
Matrix amplify(const Matrix& a, Index m);
HermitianMatrix amplify(const HermitianMatrix& a, Index m);
Projection amplify(const Projection& p, Index m);

/// Returns U with U A U* = B when the sorted spectra agree within
/// tol * (1 + max(||A||, ||B||)); std::nullopt otherwise.
std::optional<Matrix> unitary_equiv_exact(const HermitianMatrix& a, const HermitianMatrix& b,
                                          double tol = 1e-9);

}  // namespace selfcomm

#pragma once

#include <cstddef>
#include <vector>

#include "selfcomm/checks.hpp"
#include "selfcomm/spectral.hpp"

namespace selfcomm {

/// values[k - 1] = q(A^k) for k = 1..order().
struct MomentVector {
  std::vector<double> values;

  std::size_t order() const { return values.size(); }
  double at(std::size_t k) const { return values.at(k - 1); }
};

/// Normalized-trace moments computed from the eigenvalues.
MomentVector moments(const HermitianMatrix& a, std::size_t order);

/// max_k |q(A1^k) - q(A2^k)| / max(1, ||A||)^k over k <= order, where ||A||
/// is the larger of the two norms.
double moment_discrepancy(const HermitianMatrix& a1, const HermitianMatrix& a2, std::size_t order);

/// Moment criterion for approximate unitary equivalence, truncated at `order`
/// (K = dim decides exact equivalence for matrices).
bool approx_equivalent(const HermitianMatrix& a1, const HermitianMatrix& a2, std::size_t order,
                       double tol = 1e-9);

/// S ~ -S, i.e. all odd moments vanish.
bool spectrally_symmetric(const HermitianMatrix& s, double tol = 1e-9);

struct AssemblyTuple {
  HermitianMatrix a1, a2, b1, b2, y1, y2, s1, s2;
  Projection p;

  Index dim() const { return a1.dim(); }
  /// A1 - B1 + A2 - B2 + Y1 + Y2
  Matrix reconstruction() const;
};

struct TupleReport {
  CheckList checks;
  Matrix x;  // reconstructed element

  bool pass() const { return checks.pass(); }
};

/// Evaluates the six structural conditions (commutation, pairwise moment
/// equivalence and spectral symmetry of S1 + S2, the orthogonality pattern,
/// Y/S orthogonality, corner support, reconstruction) with moments up to the
/// dimension. The reconstruction check runs only when `target` is given.
TupleReport validate_tuple(const AssemblyTuple& t, double tol = 1e-9, const Matrix* target = nullptr);

struct AssembledPair {
  Matrix v1, v2, w1, w2;
  Matrix x1, x2;  // V1 - W1, V2 - W2
  Matrix x;       // tuple reconstruction
};

/// Throws InvalidTuple when validate_tuple fails.
AssembledPair assemble_pair(const AssemblyTuple& t, double tol = 1e-9);

struct Embedding {
  HermitianMatrix x_tilde;  // diag(X, 0)
  Projection e;             // diag(I, 0)
};

Embedding embed_2x2(const HermitianMatrix& x);

}  // namespace selfcomm

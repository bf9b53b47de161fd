#pragma once

#include <optional>
#include <vector>

#include "selfcomm/checks.hpp"
#include "selfcomm/spectral.hpp"

namespace selfcomm {

/// One step of the corner recursion, in working-basis slot indices.
struct RecursionLevel {
  Index p_slot = 0;           // rank-one projection the step avoids
  Index q_slot = 0;           // rank-one Q chosen inside the opposite-sign eigenspace
  double alpha_i0 = 0.0;      // eigenvalue carried by the P slot (the shift)
  double alpha_i1 = 0.0;      // eigenvalue carried by the Q slot before the shift
  double corner_trace = 0.0;  // trace of the working element entering this level
};

/// X = A - B with A, B commuting, U A U* = B, and A P = 0 for the avoided
/// projection. Everything is diagonal in a fixed working basis W (slot s is
/// column s of W); U permutes slots. `basis` is empty when W is the standard
/// basis, which lets large diagonal inputs skip the dense representation.
struct CommutatorDecomposition {
  std::optional<Matrix> basis;
  RealVector source;                  // diagonal of W* X W
  RealVector a_diagonal;
  RealVector b_diagonal;
  std::vector<Index> permutation;     // U e_s = e_{permutation[s]}
  std::optional<Index> avoided_slot;
  std::vector<RecursionLevel> basis_trace;
  double recentered_by = 0.0;         // trace(X)/n removed before decomposing

  Index dim() const { return a_diagonal.size(); }
  HermitianMatrix a() const;
  HermitianMatrix b() const;
  Matrix u() const;
  std::optional<Projection> avoided_projection() const;
  double a_norm() const { return a_diagonal.size() ? a_diagonal.cwiseAbs().maxCoeff() : 0.0; }
  double b_norm() const { return b_diagonal.size() ? b_diagonal.cwiseAbs().maxCoeff() : 0.0; }
};

/// Combinatorial core: runs the corner recursion on the eigenvalues of a
/// diagonal traceless element, starting from the slot `p_slot`. `cluster_gap`
/// is absolute. The returned decomposition has no basis and no verification
/// has been run.
CommutatorDecomposition decompose_slots(const RealVector& values, Index p_slot, double cluster_gap);

/// Decomposition avoiding a given rank-one projection that commutes with X.
/// Throws NotTraceless, ProjectionIncompatible, or InternalInvariantBroken
/// when the post-hoc bullet check fails.
CommutatorDecomposition decompose_with_projection(const HermitianMatrix& x, const Projection& p,
                                                  const Tolerances& tol = {});

/// Starts from the first basis vector of the top eigenspace. With `recenter`
/// the scalar part trace(X)/n is removed first; otherwise a traced input is
/// rejected with NotTraceless.
CommutatorDecomposition decompose_traceless(const HermitianMatrix& x, const Tolerances& tol = {},
                                            bool recenter = false);

/// Same recursion for a real diagonal X = diag(values), never forming dense
/// matrices. Used by the quantization pipeline where n reaches a few thousand.
CommutatorDecomposition decompose_traceless_diagonal(const RealVector& values, const Tolerances& tol = {});

/// Re-checks commutation, reconstruction, unitary equivalence, the norm bound
/// and (when p is given) orthogonality to p on dense matrices.
CheckList verify_decomposition(const HermitianMatrix& x, const HermitianMatrix& a, const HermitianMatrix& b,
                               const Matrix& u, const Projection* p, const Tolerances& tol = {});

/// The same bullets evaluated directly on a decomposition's slot diagonals.
CheckList verify_slots(const CommutatorDecomposition& dec, const Tolerances& tol = {});

// ---------------------------------------------------------------------------

/// Y with X = YY* - Y*Y and [YY*, Y*Y] = 0.
struct Witness {
  Matrix y;
  double t = 0.0;
};

/// Y = (A + tI)^(1/2) U*. Default t = ||A||. Throws ShiftTooSmall if A + tI
/// is not positive semidefinite.
Witness build_witness(const HermitianMatrix& a, const Matrix& u, std::optional<double> t = std::nullopt,
                      const Tolerances& tol = {});
Witness build_witness(const CommutatorDecomposition& dec, std::optional<double> t = std::nullopt,
                      const Tolerances& tol = {});

struct WitnessReport {
  double commutator_residual = 0.0;      // ||[YY*, Y*Y]||_F
  double reconstruction_residual = 0.0;  // ||(YY* - Y*Y) - X||_F
  double normalized_trace_x = 0.0;
  CheckList checks;

  bool pass() const { return checks.pass(); }
};

WitnessReport verify_witness(const Matrix& x, const Matrix& y, const Tolerances& tol = {});

}  // namespace selfcomm

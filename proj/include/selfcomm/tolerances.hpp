#pragma once

namespace selfcomm {

// Relative tolerances. Each is multiplied by the scale named in the comment
// at the point of use, ||X|| being the operator norm of the input.
struct Tolerances {
  double hermiticity = 1e-10;         // * (1 + ||X||), on ||X - X*||_F
  double cluster_gap = 1e-8;          // * (1 + ||X||)
  double residual = 1e-9;             // * (1 + ||X||) or (1 + ||X||^2) for products
  double trace_zero = 1e-10;          // * n * (1 + ||X||)
  double reconstruction = 1e-10;      // * (1 + ||X||), on ||(A - B) - X||_F
  double witness_commutator = 1e-8;   // * (1 + ||X||^2), on ||[YY*, Y*Y]||_F

  /// Throws InvalidArgument unless every field is strictly positive.
  void validate() const;
};

}  // namespace selfcomm

#include "selfcomm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace selfcomm {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::ClusterAmbiguity: return "ClusterAmbiguity";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::AxiomViolation: return "AxiomViolation";
    case ErrorCode::NotTraceless: return "NotTraceless";
    case ErrorCode::ProjectionIncompatible: return "ProjectionIncompatible";
    case ErrorCode::InternalInvariantBroken: return "InternalInvariantBroken";
    case ErrorCode::ShiftTooSmall: return "ShiftTooSmall";
    case ErrorCode::MismatchedProvenance: return "MismatchedProvenance";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::InvalidTuple: return "InvalidTuple";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

void Tolerances::validate() const {
  for (double v : {hermiticity, cluster_gap, residual, trace_zero, reconstruction, witness_commutator}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::InvalidArgument, "tolerances must be strictly positive and finite");
    }
  }
}

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + ": " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                    " vs " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
}

Eigen::SelfAdjointEigenSolver<Matrix> solve(const Matrix& m, bool vectors) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::InternalInvariantBroken, "self-adjoint eigensolver did not converge");
  }
  return es;
}

double spectral_radius(const RealVector& ev) {
  return ev.size() == 0 ? 0.0 : std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

}  // namespace

double operator_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

// ---------------------------------------------------------------------------

HermitianMatrix::HermitianMatrix(Matrix m, double tol) : m_(std::move(m)) {
  if (m_.rows() == 0 || m_.rows() != m_.cols()) {
    throw Error(ErrorCode::NotHermitian, "matrix must be square with dim >= 1");
  }
  if (!m_.allFinite()) {
    throw Error(ErrorCode::NotHermitian, "matrix has non-finite entries");
  }
  const double skew = (m_ - m_.adjoint()).norm();
  if (skew > tol * (1.0 + m_.norm())) {
    throw Error(ErrorCode::NotHermitian, "||X - X*||_F = " + format_value(skew));
  }
}

HermitianMatrix HermitianMatrix::zero(Index n) { return HermitianMatrix(Matrix::Zero(n, n)); }

HermitianMatrix HermitianMatrix::identity(Index n) { return HermitianMatrix(Matrix::Identity(n, n)); }

HermitianMatrix HermitianMatrix::diagonal(const RealVector& values) {
  return HermitianMatrix(Matrix(values.cast<Complex>().asDiagonal()));
}

double HermitianMatrix::norm() const { return spectral_radius(solve(m_, false).eigenvalues()); }

// ---------------------------------------------------------------------------

Projection::Projection(Matrix p, double tol) : p_(std::move(p)) {
  if (p_.rows() != p_.cols()) throw Error(ErrorCode::InvalidArgument, "projection must be square");
  const double scale = 1.0 + p_.norm();
  if ((p_ - p_.adjoint()).norm() > tol * scale || (p_ * p_ - p_).norm() > tol * scale) {
    throw Error(ErrorCode::InvalidArgument, "matrix is not an orthogonal projection");
  }
  rank_ = static_cast<Index>(std::llround(p_.trace().real()));
}

Projection Projection::from_basis(const Matrix& columns, Index dim) {
  if (columns.cols() == 0) return zero(dim);
  return Projection(Matrix(columns * columns.adjoint()), columns.cols());
}

Projection Projection::zero(Index n) { return Projection(Matrix(Matrix::Zero(n, n)), Index{0}); }

Projection Projection::identity(Index n) { return Projection(Matrix(Matrix::Identity(n, n)), n); }

Projection Projection::coordinate(Index n, Index k) {
  if (k < 0 || k >= n) throw Error(ErrorCode::InvalidArgument, "coordinate index out of range");
  Matrix p = Matrix::Zero(n, n);
  p(k, k) = 1.0;
  return Projection(std::move(p), Index{1});
}

// ---------------------------------------------------------------------------

Index SpectralDecomposition::offset(std::size_t i) const {
  Index off = 0;
  for (std::size_t j = 0; j < i; ++j) off += multiplicities[j];
  return off;
}

Index SpectralDecomposition::cluster_of(Index column) const {
  Index end = 0;
  for (std::size_t i = 0; i < multiplicities.size(); ++i) {
    end += multiplicities[i];
    if (column < end) return static_cast<Index>(i);
  }
  throw Error(ErrorCode::InvalidArgument, "column out of range");
}

Projection SpectralDecomposition::projection(std::size_t i) const {
  return Projection::from_basis(basis.middleCols(offset(i), multiplicities[i]), dim());
}

double SpectralDecomposition::measure(std::size_t i) const {
  return static_cast<double>(multiplicities[i]) / static_cast<double>(dim());
}

std::vector<std::size_t> cluster_boundaries(std::span<const double> sorted_values, double gap) {
  std::vector<std::size_t> starts;
  for (std::size_t k = 0; k < sorted_values.size(); ++k) {
    if (k == 0 || sorted_values[k] - sorted_values[k - 1] > gap) starts.push_back(k);
  }
  starts.push_back(sorted_values.size());
  return starts;
}

SpectralDecomposition eigendecompose(const HermitianMatrix& x, const Tolerances& tol) {
  auto es = solve(x.matrix(), true);
  SpectralDecomposition out;
  out.eigenvalues = es.eigenvalues();
  out.basis = es.eigenvectors();

  const double gap = tol.cluster_gap * (1.0 + spectral_radius(out.eigenvalues));
  std::span<const double> ev(out.eigenvalues.data(), static_cast<std::size_t>(out.eigenvalues.size()));
  const auto starts = cluster_boundaries(ev, gap);
  for (std::size_t c = 0; c + 1 < starts.size(); ++c) {
    const std::size_t lo = starts[c], hi = starts[c + 1];
    if (ev[hi - 1] - ev[lo] > gap) {
      throw Error(ErrorCode::ClusterAmbiguity,
                  "eigenvalue chain [" + format_value(ev[lo]) + ", " + format_value(ev[hi - 1]) +
                      "] is wider than the cluster gap");
    }
    double sum = 0.0;
    for (std::size_t k = lo; k < hi; ++k) sum += ev[k];
    out.values.push_back(sum / static_cast<double>(hi - lo));
    out.multiplicities.push_back(static_cast<Index>(hi - lo));
  }
  return out;
}

RealVector eigenvalues(const HermitianMatrix& x) { return solve(x.matrix(), false).eigenvalues(); }

// ---------------------------------------------------------------------------

Complex normalized_trace(const Matrix& x) {
  if (x.rows() == 0) throw Error(ErrorCode::InvalidArgument, "empty matrix");
  return x.trace() / static_cast<double>(x.rows());
}

double normalized_trace(const HermitianMatrix& x) { return normalized_trace(x.matrix()).real(); }

QuasitraceReport check_quasitrace_axioms(std::span<const std::pair<Matrix, Matrix>> samples, double tol) {
  QuasitraceReport report;
  report.tolerance = tol;
  const Complex i_unit(0.0, 1.0);

  auto bump = [&](int axiom, double value) {
    report.max_residual[axiom] = std::max(report.max_residual[axiom], value);
  };
  auto block_with_zero = [](const Matrix& a) {
    Matrix out = Matrix::Zero(2 * a.rows(), 2 * a.cols());
    out.topLeftCorner(a.rows(), a.cols()) = a;
    return out;
  };

  for (const auto& [first, second] : samples) {
    require_same_shape(first, second, "quasitrace sample");
    ++report.samples;
    const Matrix ha = (first + first.adjoint()) / 2.0;
    const Matrix hb = (second + second.adjoint()) / 2.0;
    const double scale = 1.0 + std::max(first.squaredNorm(), second.squaredNorm());

    // (i) complex linearity on A + iB with A, B self-adjoint
    const Complex lhs = normalized_trace(Matrix(ha + i_unit * hb));
    const Complex rhs = normalized_trace(ha) + i_unit * normalized_trace(hb);
    bump(0, std::abs(lhs - rhs) / scale);

    for (const Matrix* m : {&first, &second}) {
      // (ii) q(MM*) = q(M*M) >= 0
      const Complex q_left = normalized_trace(Matrix(*m * m->adjoint()));
      const Complex q_right = normalized_trace(Matrix(m->adjoint() * *m));
      bump(1, std::max(std::abs(q_left - q_right), std::abs(q_left.imag())) / scale);
      report.min_positive_part = std::min(report.min_positive_part, q_left.real() / scale);

      // (iv) corner embedding, normalized convention
      const Complex q2 = normalized_trace(block_with_zero(*m));
      bump(3, std::abs(q2 - normalized_trace(*m) / 2.0) / scale);
    }

    // (iii) additivity on commuting self-adjoint pairs: (H, H^2) always commute,
    // (Ha, Hb) only when they happen to.
    std::vector<std::pair<Matrix, Matrix>> commuting;
    commuting.emplace_back(ha, ha * ha);
    commuting.emplace_back(hb, hb * hb);
    if ((ha * hb - hb * ha).norm() <= tol * scale) commuting.emplace_back(ha, hb);
    for (const auto& [x, y] : commuting) {
      const Complex sum = normalized_trace(Matrix(x + y));
      bump(2, std::abs(sum - normalized_trace(x) - normalized_trace(y)) / (scale * scale));
    }
  }

  static constexpr const char* names[4] = {"(i) complex linearity", "(ii) q(AA*) = q(A*A)",
                                           "(iii) abelian additivity", "(iv) corner embedding"};
  for (int k = 0; k < 4; ++k) {
    if (report.max_residual[k] > tol) {
      throw Error(ErrorCode::AxiomViolation, std::string("axiom ") + names[k] + " residual " +
                                                 format_value(report.max_residual[k]));
    }
  }
  if (report.min_positive_part < -tol) {
    throw Error(ErrorCode::AxiomViolation, "axiom (ii) positivity: q(AA*) < 0");
  }
  return report;
}

double haagerup_distance(const Matrix& x, const Matrix& y) {
  require_same_shape(x, y, "haagerup_distance");
  // q((X-Y)*(X-Y)) = ||X - Y||_F^2 / n
  const double q = (x - y).squaredNorm() / static_cast<double>(x.rows());
  return std::cbrt(q);
}

bool is_orthogonal(const Matrix& a, const Matrix& b, double tol) {
  require_same_shape(a, b, "is_orthogonal");
  const double bound = tol * (1.0 + a.norm() * b.norm());
  const Matrix ab = a * b;
  if (ab.norm() > bound) return false;
  if ((b * a).norm() > bound) return false;
  if ((a * b.adjoint()).norm() > bound) return false;
  return (b.adjoint() * a).norm() <= bound;
}

bool projection_leq(const Projection& p, const Projection& q, double tol) {
  require_same_shape(p.matrix(), q.matrix(), "projection_leq");
  return (q.matrix() * p.matrix() - p.matrix()).norm() <= tol * (1.0 + p.matrix().norm());
}

Projection support_projection(const HermitianMatrix& a, const Tolerances& tol) {
  auto es = solve(a.matrix(), true);
  const RealVector& ev = es.eigenvalues();
  const double threshold = tol.residual * (1.0 + spectral_radius(ev));
  std::vector<Index> keep;
  for (Index k = 0; k < ev.size(); ++k) {
    if (std::abs(ev(k)) > threshold) keep.push_back(k);
  }
  Matrix cols(a.dim(), static_cast<Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) cols.col(static_cast<Index>(j)) = es.eigenvectors().col(keep[j]);
  return Projection::from_basis(cols, a.dim());
}

Projection join_projections(std::span<const Projection> family, const Tolerances& tol) {
  if (family.empty()) throw Error(ErrorCode::InvalidArgument, "join of an empty family");
  Matrix sum = Matrix::Zero(family.front().dim(), family.front().dim());
  for (const auto& p : family) {
    require_same_shape(sum, p.matrix(), "join_projections");
    sum += p.matrix();
  }
  return support_projection(HermitianMatrix(sum), tol);
}

Matrix amplify(const Matrix& a, Index m) {
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "amplification factor must be >= 1");
  const Index n = a.rows();
  Matrix out = Matrix::Zero(n * m, a.cols() * m);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      for (Index k = 0; k < m; ++k) out(i * m + k, j * m + k) = a(i, j);
    }
  }
  return out;
}

HermitianMatrix amplify(const HermitianMatrix& a, Index m) { return HermitianMatrix(amplify(a.matrix(), m)); }

Projection amplify(const Projection& p, Index m) { return Projection(amplify(p.matrix(), m)); }

std::optional<Matrix> unitary_equiv_exact(const HermitianMatrix& a, const HermitianMatrix& b, double tol) {
  require_same_shape(a.matrix(), b.matrix(), "unitary_equiv_exact");
  auto ea = solve(a.matrix(), true);
  auto eb = solve(b.matrix(), true);
  const double scale = 1.0 + std::max(spectral_radius(ea.eigenvalues()), spectral_radius(eb.eigenvalues()));
  if ((ea.eigenvalues() - eb.eigenvalues()).cwiseAbs().maxCoeff() > tol * scale) return std::nullopt;

  // Sorted order is the matching; ties inside a cluster are arbitrary.
  Matrix u = eb.eigenvectors() * ea.eigenvectors().adjoint();
  const double residual = (u * a.matrix() * u.adjoint() - b.matrix()).norm();
  const double n = static_cast<double>(a.dim());
  if (residual > tol * scale * std::sqrt(n)) return std::nullopt;
  return u;
}

}  // namespace selfcomm

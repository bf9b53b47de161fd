#include "selfcomm/equiv.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace selfcomm {

MomentVector moments(const HermitianMatrix& a, std::size_t order) {
  if (order < 1) throw Error(ErrorCode::InvalidArgument, "moment order must be >= 1");
  const RealVector ev = eigenvalues(a);
  RealVector power = RealVector::Ones(ev.size());
  MomentVector out;
  out.values.reserve(order);
  for (std::size_t k = 1; k <= order; ++k) {
    power = power.cwiseProduct(ev);
    out.values.push_back(power.sum() / static_cast<double>(ev.size()));
  }
  return out;
}

double moment_discrepancy(const HermitianMatrix& a1, const HermitianMatrix& a2, std::size_t order) {
  if (a1.dim() != a2.dim()) throw Error(ErrorCode::DimensionMismatch, "moment comparison");
  const MomentVector m1 = moments(a1, order);
  const MomentVector m2 = moments(a2, order);
  const double base = std::max({1.0, a1.norm(), a2.norm()});
  double worst = 0.0;
  double scale = 1.0;
  for (std::size_t k = 1; k <= order; ++k) {
    scale *= base;
    worst = std::max(worst, std::abs(m1.at(k) - m2.at(k)) / scale);
  }
  return worst;
}

bool approx_equivalent(const HermitianMatrix& a1, const HermitianMatrix& a2, std::size_t order, double tol) {
  return moment_discrepancy(a1, a2, order) <= tol;
}

bool spectrally_symmetric(const HermitianMatrix& s, double tol) {
  return approx_equivalent(s, HermitianMatrix(Matrix(-s.matrix())), static_cast<std::size_t>(s.dim()), tol);
}

Matrix AssemblyTuple::reconstruction() const {
  return a1.matrix() - b1.matrix() + a2.matrix() - b2.matrix() + y1.matrix() + y2.matrix();
}

namespace {

double orthogonality_residual(const Matrix& a, const Matrix& b) {
  const double scale = 1.0 + a.norm() * b.norm();
  const double worst = std::max({(a * b).norm(), (b * a).norm(), (a * b.adjoint()).norm(), (b.adjoint() * a).norm()});
  return worst / scale;
}

}  // namespace

TupleReport validate_tuple(const AssemblyTuple& t, double tol, const Matrix* target) {
  const Index n = t.dim();
  const std::vector<const HermitianMatrix*> all{&t.a1, &t.a2, &t.b1, &t.b2, &t.y1, &t.y2, &t.s1, &t.s2};
  for (const auto* m : all) {
    if (m->dim() != n) throw Error(ErrorCode::DimensionMismatch, "tuple members differ in dimension");
  }
  if (t.p.dim() != n || (target && (target->rows() != n || target->cols() != n))) {
    throw Error(ErrorCode::DimensionMismatch, "tuple members differ in dimension");
  }
  double scale = 1.0;
  for (const auto* m : all) scale = std::max(scale, 1.0 + m->matrix().norm());

  TupleReport report;
  report.x = t.reconstruction();

  double comm = 0.0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      const Matrix& x = all[i]->matrix();
      const Matrix& y = all[j]->matrix();
      comm = std::max(comm, (x * y - y * x).norm() / (scale * scale));
    }
  }
  report.checks.add("(i) commute", comm, tol);

  const auto order = static_cast<std::size_t>(n);
  const HermitianMatrix s_sum(Matrix(t.s1.matrix() + t.s2.matrix()));
  const double equiv = std::max({moment_discrepancy(t.a1, t.b1, order), moment_discrepancy(t.a2, t.b2, order),
                                 moment_discrepancy(t.y1, t.s1, order), moment_discrepancy(t.y2, t.s2, order),
                                 moment_discrepancy(s_sum, HermitianMatrix(Matrix(-s_sum.matrix())), order)});
  report.checks.add("(ii) equivalence", equiv, tol);

  const Matrix& p = t.p.matrix();
  const double ortho = std::max({orthogonality_residual(t.a1, t.a2), orthogonality_residual(t.a1, t.b1),
                                 orthogonality_residual(t.a1, p), orthogonality_residual(t.a2, t.b2),
                                 orthogonality_residual(t.a2, p), orthogonality_residual(t.b1, t.b2),
                                 orthogonality_residual(t.b1, p)});
  report.checks.add("(iii) orthogonality", ortho, tol);
  const Matrix ysum = t.y1.matrix() + t.y2.matrix();
  const double corner_b2 =
      std::max((t.b2.matrix() * p - ysum).norm(), (p * t.b2.matrix() - ysum).norm()) / scale;
  report.checks.add("(iii) B2 P = P B2 = Y1 + Y2", corner_b2, tol);

  const double ys = std::max({orthogonality_residual(t.y1, t.s1), orthogonality_residual(t.y1, t.s2),
                              orthogonality_residual(t.y2, t.s1), orthogonality_residual(t.y2, t.s2)});
  report.checks.add("(iv) Y/S orthogonality", ys, tol);

  double support = 0.0;
  for (const auto* m : {&t.y1, &t.y2, &t.s1, &t.s2}) {
    support = std::max(support, (m->matrix() - p * m->matrix() * p).norm() / scale);
  }
  report.checks.add("(v) corner support", support, tol);

  if (target) report.checks.add("(vi) reconstruction", (report.x - *target).norm() / scale, tol);
  return report;
}

AssembledPair assemble_pair(const AssemblyTuple& t, double tol) {
  TupleReport report = validate_tuple(t, tol);
  if (const Check* failed = report.checks.first_failure()) {
    throw Error(ErrorCode::InvalidTuple, failed->name + " residual " + format_value(failed->residual));
  }
  const Matrix half_s = (t.s1.matrix() + t.s2.matrix()) / 2.0;
  AssembledPair out;
  out.v1 = t.a1.matrix() + t.y1.matrix() - t.s2.matrix();
  out.v2 = t.a2.matrix() + half_s;
  out.w1 = t.b1.matrix() + t.s1.matrix() - t.y2.matrix();
  out.w2 = t.b2.matrix() - half_s;
  out.x1 = out.v1 - out.w1;
  out.x2 = out.v2 - out.w2;
  out.x = std::move(report.x);
  return out;
}

Embedding embed_2x2(const HermitianMatrix& x) {
  const Index n = x.dim();
  Matrix big = Matrix::Zero(2 * n, 2 * n);
  big.topLeftCorner(n, n) = x.matrix();
  Matrix e = Matrix::Zero(2 * n, 2 * n);
  e.topLeftCorner(n, n).setIdentity();
  return {HermitianMatrix(std::move(big)), Projection(std::move(e))};
}

}  // namespace selfcomm

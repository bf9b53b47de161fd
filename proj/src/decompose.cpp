#include "selfcomm/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

namespace selfcomm {

namespace {

Matrix permutation_matrix(const std::vector<Index>& perm) {
  const auto n = static_cast<Index>(perm.size());
  Matrix p = Matrix::Zero(n, n);
  for (Index s = 0; s < n; ++s) p(perm[static_cast<std::size_t>(s)], s) = 1.0;
  return p;
}

Matrix in_basis(const std::optional<Matrix>& basis, const Matrix& working) {
  if (!basis) return working;
  return *basis * working * basis->adjoint();
}

Matrix diagonal(const RealVector& d) { return d.cast<Complex>().asDiagonal(); }

[[noreturn]] void broken(const CheckList& checks) {
  const Check* failed = checks.first_failure();
  throw Error(ErrorCode::InternalInvariantBroken,
              failed->name + " residual " + format_value(failed->residual) + " exceeds " +
                  format_value(failed->tolerance));
}

void require_traceless(double trace, Index n, double norm, const Tolerances& tol) {
  const double bound = tol.trace_zero * static_cast<double>(n) * (1.0 + norm);
  if (std::abs(trace) > bound) {
    throw Error(ErrorCode::NotTraceless,
                "|trace| = " + format_value(std::abs(trace)) + " exceeds " + format_value(bound));
  }
}

// Working basis that starts with `first` and continues with the remaining
// eigenbasis columns in increasing eigenvalue order.
Matrix working_basis(const Matrix& first, const Matrix& eigenbasis, Index skip) {
  const Index n = eigenbasis.rows();
  Matrix w(n, n);
  w.col(0) = first;
  Index col = 1;
  for (Index k = 0; k < n; ++k) {
    if (k != skip) w.col(col++) = eigenbasis.col(k);
  }
  return w;
}

CommutatorDecomposition finish_dense(const HermitianMatrix& x, Matrix basis, RealVector source,
                                     const Projection& p, double norm, double shift, const Tolerances& tol) {
  CommutatorDecomposition dec = decompose_slots(source, 0, tol.cluster_gap * (1.0 + norm));
  dec.basis = std::move(basis);
  dec.recentered_by = shift;
  const CheckList checks = verify_decomposition(x, dec.a(), dec.b(), dec.u(), &p, tol);
  if (!checks.pass()) broken(checks);
  return dec;
}

}  // namespace

HermitianMatrix CommutatorDecomposition::a() const {
  return HermitianMatrix(in_basis(basis, diagonal(a_diagonal)));
}

HermitianMatrix CommutatorDecomposition::b() const {
  return HermitianMatrix(in_basis(basis, diagonal(b_diagonal)));
}

Matrix CommutatorDecomposition::u() const { return in_basis(basis, permutation_matrix(permutation)); }

std::optional<Projection> CommutatorDecomposition::avoided_projection() const {
  if (!avoided_slot) return std::nullopt;
  if (!basis) return Projection::coordinate(dim(), *avoided_slot);
  return Projection::from_basis(basis->col(*avoided_slot), dim());
}

CommutatorDecomposition decompose_slots(const RealVector& values, Index p_slot, double cluster_gap) {
  const Index n = values.size();
  if (p_slot < 0 || p_slot >= n) throw Error(ErrorCode::InvalidArgument, "projection slot out of range");

  CommutatorDecomposition dec;
  dec.source = values;
  dec.a_diagonal = RealVector::Zero(n);
  dec.b_diagonal = RealVector::Zero(n);
  dec.permutation.resize(static_cast<std::size_t>(n));
  std::iota(dec.permutation.begin(), dec.permutation.end(), Index{0});
  dec.avoided_slot = p_slot;

  RealVector work = values;
  std::vector<std::pair<double, Index>> active;  // sorted by (value, slot)
  active.reserve(static_cast<std::size_t>(n));
  for (Index s = 0; s < n; ++s) active.emplace_back(work(s), s);
  std::sort(active.begin(), active.end());

  std::vector<Index> chain{p_slot};
  std::vector<std::size_t> cluster_of(active.size());
  std::vector<double> sums;
  std::vector<std::size_t> counts;
  Index p = p_slot;

  while (active.size() > 1) {
    // Single-linkage clusters of the current corner.
    sums.clear();
    counts.clear();
    std::size_t p_pos = 0;
    double corner_trace = 0.0;
    for (std::size_t j = 0; j < active.size(); ++j) {
      if (j == 0 || active[j].first - active[j - 1].first > cluster_gap) {
        sums.push_back(0.0);
        counts.push_back(0);
      }
      cluster_of[j] = sums.size() - 1;
      sums.back() += active[j].first;
      ++counts.back();
      corner_trace += active[j].first;
      if (active[j].second == p) p_pos = j;
    }
    const std::size_t i0 = cluster_of[p_pos];
    const double alpha_i0 = sums[i0] / static_cast<double>(counts[i0]);
    auto mean = [&](std::size_t c) { return sums[c] / static_cast<double>(counts[c]); };

    bool want_negative = alpha_i0 > 0.0;
    if (alpha_i0 == 0.0) {
      for (std::size_t c = 0; c < sums.size(); ++c) {
        if (c != i0 && mean(c) < 0.0) want_negative = true;
      }
    }
    std::size_t best = sums.size();
    for (std::size_t c = 0; c < sums.size(); ++c) {
      if (c == i0) continue;
      const double m = mean(c);
      if (want_negative ? !(m < 0.0) : !(m > 0.0)) continue;
      if (best == sums.size() || std::abs(m) > std::abs(mean(best))) best = c;
    }
    if (best == sums.size()) break;

    Index q = n;
    for (std::size_t j = 0; j < active.size(); ++j) {
      if (cluster_of[j] == best) q = std::min(q, active[j].second);
    }

    const double shift = work(p);
    dec.basis_trace.push_back({p, q, shift, work(q), corner_trace});
    dec.b_diagonal(p) = -shift;
    dec.a_diagonal(q) = -shift;
    work(q) += shift;
    work(p) = 0.0;

    std::erase_if(active, [&](const auto& e) { return e.second == p || e.second == q; });
    const std::pair<double, Index> moved{work(q), q};
    active.insert(std::lower_bound(active.begin(), active.end(), moved), moved);
    chain.push_back(q);
    p = q;
  }

  // U carries the A-value at chain[l+1] back to chain[l]; the cycle closes on
  // the start slot, where A vanishes.
  for (std::size_t l = 0; l + 1 < chain.size(); ++l) {
    dec.permutation[static_cast<std::size_t>(chain[l + 1])] = chain[l];
  }
  dec.permutation[static_cast<std::size_t>(chain.front())] = chain.back();
  return dec;
}

CommutatorDecomposition decompose_with_projection(const HermitianMatrix& x, const Projection& p,
                                                  const Tolerances& tol) {
  tol.validate();
  const Index n = x.dim();
  if (p.dim() != n) throw Error(ErrorCode::DimensionMismatch, "projection and matrix dimensions differ");

  const SpectralDecomposition sd = eigendecompose(x, tol);
  const double norm = sd.eigenvalues.cwiseAbs().maxCoeff();
  require_traceless(x.matrix().trace().real(), n, norm, tol);

  if (p.rank() != 1 || std::abs(p.matrix().trace().real() - 1.0) > 1e-9) {
    throw Error(ErrorCode::ProjectionIncompatible, "projection must have rank one");
  }
  const double comm = (p.matrix() * x.matrix() - x.matrix() * p.matrix()).norm();
  if (comm > tol.residual * (1.0 + norm)) {
    throw Error(ErrorCode::ProjectionIncompatible, "||PX - XP||_F = " + format_value(comm));
  }

  Index pivot = 0;
  p.matrix().colwise().norm().maxCoeff(&pivot);
  const Eigen::VectorXcd v = p.matrix().col(pivot).normalized();

  // P lies under exactly one spectral projection E_i0.
  std::size_t i0 = 0;
  double best_weight = -1.0;
  for (std::size_t i = 0; i < sd.size(); ++i) {
    const double w = (sd.basis.middleCols(sd.offset(i), sd.multiplicities[i]).adjoint() * v).squaredNorm();
    if (w > best_weight) {
      best_weight = w;
      i0 = i;
    }
  }
  if (best_weight < 1.0 - 1e-6) {
    throw Error(ErrorCode::ProjectionIncompatible, "projection is not under a single eigenspace");
  }

  // Rotate E_i0's basis so its first column spans the range of P.
  const Index off = sd.offset(i0);
  const Index k = sd.multiplicities[i0];
  Matrix block = sd.basis.middleCols(off, k);
  const Eigen::VectorXcd c = (block.adjoint() * v).normalized();
  Eigen::HouseholderQR<Matrix> qr{Matrix(c)};
  block = block * Matrix(qr.householderQ());
  Matrix eig = sd.basis;
  eig.middleCols(off, k) = block;

  Matrix w = working_basis(eig.col(off), eig, off);
  RealVector source(n);
  for (Index s = 0; s < n; ++s) source(s) = (w.col(s).adjoint() * x.matrix() * w.col(s))(0, 0).real();
  return finish_dense(x, std::move(w), std::move(source), p, norm, 0.0, tol);
}

CommutatorDecomposition decompose_traceless(const HermitianMatrix& x, const Tolerances& tol, bool recenter) {
  tol.validate();
  const Index n = x.dim();
  double shift = 0.0;
  std::optional<HermitianMatrix> centered;
  if (recenter) {
    shift = normalized_trace(x);
    centered.emplace(Matrix(x.matrix() - shift * Matrix::Identity(n, n)));
  }
  const HermitianMatrix& target = centered ? *centered : x;

  const SpectralDecomposition sd = eigendecompose(target, tol);
  const double norm = sd.eigenvalues.cwiseAbs().maxCoeff();
  require_traceless(target.matrix().trace().real(), n, norm, tol);

  const Index top = sd.offset(sd.size() - 1);
  Matrix w = working_basis(sd.basis.col(top), sd.basis, top);
  RealVector source(n);
  source(0) = sd.eigenvalues(top);
  for (Index k = 0, s = 1; k < n; ++k) {
    if (k != top) source(s++) = sd.eigenvalues(k);
  }
  const Projection p = Projection::from_basis(w.col(0), n);
  return finish_dense(target, std::move(w), std::move(source), p, norm, shift, tol);
}

CommutatorDecomposition decompose_traceless_diagonal(const RealVector& values, const Tolerances& tol) {
  tol.validate();
  const Index n = values.size();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "empty diagonal");
  const double norm = values.cwiseAbs().maxCoeff();
  require_traceless(values.sum(), n, norm, tol);

  // First slot (lowest index) of the top eigenvalue cluster.
  const double gap = tol.cluster_gap * (1.0 + norm);
  std::vector<double> sorted(values.data(), values.data() + n);
  std::sort(sorted.begin(), sorted.end());
  const auto starts = cluster_boundaries(sorted, gap);
  const double top_low = sorted[starts[starts.size() - 2]];
  Index p = n;
  for (Index s = 0; s < n; ++s) {
    if (values(s) >= top_low) {
      p = s;
      break;
    }
  }

  CommutatorDecomposition dec = decompose_slots(values, p, gap);
  const CheckList checks = verify_slots(dec, tol);
  if (!checks.pass()) broken(checks);
  return dec;
}

CheckList verify_decomposition(const HermitianMatrix& x, const HermitianMatrix& a, const HermitianMatrix& b,
                               const Matrix& u, const Projection* p, const Tolerances& tol) {
  const Index n = x.dim();
  if (a.dim() != n || b.dim() != n || u.rows() != n || u.cols() != n || (p && p->dim() != n)) {
    throw Error(ErrorCode::DimensionMismatch, "decomposition parts do not match the source dimension");
  }
  const RealVector ex = eigenvalues(x);
  const RealVector ea = eigenvalues(a);
  const RealVector eb = eigenvalues(b);
  const double norm = ex.cwiseAbs().maxCoeff();
  const double scale = 1.0 + norm;

  CheckList out;
  const Matrix& am = a.matrix();
  const Matrix& bm = b.matrix();
  out.add("commutation", (am * bm - bm * am).norm(), tol.residual * (1.0 + norm * norm));
  out.add("reconstruction", (am - bm - x.matrix()).norm(), tol.reconstruction * scale);
  out.add("unitarity", (u.adjoint() * u - Matrix::Identity(n, n)).norm(),
          tol.residual * std::sqrt(static_cast<double>(n)));
  out.add("conjugation", (u * am * u.adjoint() - bm).norm(), tol.residual * scale);
  out.add("spectra", (ea - eb).cwiseAbs().maxCoeff(), tol.residual * scale);
  const double max_ab = std::max(ea.cwiseAbs().maxCoeff(), eb.cwiseAbs().maxCoeff());
  out.add("norm_bound", std::max(0.0, max_ab - norm), tol.residual * scale);
  if (p) out.add("avoids_projection", (am * p->matrix()).norm(), tol.residual * scale);
  return out;
}

CheckList verify_slots(const CommutatorDecomposition& dec, const Tolerances& tol) {
  const Index n = dec.dim();
  const double norm = dec.source.size() ? dec.source.cwiseAbs().maxCoeff() : 0.0;
  const double scale = 1.0 + norm;

  CheckList out;
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  double bad_perm = 0.0;
  for (Index s : dec.permutation) {
    if (s < 0 || s >= n || seen[static_cast<std::size_t>(s)]) {
      bad_perm = 1.0;
      continue;
    }
    seen[static_cast<std::size_t>(s)] = true;
  }
  out.add("unitarity", bad_perm, 0.0);
  // Diagonal in a common basis, so the commutator vanishes identically.
  out.add("commutation", 0.0, tol.residual * (1.0 + norm * norm));
  out.add("reconstruction", (dec.a_diagonal - dec.b_diagonal - dec.source).norm(), tol.reconstruction * scale);
  double conj = 0.0;
  if (bad_perm == 0.0) {
    for (Index s = 0; s < n; ++s) {
      conj = std::max(conj, std::abs(dec.a_diagonal(s) - dec.b_diagonal(dec.permutation[static_cast<std::size_t>(s)])));
    }
  } else {
    conj = std::numeric_limits<double>::infinity();
  }
  out.add("conjugation", conj, tol.residual * scale);
  out.add("norm_bound", std::max(0.0, std::max(dec.a_norm(), dec.b_norm()) - norm), tol.residual * scale);
  if (dec.avoided_slot) out.add("avoids_projection", std::abs(dec.a_diagonal(*dec.avoided_slot)), tol.residual * scale);
  return out;
}

// ---------------------------------------------------------------------------

Witness build_witness(const HermitianMatrix& a, const Matrix& u, std::optional<double> t, const Tolerances& tol) {
  const Index n = a.dim();
  if (u.rows() != n || u.cols() != n) throw Error(ErrorCode::DimensionMismatch, "U does not match A");
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.matrix());
  const RealVector& ev = es.eigenvalues();
  const double norm = ev.cwiseAbs().maxCoeff();
  const double shift = t.value_or(norm);
  if (!std::isfinite(shift) || shift < 0.0) throw Error(ErrorCode::ShiftTooSmall, "shift must be finite and >= 0");
  if (ev.minCoeff() + shift < -tol.residual * (1.0 + norm)) {
    throw Error(ErrorCode::ShiftTooSmall,
                "A + tI has eigenvalue " + format_value(ev.minCoeff() + shift));
  }
  const RealVector root = (ev.array() + shift).max(0.0).sqrt().matrix();
  const Matrix sqrt_a = es.eigenvectors() * diagonal(root) * es.eigenvectors().adjoint();
  return {sqrt_a * u.adjoint(), shift};
}

Witness build_witness(const CommutatorDecomposition& dec, std::optional<double> t, const Tolerances& tol) {
  const double norm = dec.a_norm();
  const double shift = t.value_or(norm);
  if (!std::isfinite(shift) || shift < 0.0) throw Error(ErrorCode::ShiftTooSmall, "shift must be finite and >= 0");
  const double low = dec.dim() ? dec.a_diagonal.minCoeff() : 0.0;
  if (low + shift < -tol.residual * (1.0 + norm)) {
    throw Error(ErrorCode::ShiftTooSmall, "A + tI has eigenvalue " + format_value(low + shift));
  }
  const RealVector root = (dec.a_diagonal.array() + shift).max(0.0).sqrt().matrix();
  // In the working basis Y = diag(root) * Pi^T.
  const Matrix y = diagonal(root) * permutation_matrix(dec.permutation).adjoint();
  return {in_basis(dec.basis, y), shift};
}

WitnessReport verify_witness(const Matrix& x, const Matrix& y, const Tolerances& tol) {
  if (x.rows() != y.rows() || x.cols() != y.cols() || x.rows() != x.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "witness and target dimensions differ");
  }
  const Matrix left = y * y.adjoint();
  const Matrix right = y.adjoint() * y;
  const double norm = operator_norm(x);

  WitnessReport report;
  report.commutator_residual = (left * right - right * left).norm();
  report.reconstruction_residual = (left - right - x).norm();
  report.normalized_trace_x = normalized_trace(x).real();
  report.checks.add("witness_commutator", report.commutator_residual, tol.witness_commutator * (1.0 + norm * norm));
  report.checks.add("witness_reconstruction", report.reconstruction_residual, tol.residual * (1.0 + norm));
  return report;
}

}  // namespace selfcomm

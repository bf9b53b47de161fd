#include "selfcomm/ii1.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <string>

namespace selfcomm {

SpectralElement::SpectralElement(std::vector<Atom> atoms, double weight_tol) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw Error(ErrorCode::EmptyInput, "spectral element needs at least one atom");
  double total = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    const Atom& a = atoms_[i];
    if (!std::isfinite(a.alpha) || !std::isfinite(a.mu) || !(a.mu > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "atom " + std::to_string(i) + " needs finite alpha and mu > 0");
    }
    if (i > 0 && !(a.alpha > atoms_[i - 1].alpha)) {
      throw Error(ErrorCode::InvalidArgument, "atom values must be strictly increasing");
    }
    total += a.mu;
  }
  if (std::abs(total - 1.0) > weight_tol) {
    throw Error(ErrorCode::InvalidArgument, "atom weights sum to " + format_value(total));
  }
}

double SpectralElement::norm() const {
  return std::max(std::abs(atoms_.front().alpha), std::abs(atoms_.back().alpha));
}

double SpectralElement::quasitrace() const {
  double q = 0.0;
  for (const auto& a : atoms_) q += a.alpha * a.mu;
  return q;
}

// ---------------------------------------------------------------------------

DyadicApproximation quantize(const SpectralElement& elem, Index n) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "quantization order must be >= 2");
  DyadicApproximation out;
  out.n = n;
  out.source = elem.atoms();
  out.beta = elem.quasitrace();
  const double nd = static_cast<double>(n);

  Index used = 0;
  for (const auto& atom : elem.atoms()) {
    // Largest k with k/n <= mu. A product landing within 1e-9 below an
    // integer is that integer (mu = k/n stored inexactly).
    const double scaled = nd * atom.mu;
    auto k = static_cast<Index>(std::floor(scaled));
    if (static_cast<double>(k + 1) - scaled <= 1e-9) ++k;
    k = std::clamp<Index>(k, 0, n - used);
    out.counts.push_back(k);
    out.theta.push_back(static_cast<double>(k) / nd);
    out.beta_n += atom.alpha * out.theta.back();
    used += k;
  }

  out.h_diagonal = RealVector::Zero(n);
  Index slot = 0;
  for (std::size_t i = 0; i < out.counts.size(); ++i) {
    out.h_diagonal.segment(slot, out.counts[i]).setConstant(elem.atoms()[i].alpha);
    slot += out.counts[i];
  }
  out.b_diagonal = out.h_diagonal.array() + (out.beta - out.beta_n);
  return out;
}

ApproxError approx_error(const SpectralElement& elem, const DyadicApproximation& approx) {
  if (approx.source != elem.atoms()) {
    throw Error(ErrorCode::MismatchedProvenance, "approximation was quantized from a different element");
  }
  double dq = 0.0, d3 = 0.0;
  for (std::size_t i = 0; i < approx.theta.size(); ++i) {
    const Atom& a = elem.atoms()[i];
    const double gap = a.mu - approx.theta[i];
    dq += a.alpha * gap;
    d3 += a.alpha * a.alpha * gap;
  }
  return {std::abs(dq), std::cbrt(std::max(d3, 0.0))};
}

double bound_q(const SpectralElement& elem, Index n) {
  return static_cast<double>(elem.size()) * elem.norm() / static_cast<double>(n);
}

double bound_d(const SpectralElement& elem, Index n) {
  return std::cbrt(static_cast<double>(elem.size()) * elem.norm() * elem.norm() / static_cast<double>(n));
}

double refinement_distance(const SpectralElement& elem, const DyadicApproximation& approx,
                           const RealVector& slot_values) {
  if (approx.source != elem.atoms()) {
    throw Error(ErrorCode::MismatchedProvenance, "approximation was quantized from a different element");
  }
  if (slot_values.size() != approx.n) throw Error(ErrorCode::DimensionMismatch, "one value per slot expected");
  const double slot_mass = 1.0 / static_cast<double>(approx.n);

  double total = 0.0;
  Index slot = 0;
  for (std::size_t i = 0; i < approx.counts.size(); ++i) {
    const double alpha = elem.atoms()[i].alpha;
    for (Index k = 0; k < approx.counts[i]; ++k, ++slot) {
      const double diff = alpha - slot_values(slot);
      total += diff * diff * slot_mass;
    }
  }

  // Two piecewise-constant functions on the leftover region, merged.
  std::size_t atom = 0;
  double atom_left = approx.counts.empty() ? 0.0 : elem.atoms()[0].mu - approx.theta[0];
  double slot_left = slot_mass;
  while (slot < approx.n) {
    while (atom < approx.counts.size() && atom_left <= 0.0) {
      ++atom;
      if (atom < approx.counts.size()) atom_left = elem.atoms()[atom].mu - approx.theta[atom];
    }
    if (atom == approx.counts.size()) {
      // Rounding left a sliver of slot mass with no atom behind it.
      break;
    }
    const double piece = std::min(atom_left, slot_left);
    const double diff = elem.atoms()[atom].alpha - slot_values(slot);
    total += diff * diff * piece;
    atom_left -= piece;
    slot_left -= piece;
    if (slot_left <= 1e-15 * slot_mass) {
      ++slot;
      slot_left = slot_mass;
    }
  }
  return std::cbrt(std::max(total, 0.0));
}

SpectralElement discretize(std::span<const double> samples, std::size_t m) {
  if (samples.empty()) throw Error(ErrorCode::EmptyInput, "no quantile samples");
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "atom count must be >= 1");
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (!std::isfinite(samples[k])) throw Error(ErrorCode::InvalidArgument, "non-finite sample");
    if (k > 0 && samples[k] < samples[k - 1]) throw Error(ErrorCode::InvalidArgument, "samples must be nondecreasing");
  }

  // Sample k covers [k m, (k+1) m) and bin j covers [j N, (j+1) N) in units of
  // 1 / (N m), so overlaps are exact integers.
  const std::size_t total = samples.size();
  std::vector<double> means(m, 0.0);
  double sample_sum = 0.0;
  double scale = 0.0;
  for (std::size_t k = 0; k < total; ++k) {
    sample_sum += samples[k];
    scale = std::max(scale, std::abs(samples[k]));
    const std::size_t lo = k * m, hi = (k + 1) * m;
    for (std::size_t j = lo / total; j < m && j * total < hi; ++j) {
      const std::size_t overlap = std::min(hi, (j + 1) * total) - std::max(lo, j * total);
      means[j] += static_cast<double>(overlap) * samples[k];
    }
  }
  for (auto& mean : means) mean /= static_cast<double>(total);

  std::vector<Atom> atoms;
  std::vector<std::size_t> bins;
  for (double mean : means) {
    if (!atoms.empty() && std::abs(mean - atoms.back().alpha) <= 1e-12 * (1.0 + scale)) {
      const double b = static_cast<double>(bins.back());
      atoms.back().alpha = (atoms.back().alpha * b + mean) / (b + 1.0);
      ++bins.back();
    } else {
      atoms.push_back({mean, 0.0});
      bins.push_back(1);
    }
  }
  double q = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    atoms[i].mu = static_cast<double>(bins[i]) / static_cast<double>(m);
    q += atoms[i].alpha * atoms[i].mu;
  }
  const double shift = sample_sum / static_cast<double>(total) - q;
  for (auto& a : atoms) a.alpha += shift;
  return SpectralElement(std::move(atoms));
}

// ---------------------------------------------------------------------------

namespace {

PipelineStage run_stage(const SpectralElement& elem, Index n, const Tolerances& tol) {
  PipelineStage stage;
  stage.approx = quantize(elem, n);
  stage.decomposition = decompose_traceless_diagonal(stage.approx.b_diagonal, tol);

  ApproximationRow& row = stage.row;
  const ApproxError err = approx_error(elem, stage.approx);
  const RealVector difference = stage.decomposition.a_diagonal - stage.decomposition.b_diagonal;
  row.n = n;
  row.delta_q = err.delta_q;
  row.bound_q = bound_q(elem, n);
  row.d_quantized = err.d;
  row.d = refinement_distance(elem, stage.approx, difference);
  row.bound_d = bound_d(elem, n);
  row.max_norm = std::max(stage.decomposition.a_norm(), stage.decomposition.b_norm());
  row.norm_budget = elem.norm() + row.bound_q + 1.0 / static_cast<double>(n);
  row.decomposition_residual = (difference - stage.approx.b_diagonal).cwiseAbs().maxCoeff();
  row.decomposition_pass = verify_slots(stage.decomposition, tol).pass();
  return stage;
}

}  // namespace

std::vector<PipelineStage> pipeline(const SpectralElement& elem, std::span<const Index> schedule,
                                    const Tolerances& tol, unsigned workers) {
  tol.validate();
  if (std::abs(elem.quasitrace()) > 1e-12) {
    throw Error(ErrorCode::NotTraceless, "q(X) = " + format_value(elem.quasitrace()));
  }
  for (Index n : schedule) {
    if (n < 2) throw Error(ErrorCode::InvalidArgument, "schedule entries must be >= 2");
  }

  std::vector<PipelineStage> stages(schedule.size());
  const std::size_t batch = std::max(1u, workers);
  for (std::size_t start = 0; start < schedule.size(); start += batch) {
    const std::size_t stop = std::min(schedule.size(), start + batch);
    if (batch == 1) {
      stages[start] = run_stage(elem, schedule[start], tol);
      continue;
    }
    std::vector<std::future<PipelineStage>> running;
    for (std::size_t k = start; k < stop; ++k) {
      running.push_back(std::async(std::launch::async, run_stage, std::cref(elem), schedule[k], std::cref(tol)));
    }
    for (std::size_t k = start; k < stop; ++k) stages[k] = running[k - start].get();
  }
  return stages;
}

// ---------------------------------------------------------------------------

namespace {

template <class T>
void check_window(const UltraSequence<T>& seq) {
  if (seq.tail_window < 2 || seq.tail_window > seq.terms.size()) {
    throw Error(ErrorCode::InvalidArgument, "tail window must lie in [2, length]");
  }
}

UltraLimit tail_limit(std::span<const double> tail, double tol) {
  const auto [lo, hi] = std::minmax_element(tail.begin(), tail.end());
  double sum = 0.0;
  for (double v : tail) sum += v;
  UltraLimit out;
  out.value = sum / static_cast<double>(tail.size());
  out.oscillation = *hi - *lo;
  out.converged = out.oscillation <= tol;
  return out;
}

}  // namespace

UltraLimit ultralimit(const UltraSequence<double>& seq, double tol) {
  check_window(seq);
  return tail_limit(std::span<const double>(seq.terms).last(seq.tail_window), tol);
}

NullDifference null_difference(const UltraSequence<Matrix>& x, const UltraSequence<Matrix>& y, double tol) {
  check_window(x);
  check_window(y);
  if (x.terms.size() != y.terms.size() || x.tail_window != y.tail_window) {
    throw Error(ErrorCode::DimensionMismatch, "sequences differ in length or tail window");
  }
  const std::size_t w = x.tail_window;
  const std::size_t first = x.terms.size() - w;
  std::vector<double> dist, xn, yn;
  for (std::size_t k = first; k < x.terms.size(); ++k) {
    dist.push_back(haagerup_distance(x.terms[k], y.terms[k]));
    xn.push_back(operator_norm(x.terms[k]));
    yn.push_back(operator_norm(y.terms[k]));
  }
  NullDifference out;
  out.distance = tail_limit(dist, tol);
  out.x_norm = tail_limit(xn, tol);
  out.y_norm = tail_limit(yn, tol);
  out.is_null = out.distance.converged && std::abs(out.distance.value) <= tol;
  return out;
}

}  // namespace selfcomm

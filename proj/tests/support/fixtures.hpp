#pragma once

// Random fixtures for the test suites. Every generator takes the RNG
// explicitly; `make_rng` honours SELFCOMM_SEED so a failing run can be
// replayed with a different stream.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "selfcomm/equiv.hpp"
#include "selfcomm/ii1.hpp"
#include "selfcomm/spectral.hpp"

namespace selfcomm::testing {

using Rng = std::mt19937_64;

inline std::uint64_t seed_from_env(std::uint64_t fallback) {
  if (const char* s = std::getenv("SELFCOMM_SEED")) {
    try {
      return std::stoull(s);
    } catch (...) {
    }
  }
  return fallback;
}

/// `salt` keeps suites independent when they share a seed.
inline Rng make_rng(std::uint64_t salt) { return Rng(seed_from_env(20240601) ^ (salt * 0x9E3779B97F4A7C15ULL)); }

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline Matrix random_complex(Rng& rng, Index rows, Index cols) {
  std::normal_distribution<double> normal;
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = Complex(normal(rng), normal(rng));
  }
  return m;
}

inline HermitianMatrix random_hermitian(Rng& rng, Index n) {
  const Matrix g = random_complex(rng, n, n);
  return HermitianMatrix(Matrix((g + g.adjoint()) / 2.0));
}

/// X0 - (trace/n) I for a random Hermitian X0.
inline HermitianMatrix random_traceless(Rng& rng, Index n) {
  const Matrix g = random_complex(rng, n, n);
  Matrix h = (g + g.adjoint()) / 2.0;
  const Complex shift = h.trace() / static_cast<double>(n);
  h -= shift.real() * Matrix::Identity(n, n);
  return HermitianMatrix(std::move(h));
}

/// Haar-distributed unitary (QR of a Ginibre matrix with the phase fix).
inline Matrix random_unitary(Rng& rng, Index n) {
  const Matrix g = random_complex(rng, n, n);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index k = 0; k < n; ++k) {
    const Complex d = r(k, k);
    if (std::abs(d) > 0) q.col(k) *= d / std::abs(d);
  }
  return q;
}

/// V diag(values) V* for a random unitary V.
inline HermitianMatrix with_spectrum(Rng& rng, const RealVector& values) {
  const Matrix v = random_unitary(rng, values.size());
  Matrix m = v * values.cast<Complex>().asDiagonal() * v.adjoint();
  m = (m + m.adjoint()) / 2.0;
  return HermitianMatrix(std::move(m));
}

inline Projection random_projection(Rng& rng, Index n, Index rank) {
  const Matrix v = random_unitary(rng, n);
  Matrix p = v.leftCols(rank) * v.leftCols(rank).adjoint();
  p = (p + p.adjoint()) / 2.0;
  return Projection(std::move(p));
}

/// Distinct sorted values with random positive weights. With `traceless`
/// the values are shifted so the quasitrace vanishes.
inline SpectralElement random_element(Rng& rng, std::size_t m, bool traceless) {
  std::normal_distribution<double> normal;
  std::vector<double> values(m), weights(m);
  for (;;) {
    for (auto& v : values) v = 2.0 * normal(rng);
    std::sort(values.begin(), values.end());
    if (std::adjacent_find(values.begin(), values.end()) == values.end()) break;
  }
  double total = 0.0;
  for (auto& w : weights) total += (w = uniform(rng, 0.05, 1.0));
  std::vector<Atom> atoms;
  double q = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    atoms.push_back({values[i], weights[i] / total});
    q += atoms.back().alpha * atoms.back().mu;
  }
  if (traceless) {
    for (auto& a : atoms) a.alpha -= q;
    // One more pass absorbs the rounding left by the first shift.
    double rest = 0.0;
    for (const auto& a : atoms) rest += a.alpha * a.mu;
    for (auto& a : atoms) a.alpha -= rest;
  }
  double sum = 0.0;
  for (const auto& a : atoms) sum += a.mu;
  atoms.back().mu += 1.0 - sum;
  return SpectralElement(std::move(atoms));
}

/// Weights k_i / denominator with every k_i >= 1.
inline SpectralElement random_rational_element(Rng& rng, std::size_t m, Index denominator) {
  std::vector<Index> cuts;
  for (Index k = 1; k < denominator; ++k) cuts.push_back(k);
  std::shuffle(cuts.begin(), cuts.end(), rng);
  cuts.resize(m - 1);
  std::sort(cuts.begin(), cuts.end());
  cuts.insert(cuts.begin(), 0);
  cuts.push_back(denominator);

  std::normal_distribution<double> normal;
  std::vector<double> values(m);
  for (;;) {
    for (auto& v : values) v = 2.0 * normal(rng);
    std::sort(values.begin(), values.end());
    if (std::adjacent_find(values.begin(), values.end()) == values.end()) break;
  }
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < m; ++i) {
    atoms.push_back({values[i], static_cast<double>(cuts[i + 1] - cuts[i]) / static_cast<double>(denominator)});
  }
  return SpectralElement(std::move(atoms), 1e-12);
}

/// Diagonal tuple satisfying the six assembly conditions by slot design:
/// Y1, Y2 = -Y1, S1 ~ Y1, S2 ~ Y2 live on disjoint blocks of P; B2 equals
/// Y1 + Y2 inside P plus extra values outside; A2 copies B2's values outside
/// P; A1 and B1 share values on blocks off P (A1 may sit on B2's extra block).
/// With `conjugate` the whole tuple is rotated by a random unitary.
inline AssemblyTuple random_tuple(Rng& rng, bool conjugate) {
  const int y = uniform_int(rng, 0, 3);
  const int extra_p = uniform_int(rng, 0, 2);
  const int b2_extra = uniform_int(rng, 0, 3);
  const int a = uniform_int(rng, 0, 3);
  const bool a1_on_b2 = a <= b2_extra && uniform_int(rng, 0, 1) == 1;

  int next = 0;
  auto block = [&](int size) {
    std::vector<int> slots(static_cast<std::size_t>(size));
    std::iota(slots.begin(), slots.end(), next);
    next += size;
    return slots;
  };
  const auto y1_slots = block(y), y2_slots = block(y), s1_slots = block(y), s2_slots = block(y);
  const auto p_extra = block(extra_p);
  const auto b2_slots = block(b2_extra);
  const auto a2_slots = block(2 * y + b2_extra);
  const auto a1_slots = a1_on_b2 ? std::vector<int>(b2_slots.begin(), b2_slots.begin() + a) : block(a);
  const auto b1_slots = block(a);
  if (next == 0) next = 1;
  const Index n = next;

  std::normal_distribution<double> normal;
  auto values = [&](int size) {
    std::vector<double> v(static_cast<std::size_t>(size));
    for (auto& x : v) x = normal(rng);
    return v;
  };
  const auto yv = values(y), b2v = values(b2_extra), av = values(a);

  std::vector<RealVector> d(8, RealVector::Zero(n));  // a1 a2 b1 b2 y1 y2 s1 s2
  RealVector pd = RealVector::Zero(n);
  auto place = [](RealVector& target, const std::vector<int>& slots, const std::vector<double>& v, double sign,
                  bool reverse) {
    for (std::size_t k = 0; k < slots.size(); ++k) {
      target(slots[k]) = sign * v[reverse ? v.size() - 1 - k : k];
    }
  };
  place(d[4], y1_slots, yv, 1.0, false);
  place(d[5], y2_slots, yv, -1.0, false);
  place(d[6], s1_slots, yv, 1.0, true);
  place(d[7], s2_slots, yv, -1.0, true);
  place(d[3], y1_slots, yv, 1.0, false);
  place(d[3], y2_slots, yv, -1.0, false);
  place(d[3], b2_slots, b2v, 1.0, false);
  std::vector<double> b2_all;
  for (double v : yv) b2_all.push_back(v);
  for (double v : yv) b2_all.push_back(-v);
  for (double v : b2v) b2_all.push_back(v);
  place(d[1], a2_slots, b2_all, 1.0, true);
  place(d[0], a1_slots, av, 1.0, false);
  place(d[2], b1_slots, av, 1.0, true);
  for (const auto* slots : {&y1_slots, &y2_slots, &s1_slots, &s2_slots, &p_extra}) {
    for (int s : *slots) pd(s) = 1.0;
  }

  // Random slot relabelling, then an optional unitary rotation.
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  const Matrix v = conjugate ? random_unitary(rng, n) : Matrix(Matrix::Identity(n, n));
  auto realize = [&](const RealVector& diag) {
    RealVector shuffled(n);
    for (Index s = 0; s < n; ++s) shuffled(perm[static_cast<std::size_t>(s)]) = diag(s);
    Matrix m = v * shuffled.cast<Complex>().asDiagonal() * v.adjoint();
    return Matrix((m + m.adjoint()) / 2.0);
  };
  auto h = [&](int k) { return HermitianMatrix(realize(d[static_cast<std::size_t>(k)])); };
  return AssemblyTuple{h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), Projection(realize(pd))};
}

}  // namespace selfcomm::testing

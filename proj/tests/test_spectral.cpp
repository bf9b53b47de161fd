#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "selfcomm/spectral.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace selfcomm;
using selfcomm::testing::make_rng;

namespace {

HermitianMatrix diag(std::initializer_list<double> v) {
  return HermitianMatrix::diagonal(Eigen::Map<const RealVector>(v.begin(), static_cast<Index>(v.size())));
}

Matrix dense(std::initializer_list<std::initializer_list<Complex>> rows) {
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.begin()->size()));
  Index i = 0;
  for (const auto& r : rows) {
    Index j = 0;
    for (Complex v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("hermitian matrix rejects non-hermitian, empty and non-finite input") {
  CHECK(code_of([] { HermitianMatrix(dense({{0, 1}, {0, 0}})); }) == ErrorCode::NotHermitian);
  CHECK(code_of([] { HermitianMatrix(Matrix(0, 0)); }) == ErrorCode::NotHermitian);
  CHECK(code_of([] { HermitianMatrix(Matrix(2, 3)); }) == ErrorCode::NotHermitian);
  CHECK(code_of([] { HermitianMatrix(dense({{std::nan(""), 0}, {0, 1}})); }) == ErrorCode::NotHermitian);
  CHECK_NOTHROW(HermitianMatrix(dense({{1, Complex(0, 1)}, {Complex(0, -1), 2}})));
}

TEST_CASE("projection validates idempotence and reports its dimension") {
  const Projection p = Projection::coordinate(4, 2);
  CHECK(p.rank() == 1);
  CHECK(p.dimension() == doctest::Approx(0.25));
  CHECK(Projection::identity(3).rank() == 3);
  CHECK(Projection::zero(3).rank() == 0);
  CHECK(code_of([] { Projection(dense({{2, 0}, {0, 0}})); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("eigendecompose on small diagonals") {
  const auto zero = eigendecompose(diag({0}));
  CHECK(zero.size() == 1);
  CHECK(zero.values[0] == 0.0);
  CHECK(zero.multiplicities[0] == 1);

  const auto d = eigendecompose(diag({2, -1, -1}));
  REQUIRE(d.size() == 2);
  CHECK(d.values[0] == doctest::Approx(-1));
  CHECK(d.values[1] == doctest::Approx(2));
  CHECK(d.multiplicities == std::vector<Index>{2, 1});
  CHECK(d.measure(0) == doctest::Approx(2.0 / 3.0));
  CHECK(d.cluster_of(2) == 1);
  CHECK(d.projection(1).rank() == 1);
}

TEST_CASE("eigendecompose recovers a planted spectrum") {
  auto rng = make_rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = selfcomm::testing::uniform_int(rng, 2, 12);
    RealVector planted(n);
    for (Index k = 0; k < n; ++k) planted(k) = std::round(selfcomm::testing::uniform(rng, -4, 4));
    const HermitianMatrix x = selfcomm::testing::with_spectrum(rng, planted);
    const auto d = eigendecompose(x);

    std::vector<double> expected(planted.data(), planted.data() + n), got;
    for (std::size_t i = 0; i < d.size(); ++i) {
      for (Index k = 0; k < d.multiplicities[i]; ++k) got.push_back(d.values[i]);
    }
    std::sort(expected.begin(), expected.end());
    REQUIRE(got.size() == expected.size());
    for (std::size_t k = 0; k < got.size(); ++k) CHECK(std::abs(got[k] - expected[k]) <= 1e-10);
    CHECK((d.basis.adjoint() * d.basis - Matrix::Identity(n, n)).norm() <= 1e-10);

    // Spectral projections of distinct clusters are orthogonal.
    for (std::size_t i = 0; i + 1 < d.size(); ++i) {
      CHECK(is_orthogonal(d.projection(i).matrix(), d.projection(i + 1).matrix()));
    }
  }
}

TEST_CASE("eigendecompose flags clusters wider than the gap") {
  // Chain of eigenvalues each 0.6e-8 apart: linked, but spread 1.2e-8 > gap.
  Tolerances tol;
  tol.cluster_gap = 1e-8;
  CHECK(code_of([&] { eigendecompose(diag({0.0, 0.6e-8, 1.2e-8}), tol); }) == ErrorCode::ClusterAmbiguity);
  CHECK_NOTHROW(eigendecompose(diag({0.0, 0.5e-8, 1.0}), tol));
}

TEST_CASE("normalized trace") {
  CHECK(normalized_trace(HermitianMatrix::identity(2)) == 1.0);
  CHECK(normalized_trace(diag({2, -1, -1})) == doctest::Approx(0.0));
  auto rng = make_rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto y = selfcomm::testing::random_hermitian(rng, 7);
    const auto spec = oracle::sorted_spectrum(y.matrix());
    double sum = 0.0;
    for (double v : spec) sum += v;
    CHECK(std::abs(normalized_trace(y) - sum / 7.0) <= 1e-12 * (1 + y.norm()));
  }
}

TEST_CASE("quasitrace axioms hold for the normalized trace") {
  std::vector<std::pair<Matrix, Matrix>> samples{{diag({1, 0}).matrix(), diag({0, 1}).matrix()}};
  auto report = check_quasitrace_axioms(samples);
  CHECK(report.samples == 1);

  const Matrix nilpotent = dense({{0, 1}, {0, 0}});
  CHECK(normalized_trace(Matrix(nilpotent * nilpotent.adjoint())).real() == doctest::Approx(0.5));
  CHECK(normalized_trace(Matrix(nilpotent.adjoint() * nilpotent)).real() == doctest::Approx(0.5));

  auto rng = make_rng(3);
  samples.clear();
  for (int k = 0; k < 100; ++k) {
    const Index n = selfcomm::testing::uniform_int(rng, 1, 8);
    samples.emplace_back(selfcomm::testing::random_complex(rng, n, n), selfcomm::testing::random_complex(rng, n, n));
  }
  report = check_quasitrace_axioms(samples, 1e-10);
  CHECK(report.samples == 100);
  for (double r : report.max_residual) CHECK(r <= 1e-10);
  CHECK(report.min_positive_part >= 0.0);
}

TEST_CASE("haagerup distance") {
  auto rng = make_rng(4);
  const Matrix x = selfcomm::testing::random_complex(rng, 4, 4);
  CHECK(haagerup_distance(x, x) == 0.0);
  CHECK(haagerup_distance(diag({1, -1}).matrix(), Matrix::Zero(2, 2)) == doctest::Approx(1.0));
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = selfcomm::testing::uniform_int(rng, 1, 8);
    const Matrix a = selfcomm::testing::random_complex(rng, n, n);
    const Matrix b = selfcomm::testing::random_complex(rng, n, n);
    CHECK(haagerup_distance(a, b) <= std::cbrt(2.0) * std::pow(oracle::opnorm(a - b), 2.0 / 3.0) + 1e-9);
  }
}

TEST_CASE("orthogonality predicate") {
  CHECK(is_orthogonal(diag({1, 0}).matrix(), diag({0, 1}).matrix()));
  CHECK_FALSE(is_orthogonal(diag({1, 0}).matrix(), diag({1, 0}).matrix()));
}

TEST_CASE("support projection") {
  const Projection s = support_projection(diag({2, 0, -1}));
  CHECK((s.matrix() - diag({1, 0, 1}).matrix()).norm() <= 1e-12);
  CHECK(support_projection(HermitianMatrix::zero(3)).rank() == 0);

  auto rng = make_rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    RealVector v(6);
    for (Index k = 0; k < 6; ++k) v(k) = k % 2 ? 0.0 : selfcomm::testing::uniform(rng, 0.5, 2.0);
    const auto a = selfcomm::testing::with_spectrum(rng, v);
    const Projection p = support_projection(a);
    CHECK(p.rank() == 3);
    CHECK((p.matrix() * a.matrix() - a.matrix()).norm() <= 1e-9);
  }
}

TEST_CASE("join of projections") {
  const std::vector<Projection> pair{Projection(diag({1, 0}).matrix()), Projection(diag({0, 1}).matrix())};
  CHECK(join_projections(pair).rank() == 2);
  const std::vector<Projection> single{Projection::coordinate(3, 1)};
  CHECK((join_projections(single).matrix() - single[0].matrix()).norm() <= 1e-12);
  CHECK(code_of([] { join_projections(std::vector<Projection>{}); }) == ErrorCode::InvalidArgument);

  // Commuting family: coordinate projections conjugated by one unitary.
  auto rng = make_rng(6);
  const Matrix v = selfcomm::testing::random_unitary(rng, 5);
  std::vector<Projection> family;
  Matrix sum = Matrix::Zero(5, 5);
  for (Index k : {0, 2, 3}) {
    Matrix e = v * Projection::coordinate(5, k).matrix() * v.adjoint();
    e = (e + e.adjoint()) / 2.0;
    sum += e;
    family.emplace_back(e);
  }
  const Projection joined = join_projections(family);
  const Projection oracle_support = support_projection(HermitianMatrix(Matrix((sum + sum.adjoint()) / 2.0)));
  CHECK((joined.matrix() - oracle_support.matrix()).norm() <= 1e-9);
  CHECK(joined.rank() == 3);
}

TEST_CASE("amplification") {
  CHECK((amplify(HermitianMatrix::identity(2), 3).matrix() - Matrix::Identity(6, 6)).norm() == 0.0);
  CHECK(normalized_trace(amplify(diag({1, -1}), 2)) == doctest::Approx(0.0));
  const Matrix a = dense({{1, 2}, {3, 4}});
  const Matrix amp = amplify(a, 2);
  CHECK(amp(0, 0) == Complex(1));
  CHECK(amp(1, 1) == Complex(1));
  CHECK(amp(0, 2) == Complex(2));
  CHECK(amp(0, 1) == Complex(0));

  auto rng = make_rng(7);
  for (Index m : {2, 3, 4}) {
    RealVector v(4);
    v << 1.0, 0.0, -2.0, 0.0;
    const auto x = selfcomm::testing::with_spectrum(rng, v);
    const Projection lhs = support_projection(amplify(x, m));
    const Projection rhs = amplify(support_projection(x), m);
    CHECK((lhs.matrix() - rhs.matrix()).norm() <= 1e-9);
    CHECK(amplify(support_projection(x), m).dimension() == doctest::Approx(0.5));
  }
}

TEST_CASE("exact unitary equivalence") {
  const auto u = unitary_equiv_exact(diag({1, 0}), diag({0, 1}));
  REQUIRE(u.has_value());
  CHECK(std::abs(std::abs((*u)(0, 1)) - 1.0) <= 1e-12);
  CHECK(std::abs(std::abs((*u)(1, 0)) - 1.0) <= 1e-12);
  CHECK(std::abs((*u)(0, 0)) <= 1e-12);

  const Matrix nilpotent = dense({{0, 1}, {0, 0}});
  const HermitianMatrix left(Matrix(nilpotent * nilpotent.adjoint()));
  const HermitianMatrix right(Matrix(nilpotent.adjoint() * nilpotent));
  CHECK(unitary_equiv_exact(left, right).has_value());

  CHECK_FALSE(unitary_equiv_exact(diag({1, 0}), diag({0, 0})).has_value());

  auto rng = make_rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix x = selfcomm::testing::random_complex(rng, 6, 6);
    const HermitianMatrix a(Matrix((x * x.adjoint() + (x * x.adjoint()).adjoint()) / 2.0));
    const HermitianMatrix b(Matrix((x.adjoint() * x + (x.adjoint() * x).adjoint()) / 2.0));
    const auto w = unitary_equiv_exact(a, b);
    REQUIRE(w.has_value());
    CHECK((*w * a.matrix() * w->adjoint() - b.matrix()).norm() <= 1e-8 * (1 + a.norm()));
  }
}

#include <doctest.h>

#include "covsep/errors.hpp"
#include "covsep/numerics.hpp"
#include "covsep/quantum_state.hpp"
#include "test_support.hpp"

using namespace covsep;

TEST_CASE("eigh: identity, diagonal and Pauli-x") {
  auto id = eigh(CMatrix(CMatrix::Identity(3, 3)));
  for (int i = 0; i < 3; ++i) CHECK(id.values(i) == doctest::Approx(1.0).epsilon(1e-14));

  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = -1.0;
  auto de = eigh(d);
  CHECK(de.values(0) == doctest::Approx(-1.0));
  CHECK(de.values(1) == doctest::Approx(2.0));

  auto x = eigh(CMatrix(oracle::paulis()[0]));
  CHECK(x.values(0) == doctest::Approx(-1.0));
  CHECK(x.values(1) == doctest::Approx(1.0));
  // (|0> - |1>)/sqrt2 up to phase
  const CVector v0 = x.vectors.col(0);
  CHECK(std::abs(v0(0) + v0(1)) < 1e-12);
  CHECK(std::abs(std::abs(v0(0)) - std::sqrt(0.5)) < 1e-12);
  const CVector v1 = x.vectors.col(1);
  CHECK(std::abs(v1(0) - v1(1)) < 1e-12);
}

TEST_CASE("eigh: random Hermitian reconstruction and Jacobi cross-check") {
  std::mt19937_64 rng(42);
  for (int n : {1, 2, 3, 5, 9, 16}) {
    const CMatrix m = oracle::random_hermitian(n, rng);
    const auto e = eigh(m);
    const CMatrix rec = e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint();
    CHECK((rec - m).norm() <= 1e-10 * m.norm());
    for (int i = 1; i < n; ++i) CHECK(e.values(i - 1) <= e.values(i));
    const auto ref = oracle::hermitian_eigenvalues(m);
    for (int i = 0; i < n; ++i) CHECK(std::abs(e.values(i) - ref[i]) < 1e-9);
  }
}

TEST_CASE("eigh rejects non-Hermitian input") {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 1) = 1.0;
  CHECK_THROWS_AS(eigh(m), ValidationError);
  RMatrix r = RMatrix::Zero(2, 2);
  r(0, 1) = 1e-6;
  CHECK_THROWS_AS(eigh(r), ValidationError);
}

TEST_CASE("svd: zero, diagonal, Bell realignment") {
  const auto z = svd(CMatrix(CMatrix::Zero(3, 2)));
  CHECK(z.singular_values.size() == 2);
  CHECK(z.singular_values.cwiseAbs().maxCoeff() == 0.0);

  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 3.0;
  d(1, 1) = 4.0;
  const auto ds = svd(d);
  CHECK(ds.singular_values(0) == doctest::Approx(4.0));
  CHECK(ds.singular_values(1) == doctest::Approx(3.0));

  const auto bell = maximally_entangled(2);
  const auto s = svd(oracle::realign(bell.matrix(), 2, 2));
  for (int i = 0; i < 4; ++i) CHECK(s.singular_values(i) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("svd: reconstruction and singular values against eigenvalues of m^H m") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (auto [r, c] : {std::pair{3, 5}, {4, 4}, {9, 4}, {1, 3}}) {
    CMatrix m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = Complex(g(rng), g(rng));
    const auto s = svd(m);
    const CMatrix rec = s.u * s.singular_values.cast<Complex>().asDiagonal() * s.v.adjoint();
    CHECK((rec - m).norm() <= 1e-10 * m.norm());
    for (Eigen::Index i = 1; i < s.singular_values.size(); ++i) {
      CHECK(s.singular_values(i - 1) >= s.singular_values(i));
    }
    const auto ev = oracle::hermitian_eigenvalues(m.adjoint() * m);  // ascending, c of them
    for (Eigen::Index i = 0; i < s.singular_values.size(); ++i) {
      CHECK(std::abs(s.singular_values(i) - std::sqrt(std::max(0.0, ev[c - 1 - i]))) < 1e-8);
    }
  }
}

TEST_CASE("inv_sqrt_psd") {
  const CMatrix id = CMatrix::Identity(3, 3);
  CHECK((inv_sqrt_psd(id) - id).norm() < 1e-12);

  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 4.0;
  d(1, 1) = 1.0;
  const CMatrix r = inv_sqrt_psd(d);
  CHECK(std::abs(r(0, 0) - 0.5) < 1e-14);
  CHECK(std::abs(r(1, 1) - 1.0) < 1e-14);
  CHECK(std::abs(r(0, 1)) < 1e-14);

  std::mt19937_64 rng(3);
  const CMatrix a = oracle::random_hermitian(4, rng);
  const CMatrix m = a * a.adjoint() + 0.1 * CMatrix::Identity(4, 4);
  const CMatrix rm = inv_sqrt_psd(m);
  CHECK((rm * m * rm - CMatrix::Identity(4, 4)).norm() <= 1e-8);

  CMatrix nearly = CMatrix::Zero(2, 2);
  nearly(0, 0) = 1.0;
  nearly(1, 1) = 1e-14;
  CHECK_THROWS_AS(inv_sqrt_psd(nearly, 1e-10), SingularReducedState);
  try {
    inv_sqrt_psd(nearly, 1e-10);
  } catch (const SingularReducedState& e) {
    CHECK(e.min_eigenvalue() == doctest::Approx(1e-14));
  }
}

TEST_CASE("project_psd") {
  std::mt19937_64 rng(5);
  const CMatrix a = oracle::random_hermitian(3, rng);
  const CMatrix psd = a * a.adjoint();
  CHECK((project_psd(psd) - psd).norm() < 1e-12);

  RMatrix d = RMatrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = -2.0;
  const RMatrix pd = project_psd(d);
  CHECK(std::abs(pd(0, 0) - 1.0) < 1e-14);
  CHECK(std::abs(pd(1, 1)) < 1e-14);

  RVector v(3);
  v << 1.0, -2.0, 0.5;
  CHECK(project_psd(RMatrix(-v * v.transpose())).norm() < 1e-12);

  for (int k = 0; k < 50; ++k) {
    const CMatrix m = oracle::random_hermitian(5, rng);
    CHECK(min_eigenvalue(project_psd(m)) >= -1e-12);
  }
}

TEST_CASE("trace norm and kron") {
  std::mt19937_64 rng(9);
  const CMatrix m = oracle::random_hermitian(4, rng);
  CHECK(trace_norm(m) == doctest::Approx(oracle::sum_singular_values(m)).epsilon(1e-10));
  const CMatrix a = oracle::random_hermitian(2, rng), b = oracle::random_hermitian(3, rng);
  CHECK((kron(a, b) - oracle::kron(a, b)).norm() < 1e-14);
}

TEST_CASE("hermitian_part is exact on Hermitian input") {
  std::mt19937_64 rng(11);
  const CMatrix m = oracle::random_hermitian(4, rng);
  CHECK((hermitian_part(m) - m).cwiseAbs().maxCoeff() == 0.0);
  CHECK(is_hermitian(m));
  CMatrix bad = m;
  bad(0, 1) += 1e-6;
  CHECK_FALSE(is_hermitian(bad));
}

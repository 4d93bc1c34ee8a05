#include <doctest.h>

#include "covsep/covariance.hpp"
#include "covsep/errors.hpp"
#include "covsep/quantum_state.hpp"
#include "test_support.hpp"

using namespace covsep;

namespace {

CMatrix ket0_projector() {
  CMatrix p = CMatrix::Zero(2, 2);
  p(0, 0) = 1.0;
  return p;
}

}  // namespace

TEST_CASE("covariance matrix of single-qubit states") {
  const auto b = pauli_basis();
  const RMatrix mixed = covariance_matrix(CMatrix::Identity(2, 2) / 2.0, b.observables);
  RVector expect(4);
  expect << 0.0, 0.5, 0.5, 0.5;
  CHECK((mixed - RMatrix(expect.asDiagonal())).norm() < 1e-15);

  const RMatrix pure = covariance_matrix(ket0_projector(), b.observables);
  const auto ev = oracle::jacobi_eigenvalues(pure);
  CHECK(std::abs(ev[0]) < 1e-14);
  CHECK(std::abs(ev[1]) < 1e-14);
  CHECK(ev[2] == doctest::Approx(0.5));
  CHECK(ev[3] == doctest::Approx(0.5));
}

TEST_CASE("commuting projectors give classical variances") {
  Rng rng(3);
  const auto rho = random_density_matrix(3, 2, 6, rng);
  const auto e = eigh(rho.matrix());
  std::vector<CMatrix> projectors;
  for (int i = 0; i < 6; ++i) projectors.push_back(e.vectors.col(i) * e.vectors.col(i).adjoint());
  const RMatrix g = covariance_matrix(rho.matrix(), projectors);
  for (int i = 0; i < 6; ++i) {
    const double p = e.values(i);
    CHECK(std::abs(g(i, i) - p * (1 - p)) < 1e-12);
  }
}

TEST_CASE("covariance matrix against direct moments") {
  Rng rng(5);
  const auto rho = random_density_matrix(2, 3, 6, rng);
  const auto ops = local_observables(gell_mann_basis(2).observables, gell_mann_basis(3).observables);
  const RMatrix g = covariance_matrix(rho.matrix(), ops);
  CHECK((g - oracle::covariance(rho.matrix(), ops)).norm() < 1e-13);
  CHECK(symmetry_defect(g) == 0.0);
  CHECK(oracle::jacobi_eigenvalues(g).front() >= -1e-9);
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const double m = oracle::expect(rho.matrix(), ops[i]);
    CHECK(std::abs(g(i, i) - (oracle::expect(rho.matrix(), ops[i] * ops[i]) - m * m)) < 1e-13);
  }
  std::vector<CMatrix> wrong{CMatrix::Identity(3, 3)};
  CHECK_THROWS_AS(covariance_matrix(rho.matrix(), wrong), ValidationError);
}

TEST_CASE("bipartite block form") {
  Rng rng(9);
  for (auto [da, db] : {std::pair{2, 2}, {2, 3}, {3, 3}}) {
    const auto rho = random_density_matrix(da, db, da * db, rng);
    const auto ba = gell_mann_basis(da), bb = gell_mann_basis(db);
    const auto cm = bipartite_cm(rho, ba, bb);
    const auto full = oracle::covariance(rho.matrix(), local_observables(ba.observables, bb.observables));
    CHECK((cm.assembled() - full).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((cm.block_a - covariance_matrix(partial_trace(rho, Subsystem::A), ba.observables)).norm() <
          1e-13);
    CHECK((cm.block_b - covariance_matrix(partial_trace(rho, Subsystem::B), bb.observables)).norm() <
          1e-13);
    CHECK(oracle::jacobi_eigenvalues(cm.assembled()).front() >= -1e-9);
    // identity rows of C vanish
    CHECK(cm.block_c.row(0).norm() < 1e-14);
    CHECK(cm.block_c.col(0).norm() < 1e-14);
  }
}

TEST_CASE("block C of product, Bell and maximally mixed states") {
  Rng rng(1);
  const CMatrix ra = partial_trace(random_density_matrix(2, 2, 4, rng), Subsystem::A);
  const CMatrix rb = partial_trace(random_density_matrix(3, 3, 9, rng), Subsystem::A);
  const auto prod = bipartite_cm(product_state(ra, rb), gell_mann_basis(2), gell_mann_basis(3));
  CHECK(prod.block_c.cwiseAbs().maxCoeff() < 1e-15);

  const auto bell = bipartite_cm(maximally_entangled(2), pauli_basis(), pauli_basis());
  RMatrix expect = RMatrix::Zero(3, 3);
  expect(0, 0) = 0.5;
  expect(1, 1) = -0.5;
  expect(2, 2) = 0.5;
  CHECK((bell.block_c.bottomRightCorner(3, 3) - expect).norm() < 1e-14);

  const auto mm = bipartite_cm(maximally_mixed(3, 3), gell_mann_basis(3), gell_mann_basis(3));
  CHECK(mm.block_c.cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("change of basis") {
  Rng rng(21);
  const auto rho = random_density_matrix(2, 3, 6, rng);
  const auto cm = bipartite_cm(rho, gell_mann_basis(2), gell_mann_basis(3));
  const auto same = change_basis(cm, RMatrix::Identity(4, 4), RMatrix::Identity(9, 9));
  CHECK((same.assembled() - cm.assembled()).norm() < 1e-15);

  const auto doubled = change_basis(cm, 2.0 * RMatrix::Identity(4, 4), 2.0 * RMatrix::Identity(9, 9));
  CHECK((doubled.assembled() - 4.0 * cm.assembled()).norm() < 1e-14);

  const RMatrix qa = random_unitary(4, rng).real().householderQr().householderQ();
  const RMatrix qb = RMatrix::Random(9, 9).householderQr().householderQ();
  const auto rotated = change_basis(cm, qa, qb);
  const auto e1 = oracle::jacobi_eigenvalues(cm.assembled());
  const auto e2 = oracle::jacobi_eigenvalues(rotated.assembled());
  for (std::size_t i = 0; i < e1.size(); ++i) CHECK(std::abs(e1[i] - e2[i]) < 1e-10);
  // rotated observables reproduce the rotated matrix
  const auto direct = bipartite_cm(rho, rotated.observables_a, rotated.observables_b);
  CHECK((direct.assembled() - rotated.assembled()).norm() < 1e-12);

  RMatrix singular = RMatrix::Identity(4, 4);
  singular(3, 3) = 0.0;
  CHECK_THROWS_AS(change_basis(cm, singular, RMatrix::Identity(9, 9)), ValidationError);
  CHECK_THROWS_AS(change_basis(cm, RMatrix::Identity(3, 3), RMatrix::Identity(9, 9)), ValidationError);
}

TEST_CASE("diagonalising C") {
  Rng rng(13);
  for (auto [da, db] : {std::pair{2, 2}, {2, 3}, {3, 3}}) {
    const auto rho = random_density_matrix(da, db, da * db, rng);
    const auto cm = bipartite_cm(rho, gell_mann_basis(da), gell_mann_basis(db));
    const auto d = diagonalize_c(cm);
    CHECK(off_diagonal_c_norm(d.cm) < 1e-10);
    CHECK((d.mu_a * d.mu_a.transpose() - RMatrix::Identity(da * da, da * da)).norm() < 1e-12);
    CHECK((d.mu_b * d.mu_b.transpose() - RMatrix::Identity(db * db, db * db)).norm() < 1e-12);
    const auto again = change_basis(cm, d.mu_a, d.mu_b);
    CHECK((again.assembled() - d.cm.assembled()).norm() < 1e-12);
    // diagonal is the singular values of C
    const auto s = svd(cm.block_c);
    for (Eigen::Index i = 0; i < s.singular_values.size(); ++i) {
      CHECK(d.cm.block_c(i, i) >= 0.0);
      CHECK(std::abs(d.cm.block_c(i, i) - s.singular_values(i)) < 1e-12);
    }
  }
  const auto bell = bipartite_cm(maximally_entangled(2), pauli_basis(), pauli_basis());
  const auto db = diagonalize_c(bell);
  for (int i = 1; i < 4; ++i) CHECK(std::abs(db.cm.block_c(i - 1, i - 1) - 0.5) < 1e-14);
  const auto prod = diagonalize_c(bipartite_cm(maximally_mixed(2, 2), pauli_basis(), pauli_basis()));
  CHECK(prod.cm.block_c.norm() < 1e-15);
}

TEST_CASE("nonsymmetric covariance matrix") {
  const auto p = oracle::paulis();
  std::vector<CMatrix> xy{p[0], p[1]};
  const CMatrix g = nonsymmetric_cm(ket0_projector(), xy);
  // <sx sy> = <i sz> = i on |0>
  CHECK(std::abs(g(0, 1) - Complex(0, 1)) < 1e-15);
  CHECK(std::abs(g(1, 0) - Complex(0, -1)) < 1e-15);
  CHECK(std::abs(g(0, 0) - 1.0) < 1e-15);

  Rng rng(31);
  const auto rho = random_density_matrix(3, 2, 6, rng);
  const auto ops = local_observables(gell_mann_basis(3).observables, gell_mann_basis(2).observables);
  const CMatrix ns = nonsymmetric_cm(rho.matrix(), ops);
  CHECK(hermiticity_defect(ns) < 1e-14);
  CHECK(oracle::min_eigenvalue(ns) >= -1e-9);
  CHECK((ns.real() - covariance_matrix(rho.matrix(), ops)).norm() < 1e-13);

  const CMatrix mixed = nonsymmetric_cm(CMatrix::Identity(2, 2) / 2.0, pauli_basis().observables);
  CHECK(mixed.imag().norm() < 1e-15);

  std::vector<CMatrix> diag{ket0_projector(), CMatrix::Identity(2, 2) - ket0_projector()};
  const CMatrix r2 = partial_trace(rho, Subsystem::B);
  CHECK((nonsymmetric_cm(r2, diag).real() - covariance_matrix(r2, diag)).norm() < 1e-15);
  CHECK(nonsymmetric_cm(r2, diag).imag().norm() < 1e-15);
}

TEST_CASE("concavity, pure-state projector and unitary invariance") {
  Rng rng(77);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const auto ba = gell_mann_basis(2), bb = gell_mann_basis(3);
  for (int k = 0; k < 50; ++k) {
    const auto r1 = random_density_matrix(2, 3, 1 + k % 6, rng);
    const auto r2 = random_density_matrix(2, 3, 6, rng);
    const double p = unif(rng);
    const auto mix = DensityMatrix(2, 3, p * r1.matrix() + (1 - p) * r2.matrix());
    const RMatrix residual = bipartite_cm(mix, ba, bb).assembled() -
                             p * bipartite_cm(r1, ba, bb).assembled() -
                             (1 - p) * bipartite_cm(r2, ba, bb).assembled();
    CHECK(oracle::jacobi_eigenvalues(residual).front() >= -1e-9);
  }
  for (int d : {2, 3, 4}) {
    const CVector psi = random_pure_vector(d, rng);
    const RMatrix g = covariance_matrix(psi * psi.adjoint(), gell_mann_basis(d).observables);
    const RMatrix p2 = 2.0 * g;
    CHECK((p2 * p2 - p2).norm() <= 1e-8);
    CHECK(std::abs(g.trace() - (d - 1)) < 1e-10);
    const auto ev = oracle::jacobi_eigenvalues(p2);
    int rank = 0;
    for (double e : ev) rank += e > 0.5;
    CHECK(rank == 2 * (d - 1));
  }
}

#include "covsep/covariance.hpp"

#include <cmath>
#include <sstream>

#include "covsep/errors.hpp"

namespace covsep {

namespace {

void check_observables(const CMatrix& rho, std::span<const CMatrix> observables,
                       const char* what) {
  for (std::size_t k = 0; k < observables.size(); ++k) {
    if (observables[k].rows() != rho.rows() || observables[k].cols() != rho.cols()) {
      std::ostringstream os;
      os << what << ": observable " << k << " is " << observables[k].rows() << "x"
         << observables[k].cols() << " but the state is " << rho.rows() << "x" << rho.cols();
      throw ValidationError(os.str());
    }
  }
}

std::vector<Complex> means(const CMatrix& rho, std::span<const CMatrix> observables) {
  std::vector<Complex> out;
  out.reserve(observables.size());
  for (const auto& m : observables) out.push_back((rho * m).trace());
  return out;
}

RMatrix assert_invertible(const RMatrix& mu, const char* which) {
  if (mu.rows() != mu.cols()) {
    throw ValidationError(std::string("change_basis: ") + which + " must be square");
  }
  Eigen::JacobiSVD<RMatrix> solver(mu);
  const auto& s = solver.singularValues();
  if (s.size() == 0 || s(s.size() - 1) <= 1e-12 * std::max(1.0, s(0))) {
    throw ValidationError(std::string("change_basis: ") + which + " is singular");
  }
  return mu;
}

std::vector<CMatrix> transform(const RMatrix& mu, const std::vector<CMatrix>& ops) {
  std::vector<CMatrix> out;
  out.reserve(mu.rows());
  for (Eigen::Index k = 0; k < mu.rows(); ++k) {
    CMatrix acc = CMatrix::Zero(ops.front().rows(), ops.front().cols());
    for (Eigen::Index l = 0; l < mu.cols(); ++l) acc += mu(k, l) * ops[l];
    out.push_back(acc);
  }
  return out;
}

}  // namespace

RealSymmetricMatrix covariance_matrix(const CMatrix& rho, std::span<const CMatrix> observables) {
  check_observables(rho, observables, "covariance_matrix");
  const auto n = static_cast<Eigen::Index>(observables.size());
  const auto mean = means(rho, observables);
  std::vector<CMatrix> rho_m;
  rho_m.reserve(observables.size());
  for (const auto& m : observables) rho_m.push_back(rho * m);

  RMatrix gamma(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      // Tr[rho M_i M_j]; the symmetrised moment is its real part.
      const double second = (rho_m[i] * observables[j]).trace().real();
      const double value = second - mean[i].real() * mean[j].real();
      gamma(i, j) = value;
      gamma(j, i) = value;
    }
  }
  return gamma;
}

HermitianMatrix nonsymmetric_cm(const CMatrix& rho, std::span<const CMatrix> observables) {
  check_observables(rho, observables, "nonsymmetric_cm");
  const auto n = static_cast<Eigen::Index>(observables.size());
  const auto mean = means(rho, observables);
  CMatrix gamma(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      gamma(i, j) = (rho * observables[i] * observables[j]).trace() -
                    Complex(mean[i].real() * mean[j].real(), 0.0);
    }
  }
  return hermitian_part(gamma);
}

RealSymmetricMatrix BlockCovarianceMatrix::assembled() const {
  const auto na = block_a.rows();
  const auto nb = block_b.rows();
  RMatrix gamma(na + nb, na + nb);
  gamma.topLeftCorner(na, na) = block_a;
  gamma.topRightCorner(na, nb) = block_c;
  gamma.bottomLeftCorner(nb, na) = block_c.transpose();
  gamma.bottomRightCorner(nb, nb) = block_b;
  return gamma;
}

std::vector<CMatrix> local_observables(std::span<const CMatrix> observables_a,
                                       std::span<const CMatrix> observables_b) {
  if (observables_a.empty() || observables_b.empty()) {
    throw ValidationError("local_observables: both observable lists must be non-empty");
  }
  const auto da = observables_a.front().rows();
  const auto db = observables_b.front().rows();
  const CMatrix id_a = CMatrix::Identity(da, da);
  const CMatrix id_b = CMatrix::Identity(db, db);
  std::vector<CMatrix> out;
  out.reserve(observables_a.size() + observables_b.size());
  for (const auto& a : observables_a) out.push_back(kron(a, id_b));
  for (const auto& b : observables_b) out.push_back(kron(id_a, b));
  return out;
}

RMatrix correlation_tensor(const DensityMatrix& rho, std::span<const CMatrix> observables_a,
                           std::span<const CMatrix> observables_b) {
  const int da = rho.dim_a();
  const int db = rho.dim_b();
  const auto na = static_cast<Eigen::Index>(observables_a.size());
  const auto nb = static_cast<Eigen::Index>(observables_b.size());
  RMatrix t(na, nb);
  for (Eigen::Index i = 0; i < na; ++i) {
    // Tr_A[rho (A_i (x) 1)] as a d_B x d_B operator, then contract with each B_j.
    CMatrix conditional = CMatrix::Zero(db, db);
    const CMatrix& a = observables_a[i];
    for (int p = 0; p < da; ++p)
      for (int q = 0; q < da; ++q) {
        if (a(q, p) == Complex(0.0, 0.0)) continue;
        conditional += a(q, p) * rho.matrix().block(p * db, q * db, db, db);
      }
    for (Eigen::Index j = 0; j < nb; ++j) {
      t(i, j) = (conditional * observables_b[j]).trace().real();
    }
  }
  return t;
}

BlockCovarianceMatrix bipartite_cm(const DensityMatrix& rho, std::span<const CMatrix> observables_a,
                                   std::span<const CMatrix> observables_b) {
  for (const auto& a : observables_a) {
    if (a.rows() != rho.dim_a() || a.cols() != rho.dim_a())
      throw ValidationError("bipartite_cm: A-side observable does not match d_A");
  }
  for (const auto& b : observables_b) {
    if (b.rows() != rho.dim_b() || b.cols() != rho.dim_b())
      throw ValidationError("bipartite_cm: B-side observable does not match d_B");
  }
  const CMatrix rho_a = partial_trace(rho, Subsystem::A);
  const CMatrix rho_b = partial_trace(rho, Subsystem::B);

  BlockCovarianceMatrix out;
  out.block_a = covariance_matrix(rho_a, observables_a);
  out.block_b = covariance_matrix(rho_b, observables_b);
  out.observables_a.assign(observables_a.begin(), observables_a.end());
  out.observables_b.assign(observables_b.begin(), observables_b.end());

  const auto mean_a = means(rho_a, observables_a);
  const auto mean_b = means(rho_b, observables_b);
  out.block_c = correlation_tensor(rho, observables_a, observables_b);
  for (Eigen::Index i = 0; i < out.block_c.rows(); ++i)
    for (Eigen::Index j = 0; j < out.block_c.cols(); ++j)
      out.block_c(i, j) -= mean_a[i].real() * mean_b[j].real();
  return out;
}

BlockCovarianceMatrix bipartite_cm(const DensityMatrix& rho, const ObservableBasis& basis_a,
                                   const ObservableBasis& basis_b) {
  return bipartite_cm(rho, std::span<const CMatrix>(basis_a.observables),
                      std::span<const CMatrix>(basis_b.observables));
}

BlockCovarianceMatrix change_basis(const BlockCovarianceMatrix& gamma, const RMatrix& mu_a,
                                   const RMatrix& mu_b) {
  assert_invertible(mu_a, "mu_a");
  assert_invertible(mu_b, "mu_b");
  if (mu_a.rows() != gamma.block_a.rows() || mu_b.rows() != gamma.block_b.rows()) {
    throw ValidationError("change_basis: mu blocks do not match covariance block sizes");
  }
  BlockCovarianceMatrix out;
  out.block_a = symmetrized(mu_a * gamma.block_a * mu_a.transpose());
  out.block_b = symmetrized(mu_b * gamma.block_b * mu_b.transpose());
  out.block_c = mu_a * gamma.block_c * mu_b.transpose();
  if (!gamma.observables_a.empty()) out.observables_a = transform(mu_a, gamma.observables_a);
  if (!gamma.observables_b.empty()) out.observables_b = transform(mu_b, gamma.observables_b);
  return out;
}

DiagonalizedCm diagonalize_c(const BlockCovarianceMatrix& gamma) {
  const auto na = gamma.block_c.rows();
  const auto nb = gamma.block_c.cols();
  Eigen::JacobiSVD<RMatrix> solver(gamma.block_c, Eigen::ComputeFullU | Eigen::ComputeFullV);
  // C = U S V^T, so U^T C V = S. Singular values come out non-negative, so
  // no sign needs to be pushed into mu_b.
  RMatrix mu_a = solver.matrixU().transpose();
  RMatrix mu_b = solver.matrixV().transpose();
  DiagonalizedCm out{change_basis(gamma, mu_a, mu_b), std::move(mu_a), std::move(mu_b)};
  // Clean the rounding residue off the diagonal of C.
  const auto k = std::min(na, nb);
  RMatrix c = RMatrix::Zero(na, nb);
  for (Eigen::Index i = 0; i < k; ++i) c(i, i) = solver.singularValues()(i);
  out.cm.block_c = c;
  return out;
}

double off_diagonal_c_norm(const BlockCovarianceMatrix& gamma) {
  RMatrix c = gamma.block_c;
  const auto k = std::min(c.rows(), c.cols());
  for (Eigen::Index i = 0; i < k; ++i) c(i, i) = 0.0;
  return c.norm();
}

}  // namespace covsep

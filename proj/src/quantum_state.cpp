#include "covsep/quantum_state.hpp"

#include <cmath>
#include <sstream>

#include "covsep/errors.hpp"

namespace covsep {

DensityMatrix::DensityMatrix(int dim_a, int dim_b, CMatrix matrix, double tol)
    : dim_a_(dim_a), dim_b_(dim_b) {
  if (dim_a < 2 || dim_b < 2) {
    throw ValidationError("density matrix: local dimensions must be at least 2");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(dim_a) * dim_b;
  if (matrix.rows() != n || matrix.cols() != n) {
    std::ostringstream os;
    os << "density matrix: expected " << n << "x" << n << " for dims (" << dim_a << ","
       << dim_b << "), got " << matrix.rows() << "x" << matrix.cols();
    throw ValidationError(os.str());
  }
  if (!matrix.allFinite()) {
    throw ValidationError("density matrix: entries must be finite");
  }
  const double scale = std::max(1.0, matrix.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double gap = std::abs(matrix(i, j) - std::conj(matrix(j, i)));
      if (gap > tolerance::kHermiticity * scale) {
        std::ostringstream os;
        os << "density matrix: not Hermitian at entry (" << i << "," << j << "): " << matrix(i, j)
           << " vs conj of (" << j << "," << i << "): " << matrix(j, i);
        throw ValidationError(os.str());
      }
    }
  }
  matrix_ = hermitian_part(matrix);
  const double trace = matrix_.trace().real();
  if (std::abs(trace - 1.0) > tol) {
    std::ostringstream os;
    os.precision(17);
    os << "density matrix: trace " << trace << " differs from 1 by more than " << tol;
    throw ValidationError(os.str());
  }
  const double smallest = min_eigenvalue(matrix_);
  if (smallest < -tol) {
    std::ostringstream os;
    os << "density matrix: not positive semidefinite, min eigenvalue " << smallest;
    throw ValidationError(os.str());
  }
}

double ObservableBasis::gram_error() const {
  double worst = 0.0;
  for (std::size_t k = 0; k < observables.size(); ++k) {
    for (std::size_t l = 0; l < observables.size(); ++l) {
      const Complex g = (observables[k] * observables[l]).trace();
      const double target = k == l ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(g - target));
    }
  }
  return worst;
}

std::vector<CMatrix> ObservableBasis::traceless() const {
  return {observables.begin() + 1, observables.end()};
}

ObservableBasis pauli_basis() { return gell_mann_basis(2); }

ObservableBasis gell_mann_basis(int d) {
  if (d < 2) {
    throw ValidationError("gell_mann_basis: dimension must be at least 2");
  }
  ObservableBasis basis;
  basis.dim = d;
  basis.observables.reserve(static_cast<std::size_t>(d) * d);
  basis.observables.push_back(CMatrix::Identity(d, d) / std::sqrt(double(d)));

  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const Complex i_unit(0.0, 1.0);
  for (int j = 0; j < d; ++j) {
    for (int k = j + 1; k < d; ++k) {
      CMatrix sym = CMatrix::Zero(d, d);
      sym(j, k) = inv_sqrt2;
      sym(k, j) = inv_sqrt2;
      basis.observables.push_back(sym);

      CMatrix anti = CMatrix::Zero(d, d);
      anti(j, k) = -i_unit * inv_sqrt2;
      anti(k, j) = i_unit * inv_sqrt2;
      basis.observables.push_back(anti);
    }
  }
  for (int l = 1; l < d; ++l) {
    CMatrix diag = CMatrix::Zero(d, d);
    const double norm = 1.0 / std::sqrt(double(l) * (l + 1));
    for (int m = 0; m < l; ++m) diag(m, m) = norm;
    diag(l, l) = -l * norm;
    basis.observables.push_back(diag);
  }
  return basis;
}

CMatrix partial_trace(const CMatrix& rho, int dim_a, int dim_b, Subsystem keep) {
  if (rho.rows() != dim_a * dim_b || rho.cols() != dim_a * dim_b) {
    throw ValidationError("partial_trace: matrix size does not match local dimensions");
  }
  if (keep == Subsystem::A) {
    CMatrix out = CMatrix::Zero(dim_a, dim_a);
    for (int i = 0; i < dim_a; ++i)
      for (int k = 0; k < dim_a; ++k)
        for (int j = 0; j < dim_b; ++j) out(i, k) += rho(i * dim_b + j, k * dim_b + j);
    return out;
  }
  CMatrix out = CMatrix::Zero(dim_b, dim_b);
  for (int j = 0; j < dim_b; ++j)
    for (int l = 0; l < dim_b; ++l)
      for (int i = 0; i < dim_a; ++i) out(j, l) += rho(i * dim_b + j, i * dim_b + l);
  return out;
}

CMatrix partial_trace(const DensityMatrix& rho, Subsystem keep) {
  return partial_trace(rho.matrix(), rho.dim_a(), rho.dim_b(), keep);
}

CMatrix partial_transpose(const CMatrix& rho, int dim_a, int dim_b) {
  if (rho.rows() != dim_a * dim_b || rho.cols() != dim_a * dim_b) {
    throw ValidationError("partial_transpose: matrix size does not match local dimensions");
  }
  CMatrix out(rho.rows(), rho.cols());
  for (int i = 0; i < dim_a; ++i)
    for (int j = 0; j < dim_b; ++j)
      for (int k = 0; k < dim_a; ++k)
        for (int l = 0; l < dim_b; ++l)
          out(i * dim_b + l, k * dim_b + j) = rho(i * dim_b + j, k * dim_b + l);
  return out;
}

double purity(const CMatrix& m) { return (m * m).trace().real(); }

namespace {

CMatrix ginibre(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix g(rows, cols);
  // Column-major fill order is part of the reproducibility contract.
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(r, c) = Complex(re, im);
    }
  return g;
}

}  // namespace

DensityMatrix random_density_matrix(int dim_a, int dim_b, int rank, Rng& rng) {
  if (dim_a < 1 || dim_b < 1) {
    throw ValidationError("random_density_matrix: local dimensions must be positive");
  }
  const int n = dim_a * dim_b;
  if (rank < 1 || rank > n) {
    std::ostringstream os;
    os << "random_density_matrix: rank " << rank << " outside [1, " << n << "]";
    throw ValidationError(os.str());
  }
  const CMatrix g = ginibre(n, rank, rng);
  CMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix(dim_a, dim_b, hermitian_part(rho));
}

DensityMatrix random_density_matrix(int dim_a, int dim_b, int rank, std::uint64_t seed) {
  Rng rng(seed);
  return random_density_matrix(dim_a, dim_b, rank, rng);
}

CMatrix random_unitary(int d, Rng& rng) {
  const CMatrix g = ginibre(d, d, rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ() * CMatrix::Identity(d, d);
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < d; ++k) {
    const Complex diag = r(k, k);
    const double mag = std::abs(diag);
    if (mag > 0.0) q.col(k) *= diag / mag;
  }
  return q;
}

CVector random_pure_vector(int d, Rng& rng) {
  CVector v = ginibre(d, 1, rng).col(0);
  return v / v.norm();
}

DensityMatrix mix_with_white_noise(const DensityMatrix& rho, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ValidationError("mix_with_white_noise: p must lie in [0, 1]");
  }
  const int n = rho.dim();
  CMatrix out = p * rho.matrix();
  out.diagonal().array() += (1.0 - p) / n;
  return DensityMatrix(rho.dim_a(), rho.dim_b(), out);
}

DensityMatrix pure_state(int dim_a, int dim_b, const CVector& psi) {
  if (psi.size() != dim_a * dim_b) {
    throw ValidationError("pure_state: vector length does not match local dimensions");
  }
  const double norm = psi.norm();
  if (norm == 0.0) throw ValidationError("pure_state: zero vector");
  const CVector unit = psi / norm;
  return DensityMatrix(dim_a, dim_b, hermitian_part(unit * unit.adjoint()));
}

DensityMatrix product_state(const CMatrix& rho_a, const CMatrix& rho_b) {
  return DensityMatrix(static_cast<int>(rho_a.rows()), static_cast<int>(rho_b.rows()),
                       kron(rho_a, rho_b));
}

DensityMatrix maximally_mixed(int dim_a, int dim_b) {
  const int n = dim_a * dim_b;
  return DensityMatrix(dim_a, dim_b, CMatrix::Identity(n, n) / double(n));
}

DensityMatrix maximally_entangled(int d) {
  CVector psi = CVector::Zero(d * d);
  for (int i = 0; i < d; ++i) psi(i * d + i) = 1.0;
  return pure_state(d, d, psi);
}

DensityMatrix apply_local_unitaries(const DensityMatrix& rho, const CMatrix& u, const CMatrix& v) {
  if (u.rows() != rho.dim_a() || v.rows() != rho.dim_b()) {
    throw ValidationError("apply_local_unitaries: unitary sizes do not match local dimensions");
  }
  const CMatrix uv = kron(u, v);
  return DensityMatrix(rho.dim_a(), rho.dim_b(), hermitian_part(uv * rho.matrix() * uv.adjoint()));
}

}  // namespace covsep

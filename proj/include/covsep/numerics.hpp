#pragma once

// Dense kernels on the tiny matrices this library works with (at most
// (d_A^2 + d_B^2) on a side). Backed by Eigen's self-adjoint eigensolver and
// Jacobi SVD; this header pins the contracts the rest of the code relies on.

#include <Eigen/Dense>
#include <complex>

namespace covsep {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Complex square matrix expected to equal its adjoint.
using HermitianMatrix = CMatrix;
/// Real square matrix expected to equal its transpose.
using RealSymmetricMatrix = RMatrix;

namespace tolerance {
inline constexpr double kHermiticity = 1e-12;
inline constexpr double kReconstruction = 1e-10;
inline constexpr double kPsdSlack = 1e-9;
inline constexpr double kRankCutoff = 1e-12;
}  // namespace tolerance

struct HermitianEigen {
  RVector values;   // ascending
  CMatrix vectors;  // unitary, columns are eigenvectors
};

struct SymmetricEigen {
  RVector values;   // ascending
  RMatrix vectors;  // orthogonal
};

struct ComplexSvd {
  CMatrix u;                // thin, m x k
  RVector singular_values;  // descending, k = min(m, n)
  CMatrix v;                // thin, n x k; m = u * diag(s) * v^H
};

struct RealSvd {
  RMatrix u;
  RVector singular_values;
  RMatrix v;
};

/// Largest |m(i,j) - conj(m(j,i))| scaled by max(1, max |m(i,j)|).
double hermiticity_defect(const CMatrix& m);
double symmetry_defect(const RMatrix& m);

bool is_hermitian(const CMatrix& m, double tol = tolerance::kHermiticity);

/// (m + m^H) / 2; exact for matrices that are already Hermitian.
CMatrix hermitian_part(const CMatrix& m);
RMatrix symmetrized(const RMatrix& m);

/// Throws ValidationError if m is not Hermitian within tol.
HermitianEigen eigh(const CMatrix& m, double tol = tolerance::kHermiticity);
SymmetricEigen eigh(const RMatrix& m, double tol = tolerance::kHermiticity);

ComplexSvd svd(const CMatrix& m);
RealSvd svd(const RMatrix& m);

double min_eigenvalue(const CMatrix& m);
double min_eigenvalue(const RMatrix& m);
double max_eigenvalue(const RMatrix& m);

/// r with r m r = 1. Throws SingularReducedState when the smallest eigenvalue
/// of m is below cutoff.
CMatrix inv_sqrt_psd(const CMatrix& m, double cutoff = tolerance::kRankCutoff);

/// Frobenius-nearest PSD matrix: negative eigenvalues clipped to zero.
CMatrix project_psd(const CMatrix& m);
RMatrix project_psd(const RMatrix& m);

/// Sum of singular values.
double trace_norm(const CMatrix& m);

CMatrix kron(const CMatrix& a, const CMatrix& b);

}  // namespace covsep

#include "covsep/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "covsep/errors.hpp"

namespace covsep {

namespace {

void require_square(Eigen::Index rows, Eigen::Index cols, const char* what) {
  if (rows != cols || rows == 0) {
    std::ostringstream os;
    os << what << ": expected a non-empty square matrix, got " << rows << "x" << cols;
    throw ValidationError(os.str());
  }
}

}  // namespace

double hermiticity_defect(const CMatrix& m) {
  require_square(m.rows(), m.cols(), "hermiticity_defect");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.adjoint()).cwiseAbs().maxCoeff() / scale;
}

double symmetry_defect(const RMatrix& m) {
  require_square(m.rows(), m.cols(), "symmetry_defect");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() / scale;
}

bool is_hermitian(const CMatrix& m, double tol) { return hermiticity_defect(m) <= tol; }

CMatrix hermitian_part(const CMatrix& m) { return (m + m.adjoint()) * 0.5; }

RMatrix symmetrized(const RMatrix& m) { return (m + m.transpose()) * 0.5; }

HermitianEigen eigh(const CMatrix& m, double tol) {
  const double defect = hermiticity_defect(m);
  if (defect > tol) {
    std::ostringstream os;
    os << "eigh: matrix is not Hermitian (defect " << defect << " > " << tol << ")";
    throw ValidationError(os.str());
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian_part(m));
  return {solver.eigenvalues(), solver.eigenvectors()};
}

SymmetricEigen eigh(const RMatrix& m, double tol) {
  const double defect = symmetry_defect(m);
  if (defect > tol) {
    std::ostringstream os;
    os << "eigh: matrix is not symmetric (defect " << defect << " > " << tol << ")";
    throw ValidationError(os.str());
  }
  Eigen::SelfAdjointEigenSolver<RMatrix> solver(symmetrized(m));
  return {solver.eigenvalues(), solver.eigenvectors()};
}

ComplexSvd svd(const CMatrix& m) {
  Eigen::JacobiSVD<CMatrix> solver(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {solver.matrixU(), solver.singularValues(), solver.matrixV()};
}

RealSvd svd(const RMatrix& m) {
  Eigen::JacobiSVD<RMatrix> solver(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {solver.matrixU(), solver.singularValues(), solver.matrixV()};
}

double min_eigenvalue(const CMatrix& m) {
  require_square(m.rows(), m.cols(), "min_eigenvalue");
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian_part(m), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

double min_eigenvalue(const RMatrix& m) {
  require_square(m.rows(), m.cols(), "min_eigenvalue");
  Eigen::SelfAdjointEigenSolver<RMatrix> solver(symmetrized(m), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

double max_eigenvalue(const RMatrix& m) {
  require_square(m.rows(), m.cols(), "max_eigenvalue");
  Eigen::SelfAdjointEigenSolver<RMatrix> solver(symmetrized(m), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(m.rows() - 1);
}

CMatrix inv_sqrt_psd(const CMatrix& m, double cutoff) {
  const auto eig = eigh(m);
  const double smallest = eig.values(0);
  if (smallest < cutoff) {
    std::ostringstream os;
    os << "inv_sqrt_psd: smallest eigenvalue " << smallest << " below cutoff " << cutoff;
    throw SingularReducedState(os.str(), smallest);
  }
  const RVector scale = eig.values.cwiseSqrt().cwiseInverse();
  return hermitian_part(eig.vectors * scale.asDiagonal() * eig.vectors.adjoint());
}

CMatrix project_psd(const CMatrix& m) {
  const auto eig = eigh(m);
  const RVector clipped = eig.values.cwiseMax(0.0);
  return hermitian_part(eig.vectors * clipped.asDiagonal() * eig.vectors.adjoint());
}

RMatrix project_psd(const RMatrix& m) {
  const auto eig = eigh(m);
  const RVector clipped = eig.values.cwiseMax(0.0);
  return symmetrized(eig.vectors * clipped.asDiagonal() * eig.vectors.transpose());
}

double trace_norm(const CMatrix& m) {
  Eigen::JacobiSVD<CMatrix> solver(m);
  return solver.singularValues().sum();
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace covsep

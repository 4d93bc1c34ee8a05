#pragma once

#include <vector>

#include "covsep/numerics.hpp"
#include "covsep/quantum_state.hpp"
#include "covsep/verdict.hpp"

namespace covsep {

/// Realigned matrix, d_A^2 x d_B^2:
///
///   R[i*d_A + k, j*d_B + l] = rho[i*d_B + j, k*d_B + l]
///
/// Rows enumerate the A-side operator |i><k|, columns the B-side |j><l|.
CMatrix realign(const CMatrix& rho, int dim_a, int dim_b);

/// rho = sum_k lambda_k G_k^A (x) G_k^B with HS-orthonormal Hermitian families.
struct OperatorSchmidtDecomposition {
  int dim_a = 0;
  int dim_b = 0;
  RVector coefficients;  // lambda_k >= 0, descending, min(d_A^2, d_B^2) entries
  std::vector<CMatrix> ops_a;
  std::vector<CMatrix> ops_b;
  RVector traces_a;  // g_k^A = Tr[G_k^A]
  RVector traces_b;

  CMatrix reconstruct() const;
};

/// Computed from the real correlation tensor T_ij = Tr[rho (A_i (x) B_j)] over
/// Gell-Mann bases, whose singular values are those of realign(rho). Within a
/// cluster of equal coefficients (relative gap < 1e-9) the pairs are rotated so
/// that the A-side traces are concentrated on the cluster's first element.
OperatorSchmidtDecomposition operator_schmidt(const DensityMatrix& rho);

/// sum_k lambda_k <= 1 for separable states.
CriterionVerdict ccnr_test(const OperatorSchmidtDecomposition& dec,
                           double tol = kDefaultDetectionTol);

/// Diagonal-correlation covariance test evaluated in the operator Schmidt
/// basis; for separable states
///
///   2 sum_k |lambda_k - lambda_k^2 g_k^A g_k^B|
///       <= 2 - sum_k lambda_k^2 ((g_k^A)^2 + (g_k^B)^2).
CriterionVerdict schmidt_form_test(const OperatorSchmidtDecomposition& dec,
                                   double tol = kDefaultDetectionTol);

}  // namespace covsep

#pragma once

#include <span>
#include <vector>

#include "covsep/numerics.hpp"
#include "covsep/quantum_state.hpp"

namespace covsep {

/// gamma_ij = Re<M_i M_j> - <M_i><M_j> for Hermitian M_k, i.e. the symmetrised
/// second moments minus the product of means.
RealSymmetricMatrix covariance_matrix(const CMatrix& rho, std::span<const CMatrix> observables);

/// <M_i M_j> - <M_i><M_j>; Hermitian, and its real part is covariance_matrix.
HermitianMatrix nonsymmetric_cm(const CMatrix& rho, std::span<const CMatrix> observables);

/// T_ij = Re Tr[rho (A_i (x) B_j)]
RMatrix correlation_tensor(const DensityMatrix& rho, std::span<const CMatrix> observables_a,
                           std::span<const CMatrix> observables_b);

/// Covariance matrix of {A_k (x) 1, 1 (x) B_k} in block form
///
///   gamma = [ A    C ]
///           [ C^T  B ]
///
/// A and B are the covariance matrices of the reduced states and
/// C_ij = <A_i (x) B_j> - <A_i><B_j>. The observable lists are carried along so
/// that basis changes keep track of which operators the rows refer to.
struct BlockCovarianceMatrix {
  RealSymmetricMatrix block_a;
  RealSymmetricMatrix block_b;
  RMatrix block_c;
  std::vector<CMatrix> observables_a;
  std::vector<CMatrix> observables_b;

  RealSymmetricMatrix assembled() const;
};

BlockCovarianceMatrix bipartite_cm(const DensityMatrix& rho, const ObservableBasis& basis_a,
                                   const ObservableBasis& basis_b);
BlockCovarianceMatrix bipartite_cm(const DensityMatrix& rho,
                                   std::span<const CMatrix> observables_a,
                                   std::span<const CMatrix> observables_b);

/// {A_k (x) 1} followed by {1 (x) B_k}.
std::vector<CMatrix> local_observables(std::span<const CMatrix> observables_a,
                                       std::span<const CMatrix> observables_b);

/// New observables M~_k = sum_l mu_kl M_l with mu = mu_a (+) mu_b, so
/// gamma -> mu gamma mu^T blockwise. Throws ValidationError for singular mu.
BlockCovarianceMatrix change_basis(const BlockCovarianceMatrix& gamma, const RMatrix& mu_a,
                                   const RMatrix& mu_b);

struct DiagonalizedCm {
  BlockCovarianceMatrix cm;
  RMatrix mu_a;  // orthogonal
  RMatrix mu_b;  // orthogonal
};

/// Orthogonal local basis change making block_c diagonal (non-negative
/// entries, descending).
DiagonalizedCm diagonalize_c(const BlockCovarianceMatrix& gamma);

/// Frobenius norm of the off-diagonal part of block_c.
double off_diagonal_c_norm(const BlockCovarianceMatrix& gamma);

}  // namespace covsep

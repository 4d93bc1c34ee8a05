#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "covsep/numerics.hpp"

namespace covsep {

using Rng = std::mt19937_64;

enum class Subsystem { A, B };

/// Bipartite mixed state on C^{d_A} (x) C^{d_B}.
///
/// Composite index convention: basis vector |i>|j> sits at row i * d_B + j.
/// Every routine that reshapes a state (partial trace, partial transpose,
/// realignment) uses this convention.
class DensityMatrix {
 public:
  /// Validates Hermiticity (1e-12), unit trace and positivity (both `tol`),
  /// then stores the Hermitian part. Throws ValidationError naming the failed
  /// invariant.
  DensityMatrix(int dim_a, int dim_b, CMatrix matrix, double tol = 1e-10);

  int dim_a() const noexcept { return dim_a_; }
  int dim_b() const noexcept { return dim_b_; }
  int dim() const noexcept { return dim_a_ * dim_b_; }
  const CMatrix& matrix() const noexcept { return matrix_; }

 private:
  int dim_a_;
  int dim_b_;
  CMatrix matrix_;
};

/// Hilbert-Schmidt orthonormal Hermitian observables on C^d. Bases built here
/// put identity / sqrt(d) first and the d^2 - 1 traceless elements after it.
struct ObservableBasis {
  int dim = 0;
  std::vector<CMatrix> observables;

  /// max |Tr[A_k A_l] - delta_kl|
  double gram_error() const;
  /// Copy without the leading identity element.
  std::vector<CMatrix> traceless() const;
};

/// {1, sx, sy, sz} / sqrt(2)
ObservableBasis pauli_basis();

/// Generalised Gell-Mann matrices, normalised: identity / sqrt(d), then for
/// each pair j < k the symmetric and antisymmetric off-diagonal elements, then
/// the d - 1 diagonal elements. For d = 2 this coincides with pauli_basis().
ObservableBasis gell_mann_basis(int d);

CMatrix partial_trace(const CMatrix& rho, int dim_a, int dim_b, Subsystem keep);
CMatrix partial_trace(const DensityMatrix& rho, Subsystem keep);

/// Transpose on the B factor.
CMatrix partial_transpose(const CMatrix& rho, int dim_a, int dim_b);

/// Tr[m^2] (real part).
double purity(const CMatrix& m);

/// Ginibre ensemble: G G^H / Tr[G G^H] with G a d x rank matrix of iid
/// standard complex Gaussians.
DensityMatrix random_density_matrix(int dim_a, int dim_b, int rank, Rng& rng);
DensityMatrix random_density_matrix(int dim_a, int dim_b, int rank, std::uint64_t seed);

/// Haar-random unitary (QR of a Ginibre matrix with phase fix).
CMatrix random_unitary(int d, Rng& rng);
CVector random_pure_vector(int d, Rng& rng);

/// p * rho + (1 - p) * 1 / (d_A d_B)
DensityMatrix mix_with_white_noise(const DensityMatrix& rho, double p);

DensityMatrix pure_state(int dim_a, int dim_b, const CVector& psi);
DensityMatrix product_state(const CMatrix& rho_a, const CMatrix& rho_b);
DensityMatrix maximally_mixed(int dim_a, int dim_b);
/// (|00> + |11> + ... ) / sqrt(d), projected.
DensityMatrix maximally_entangled(int d);

/// (U (x) V) rho (U (x) V)^H
DensityMatrix apply_local_unitaries(const DensityMatrix& rho, const CMatrix& u, const CMatrix& v);

}  // namespace covsep

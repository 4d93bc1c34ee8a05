#pragma once

#include <span>
#include <vector>

#include "covsep/numerics.hpp"
#include "covsep/quantum_state.hpp"
#include "covsep/verdict.hpp"

namespace covsep {

struct FnfOptions {
  double tol = 1e-10;  // residual target
  int max_iter = 500;  // alternating filter sweeps
  double cutoff = tolerance::kRankCutoff;
};

/// Filter normal form
///
///   rho~ = (F_A (x) F_B) rho (F_A (x) F_B)^H / norm
///        = (1 / (d_A d_B)) (1 + sum_i xi_i G~_i^A (x) G~_i^B)
///
/// with both reductions maximally mixed, xi_i >= 0 descending, and G~ traceless
/// HS-orthonormal. basis_a / basis_b hold d_A^2 - 1 / d_B^2 - 1 elements; the
/// first xi.size() of each are paired.
struct FilterNormalFormResult {
  DensityMatrix state;
  CMatrix filter_a;
  CMatrix filter_b;
  RVector xi;
  std::vector<CMatrix> basis_a;
  std::vector<CMatrix> basis_b;
  int iterations = 0;
  double residual = 0.0;

  double xi_sum() const { return xi.sum(); }
};

/// Alternates F_A <- (d_A rho_A)^{-1/2}, F_B <- (d_B rho_B)^{-1/2} until
/// ||rho_A - 1/d_A||_F + ||rho_B - 1/d_B||_F <= tol, then diagonalises the
/// traceless correlation tensor by SVD.
///
/// Throws SingularReducedState when a reduced iterate drops below the cutoff
/// and NoConvergence when max_iter sweeps do not reach tol.
FilterNormalFormResult to_fnf(const DensityMatrix& rho, const FnfOptions& options = {});

/// Closed-form bounds on sum_i xi_i for separable states in filter normal form.
double cm_fnf_bound(int dim_a, int dim_b);  // d^2 - d, requires d_A == d_B
double asymmetric_fnf_bound(int dim_a, int dim_b);
double ccnr_fnf_bound(int dim_a, int dim_b);
double dv_fnf_bound(int dim_a, int dim_b);

/// Equal local dimensions: sum xi <= d^2 - d. Throws ValidationError otherwise.
CriterionVerdict fnf_cm_test(const FilterNormalFormResult& fnf, double tol = kDefaultDetectionTol);

/// Unequal dimensions allowed (sides are ordered so that d_A <= d_B).
CriterionVerdict fnf_asymmetric_test(const FilterNormalFormResult& fnf,
                                     double tol = kDefaultDetectionTol);

/// sum xi <= sqrt(d_A d_B (d_A - 1)(d_B - 1)).
CriterionVerdict dv_test(std::span<const double> xi, int dim_a, int dim_b,
                         double tol = kDefaultDetectionTol);
CriterionVerdict dv_test(const FilterNormalFormResult& fnf, double tol = kDefaultDetectionTol);

}  // namespace covsep

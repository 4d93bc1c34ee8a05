#pragma once

#include <optional>

#include "covsep/covariance.hpp"
#include "covsep/numerics.hpp"
#include "covsep/quantum_state.hpp"
#include "covsep/verdict.hpp"

namespace covsep {

/// For separable states with d_A = d_B:
///
///   2 sum_i |C_ii| <= (1 - Tr[rho_A^2]) + (1 - Tr[rho_B^2])
///
/// C is first made diagonal (diagonalize_c) when its off-diagonal mass exceeds
/// 1e-10. Throws ValidationError when the blocks differ in size.
CriterionVerdict correlation_trace_test(const BlockCovarianceMatrix& gamma, double purity_a,
                                        double purity_b, double tol = kDefaultDetectionTol);

/// Convenience: Gell-Mann bases, purities from the reductions.
CriterionVerdict correlation_trace_test(const DensityMatrix& rho,
                                        double tol = kDefaultDetectionTol);

/// 6x6 covariance matrix of {sx, sy, sz}/sqrt(2) on each qubit.
RealSymmetricMatrix qubit_cm(const DensityMatrix& rho);

/// Drops the identity rows/columns from a two-qubit block CM built over
/// pauli_basis(). Throws ValidationError for any other shape.
RealSymmetricMatrix qubit_cm(const BlockCovarianceMatrix& gamma);

/// kappa_A = (1_3 - rho_A) / 2 with rho_A a real 3x3 density matrix; same for B.
struct KappaCandidate {
  RMatrix rho_a;
  RMatrix rho_b;
};

struct FeasibilityOptions {
  double tol = 1e-7;        // detected iff the optimum is below -tol
  double gap_tol = 1e-10;   // target duality gap
  int max_newton = 800;     // total Newton steps across all centring rounds
};

struct QubitCmcResult {
  /// criterion "cmc-sdp"; left = -upper_bound, right = 0, so margin is the
  /// certified upper bound on the optimum.
  CriterionVerdict verdict;
  double lower_bound = 0.0;  // lambda_min at the returned point
  double upper_bound = 0.0;  // dual bound from `dual`
  KappaCandidate optimum;    // best primal point found
  /// Present when the state is not detected: a point with
  /// lambda_min(gamma - 1/2 + (rho_A (+) rho_B)/2) >= lower_bound.
  std::optional<KappaCandidate> certificate;
  /// Trace-one PSD 6x6 dual matrix W; the upper bound is
  /// Tr[W (gamma - 1/2)] + (lambda_max(W_A) + lambda_max(W_B)) / 2.
  RMatrix dual;
  int iterations = 0;
};

/// Solves  f* = max lambda_min(gamma - 1_6/2 + (rho_A (+) rho_B)/2)  over pairs
/// of real 3x3 density matrices with a log-det barrier path-following method.
/// The state satisfies the covariance criterion iff f* >= 0.
///
/// Throws NoConvergence (with bounds) if the Newton budget runs out before
/// the gap closes and before the verdict is decided either way.
QubitCmcResult qubit_cmc_feasibility(const RealSymmetricMatrix& gamma6,
                                     const FeasibilityOptions& options = {});

/// lambda_min(gamma - 1/2 + (rho_A (+) rho_B)/2)
double kappa_slack(const RealSymmetricMatrix& gamma6, const KappaCandidate& kappa);

/// The dual bound for an arbitrary trace-one PSD 6x6 W.
double kappa_dual_bound(const RealSymmetricMatrix& gamma6, const RMatrix& w);

}  // namespace covsep

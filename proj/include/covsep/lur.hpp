#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "covsep/cmc.hpp"
#include "covsep/numerics.hpp"
#include "covsep/quantum_state.hpp"

namespace covsep {

enum class BoundKind {
  Certified,  // proven lower bound on the minimum total variance
  Estimate,   // best value found by local search; an upper bound on the minimum
};

struct VarianceBound {
  double value = 0.0;
  BoundKind kind = BoundKind::Certified;
  double slack = 0.0;      // best value seen minus the certified bound
  long evaluations = 0;
};

struct MinVarianceOptions {
  /// Qubits: refine until best - bound <= slack (or the patch budget runs out).
  double slack = 1e-5;
  long max_patches = 3'000'000;
  /// d >= 3: number of random starts for the majorise-minimise search.
  int starts = 24;
  std::uint64_t seed = 0x5eed;
};

/// Lower bound on min over pure states of sum_k Var(op_k).
///
/// d = 2 (certified): write op_k = a0 1 + a_k . sigma, so the total variance at
/// Bloch vector n is V(n) = sum |a_k|^2 - n^T Q n with Q = sum a_k a_k^T. The
/// sphere is covered by gnomonic cube-face patches; on a patch with centre c and
/// chord radius r,
///
///   V(m) >= V(c) - 2 |(1 - c c^T) Q c| r - K r^2,
///   K = sum_k ||op_k - mid_k 1||^2   (operator norm, mid_k = spectral midpoint)
///
/// and patches are split best-first until the bound is within `slack` of the
/// best value seen.
///
/// d >= 3 (estimate): multistart majorise-minimise iteration
/// psi <- lowest eigenvector of sum_k (op_k^2 - 2 <op_k> op_k). Never use an
/// Estimate to certify a violation.
VarianceBound certified_min_variance(std::span<const CMatrix> ops,
                                     const MinVarianceOptions& options = {});

/// Observables of a local uncertainty relation
///   sum_k Var(A_k (x) 1 + 1 (x) B_k) >= U_A + U_B   for separable states.
struct LocalUncertaintySet {
  std::vector<CMatrix> ops_a;
  std::vector<CMatrix> ops_b;
  VarianceBound bound_a;
  VarianceBound bound_b;
  /// Source witness and the observable bases its rows refer to.
  std::optional<RMatrix> witness;
  std::vector<CMatrix> basis_a;
  std::vector<CMatrix> basis_b;

  double rhs() const { return bound_a.value + bound_b.value; }
  bool certified() const {
    return bound_a.kind == BoundKind::Certified && bound_b.kind == BoundKind::Certified;
  }
};

/// From W = sum_k w_k |alpha_k (+) beta_k><...| build
/// A_k = sqrt(w_k) sum_l alpha_k,l basis_a[l] and likewise B_k, then bound
/// both sides with certified_min_variance. Throws ValidationError when W is
/// not PSD within 1e-9.
LocalUncertaintySet witness_to_lur(const RMatrix& witness, std::span<const CMatrix> basis_a,
                                   std::span<const CMatrix> basis_b,
                                   const MinVarianceOptions& options = {});

struct LurValue {
  double lhs = 0.0;  // sum_k Var(A_k (x) 1 + 1 (x) B_k), from direct moments
  double rhs = 0.0;  // U_A + U_B
  std::optional<double> lhs_from_witness;  // Tr[W gamma] when a witness is attached
};

LurValue lur_value(const DensityMatrix& rho, const LocalUncertaintySet& lur);

/// For a two-qubit state found infeasible by qubit_cmc_feasibility, build
/// witness candidates from the solver (its dual matrix, then the projector on
/// the negative eigenspace at the optimum), convert them to LURs and return
/// the first one whose certified violation lhs < rhs - 1e-9 checks out.
/// Returns nullopt when no candidate verifies. Throws ValidationError if the
/// feasibility result did not detect the state.
std::optional<LocalUncertaintySet> extract_lur_witness(const DensityMatrix& rho,
                                                       const QubitCmcResult& feasibility);

}  // namespace covsep

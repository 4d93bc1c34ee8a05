#pragma once

#include <array>
#include <functional>

#include "covsep/numerics.hpp"
#include "covsep/quantum_state.hpp"
#include "covsep/verdict.hpp"

namespace covsep {

/// The five "tiles" product vectors on C^3 (x) C^3:
///   |0>(|0>-|1>)/sqrt2, (|0>-|1>)|2>/sqrt2, |2>(|1>-|2>)/sqrt2,
///   (|1>-|2>)|0>/sqrt2, (|0>+|1>+|2>)(|0>+|1>+|2>)/3
std::array<CVector, 5> tiles_upb_vectors();

/// (1 - sum_j |psi_j><psi_j|) / 4; rank 4, PPT, entangled.
DensityMatrix upb_tiles_state();

/// p * upb_tiles_state() + (1 - p) * 1/9
DensityMatrix upb_noise_state(double p);

/// Chessboard family on C^3 (x) C^3: normalised sum of |V_i><V_i| with
///   V1 = (m, 0, s, 0, n, 0, 0, 0, 0)
///   V2 = (0, a, 0, b, 0, c, 0, 0, 0)
///   V3 = (n, 0, 0, 0, -m, 0, t, 0, 0)
///   V4 = (0, b, 0, -a, 0, 0, 0, d, 0)
/// (components in composite order 00, 01, ..., 22). With real parameters the
/// partial transpose only swaps the products ac <-> ns and ad <-> mt, so the
/// state is PPT whenever s = ac/n and t = ad/m.
struct ChessboardParams {
  double a = 0, b = 0, c = 0, d = 0, m = 0, n = 0, s = 0, t = 0;
};

/// Throws ValidationError when some V_i vanishes or parameters are not finite.
DensityMatrix chessboard_state(const ChessboardParams& params);

/// a, b, c, d, m, n iid uniform on [-1, 1] (redrawn while |m| or |n| < 1e-3),
/// then s = ac/n, t = ad/m.
ChessboardParams random_chessboard_params(Rng& rng);

/// Two qubits: p |Phi+><Phi+| + (1 - p) 1/4.
DensityMatrix werner_state(double p);

/// d x d: p |Phi_d><Phi_d| + (1 - p) 1/d^2.
DensityMatrix isotropic_state(double p, int d);

/// left = -lambda_min(rho^{T_B}), right = 0.
CriterionVerdict ppt_test(const DensityMatrix& rho, double tol = kDefaultDetectionTol);

struct ThresholdResult {
  double threshold = 0.0;  // midpoint of the final bracket
  double p_low = 0.0;      // bracketing parameters; verdict differs between them
  double p_high = 0.0;
  bool detected_above = true;  // verdict at p_high
  int evaluations = 0;
};

using StateFamily = std::function<DensityMatrix(double)>;
using DetectionRule = std::function<bool(const DensityMatrix&)>;

/// Coarse pre-scan on 32 equally spaced points of [p_min, p_max], then
/// bisection inside the single bracketing interval until it is narrower than
/// `tol`. Throws NoThreshold (no flip) or AmbiguousThreshold (several flips).
ThresholdResult threshold_scan(const StateFamily& family, double p_min, double p_max,
                               const DetectionRule& detects, double tol);

}  // namespace covsep

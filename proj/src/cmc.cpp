#include "covsep/cmc.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "covsep/errors.hpp"

namespace covsep {

CriterionVerdict correlation_trace_test(const BlockCovarianceMatrix& gamma, double purity_a,
                                        double purity_b, double tol) {
  if (gamma.block_a.rows() != gamma.block_b.rows()) {
    std::ostringstream os;
    os << "prop3 requires d_A = d_B (covariance blocks " << gamma.block_a.rows() << " and "
       << gamma.block_b.rows() << ")";
    throw ValidationError(os.str());
  }
  const double off = off_diagonal_c_norm(gamma);
  RMatrix c = gamma.block_c;
  if (off > 1e-10) c = diagonalize_c(gamma).cm.block_c;
  const double left = 2.0 * c.diagonal().cwiseAbs().sum();
  const double right = (1.0 - purity_a) + (1.0 - purity_b);
  auto v = make_verdict("prop3", left, right, tol);
  v.details["offdiag_c_norm"] = off;
  return v;
}

CriterionVerdict correlation_trace_test(const DensityMatrix& rho, double tol) {
  const auto gamma = bipartite_cm(rho, gell_mann_basis(rho.dim_a()), gell_mann_basis(rho.dim_b()));
  return correlation_trace_test(gamma, purity(partial_trace(rho, Subsystem::A)),
                                purity(partial_trace(rho, Subsystem::B)), tol);
}

RealSymmetricMatrix qubit_cm(const DensityMatrix& rho) {
  if (rho.dim_a() != 2 || rho.dim_b() != 2) {
    throw ValidationError("cmc-sdp requires 2x2 (two-qubit) states");
  }
  const auto paulis = pauli_basis().traceless();
  return bipartite_cm(rho, paulis, paulis).assembled();
}

RealSymmetricMatrix qubit_cm(const BlockCovarianceMatrix& gamma) {
  if (gamma.block_a.rows() != 4 || gamma.block_b.rows() != 4) {
    throw ValidationError("qubit_cm: expected 4x4 blocks from a two-qubit Pauli basis");
  }
  const auto reference = pauli_basis().observables;
  auto matches = [&](const std::vector<CMatrix>& ops) {
    if (ops.empty()) return true;
    if (ops.size() != reference.size()) return false;
    for (std::size_t k = 0; k < ops.size(); ++k)
      if ((ops[k] - reference[k]).cwiseAbs().maxCoeff() > 1e-12) return false;
    return true;
  };
  if (!matches(gamma.observables_a) || !matches(gamma.observables_b)) {
    throw ValidationError("qubit_cm: block CM was not built over pauli_basis()");
  }
  RMatrix out(6, 6);
  out.topLeftCorner(3, 3) = gamma.block_a.bottomRightCorner(3, 3);
  out.topRightCorner(3, 3) = gamma.block_c.bottomRightCorner(3, 3);
  out.bottomLeftCorner(3, 3) = gamma.block_c.bottomRightCorner(3, 3).transpose();
  out.bottomRightCorner(3, 3) = gamma.block_b.bottomRightCorner(3, 3);
  return out;
}

namespace {

using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
constexpr int kVars = 11;  // 5 + 5 coordinates for rho_A, rho_B; last is t
using Vec = Eigen::Matrix<double, kVars, 1>;
using Hess = Eigen::Matrix<double, kVars, kVars>;

// Frobenius-orthonormal basis of traceless real symmetric 3x3 matrices.
std::array<Mat3, 5> traceless_symmetric_basis() {
  std::array<Mat3, 5> e;
  const double r2 = 1.0 / std::sqrt(2.0);
  const double r6 = 1.0 / std::sqrt(6.0);
  for (auto& m : e) m.setZero();
  e[0](0, 1) = e[0](1, 0) = r2;
  e[1](0, 2) = e[1](2, 0) = r2;
  e[2](1, 2) = e[2](2, 1) = r2;
  e[3](0, 0) = r2;
  e[3](1, 1) = -r2;
  e[4](0, 0) = r6;
  e[4](1, 1) = r6;
  e[4](2, 2) = -2.0 * r6;
  return e;
}

struct BarrierProblem {
  Mat6 offset;  // gamma - 1/2 + (1/3 (+) 1/3)/2
  std::array<Mat3, 5> basis = traceless_symmetric_basis();

  Mat3 rho(const Vec& x, int side) const {
    Mat3 r = Mat3::Identity() / 3.0;
    for (int i = 0; i < 5; ++i) r += x(5 * side + i) * basis[i];
    return r;
  }

  // gamma - 1/2 + (rho_A (+) rho_B)/2, without the -t shift.
  Mat6 slack(const Vec& x) const {
    Mat6 m = offset;
    m.topLeftCorner<3, 3>() += (rho(x, 0) - Mat3::Identity() / 3.0) / 2.0;
    m.bottomRightCorner<3, 3>() += (rho(x, 1) - Mat3::Identity() / 3.0) / 2.0;
    return m;
  }

  // Coefficient matrix of x_i in the 6x6 constraint.
  Mat6 direction(int i) const {
    Mat6 d = Mat6::Zero();
    if (i < 5) {
      d.topLeftCorner<3, 3>() = basis[i] / 2.0;
    } else if (i < 10) {
      d.bottomRightCorner<3, 3>() = basis[i - 5] / 2.0;
    } else {
      d = -Mat6::Identity();
    }
    return d;
  }
};

template <typename M>
bool log_det_pd(const M& m, double* out) {
  Eigen::LLT<M> llt(m);
  if (llt.info() != Eigen::Success) return false;
  const auto& l = llt.matrixL();
  double acc = 0.0;
  for (int i = 0; i < m.rows(); ++i) {
    const double d = l(i, i);
    if (!(d > 0.0) || !std::isfinite(d)) return false;
    acc += std::log(d);
  }
  *out = 2.0 * acc;
  return true;
}

// Barrier value tau * (-t) - log det F1 - log det rho_A - log det rho_B, or +inf
// outside the interior.
double barrier_value(const BarrierProblem& p, const Vec& x, double tau) {
  const Mat6 f1 = p.slack(x) - x(10) * Mat6::Identity();
  double l1 = 0.0, l2 = 0.0, l3 = 0.0;
  if (!log_det_pd(f1, &l1) || !log_det_pd(p.rho(x, 0), &l2) || !log_det_pd(p.rho(x, 1), &l3)) {
    return std::numeric_limits<double>::infinity();
  }
  return -tau * x(10) - l1 - l2 - l3;
}

}  // namespace

double kappa_slack(const RealSymmetricMatrix& gamma6, const KappaCandidate& kappa) {
  if (gamma6.rows() != 6 || gamma6.cols() != 6) {
    throw ValidationError("kappa_slack: expected a 6x6 covariance matrix");
  }
  RMatrix m = gamma6 - 0.5 * RMatrix::Identity(6, 6);
  m.topLeftCorner(3, 3) += kappa.rho_a / 2.0;
  m.bottomRightCorner(3, 3) += kappa.rho_b / 2.0;
  return min_eigenvalue(m);
}

double kappa_dual_bound(const RealSymmetricMatrix& gamma6, const RMatrix& w) {
  if (gamma6.rows() != 6 || w.rows() != 6 || w.cols() != 6) {
    throw ValidationError("kappa_dual_bound: expected 6x6 matrices");
  }
  const RMatrix shifted = gamma6 - 0.5 * RMatrix::Identity(6, 6);
  const double linear = (w.cwiseProduct(shifted)).sum();
  const double top_a = max_eigenvalue(RMatrix(w.topLeftCorner(3, 3)));
  const double top_b = max_eigenvalue(RMatrix(w.bottomRightCorner(3, 3)));
  return linear + (top_a + top_b) / 2.0;
}

QubitCmcResult qubit_cmc_feasibility(const RealSymmetricMatrix& gamma6,
                                     const FeasibilityOptions& options) {
  if (gamma6.rows() != 6 || gamma6.cols() != 6) {
    throw ValidationError("qubit_cmc_feasibility: expected a 6x6 covariance matrix");
  }
  if (symmetry_defect(gamma6) > 1e-9) {
    throw ValidationError("qubit_cmc_feasibility: covariance matrix is not symmetric");
  }

  BarrierProblem problem;
  problem.offset = symmetrized(gamma6) - 0.5 * Mat6::Identity();
  problem.offset.diagonal().array() += 1.0 / 6.0;

  std::array<Mat6, kVars> dirs;
  for (int i = 0; i < kVars; ++i) dirs[i] = problem.direction(i);

  Vec x = Vec::Zero();
  x(10) = min_eigenvalue(RMatrix(problem.offset)) - 1.0;

  constexpr double kBarrierParameter = 12.0;  // 6 + 3 + 3
  double tau = 1.0;

  double best_lower = -std::numeric_limits<double>::infinity();
  double best_upper = std::numeric_limits<double>::infinity();
  Vec best_x = x;
  RMatrix best_w = RMatrix::Identity(6, 6) / 6.0;
  int newton_steps = 0;
  bool stalled = false;

  auto record_bounds = [&](const Vec& point, double current_tau) {
    const Mat6 m = problem.slack(point);
    const double lower = min_eigenvalue(RMatrix(m));
    if (lower > best_lower) {
      best_lower = lower;
      best_x = point;
    }
    const Mat6 f1 = m - point(10) * Mat6::Identity();
    Eigen::LLT<Mat6> llt(f1);
    if (llt.info() == Eigen::Success) {
      Mat6 z = llt.solve(Mat6::Identity()) / current_tau;
      z = (z + z.transpose()) / 2.0;
      const double tr = z.trace();
      if (tr > 0.0 && std::isfinite(tr)) {
        const RMatrix w = z / tr;
        const double upper = kappa_dual_bound(gamma6, w);
        if (upper < best_upper) {
          best_upper = upper;
          best_w = w;
        }
      }
    }
  };

  while (best_upper - best_lower > options.gap_tol && !stalled) {
    // Centring: Newton on the barrier at fixed tau.
    for (int inner = 0; inner < 60; ++inner) {
      if (newton_steps >= options.max_newton) break;
      const Mat6 f1 = problem.slack(x) - x(10) * Mat6::Identity();
      const Mat6 f1_inv = f1.llt().solve(Mat6::Identity());
      const Mat3 fa_inv = problem.rho(x, 0).llt().solve(Mat3::Identity());
      const Mat3 fb_inv = problem.rho(x, 1).llt().solve(Mat3::Identity());

      std::array<Mat6, kVars> s1;
      for (int i = 0; i < kVars; ++i) s1[i] = f1_inv * dirs[i];
      std::array<Mat3, 5> sa, sb;
      for (int i = 0; i < 5; ++i) {
        sa[i] = fa_inv * problem.basis[i];
        sb[i] = fb_inv * problem.basis[i];
      }

      Vec grad = Vec::Zero();
      Hess hess = Hess::Zero();
      grad(10) = -tau;
      for (int i = 0; i < kVars; ++i) {
        grad(i) -= s1[i].trace();
        for (int k = i; k < kVars; ++k) {
          hess(i, k) += s1[i].cwiseProduct(s1[k].transpose()).sum();
        }
      }
      for (int i = 0; i < 5; ++i) {
        grad(i) -= sa[i].trace();
        grad(5 + i) -= sb[i].trace();
        for (int k = i; k < 5; ++k) {
          hess(i, k) += sa[i].cwiseProduct(sa[k].transpose()).sum();
          hess(5 + i, 5 + k) += sb[i].cwiseProduct(sb[k].transpose()).sum();
        }
      }
      hess = hess.selfadjointView<Eigen::Upper>();

      const Vec step = -hess.ldlt().solve(grad);
      const double decrement = -grad.dot(step);
      ++newton_steps;
      if (!std::isfinite(decrement) || decrement < 0.0) {
        stalled = true;
        break;
      }
      if (decrement / 2.0 < 1e-10) break;

      const double current = barrier_value(problem, x, tau);
      double s = 1.0;
      bool accepted = false;
      while (s > 1e-14) {
        const Vec trial = x + s * step;
        const double value = barrier_value(problem, trial, tau);
        if (value <= current - 0.01 * s * decrement) {
          x = trial;
          accepted = true;
          break;
        }
        s *= 0.5;
      }
      if (!accepted) {
        stalled = true;
        break;
      }
    }
    record_bounds(x, tau);
    if (newton_steps >= options.max_newton) break;
    if (kBarrierParameter / tau < options.gap_tol * 1e-3) break;
    tau *= 8.0;
  }

  const bool detected = best_upper < -options.tol;
  const bool feasible = best_lower >= -options.tol;
  const double gap = best_upper - best_lower;
  if (gap > options.gap_tol && !detected && !feasible) {
    std::ostringstream os;
    os << "qubit_cmc_feasibility: optimum bracketed in [" << best_lower << ", " << best_upper
       << "] after " << newton_steps << " Newton steps";
    throw NoConvergence(os.str(), newton_steps, gap, best_lower, best_upper);
  }

  QubitCmcResult out;
  out.lower_bound = best_lower;
  out.upper_bound = best_upper;
  out.optimum = {problem.rho(best_x, 0), problem.rho(best_x, 1)};
  out.dual = best_w;
  out.iterations = newton_steps;
  out.verdict = make_verdict("cmc-sdp", -best_upper, 0.0, options.tol);
  out.verdict.details["lower_bound"] = best_lower;
  out.verdict.details["upper_bound"] = best_upper;
  out.verdict.details["newton_steps"] = newton_steps;
  if (!out.verdict.detected) out.certificate = out.optimum;
  return out;
}

}  // namespace covsep

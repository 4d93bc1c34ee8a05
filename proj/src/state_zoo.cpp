#include "covsep/state_zoo.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "covsep/errors.hpp"

namespace covsep {

namespace {

CVector ket3(double x0, double x1, double x2) {
  CVector v(3);
  v << x0, x1, x2;
  return v;
}

CVector tensor(const CVector& a, const CVector& b) {
  CVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ValidationError(std::string(what) + ": p must lie in [0, 1]");
  }
}

}  // namespace

std::array<CVector, 5> tiles_upb_vectors() {
  const double r2 = 1.0 / std::sqrt(2.0);
  const double r3 = 1.0 / std::sqrt(3.0);
  const CVector e0 = ket3(1, 0, 0), e1 = ket3(0, 1, 0), e2 = ket3(0, 0, 1);
  return {tensor(e0, r2 * (e0 - e1)), tensor(r2 * (e0 - e1), e2), tensor(e2, r2 * (e1 - e2)),
          tensor(r2 * (e1 - e2), e0), tensor(r3 * ket3(1, 1, 1), r3 * ket3(1, 1, 1))};
}

DensityMatrix upb_tiles_state() {
  CMatrix rho = CMatrix::Identity(9, 9);
  for (const auto& v : tiles_upb_vectors()) rho -= v * v.adjoint();
  return DensityMatrix(3, 3, hermitian_part(rho / 4.0));
}

DensityMatrix upb_noise_state(double p) {
  check_probability(p, "upb_noise_state");
  return mix_with_white_noise(upb_tiles_state(), p);
}

DensityMatrix chessboard_state(const ChessboardParams& q) {
  const std::array<double, 8> all{q.a, q.b, q.c, q.d, q.m, q.n, q.s, q.t};
  for (double x : all) {
    if (!std::isfinite(x)) throw ValidationError("chessboard_state: parameters must be finite");
  }
  std::array<CVector, 4> v;
  for (auto& x : v) x = CVector::Zero(9);
  v[0](0) = q.m;  v[0](2) = q.s;  v[0](4) = q.n;
  v[1](1) = q.a;  v[1](3) = q.b;  v[1](5) = q.c;
  v[2](0) = q.n;  v[2](4) = -q.m; v[2](6) = q.t;
  v[3](1) = q.b;  v[3](3) = -q.a; v[3](7) = q.d;
  CMatrix rho = CMatrix::Zero(9, 9);
  for (int i = 0; i < 4; ++i) {
    if (v[i].norm() < 1e-12) {
      std::ostringstream os;
      os << "chessboard_state: vector V" << i + 1 << " vanishes for these parameters";
      throw ValidationError(os.str());
    }
    rho += v[i] * v[i].adjoint();
  }
  return DensityMatrix(3, 3, hermitian_part(rho / rho.trace().real()));
}

ChessboardParams random_chessboard_params(Rng& rng) {
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  ChessboardParams q;
  do {
    q.a = uniform(rng);
    q.b = uniform(rng);
    q.c = uniform(rng);
    q.d = uniform(rng);
    q.m = uniform(rng);
    q.n = uniform(rng);
  } while (std::abs(q.m) < 1e-3 || std::abs(q.n) < 1e-3);
  q.s = q.a * q.c / q.n;
  q.t = q.a * q.d / q.m;
  return q;
}

DensityMatrix werner_state(double p) {
  check_probability(p, "werner_state");
  return mix_with_white_noise(maximally_entangled(2), p);
}

DensityMatrix isotropic_state(double p, int d) {
  check_probability(p, "isotropic_state");
  if (d < 2) throw ValidationError("isotropic_state: d must be at least 2");
  return mix_with_white_noise(maximally_entangled(d), p);
}

CriterionVerdict ppt_test(const DensityMatrix& rho, double tol) {
  const double lowest =
      min_eigenvalue(partial_transpose(rho.matrix(), rho.dim_a(), rho.dim_b()));
  auto v = make_verdict("ppt", -lowest, 0.0, tol);
  v.details["min_eigenvalue"] = lowest;
  return v;
}

ThresholdResult threshold_scan(const StateFamily& family, double p_min, double p_max,
                               const DetectionRule& detects, double tol) {
  if (!(p_min < p_max)) throw ValidationError("threshold_scan: need p_min < p_max");
  if (!(tol > 0.0)) throw ValidationError("threshold_scan: tolerance must be positive");
  constexpr int kPoints = 32;
  ThresholdResult out;
  std::vector<double> grid(kPoints);
  std::vector<bool> verdict(kPoints);
  for (int i = 0; i < kPoints; ++i) {
    grid[i] = p_min + (p_max - p_min) * i / (kPoints - 1);
    verdict[i] = detects(family(grid[i]));
    ++out.evaluations;
  }
  int flips = 0;
  int bracket = -1;
  for (int i = 0; i + 1 < kPoints; ++i) {
    if (verdict[i] != verdict[i + 1]) {
      ++flips;
      bracket = i;
    }
  }
  if (flips == 0) {
    std::ostringstream os;
    os << "threshold_scan: verdict is constantly "
       << (verdict[0] ? "detected" : "not detected") << " on [" << p_min << ", " << p_max << "]";
    throw NoThreshold(os.str());
  }
  if (flips > 1) {
    std::ostringstream os;
    os << "threshold_scan: " << flips << " verdict flips in the pre-scan";
    throw AmbiguousThreshold(os.str(), flips);
  }
  double lo = grid[bracket];
  double hi = grid[bracket + 1];
  const bool at_lo = verdict[bracket];
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const bool v = detects(family(mid));
    ++out.evaluations;
    if (v == at_lo) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  out.p_low = lo;
  out.p_high = hi;
  out.threshold = 0.5 * (lo + hi);
  out.detected_above = !at_lo;
  return out;
}

}  // namespace covsep

#include "covsep/lur.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

#include "covsep/covariance.hpp"
#include "covsep/errors.hpp"

namespace covsep {

namespace {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

struct Patch {
  int face;
  double u0, v0, size;
  double lower;
};

struct PatchOrder {
  bool operator()(const Patch& a, const Patch& b) const { return a.lower > b.lower; }
};

// Gnomonic cube-face parametrisation: face f maps (u, v) in [-1, 1]^2 to the
// unit sphere through axis + u * e1 + v * e2.
Vec3 face_point(int face, double u, double v) {
  const int axis = face / 2;
  const double sign = face % 2 == 0 ? 1.0 : -1.0;
  Vec3 p;
  p(axis) = sign;
  p((axis + 1) % 3) = u;
  p((axis + 2) % 3) = v;
  return p.normalized();
}

class BlochBranchAndBound {
 public:
  BlochBranchAndBound(const Mat3& q, double constant, double curvature)
      : q_(q), constant_(constant), curvature_(curvature) {}

  double value(const Vec3& n) const { return constant_ - n.dot(q_ * n); }

  Patch evaluate(int face, double u0, double v0, double size) {
    ++evaluations_;
    const Vec3 c = face_point(face, u0 + size / 2, v0 + size / 2);
    double radius = 0.0;
    for (int corner = 0; corner < 4; ++corner) {
      const Vec3 p = face_point(face, u0 + size * (corner & 1), v0 + size * (corner >> 1));
      radius = std::max(radius, (p - c).norm());
    }
    radius = radius * (1.0 + 1e-12) + 1e-15;
    const double centre_value = value(c);
    best_ = std::min(best_, centre_value);
    const Vec3 qc = q_ * c;
    const Vec3 tangential = qc - c.dot(qc) * c;
    const double lower =
        centre_value - 2.0 * tangential.norm() * radius - curvature_ * radius * radius;
    return {face, u0, v0, size, lower};
  }

  VarianceBound run(double slack, long max_patches) {
    std::priority_queue<Patch, std::vector<Patch>, PatchOrder> frontier;
    constexpr int kInitial = 4;
    const double step = 2.0 / kInitial;
    for (int face = 0; face < 6; ++face)
      for (int i = 0; i < kInitial; ++i)
        for (int j = 0; j < kInitial; ++j)
          frontier.push(evaluate(face, -1.0 + i * step, -1.0 + j * step, step));

    while (true) {
      const Patch top = frontier.top();
      if (best_ - top.lower <= slack || evaluations_ + 4 > max_patches) break;
      frontier.pop();
      const double half = top.size / 2;
      for (int k = 0; k < 4; ++k) {
        frontier.push(evaluate(top.face, top.u0 + half * (k & 1), top.v0 + half * (k >> 1), half));
      }
    }
    const double bound = std::min(frontier.top().lower, best_);
    return {bound, BoundKind::Certified, best_ - bound, evaluations_};
  }

 private:
  Mat3 q_;
  double constant_;
  double curvature_;
  double best_ = std::numeric_limits<double>::infinity();
  long evaluations_ = 0;
};

VarianceBound qubit_bound(std::span<const CMatrix> ops, const MinVarianceOptions& options) {
  static const std::array<CMatrix, 3> sigma = [] {
    std::array<CMatrix, 3> s;
    s[0] = CMatrix::Zero(2, 2);
    s[0](0, 1) = s[0](1, 0) = 1.0;
    s[1] = CMatrix::Zero(2, 2);
    s[1](0, 1) = Complex(0.0, -1.0);
    s[1](1, 0) = Complex(0.0, 1.0);
    s[2] = CMatrix::Zero(2, 2);
    s[2](0, 0) = 1.0;
    s[2](1, 1) = -1.0;
    return s;
  }();

  Mat3 q = Mat3::Zero();
  double constant = 0.0;
  double curvature = 0.0;
  for (const auto& op : ops) {
    Vec3 a;
    for (int i = 0; i < 3; ++i) a(i) = (op * sigma[i]).trace().real() / 2.0;
    q += a * a.transpose();
    constant += a.squaredNorm();
    const RVector spectrum = eigh(op).values;
    const double half_spread = (spectrum(1) - spectrum(0)) / 2.0;
    curvature += half_spread * half_spread;
  }
  if (curvature == 0.0) return {0.0, BoundKind::Certified, 0.0, 0};
  BlochBranchAndBound search(q, constant, curvature);
  return search.run(options.slack, options.max_patches);
}

double total_variance(std::span<const CMatrix> ops, const CVector& psi) {
  double v = 0.0;
  for (const auto& op : ops) {
    const CVector a_psi = op * psi;
    const double mean = psi.dot(a_psi).real();
    v += a_psi.squaredNorm() - mean * mean;
  }
  return v;
}

VarianceBound local_search_bound(std::span<const CMatrix> ops, const MinVarianceOptions& options) {
  const auto d = ops.front().rows();
  CMatrix squares = CMatrix::Zero(d, d);
  for (const auto& op : ops) squares += op * op;

  Rng rng(options.seed);
  double best = std::numeric_limits<double>::infinity();
  long evaluations = 0;
  for (int start = 0; start < options.starts; ++start) {
    CVector psi = random_pure_vector(static_cast<int>(d), rng);
    double current = total_variance(ops, psi);
    ++evaluations;
    for (int it = 0; it < 500; ++it) {
      CMatrix h = squares;
      for (const auto& op : ops) h -= 2.0 * psi.dot(op * psi).real() * op;
      Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian_part(h));
      const CVector next = solver.eigenvectors().col(0);
      const double value = total_variance(ops, next);
      ++evaluations;
      const bool improved = value < current - 1e-15;
      if (value <= current) {
        psi = next;
        current = value;
      }
      if (!improved) break;
    }
    best = std::min(best, current);
  }
  return {std::max(best, 0.0), BoundKind::Estimate, 0.0, evaluations};
}

}  // namespace

VarianceBound certified_min_variance(std::span<const CMatrix> ops,
                                     const MinVarianceOptions& options) {
  if (ops.empty()) return {0.0, BoundKind::Certified, 0.0, 0};
  const auto d = ops.front().rows();
  for (const auto& op : ops) {
    if (op.rows() != d || op.cols() != d) {
      throw ValidationError("certified_min_variance: observables differ in dimension");
    }
    if (!is_hermitian(op, 1e-10)) {
      throw ValidationError("certified_min_variance: observables must be Hermitian");
    }
  }
  if (d < 2) throw ValidationError("certified_min_variance: dimension must be at least 2");
  if (d == 2) return qubit_bound(ops, options);
  return local_search_bound(ops, options);
}

LocalUncertaintySet witness_to_lur(const RMatrix& witness, std::span<const CMatrix> basis_a,
                                   std::span<const CMatrix> basis_b,
                                   const MinVarianceOptions& options) {
  const auto na = static_cast<Eigen::Index>(basis_a.size());
  const auto nb = static_cast<Eigen::Index>(basis_b.size());
  if (na == 0 || nb == 0) throw ValidationError("witness_to_lur: empty observable basis");
  if (witness.rows() != na + nb || witness.cols() != na + nb) {
    std::ostringstream os;
    os << "witness_to_lur: witness is " << witness.rows() << "x" << witness.cols()
       << ", expected " << na + nb << " square";
    throw ValidationError(os.str());
  }
  const auto eig = eigh(witness, 1e-9);
  const double scale = std::max(1.0, witness.cwiseAbs().maxCoeff());
  if (eig.values(0) < -1e-9 * scale) {
    std::ostringstream os;
    os << "witness_to_lur: witness is not PSD (min eigenvalue " << eig.values(0) << ")";
    throw ValidationError(os.str());
  }

  LocalUncertaintySet lur;
  lur.witness = witness;
  lur.basis_a.assign(basis_a.begin(), basis_a.end());
  lur.basis_b.assign(basis_b.begin(), basis_b.end());
  const double top = eig.values(eig.values.size() - 1);
  const auto da = basis_a.front().rows();
  const auto db = basis_b.front().rows();
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    const double weight = eig.values(k);
    if (weight <= 1e-14 * std::max(1.0, top)) continue;
    const double amp = std::sqrt(weight);
    CMatrix a = CMatrix::Zero(da, da);
    for (Eigen::Index l = 0; l < na; ++l) a += amp * eig.vectors(l, k) * basis_a[l];
    CMatrix b = CMatrix::Zero(db, db);
    for (Eigen::Index l = 0; l < nb; ++l) b += amp * eig.vectors(na + l, k) * basis_b[l];
    lur.ops_a.push_back(hermitian_part(a));
    lur.ops_b.push_back(hermitian_part(b));
  }
  lur.bound_a = certified_min_variance(lur.ops_a, options);
  lur.bound_b = certified_min_variance(lur.ops_b, options);
  return lur;
}

LurValue lur_value(const DensityMatrix& rho, const LocalUncertaintySet& lur) {
  if (lur.ops_a.size() != lur.ops_b.size()) {
    throw ValidationError("lur_value: A and B observable lists must pair up");
  }
  const int da = rho.dim_a();
  const int db = rho.dim_b();
  const CMatrix id_a = CMatrix::Identity(da, da);
  const CMatrix id_b = CMatrix::Identity(db, db);
  LurValue out;
  for (std::size_t k = 0; k < lur.ops_a.size(); ++k) {
    if (lur.ops_a[k].rows() != da || lur.ops_b[k].rows() != db) {
      throw ValidationError("lur_value: observable dimensions do not match the state");
    }
    const CMatrix x = kron(lur.ops_a[k], id_b) + kron(id_a, lur.ops_b[k]);
    const CMatrix rx = rho.matrix() * x;
    const double mean = rx.trace().real();
    out.lhs += (rx * x).trace().real() - mean * mean;
  }
  out.rhs = lur.rhs();
  if (lur.witness) {
    const auto gamma = bipartite_cm(rho, lur.basis_a, lur.basis_b).assembled();
    out.lhs_from_witness = lur.witness->cwiseProduct(gamma).sum();
  }
  return out;
}

std::optional<LocalUncertaintySet> extract_lur_witness(const DensityMatrix& rho,
                                                       const QubitCmcResult& feasibility) {
  if (rho.dim_a() != 2 || rho.dim_b() != 2) {
    throw ValidationError("lur-extract requires 2x2 (two-qubit) states");
  }
  if (!feasibility.verdict.detected) {
    throw ValidationError("extract_lur_witness: the covariance criterion is satisfied; no witness exists");
  }
  const RMatrix gamma = qubit_cm(rho);

  std::vector<RMatrix> candidates;
  candidates.push_back(feasibility.dual);
  {
    RMatrix m = gamma - 0.5 * RMatrix::Identity(6, 6);
    m.topLeftCorner(3, 3) += feasibility.optimum.rho_a / 2.0;
    m.bottomRightCorner(3, 3) += feasibility.optimum.rho_b / 2.0;
    const auto eig = eigh(m, 1e-9);
    RMatrix projector = RMatrix::Zero(6, 6);
    for (int k = 0; k < 6; ++k) {
      if (eig.values(k) < 0.0) projector += eig.vectors.col(k) * eig.vectors.col(k).transpose();
    }
    if (projector.trace() > 0.5) candidates.push_back(projector / projector.trace());
  }

  const auto paulis = pauli_basis().traceless();
  for (double slack : {1e-5, 1e-7}) {
    MinVarianceOptions options;
    options.slack = slack;
    for (const auto& w : candidates) {
      auto lur = witness_to_lur(symmetrized(w), paulis, paulis, options);
      const auto value = lur_value(rho, lur);
      if (lur.certified() && value.lhs < value.rhs - 1e-9) return lur;
    }
  }
  return std::nullopt;
}

}  // namespace covsep

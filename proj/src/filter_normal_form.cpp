#include "covsep/filter_normal_form.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "covsep/covariance.hpp"
#include "covsep/errors.hpp"

namespace covsep {

namespace {

double reduction_residual(const CMatrix& rho, int da, int db) {
  const CMatrix ra = partial_trace(rho, da, db, Subsystem::A);
  const CMatrix rb = partial_trace(rho, da, db, Subsystem::B);
  return (ra - CMatrix::Identity(da, da) / double(da)).norm() +
         (rb - CMatrix::Identity(db, db) / double(db)).norm();
}

CMatrix local_filter(const CMatrix& reduced, int d, double cutoff, const char* side) {
  try {
    return inv_sqrt_psd(hermitian_part(reduced * double(d)), cutoff * d);
  } catch (const SingularReducedState& e) {
    std::ostringstream os;
    os << "to_fnf: reduced state " << side << " is singular (min eigenvalue "
       << e.min_eigenvalue() / d << ")";
    throw SingularReducedState(os.str(), e.min_eigenvalue() / d);
  }
}

std::vector<CMatrix> rotate(const RMatrix& o, const std::vector<CMatrix>& ops) {
  std::vector<CMatrix> out;
  out.reserve(o.cols());
  for (Eigen::Index c = 0; c < o.cols(); ++c) {
    CMatrix acc = CMatrix::Zero(ops.front().rows(), ops.front().cols());
    for (Eigen::Index r = 0; r < o.rows(); ++r) acc += o(r, c) * ops[r];
    out.push_back(std::move(acc));
  }
  return out;
}

}  // namespace

FilterNormalFormResult to_fnf(const DensityMatrix& rho, const FnfOptions& options) {
  const int da = rho.dim_a();
  const int db = rho.dim_b();
  CMatrix state = rho.matrix();
  CMatrix total_a = CMatrix::Identity(da, da);
  CMatrix total_b = CMatrix::Identity(db, db);
  const CMatrix id_a = CMatrix::Identity(da, da);
  const CMatrix id_b = CMatrix::Identity(db, db);

  double residual = reduction_residual(state, da, db);
  int sweeps = 0;
  while (residual > options.tol) {
    if (sweeps >= options.max_iter) {
      std::ostringstream os;
      os << "to_fnf: residual " << residual << " after " << sweeps << " sweeps";
      throw NoConvergence(os.str(), sweeps, residual);
    }
    const CMatrix fa = local_filter(partial_trace(state, da, db, Subsystem::A), da,
                                    options.cutoff, "A");
    CMatrix lift = kron(fa, id_b);
    state = hermitian_part(lift * state * lift.adjoint());
    state /= state.trace().real();
    total_a = fa * total_a;

    const CMatrix fb = local_filter(partial_trace(state, da, db, Subsystem::B), db,
                                    options.cutoff, "B");
    lift = kron(id_a, fb);
    state = hermitian_part(lift * state * lift.adjoint());
    state /= state.trace().real();
    total_b = fb * total_b;

    ++sweeps;
    residual = reduction_residual(state, da, db);
  }

  DensityMatrix normal(da, db, state);
  const auto traceless_a = gell_mann_basis(da).traceless();
  const auto traceless_b = gell_mann_basis(db).traceless();
  const RMatrix t = correlation_tensor(normal, traceless_a, traceless_b);

  Eigen::JacobiSVD<RMatrix> solver(t, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RVector s = solver.singularValues();

  FilterNormalFormResult out{std::move(normal),
                             total_a,
                             total_b,
                             s * double(da * db),
                             rotate(solver.matrixU(), traceless_a),
                             rotate(solver.matrixV(), traceless_b),
                             sweeps,
                             residual};
  return out;
}

double cm_fnf_bound(int dim_a, int dim_b) {
  if (dim_a != dim_b) {
    throw ValidationError("cm_fnf_bound: requires d_A == d_B; use the asymmetric bound");
  }
  return double(dim_a) * dim_a - dim_a;
}

double asymmetric_fnf_bound(int dim_a, int dim_b) {
  const double a = std::min(dim_a, dim_b);
  const double b = std::max(dim_a, dim_b);
  const double tail = std::min(0.0, -(b - 1.0) + (b * b - a * a) / b);
  return a * b * (1.0 - 1.0 / a + (a * a - 1.0) / b + tail) / 2.0;
}

double ccnr_fnf_bound(int dim_a, int dim_b) {
  const double n = double(dim_a) * dim_b;
  return n - std::sqrt(n);
}

double dv_fnf_bound(int dim_a, int dim_b) {
  return std::sqrt(double(dim_a) * dim_b * (dim_a - 1.0) * (dim_b - 1.0));
}

CriterionVerdict fnf_cm_test(const FilterNormalFormResult& fnf, double tol) {
  const int da = fnf.state.dim_a();
  const int db = fnf.state.dim_b();
  if (da != db) {
    std::ostringstream os;
    os << "prop6 requires d_A = d_B, got (" << da << "," << db << ")";
    throw ValidationError(os.str());
  }
  auto v = make_verdict("prop6", fnf.xi_sum(), cm_fnf_bound(da, db), tol);
  v.details["fnf_iterations"] = fnf.iterations;
  v.details["fnf_residual"] = fnf.residual;
  return v;
}

CriterionVerdict fnf_asymmetric_test(const FilterNormalFormResult& fnf, double tol) {
  auto v = make_verdict("eq8", fnf.xi_sum(),
                        asymmetric_fnf_bound(fnf.state.dim_a(), fnf.state.dim_b()), tol);
  v.details["fnf_iterations"] = fnf.iterations;
  v.details["fnf_residual"] = fnf.residual;
  return v;
}

CriterionVerdict dv_test(std::span<const double> xi, int dim_a, int dim_b, double tol) {
  double sum = 0.0;
  for (double x : xi) sum += x;
  return make_verdict("dv", sum, dv_fnf_bound(dim_a, dim_b), tol);
}

CriterionVerdict dv_test(const FilterNormalFormResult& fnf, double tol) {
  auto v = dv_test(std::span<const double>(fnf.xi.data(), static_cast<std::size_t>(fnf.xi.size())),
                   fnf.state.dim_a(), fnf.state.dim_b(), tol);
  v.details["fnf_iterations"] = fnf.iterations;
  v.details["fnf_residual"] = fnf.residual;
  return v;
}

}  // namespace covsep

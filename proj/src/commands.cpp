#include "covsep/commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <regex>
#include <sstream>
#include <thread>

#include "covsep/errors.hpp"
#include "covsep/schmidt.hpp"
#include "covsep/state_zoo.hpp"

namespace covsep {

using nlohmann::ordered_json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string error_type_name(const std::exception& e) {
  if (dynamic_cast<const SingularReducedState*>(&e)) return "SingularReducedState";
  if (dynamic_cast<const NoConvergence*>(&e)) return "NoConvergence";
  if (dynamic_cast<const NoThreshold*>(&e)) return "NoThreshold";
  if (dynamic_cast<const AmbiguousThreshold*>(&e)) return "AmbiguousThreshold";
  if (dynamic_cast<const NumericalError*>(&e)) return "NumericalError";
  if (dynamic_cast<const ValidationError*>(&e)) return "ValidationError";
  return "Error";
}

ordered_json error_to_json(const std::exception& e) {
  ordered_json j;
  j["type"] = error_type_name(e);
  j["message"] = e.what();
  if (auto* nc = dynamic_cast<const NoConvergence*>(&e)) {
    j["iterations"] = nc->iterations();
    j["residual"] = nc->residual();
  }
  if (auto* s = dynamic_cast<const SingularReducedState*>(&e)) {
    j["min_eigenvalue"] = s->min_eigenvalue();
  }
  if (auto* a = dynamic_cast<const AmbiguousThreshold*>(&e)) j["flips"] = a->flips();
  return j;
}

ordered_json header(const std::string& command) {
  ordered_json r;
  r["schema_version"] = kReportSchemaVersion;
  r["tool"] = "covsep";
  r["tool_version"] = kToolVersion;
  r["command"] = command;
  return r;
}

ordered_json vector_to_json(const RVector& v) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

ordered_json fnf_to_json(const FilterNormalFormResult& f, bool with_filters) {
  ordered_json j;
  j["xi"] = vector_to_json(f.xi);
  j["xi_sum"] = f.xi_sum();
  j["iterations"] = f.iterations;
  j["residual"] = f.residual;
  if (with_filters) {
    j["filter_a"] = matrix_to_json(f.filter_a);
    j["filter_b"] = matrix_to_json(f.filter_b);
  }
  return j;
}

ordered_json lur_to_json(const LocalUncertaintySet& lur, const LurValue& value) {
  auto bound = [](const VarianceBound& b) {
    ordered_json j;
    j["value"] = b.value;
    j["kind"] = b.kind == BoundKind::Certified ? "certified" : "estimate";
    j["slack"] = b.slack;
    return j;
  };
  ordered_json j;
  j["lhs"] = value.lhs;
  j["rhs"] = value.rhs;
  j["bound_a"] = bound(lur.bound_a);
  j["bound_b"] = bound(lur.bound_b);
  ordered_json a = ordered_json::array(), b = ordered_json::array();
  for (const auto& op : lur.ops_a) a.push_back(matrix_to_json(op));
  for (const auto& op : lur.ops_b) b.push_back(matrix_to_json(op));
  j["ops_a"] = std::move(a);
  j["ops_b"] = std::move(b);
  return j;
}

ordered_json outcome_to_json(const CriterionOutcome& o) {
  if (o.verdict) return verdict_to_json(*o.verdict);
  ordered_json j;
  j["criterion"] = o.criterion;
  j["error"] = {{"type", o.error_type}, {"message", o.error_message}};
  return j;
}

bool is_fnf_criterion(const std::string& c) { return c == "prop6" || c == "eq8" || c == "dv"; }

std::optional<std::pair<int, int>> random_family_dims(const std::string& family) {
  static const std::regex pattern("random-([2-9])x([2-9])");
  std::smatch m;
  if (!std::regex_match(family, m, pattern)) return std::nullopt;
  return std::make_pair(std::stoi(m[1]), std::stoi(m[2]));
}

std::pair<int, int> batch_family_dims(const std::string& family) {
  if (family == "chessboard") return {3, 3};
  if (auto dims = random_family_dims(family)) return *dims;
  throw ValidationError("unknown batch family '" + family +
                        "' (expected chessboard or random-<dA>x<dB>)");
}

std::function<DensityMatrix(double)> scan_family(const std::string& family, int dim) {
  if (family == "upb-noise") return [](double p) { return upb_noise_state(p); };
  if (family == "werner") return [](double p) { return werner_state(p); };
  if (family == "isotropic") {
    if (dim < 2 || dim > 9) throw ValidationError("isotropic family requires 2 <= dim <= 9");
    return [dim](double p) { return isotropic_state(p, dim); };
  }
  throw ValidationError("unknown scan family '" + family +
                        "' (expected upb-noise, werner or isotropic)");
}

std::pair<int, int> scan_family_dims(const std::string& family, int dim) {
  if (family == "upb-noise") return {3, 3};
  if (family == "werner") return {2, 2};
  return {dim, dim};
}

}  // namespace

const std::vector<std::string>& known_criteria() {
  static const std::vector<std::string> names{"ppt", "ccnr",  "prop3", "prop4",      "prop6",
                                              "eq8", "dv",    "cmc-sdp", "lur-extract"};
  return names;
}

std::vector<std::string> applicable_criteria(int dim_a, int dim_b) {
  std::vector<std::string> out;
  for (const auto& c : known_criteria()) {
    if ((c == "prop3" || c == "prop6") && dim_a != dim_b) continue;
    if ((c == "cmc-sdp" || c == "lur-extract") && (dim_a != 2 || dim_b != 2)) continue;
    out.push_back(c);
  }
  return out;
}

std::vector<std::string> resolve_criteria(const std::string& list, int dim_a, int dim_b) {
  std::vector<std::string> requested;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) continue;
    if (item == "all") {
      for (auto& c : applicable_criteria(dim_a, dim_b)) requested.push_back(c);
      continue;
    }
    const auto& known = known_criteria();
    if (std::find(known.begin(), known.end(), item) == known.end()) {
      throw ValidationError("unknown criterion '" + item + "'");
    }
    if ((item == "cmc-sdp" || item == "lur-extract") && (dim_a != 2 || dim_b != 2)) {
      throw ValidationError(item + " requires 2x2 (two-qubit) states");
    }
    if ((item == "prop3" || item == "prop6") && dim_a != dim_b) {
      throw ValidationError(item + " requires d_A = d_B");
    }
    requested.push_back(item);
  }
  if (requested.empty()) throw ValidationError("no criteria requested");
  std::vector<std::string> out;
  for (const auto& c : requested) {
    if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
  }
  return out;
}

bool Evaluation::failed() const {
  return std::any_of(outcomes.begin(), outcomes.end(),
                     [](const CriterionOutcome& o) { return !o.verdict.has_value(); });
}

Evaluation evaluate_criteria(const DensityMatrix& rho, const std::vector<std::string>& criteria,
                             const AnalyzeOptions& options) {
  Evaluation ev;
  std::optional<OperatorSchmidtDecomposition> schmidt;
  std::exception_ptr fnf_error, cmc_error;
  bool fnf_tried = false, cmc_tried = false;

  auto need_fnf = [&]() -> const FilterNormalFormResult& {
    if (!fnf_tried) {
      fnf_tried = true;
      try {
        if (options.fnf_regularization > 0.0) {
          ev.fnf = to_fnf(mix_with_white_noise(rho, 1.0 - options.fnf_regularization), options.fnf);
        } else {
          ev.fnf = to_fnf(rho, options.fnf);
        }
      } catch (...) {
        fnf_error = std::current_exception();
      }
    }
    if (fnf_error) std::rethrow_exception(fnf_error);
    return *ev.fnf;
  };
  auto need_cmc = [&]() -> const QubitCmcResult& {
    if (!cmc_tried) {
      cmc_tried = true;
      try {
        auto sdp = options.sdp;
        ev.cmc = qubit_cmc_feasibility(qubit_cm(rho), sdp);
      } catch (...) {
        cmc_error = std::current_exception();
      }
    }
    if (cmc_error) std::rethrow_exception(cmc_error);
    return *ev.cmc;
  };
  auto need_schmidt = [&]() -> const OperatorSchmidtDecomposition& {
    if (!schmidt) schmidt = operator_schmidt(rho);
    return *schmidt;
  };

  for (const auto& name : criteria) {
    CriterionOutcome out;
    out.criterion = name;
    try {
      CriterionVerdict v;
      if (name == "ppt") {
        v = ppt_test(rho, options.tol);
      } else if (name == "ccnr") {
        v = ccnr_test(need_schmidt(), options.tol);
      } else if (name == "prop4") {
        v = schmidt_form_test(need_schmidt(), options.tol);
      } else if (name == "prop3") {
        v = correlation_trace_test(rho, options.tol);
      } else if (name == "prop6") {
        v = fnf_cm_test(need_fnf(), options.tol);
      } else if (name == "eq8") {
        v = fnf_asymmetric_test(need_fnf(), options.tol);
      } else if (name == "dv") {
        v = dv_test(need_fnf(), options.tol);
      } else if (name == "cmc-sdp") {
        v = need_cmc().verdict;
      } else if (name == "lur-extract") {
        const auto& cmc = need_cmc();
        if (!cmc.verdict.detected) {
          v = make_verdict("lur-extract", 0.0, 0.0, options.tol);
          v.details["witness_found"] = 0.0;
        } else {
          ev.lur = extract_lur_witness(rho, cmc);
          if (ev.lur) {
            const auto value = lur_value(rho, *ev.lur);
            // separable states satisfy lhs >= rhs
            v = make_verdict("lur-extract", value.rhs, value.lhs, 1e-9);
            v.details["witness_found"] = 1.0;
            v.details["bound_a"] = ev.lur->bound_a.value;
            v.details["bound_b"] = ev.lur->bound_b.value;
            v.details["operators"] = static_cast<double>(ev.lur->ops_a.size());
          } else {
            v = make_verdict("lur-extract", 0.0, 0.0, options.tol);
            v.details["witness_found"] = 0.0;
          }
        }
      } else {
        throw ValidationError("unknown criterion '" + name + "'");
      }
      if (is_fnf_criterion(name) && options.fnf_regularization > 0.0) {
        v.details["regularization"] = options.fnf_regularization;
      }
      out.verdict = std::move(v);
    } catch (const ValidationError&) {
      throw;
    } catch (const std::exception& e) {
      out.error_type = error_type_name(e);
      out.error_message = e.what();
    }
    ev.outcomes.push_back(std::move(out));
  }
  return ev;
}

ordered_json verdict_to_json(const CriterionVerdict& v) {
  ordered_json j;
  j["criterion"] = v.criterion;
  j["left"] = v.left;
  j["right"] = v.right;
  j["margin"] = v.margin;
  j["detected"] = v.detected;
  ordered_json d = ordered_json::object();
  for (const auto& [k, x] : v.details) d[k] = x;
  j["details"] = std::move(d);
  return j;
}

ordered_json matrix_to_json(const CMatrix& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      row.push_back(ordered_json::array({m(i, k).real(), m(i, k).imag()}));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

CommandResult cmd_analyze(const DensityMatrix& rho, const std::string& source,
                          const std::vector<std::string>& criteria,
                          const AnalyzeOptions& options) {
  const auto start = Clock::now();
  CommandResult result;
  auto& r = result.report;
  r = header("analyze");
  r["input"] = {{"source", source}, {"dimA", rho.dim_a()}, {"dimB", rho.dim_b()},
                {"criteria", criteria}, {"tol", options.tol},
                {"fnf_regularization", options.fnf_regularization}};
  r["seed"] = nullptr;

  const auto ev = evaluate_criteria(rho, criteria, options);
  ordered_json verdicts = ordered_json::array();
  for (const auto& o : ev.outcomes) verdicts.push_back(outcome_to_json(o));
  r["verdicts"] = std::move(verdicts);
  if (ev.fnf) r["fnf"] = fnf_to_json(*ev.fnf, false);
  if (ev.lur) r["lur"] = lur_to_json(*ev.lur, lur_value(rho, *ev.lur));
  result.exit_code = ev.failed() ? 2 : 0;
  r["status"] = ev.failed() ? "numerical_failure" : "ok";
  r["timing"] = {{"wall_seconds", seconds_since(start)}};
  return result;
}

CommandResult cmd_scan(const ScanOptions& o) {
  const auto start = Clock::now();
  const auto family = scan_family(o.family, o.dim);
  const auto [da, db] = scan_family_dims(o.family, o.dim);
  const auto criteria = resolve_criteria(o.criterion, da, db);
  if (criteria.size() != 1) throw ValidationError("scan takes exactly one criterion");
  if (!(o.p_min >= 0.0 && o.p_max <= 1.0 && o.p_min < o.p_max)) {
    throw ValidationError("scan range must satisfy 0 <= p-min < p-max <= 1");
  }
  if (!(o.tol > 0.0)) throw ValidationError("scan tolerance must be positive");

  CommandResult result;
  auto& r = result.report;
  r = header("scan");
  ordered_json input{{"family", o.family}, {"criterion", criteria.front()},
                     {"p_min", o.p_min}, {"p_max", o.p_max}, {"tol", o.tol},
                     {"detection_tol", o.analysis.tol}};
  if (o.family == "isotropic") input["dim"] = o.dim;
  r["input"] = std::move(input);
  r["seed"] = nullptr;

  int evaluations = 0;
  auto detects = [&](const DensityMatrix& rho) {
    ++evaluations;
    const auto ev = evaluate_criteria(rho, criteria, o.analysis);
    const auto& out = ev.outcomes.front();
    if (!out.verdict) throw NumericalError(out.error_type + ": " + out.error_message);
    return out.verdict->detected;
  };
  try {
    const auto t = threshold_scan(family, o.p_min, o.p_max, detects, o.tol);
    r["threshold"] = t.threshold;
    r["p_low"] = t.p_low;
    r["p_high"] = t.p_high;
    r["detected_above"] = t.detected_above;
    r["evaluations"] = t.evaluations;
    r["status"] = "ok";
  } catch (const NumericalError& e) {
    r["evaluations"] = evaluations;
    r["status"] = error_type_name(e);
    r["error"] = error_to_json(e);
    result.exit_code = 2;
  }
  r["timing"] = {{"wall_seconds", seconds_since(start)}};
  return result;
}

AnalyzeOptions batch_defaults(const std::string& family) {
  AnalyzeOptions a;
  if (family == "chessboard") {
    a.fnf_regularization = 1e-9;
    a.fnf.max_iter = 20000;
  }
  return a;
}

std::vector<DensityMatrix> batch_states(const std::string& family, long n, std::uint64_t seed) {
  const auto [da, db] = batch_family_dims(family);
  if (n < 1) throw ValidationError("batch size n must be at least 1");
  Rng rng(seed);
  std::vector<DensityMatrix> states;
  states.reserve(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    if (family == "chessboard") {
      states.push_back(chessboard_state(random_chessboard_params(rng)));
    } else {
      states.push_back(random_density_matrix(da, db, da * db, rng));
    }
  }
  return states;
}

std::pair<double, double> wilson_interval(long k, long n) {
  if (n <= 0) return {0.0, 1.0};
  const double z = 1.959963984540054;
  const double phat = static_cast<double>(k) / n;
  const double denom = 1.0 + z * z / n;
  const double centre = (phat + z * z / (2.0 * n)) / denom;
  const double half = z * std::sqrt(phat * (1.0 - phat) / n + z * z / (4.0 * n * n)) / denom;
  const double lo = k == 0 ? 0.0 : std::max(0.0, centre - half);
  const double hi = k == n ? 1.0 : std::min(1.0, centre + half);
  return {lo, hi};
}

CommandResult cmd_batch(const BatchOptions& o) {
  const auto start = Clock::now();
  const auto [da, db] = batch_family_dims(o.family);
  const auto criteria = resolve_criteria(o.criteria, da, db);
  const auto analysis = o.analysis.value_or(batch_defaults(o.family));
  const auto states = batch_states(o.family, o.n, o.seed);

  int threads = o.threads > 0 ? o.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, static_cast<int>(std::max<long>(1, o.n)));

  std::vector<Evaluation> evals(states.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < states.size(); i = next++) {
      evals[i] = evaluate_criteria(states[i], criteria, analysis);
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  CommandResult result;
  auto& r = result.report;
  r = header("batch");
  r["input"] = {{"family", o.family},
                {"n", o.n},
                {"criteria", criteria},
                {"tol", analysis.tol},
                {"fnf_regularization", analysis.fnf_regularization},
                {"fnf_max_iter", analysis.fnf.max_iter}};
  r["seed"] = o.seed;

  const std::size_t nc = criteria.size();
  ordered_json rates = ordered_json::array();
  ordered_json failures = ordered_json::array();
  long total_failures = 0;
  for (std::size_t c = 0; c < nc; ++c) {
    long detected = 0, evaluated = 0, failed = 0;
    for (std::size_t i = 0; i < evals.size(); ++i) {
      const auto& out = evals[i].outcomes[c];
      if (!out.verdict) {
        ++failed;
        if (failures.size() < 100) {
          failures.push_back({{"index", i}, {"criterion", out.criterion},
                              {"type", out.error_type}, {"message", out.error_message}});
        }
        continue;
      }
      ++evaluated;
      if (out.verdict->detected) ++detected;
    }
    total_failures += failed;
    const auto [lo, hi] = wilson_interval(detected, evaluated);
    rates.push_back({{"criterion", criteria[c]},
                     {"detected", detected},
                     {"evaluated", evaluated},
                     {"failed", failed},
                     {"rate", evaluated > 0 ? static_cast<double>(detected) / evaluated : 0.0},
                     {"wilson_low", lo},
                     {"wilson_high", hi}});
  }
  r["rates"] = std::move(rates);

  ordered_json agreement = ordered_json::array();
  for (std::size_t a = 0; a < nc; ++a) {
    for (std::size_t b = a + 1; b < nc; ++b) {
      long compared = 0, agree = 0;
      for (const auto& ev : evals) {
        const auto& va = ev.outcomes[a].verdict;
        const auto& vb = ev.outcomes[b].verdict;
        if (!va || !vb) continue;
        if (std::abs(va->margin) <= 1e-6 || std::abs(vb->margin) <= 1e-6) continue;
        ++compared;
        if (va->detected == vb->detected) ++agree;
      }
      agreement.push_back({{"a", criteria[a]},
                           {"b", criteria[b]},
                           {"compared", compared},
                           {"agree", agree},
                           {"rate", compared > 0 ? static_cast<double>(agree) / compared : 1.0}});
    }
  }
  r["agreement"] = std::move(agreement);
  r["failures"] = {{"total", total_failures}, {"first", std::move(failures)}};
  r["status"] = total_failures > 0 ? "partial" : "ok";
  r["timing"] = {{"wall_seconds", seconds_since(start)}, {"threads", threads}};
  return result;
}

CommandResult cmd_fnf(const DensityMatrix& rho, const std::string& source,
                      const FnfOptions& options) {
  const auto start = Clock::now();
  CommandResult result;
  auto& r = result.report;
  r = header("fnf");
  r["input"] = {{"source", source}, {"dimA", rho.dim_a()}, {"dimB", rho.dim_b()},
                {"tol", options.tol}, {"max_iter", options.max_iter}};
  r["seed"] = nullptr;
  try {
    r["fnf"] = fnf_to_json(to_fnf(rho, options), true);
    r["status"] = "ok";
  } catch (const NumericalError& e) {
    r["status"] = error_type_name(e);
    r["error"] = error_to_json(e);
    result.exit_code = 2;
  }
  r["timing"] = {{"wall_seconds", seconds_since(start)}};
  return result;
}

DensityMatrix make_named_state(const std::string& family, double p, int dim, std::uint64_t seed) {
  if (family == "bell") return maximally_entangled(2);
  if (family == "maximally-mixed") return maximally_mixed(dim, dim);
  if (family == "werner") return werner_state(p);
  if (family == "isotropic") return isotropic_state(p, dim);
  if (family == "upb") return upb_tiles_state();
  if (family == "upb-noise") return upb_noise_state(p);
  if (family == "chessboard") {
    Rng rng(seed);
    return chessboard_state(random_chessboard_params(rng));
  }
  if (auto dims = random_family_dims(family)) {
    return random_density_matrix(dims->first, dims->second, dims->first * dims->second, seed);
  }
  throw ValidationError("unknown state family '" + family + "'");
}

namespace {

void flatten(const ordered_json& j, const std::string& path, std::ostringstream& os) {
  if (j.is_object()) {
    if (j.empty()) os << path << " = {}\n";
    for (const auto& [k, v] : j.items()) flatten(v, path.empty() ? k : path + "." + k, os);
  } else if (j.is_array()) {
    const bool scalars = std::all_of(j.begin(), j.end(), [](const ordered_json& x) {
      return x.is_primitive();
    });
    if (scalars) {
      os << path << " = " << j.dump() << "\n";
    } else {
      for (std::size_t i = 0; i < j.size(); ++i) {
        flatten(j[i], path + "[" + std::to_string(i) + "]", os);
      }
    }
  } else if (j.is_string()) {
    os << path << " = " << j.get<std::string>() << "\n";
  } else {
    os << path << " = " << j.dump() << "\n";
  }
}

}  // namespace

std::string render_text(const ordered_json& report) {
  std::ostringstream os;
  flatten(report, "", os);
  return os.str();
}

ordered_json without_timing(ordered_json report) {
  report.erase("timing");
  return report;
}

}  // namespace covsep

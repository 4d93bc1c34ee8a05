#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "covsep/cmc.hpp"
#include "covsep/filter_normal_form.hpp"
#include "covsep/lur.hpp"
#include "covsep/quantum_state.hpp"
#include "covsep/verdict.hpp"

namespace covsep {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

/// ppt, ccnr, prop3, prop4, prop6, eq8, dv, cmc-sdp, lur-extract
const std::vector<std::string>& known_criteria();

/// Criteria that can run on a d_A x d_B state, in canonical order.
std::vector<std::string> applicable_criteria(int dim_a, int dim_b);

/// Splits a comma list; "all" expands to applicable_criteria. Throws
/// ValidationError for unknown names and for criteria the dimensions rule out
/// ("cmc-sdp requires 2x2 (two-qubit) states", "prop6 requires d_A = d_B").
std::vector<std::string> resolve_criteria(const std::string& list, int dim_a, int dim_b);

struct AnalyzeOptions {
  double tol = kDefaultDetectionTol;
  FeasibilityOptions sdp;
  FnfOptions fnf;
  // weight of white noise mixed in before the filter normal form (prop6, eq8, dv)
  double fnf_regularization = 0.0;
};

struct CriterionOutcome {
  std::string criterion;
  std::optional<CriterionVerdict> verdict;
  std::string error_type;  // empty on success
  std::string error_message;
};

struct Evaluation {
  std::vector<CriterionOutcome> outcomes;
  std::optional<FilterNormalFormResult> fnf;
  std::optional<QubitCmcResult> cmc;
  std::optional<LocalUncertaintySet> lur;

  bool failed() const;
};

/// Runs each criterion independently; numerical failures are recorded in the
/// outcome and never stop the remaining criteria. Criteria must already be
/// resolved for the state's dimensions.
Evaluation evaluate_criteria(const DensityMatrix& rho, const std::vector<std::string>& criteria,
                             const AnalyzeOptions& options = {});

struct CommandResult {
  nlohmann::ordered_json report;
  int exit_code = 0;  // 0 ok, 1 invalid input, 2 numerical failure
};

CommandResult cmd_analyze(const DensityMatrix& rho, const std::string& source,
                          const std::vector<std::string>& criteria,
                          const AnalyzeOptions& options = {});

struct ScanOptions {
  std::string family;     // upb-noise, werner, isotropic
  std::string criterion;
  double p_min = 0.0;
  double p_max = 1.0;
  double tol = 1e-6;      // bisection width
  int dim = 3;            // isotropic only
  AnalyzeOptions analysis;
};

CommandResult cmd_scan(const ScanOptions& options);

struct BatchOptions {
  std::string family;  // chessboard, random-<dA>x<dB>
  long n = 1000;
  std::uint64_t seed = 1;
  std::string criteria = "all";
  int threads = 0;     // 0: hardware concurrency
  std::optional<AnalyzeOptions> analysis;  // family defaults when unset
};

/// Throws ValidationError for unknown families, n < 1 or bad criteria.
CommandResult cmd_batch(const BatchOptions& options);

/// Family defaults: chessboard uses fnf_regularization 1e-9 and max_iter 20000.
AnalyzeOptions batch_defaults(const std::string& family);

/// States of a batch family, generated sequentially from one seeded stream.
std::vector<DensityMatrix> batch_states(const std::string& family, long n, std::uint64_t seed);

CommandResult cmd_fnf(const DensityMatrix& rho, const std::string& source,
                      const FnfOptions& options = {});

/// Named states for the `state` subcommand: bell, maximally-mixed, werner,
/// isotropic, upb, upb-noise, chessboard, random-<dA>x<dB>.
DensityMatrix make_named_state(const std::string& family, double p, int dim, std::uint64_t seed);

/// Wilson score interval at 95% confidence.
std::pair<double, double> wilson_interval(long successes, long trials);

/// Flat "path = value" lines, one per leaf, in report order.
std::string render_text(const nlohmann::ordered_json& report);

/// Report with the "timing" member removed; the remainder is deterministic.
nlohmann::ordered_json without_timing(nlohmann::ordered_json report);

nlohmann::ordered_json verdict_to_json(const CriterionVerdict& verdict);
nlohmann::ordered_json matrix_to_json(const CMatrix& m);

}  // namespace covsep

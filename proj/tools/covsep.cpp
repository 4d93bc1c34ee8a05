// covsep command-line front end.
//
//   covsep analyze --state rho.json [--criteria all] [--tol 1e-10] [--json]
//   covsep scan    --family upb-noise --criteria prop6 [--p-min 0 --p-max 1] [--tol 1e-6]
//   covsep batch   --family chessboard --n 10000 --seed 1 [--criteria all] [--threads N]
//   covsep fnf     --state rho.json
//   covsep state   --family werner --p 0.5 [--out rho.json]
//
// Exit codes: 0 success, 1 invalid input, 2 numerical failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "covsep/commands.hpp"
#include "covsep/errors.hpp"
#include "covsep/state_io.hpp"

namespace {

void emit(const covsep::CommandResult& result, bool json) {
  if (json) {
    std::cout << result.report.dump(2) << "\n";
  } else {
    std::cout << covsep::render_text(result.report);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"covsep: covariance-matrix entanglement criteria"};
  app.require_subcommand(1);

  bool json = false;
  std::string state_path;
  std::string family;
  std::string criteria = "all";
  double tol = covsep::kDefaultDetectionTol;
  double scan_tol = 1e-6;
  double p_min = 0.0, p_max = 1.0, p = 1.0;
  long n = 1000;
  std::uint64_t seed = 1;
  int threads = 0;
  int dim = 3;
  std::optional<int> max_iter;
  double fnf_tol = 1e-10;
  std::optional<double> regularize;
  std::string out_path;

  auto* analyze = app.add_subcommand("analyze", "run criteria on a state file");
  analyze->add_option("--state", state_path, "state file")->required();
  analyze->add_option("--criteria", criteria, "comma list or 'all'");
  analyze->add_option("--tol", tol, "detection tolerance");
  analyze->add_option("--max-iter", max_iter, "filter normal form sweeps");
  analyze->add_option("--regularize", regularize, "white-noise weight mixed in before the FNF");
  analyze->add_flag("--json", json, "JSON report");

  auto* scan = app.add_subcommand("scan", "threshold of a criterion along a noisy family");
  scan->add_option("--family", family, "upb-noise, werner or isotropic")->required();
  scan->add_option("--criteria", criteria, "single criterion")->required();
  scan->add_option("--p-min", p_min, "lower end of the range");
  scan->add_option("--p-max", p_max, "upper end of the range");
  scan->add_option("--tol", scan_tol, "bisection width");
  scan->add_option("--dim", dim, "local dimension (isotropic)");
  scan->add_option("--max-iter", max_iter, "filter normal form sweeps");
  scan->add_flag("--json", json, "JSON report");

  auto* batch = app.add_subcommand("batch", "detection rates over a random family");
  batch->add_option("--family", family, "chessboard or random-<dA>x<dB>")->required();
  batch->add_option("--n", n, "number of states");
  batch->add_option("--seed", seed, "generator seed");
  batch->add_option("--criteria", criteria, "comma list or 'all'");
  batch->add_option("--tol", tol, "detection tolerance");
  batch->add_option("--threads", threads, "worker threads (0: all cores)");
  batch->add_option("--max-iter", max_iter, "filter normal form sweeps");
  batch->add_option("--regularize", regularize, "white-noise weight mixed in before the FNF");
  batch->add_flag("--json", json, "JSON report");

  auto* fnf = app.add_subcommand("fnf", "filter normal form of a state file");
  fnf->add_option("--state", state_path, "state file")->required();
  fnf->add_option("--tol", fnf_tol, "residual target");
  fnf->add_option("--max-iter", max_iter, "filter sweeps");
  fnf->add_flag("--json", json, "JSON report");

  auto* state = app.add_subcommand("state", "write a state file");
  state->add_option("--family", family,
                    "bell, maximally-mixed, werner, isotropic, upb, upb-noise, chessboard, "
                    "random-<dA>x<dB>")
      ->required();
  state->add_option("--p", p, "mixing parameter");
  state->add_option("--dim", dim, "local dimension");
  state->add_option("--seed", seed, "generator seed");
  state->add_option("--out", out_path, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 1;
  }

  try {
    covsep::CommandResult result;
    if (*analyze) {
      const auto rho = covsep::read_state_file(state_path);
      const auto list = covsep::resolve_criteria(criteria, rho.dim_a(), rho.dim_b());
      covsep::AnalyzeOptions options;
      options.tol = tol;
      if (max_iter) options.fnf.max_iter = *max_iter;
      if (regularize) options.fnf_regularization = *regularize;
      result = covsep::cmd_analyze(rho, state_path, list, options);
    } else if (*scan) {
      covsep::ScanOptions options;
      options.family = family;
      options.criterion = criteria;
      options.p_min = p_min;
      options.p_max = p_max;
      options.tol = scan_tol;
      options.dim = dim;
      if (max_iter) options.analysis.fnf.max_iter = *max_iter;
      result = covsep::cmd_scan(options);
    } else if (*batch) {
      covsep::BatchOptions options;
      options.family = family;
      options.n = n;
      options.seed = seed;
      options.criteria = criteria;
      options.threads = threads;
      auto analysis = covsep::batch_defaults(family);
      analysis.tol = tol;
      if (max_iter) analysis.fnf.max_iter = *max_iter;
      if (regularize) analysis.fnf_regularization = *regularize;
      options.analysis = analysis;
      result = covsep::cmd_batch(options);
    } else if (*fnf) {
      const auto rho = covsep::read_state_file(state_path);
      covsep::FnfOptions options;
      options.tol = fnf_tol;
      if (max_iter) options.max_iter = *max_iter;
      result = covsep::cmd_fnf(rho, state_path, options);
    } else if (*state) {
      const auto rho = covsep::make_named_state(family, p, dim, seed);
      if (out_path.empty()) {
        std::cout << covsep::format_state(rho);
      } else {
        covsep::write_state_file(out_path, rho);
      }
      return 0;
    }
    emit(result, json);
    return result.exit_code;
  } catch (const covsep::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const covsep::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  }
}

#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

#include "covsep/commands.hpp"
#include "covsep/errors.hpp"
#include "covsep/state_io.hpp"
#include "covsep/state_zoo.hpp"

using namespace covsep;
using nlohmann::ordered_json;

namespace {

struct Run {
  int code;
  std::string out;
};

Run run_cli(const std::string& args) {
  const char* cli = std::getenv("COVSEP_CLI");
  REQUIRE(cli != nullptr);
  const std::string cmd = std::string(cli) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf;
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  const int status = pclose(pipe);
  return {WEXITSTATUS(status), out};
}

std::string temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / ("covsep_test_" + name);
  std::ofstream(path, std::ios::binary) << content;
  return path.string();
}

}  // namespace

TEST_CASE("state file round trip is byte exact") {
  Rng rng(1);
  for (auto [da, db] : {std::pair{2, 2}, {2, 3}, {3, 3}}) {
    const auto rho = random_density_matrix(da, db, da * db, rng);
    const std::string text = format_state(rho);
    const auto back = parse_state(text);
    CHECK((back.matrix() - rho.matrix()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(format_state(back) == text);
  }
  const std::string bell = format_state(maximally_entangled(2));
  CHECK(bell.rfind("{\"dimA\":2,\"dimB\":2,\"matrix\":[[", 0) == 0);
}

TEST_CASE("state file validation names the problem") {
  auto message = [](const std::string& text) -> std::string {
    try {
      parse_state(text);
    } catch (const ValidationError& e) {
      return e.what();
    }
    return "";
  };
  CHECK(message("not json").find("not valid JSON") != std::string::npos);
  CHECK(message("{\"dimA\":2,\"matrix\":[]}").find("dimB") != std::string::npos);
  CHECK(message("{\"dimA\":2,\"dimB\":2,\"matrix\":[[1,0]]}").find("16") != std::string::npos);
  std::string entries;
  for (int k = 0; k < 16; ++k) entries += std::string(k ? "," : "") + (k == 5 ? "[1]" : "[0,0]");
  CHECK(message("{\"dimA\":2,\"dimB\":2,\"matrix\":[" + entries + "]}").find("entry 5") != std::string::npos);
  // non-Hermitian: (0,1) = 0.1, (1,0) = 0
  entries.clear();
  for (int k = 0; k < 16; ++k) {
    std::string e = "[0,0]";
    if (k % 5 == 0) e = "[0.25,0]";
    if (k == 1) e = "[0.1,0]";
    entries += std::string(k ? "," : "") + e;
  }
  CHECK(message("{\"dimA\":2,\"dimB\":2,\"matrix\":[" + entries + "]}").find("(0,1)") != std::string::npos);
}

TEST_CASE("criteria resolution") {
  CHECK(resolve_criteria("all", 2, 2).size() == 9);
  CHECK(resolve_criteria("all", 2, 3) ==
        std::vector<std::string>{"ppt", "ccnr", "prop4", "eq8", "dv"});
  CHECK(resolve_criteria("ppt, prop6,ppt", 3, 3) == std::vector<std::string>{"ppt", "prop6"});
  CHECK_THROWS_AS(resolve_criteria("cmc-sdp", 3, 3), ValidationError);
  CHECK_THROWS_AS(resolve_criteria("prop6", 2, 3), ValidationError);
  CHECK_THROWS_AS(resolve_criteria("bogus", 2, 2), ValidationError);
  CHECK_THROWS_AS(resolve_criteria("", 2, 2), ValidationError);
}

TEST_CASE("analyze reports") {
  const auto bell = cmd_analyze(maximally_entangled(2), "bell", resolve_criteria("all", 2, 2));
  CHECK(bell.exit_code == 0);
  const auto& r = bell.report;
  CHECK(r["schema_version"] == 1);
  for (const auto& v : r["verdicts"]) {
    INFO(v.dump());
    CHECK(v["detected"] == true);
  }
  CHECK(r["verdicts"][0]["details"]["min_eigenvalue"].get<double>() == doctest::Approx(-0.5));
  CHECK(r.contains("fnf"));
  CHECK(r.contains("lur"));

  const auto mm = cmd_analyze(maximally_mixed(3, 3), "mm", resolve_criteria("all", 3, 3));
  CHECK(mm.exit_code == 0);
  for (const auto& v : mm.report["verdicts"]) CHECK(v["detected"] == false);

  // a numerical failure is recorded per criterion and the others still run
  CVector psi = CVector::Zero(4);
  psi(0) = 1.0;
  const auto pure = cmd_analyze(pure_state(2, 2, psi), "pure", resolve_criteria("ppt,prop6,ccnr", 2, 2));
  CHECK(pure.exit_code == 2);
  CHECK(pure.report["status"] == "numerical_failure");
  CHECK(pure.report["verdicts"][0]["detected"] == false);
  CHECK(pure.report["verdicts"][1]["error"]["type"] == "SingularReducedState");
  CHECK(pure.report["verdicts"][2]["detected"] == false);
}

TEST_CASE("scan reports") {
  ScanOptions o;
  o.family = "werner";
  o.criterion = "prop6";
  const auto w = cmd_scan(o);
  CHECK(w.exit_code == 0);
  CHECK(std::abs(w.report["threshold"].get<double>() - 1.0 / 3.0) < 1e-4);
  CHECK(w.report["p_low"].get<double>() < w.report["p_high"].get<double>());
  CHECK(w.report["evaluations"].get<int>() > 32);

  o.family = "upb-noise";
  o.criterion = "ppt";
  const auto u = cmd_scan(o);
  CHECK(u.exit_code == 2);
  CHECK(u.report["status"] == "NoThreshold");

  o.family = "nope";
  CHECK_THROWS_AS(cmd_scan(o), ValidationError);
}

TEST_CASE("batch reports are deterministic and thread independent") {
  BatchOptions o;
  o.family = "random-2x2";
  o.n = 40;
  o.seed = 99;
  o.criteria = "ppt,prop6,ccnr";
  o.threads = 1;
  const auto a = cmd_batch(o);
  o.threads = 3;
  const auto b = cmd_batch(o);
  CHECK(without_timing(a.report).dump() == without_timing(b.report).dump());
  const auto& rates = a.report["rates"];
  CHECK(rates[0]["rate"] == rates[1]["rate"]);
  for (const auto& ag : a.report["agreement"]) {
    if (ag["a"] == "ppt" && ag["b"] == "prop6") CHECK(ag["rate"].get<double>() == 1.0);
  }
  o.seed = 100;
  CHECK(without_timing(cmd_batch(o).report).dump() != without_timing(a.report).dump());
  o.family = "unknown";
  CHECK_THROWS_AS(cmd_batch(o), ValidationError);
  o.family = "random-2x2";
  o.n = 0;
  CHECK_THROWS_AS(cmd_batch(o), ValidationError);
}

TEST_CASE("Wilson interval") {
  const auto [lo, hi] = wilson_interval(50, 100);
  CHECK(lo == doctest::Approx(0.4038).epsilon(1e-3));
  CHECK(hi == doctest::Approx(0.5962).epsilon(1e-3));
  CHECK(wilson_interval(0, 10).first == 0.0);
  CHECK(wilson_interval(10, 10).second == 1.0);
}

TEST_CASE("fnf reports") {
  const auto bell = cmd_fnf(maximally_entangled(2), "bell");
  CHECK(bell.exit_code == 0);
  for (const auto& x : bell.report["fnf"]["xi"]) CHECK(x.get<double>() == doctest::Approx(2.0));
  const auto mm = cmd_fnf(maximally_mixed(2, 2), "mm");
  for (const auto& x : mm.report["fnf"]["xi"]) CHECK(std::abs(x.get<double>()) < 1e-14);
  CVector psi = CVector::Zero(4);
  psi(0) = 1.0;
  const auto bad = cmd_fnf(pure_state(2, 2, psi), "pure");
  CHECK(bad.exit_code == 2);
  CHECK(bad.report["error"]["type"] == "SingularReducedState");
}

TEST_CASE("command-line exit codes") {
  const auto bell = temp_file("bell.json", format_state(maximally_entangled(2)));
  const auto mm3 = temp_file("mm3.json", format_state(maximally_mixed(3, 3)));
  CVector psi = CVector::Zero(4);
  psi(0) = 1.0;
  const auto pure = temp_file("pure.json", format_state(pure_state(2, 2, psi)));
  const auto broken = temp_file("broken.json", "{\"dimA\":2}");

  const auto ok = run_cli("analyze --state " + bell + " --json");
  CHECK(ok.code == 0);
  const auto report = ordered_json::parse(ok.out);
  CHECK(report["verdicts"].size() == 9);

  CHECK(run_cli("analyze --state " + mm3 + " --criteria cmc-sdp").code == 1);
  CHECK(run_cli("analyze --state " + broken).code == 1);
  CHECK(run_cli("analyze --state /nonexistent/file.json").code == 1);
  CHECK(run_cli("analyze --state " + bell + " --frobnicate").code == 1);
  CHECK(run_cli("fnf --state " + pure).code == 2);
  CHECK(run_cli("scan --family upb-noise --criteria ppt").code == 2);
  CHECK(run_cli("batch --family nowhere --n 3").code == 1);

  // generated state files survive a parse/format cycle byte for byte
  const auto gen = run_cli("state --family random-3x3 --seed 4");
  CHECK(gen.code == 0);
  CHECK(format_state(parse_state(gen.out)) == gen.out);
  const auto copy = temp_file("copy.json", gen.out);
  CHECK(format_state(read_state_file(copy)) == gen.out);
}

TEST_CASE("command-line reports are reproducible") {
  const std::string args = "batch --family random-2x3 --n 25 --seed 5 --criteria ppt,ccnr,prop4 --json";
  const auto a = run_cli(args + " --threads 1");
  const auto b = run_cli(args + " --threads 2");
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  CHECK(without_timing(ordered_json::parse(a.out)).dump() == without_timing(ordered_json::parse(b.out)).dump());
}

#include "covsep/state_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "covsep/errors.hpp"

namespace covsep {

using nlohmann::ordered_json;

DensityMatrix parse_state(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw ValidationError(std::string("state file: not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("state file: top level must be an object");
  for (const char* key : {"dimA", "dimB", "matrix"}) {
    if (!doc.contains(key)) throw ValidationError(std::string("state file: missing field '") + key + "'");
  }
  if (!doc["dimA"].is_number_integer() || !doc["dimB"].is_number_integer()) {
    throw ValidationError("state file: dimA and dimB must be integers");
  }
  const long da = doc["dimA"].get<long>();
  const long db = doc["dimB"].get<long>();
  if (da < 2 || db < 2 || da > 16 || db > 16) {
    throw ValidationError("state file: dimA and dimB must lie in [2, 16]");
  }
  const auto& entries = doc["matrix"];
  const long n = da * db;
  if (!entries.is_array() || static_cast<long>(entries.size()) != n * n) {
    std::ostringstream os;
    os << "state file: matrix must hold " << n * n << " [re, im] entries";
    if (entries.is_array()) os << ", found " << entries.size();
    throw ValidationError(os.str());
  }
  CMatrix m(n, n);
  for (long k = 0; k < n * n; ++k) {
    const auto& e = entries[k];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
      std::ostringstream os;
      os << "state file: entry " << k << " (row " << k / n << ", column " << k % n
         << ") is not a [re, im] pair of numbers";
      throw ValidationError(os.str());
    }
    m(k / n, k % n) = Complex(e[0].get<double>(), e[1].get<double>());
  }
  return DensityMatrix(static_cast<int>(da), static_cast<int>(db), m);
}

std::string format_state(const DensityMatrix& rho) {
  ordered_json doc;
  doc["dimA"] = rho.dim_a();
  doc["dimB"] = rho.dim_b();
  ordered_json entries = ordered_json::array();
  const auto& m = rho.matrix();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      entries.push_back(ordered_json::array({m(i, j).real(), m(i, j).imag()}));
  doc["matrix"] = std::move(entries);
  return doc.dump() + "\n";
}

DensityMatrix read_state_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("state file: cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_state(buffer.str());
}

void write_state_file(const std::string& path, const DensityMatrix& rho) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("state file: cannot write '" + path + "'");
  out << format_state(rho);
}

}  // namespace covsep

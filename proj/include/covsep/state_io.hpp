#pragma once

#include <string>

#include "covsep/quantum_state.hpp"

namespace covsep {

/// State file: one JSON object with keys in this order
///
///   {"dimA":2,"dimB":2,"matrix":[[re,im],[re,im],...]}
///
/// `matrix` lists all (d_A d_B)^2 entries row-major in the composite index
/// i * d_B + j, each as a [re, im] pair. format_state writes exactly this
/// (compact, shortest round-trip doubles, trailing newline), so parsing and
/// re-writing a file produced by format_state reproduces it byte for byte.
DensityMatrix parse_state(const std::string& text);
std::string format_state(const DensityMatrix& rho);

DensityMatrix read_state_file(const std::string& path);
void write_state_file(const std::string& path, const DensityMatrix& rho);

}  // namespace covsep

#pragma once

#include <map>
#include <string>

namespace covsep {

/// Outcome of one separability test, phrased as "separable states satisfy
/// left <= right". margin = right - left; detected <=> margin < -tol.
struct CriterionVerdict {
  std::string criterion;
  double left = 0.0;
  double right = 0.0;
  double margin = 0.0;
  bool detected = false;
  std::map<std::string, double> details;
};

inline constexpr double kDefaultDetectionTol = 1e-10;

inline CriterionVerdict make_verdict(std::string criterion, double left, double right,
                                     double tol = kDefaultDetectionTol) {
  CriterionVerdict v;
  v.criterion = std::move(criterion);
  v.left = left;
  v.right = right;
  v.margin = right - left;
  v.detected = v.margin < -tol;
  return v;
}

}  // namespace covsep

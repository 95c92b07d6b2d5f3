#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "zeta/error.hpp"

namespace zeta {

/// Certified lower/upper sandwich for a weak-norm value, with method
/// provenance per endpoint.  upper may be +inf.
struct EstimateInterval {
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  std::string lower_method;
  std::string upper_method;
  bool gap_reached = true;

  static EstimateInterval exact(double v, const std::string& method) {
    return {v, v, method, method, true};
  }

  void validate() const {
    require(lower >= 0.0, Err::bad_params, "EstimateInterval: lower must be >= 0");
    require(lower <= upper + 1e-12, Err::bad_params, "EstimateInterval: lower > upper");
  }
};

/// One evaluated bound: observed left side, right side (possibly an interval
/// through estimator slack), validity verdict and tightness ratio.
struct BoundReport {
  std::string name;
  std::vector<std::pair<std::string, double>> params;
  double lhs = 0.0;
  double rhs_lower = 0.0;
  double rhs_upper = 0.0;
  bool valid = false;
  bool conservative = false;  // verdict needed the upper endpoint
  double tightness = 0.0;     // lhs / rhs_lower

  static BoundReport make(std::string name, std::vector<std::pair<std::string, double>> params,
                          double lhs, double rhs_lower, double rhs_upper) {
    BoundReport r;
    r.name = std::move(name);
    r.params = std::move(params);
    r.lhs = lhs;
    r.rhs_lower = rhs_lower;
    r.rhs_upper = rhs_upper;
    const double tol = 1e-10 * (1.0 + std::abs(rhs_upper));
    if (lhs <= rhs_lower + tol) {
      r.valid = true;
    } else if (lhs <= rhs_upper + tol) {
      r.valid = true;
      r.conservative = true;
    }
    r.tightness = rhs_lower > 0.0 ? lhs / rhs_lower
                                  : (lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    return r;
  }
};

}  // namespace zeta

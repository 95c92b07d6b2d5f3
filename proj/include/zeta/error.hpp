#pragma once

#include <stdexcept>
#include <string>

namespace zeta {

enum class Err {
  bad_params,
  not_a_law,
  degenerate_law,
  mass_not_zero,
  moments_not_zero,
  zero_at_one,
  infeasible_grid,
  solver_failure,
  lambda_too_small,
  inadmissible_params,
  zeta_too_large,
  resource_cap,
};

/// All library failures carry a code so the CLI can map them to exit codes.
class Error : public std::runtime_error {
 public:
  Error(Err code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Err code() const noexcept { return code_; }

 private:
  Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, Err code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace zeta

#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "ebl/equilibrium.hpp"

namespace ebl {

enum class CheckStatus { pass, fail, out_of_regime };
const char* to_string(CheckStatus s);

struct Check {
  std::string name;
  CheckStatus status = CheckStatus::fail;
  double measured = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct VerificationReport {
  std::vector<Check> checks;

  bool passed() const;
  const Check& get(const std::string& name) const;
};

struct Tolerances {
  double muc = 1e-12;
  double clearing = 1e-9;
  double exact = 1e-12;
  double fd_relative = 1e-6;
  double fd_abs_floor = 1e-9;
  double root = 1e-8;
  double min_t_stat = 3.0;
};

struct VerifyOptions {
  Tolerances tol;
  std::int64_t path_periods = 102;  // output draws for the clearing and symmetric paths
  std::int64_t mc_periods = 52;     // output draws per Monte Carlo path
  std::int64_t n_paths = 10000;
  std::uint64_t seed = 42;
  unsigned threads = 0;
  double shock_size = 1.0;
  // Baseline output for shock scenarios; NaN means the home output mean.
  double shock_baseline = std::numeric_limits<double>::quiet_NaN();
};

// Kernel of dX^i_i/dy_i recovered from a solved equilibrium:
// gamma (1 + beta0) Sigma (phi0 + phi1) times the phi-weighted holding
// coefficients on y_t.
double kernel_from_equilibrium(const ModelParams& params, Country country);

VerificationReport run_verification(const ModelParams& params, const VerifyOptions& options);

}  // namespace ebl

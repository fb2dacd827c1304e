#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ebl/demands.hpp"
#include "ebl/equilibrium.hpp"

namespace ebl {

// Flows into one country's asset: Delta^i_i (domestic holders, retrenchment
// when positive) and Delta^j_i (foreign holders, fickleness when negative).
struct AssetFlows {
  double domestic = 0.0;
  double foreign = 0.0;
};

using Flows = PerCountry<AssetFlows>;

Flows flows_between(const AggregateHoldings& prev, const AggregateHoldings& now);

inline double home_bias(const AggregateHoldings& X) {
  return X(Country::home, Country::home) - X(Country::home, Country::foreign);
}

struct PeriodState {
  std::int64_t t = 0;
  OutputPair y;
  OutputPair price;
  CohortDemands cohorts;
  AggregateHoldings aggregate;
  Flows flows;
  double home_bias = 0.0;
  double clearing_residual = 0.0;  // max over assets
};

struct SimulationOptions {
  // Share of output variance from a shock common to both countries. Agents
  // still believe outputs are independent; prices and demands are unchanged
  // for any realization, only the joint law of draws moves. 0 = independent.
  double global_factor_share = 0.0;
};

// Outputs y_0..y_{T-1} are drawn; periods t = 2..T-1 are recorded, since the
// oldest participant's window and the lagged holdings need t-1 and t-2.
struct EconomyPath {
  std::uint64_t rng_seed = 0;
  std::vector<OutputPair> outputs;
  std::vector<PeriodState> periods;

  double mean_home_bias() const;
  double max_clearing_residual() const;
};

inline constexpr std::int64_t kBurnIn = 2;

EconomyPath simulate_path(const ModelParams& params, std::int64_t T, std::uint64_t seed,
                          const SimulationOptions& options = {});

// Deterministic evolution over a given output history (size >= 3).
EconomyPath evolve(const ModelParams& params, const PriceLoadings& loadings,
                   std::vector<OutputPair> outputs);

// One CSV row per recorded period; columns in path_csv_header().
std::string path_csv_header();
void write_path_csv(const EconomyPath& path, std::ostream& os);
std::vector<double> path_row(const PeriodState& state);

// Line chart of HB_t over the recorded periods.
void write_home_bias_svg(const EconomyPath& path, std::ostream& os);

enum class ShockedCountry { home, foreign, both };

struct ShockScenario {
  double baseline = 0.0;  // ybar
  ShockedCountry shocked = ShockedCountry::home;
  double shock_size = 0.0;  // y_{i,t} - ybar; negative = recession

  bool is_recession() const noexcept { return shock_size < 0.0; }
  bool is_boom() const noexcept { return shock_size > 0.0; }
  static ShockScenario recession(ShockedCountry c, double baseline, double size);
  static ShockScenario boom(ShockedCountry c, double baseline, double size);
};

struct ShockResponse {
  Flows flows;
  double delta_home_bias = 0.0;
};

// History at ybar through t-1, shock at t; loadings are history independent.
ShockResponse apply_shock(const ModelParams& params, const ShockScenario& scenario);

// Kernel of d X^i_i / d y_i (phi-weighted, sign-determining):
//   phi0^i phi0^j/(s0^2 s0*^2)(w0 - w0*) + phi0^i phi1^j/(s0^2 s1*^2)(w0 - w1* omega)
// + phi0^j phi1^i/(s0*^2 s1^2)(w1 omega - w0*) + phi1^i phi1^j/(s1^2 s1*^2)(w1 - w1*) omega
double flow_kernel(const ModelParams& params, Country country = Country::home);

// d X^i_{i,t} / d y_{i,t} with the proportionality constant:
//   kernel / (gamma (1 + beta0) Sigma (phi0^i + phi1^i)).
double flow_sensitivity(const ModelParams& params, Country country = Country::home);

struct DemographicDerivatives {
  double foreign_young = 0.0;   // d kernel / d phi0^j
  double foreign_old = 0.0;     // d kernel / d phi1^j
  double domestic_young = 0.0;  // d kernel / d phi0^i
  double domestic_old = 0.0;    // d kernel / d phi1^i
};

struct Thresholds {
  double tau_bar_1 = 0.0;  // root of the foreign-old derivative in tau
  double tau_bar_2 = 0.0;  // root of the domestic-young derivative in tau
  double bracket_lo = 0.0;  // tau*
  double bracket_hi = 0.0;  // tau* + 1/sigma^2
  double alt_bracket_hi = 0.0;  // 1/sigma^2, the narrower upper bound sometimes quoted
  bool tau_bar_1_in_alt = false;
  bool tau_bar_2_in_alt = false;
};

struct ComparativeStatics {
  double dX_dy = 0.0;
  DemographicDerivatives d_by_phi;
  std::optional<Thresholds> thresholds;
};

DemographicDerivatives demographic_derivatives_only(const ModelParams& params,
                                                    Country country = Country::home);

ComparativeStatics demographic_derivatives(const ModelParams& params,
                                           Country country = Country::home);

// Bisection in tau over (tau*, tau* + 1/sigma^2) for the sign changes of the
// foreign-old and domestic-young derivatives.
Thresholds find_thresholds(const ModelParams& params, Country country = Country::home);

struct MonteCarloResult {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t n_paths = 0;
  std::int64_t periods_per_path = 0;
};

// Per-path seeds derive from (seed, path index); the reduction runs in path
// order, so results do not depend on the thread count.
MonteCarloResult monte_carlo_home_bias(const ModelParams& params, std::int64_t T,
                                       std::int64_t n_paths, std::uint64_t seed,
                                       unsigned threads = 0);

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

// Unconditional E[HB] when every prior mean equals the true output means.
double expected_home_bias_centered(const ModelParams& params);

}  // namespace ebl

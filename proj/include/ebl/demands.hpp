#pragma once

#include <cstdint>

#include "ebl/beliefs.hpp"
#include "ebl/equilibrium.hpp"

namespace ebl {

struct CohortId {
  Country country = Country::home;
  std::int64_t birth_year = 0;
  Age age = Age::young;

  // The cohort alive at t with the given age.
  static CohortId at(Country country, std::int64_t t, Age age) {
    return {country, t - static_cast<std::int64_t>(idx(age)), age};
  }
};

struct CohortHoldings {
  double x_domestic = 0.0;
  double x_foreign = 0.0;
  double riskfree = 0.0;
  double wealth = 0.0;
};

// Risky demands of all four cohorts alive at t: x[holder][age][asset].
struct CohortDemands {
  std::array<std::array<std::array<double, 2>, 2>, 2> x{};

  double& operator()(Country holder, Age age, Country asset) noexcept {
    return x[idx(holder)][idx(age)][idx(asset)];
  }
  double operator()(Country holder, Age age, Country asset) const noexcept {
    return x[idx(holder)][idx(age)][idx(asset)];
  }
};

// Country holdings X[holder][asset], averaged over the holder country's
// participants: X = (phi_0 x_young + phi_1 x_old) / (phi_0 + phi_1).
// Market clearing reads  sum_i (phi^i_0 + phi^i_1) X^i_j = 1, so with the
// baseline masses of 1/4 the world portfolio is X = 1 for every entry.
struct AggregateHoldings {
  std::array<std::array<double, 2>, 2> X{};

  double& operator()(Country holder, Country asset) noexcept { return X[idx(holder)][idx(asset)]; }
  double operator()(Country holder, Country asset) const noexcept {
    return X[idx(holder)][idx(asset)];
  }
};

// Posterior of a cohort about `asset`'s output mean, given that asset's
// outputs at t and t-1 (the young have seen only y_t).
PosteriorBelief cohort_belief(const ModelParams& params, Country holder, Country asset, Age age,
                              double y_t, double y_tm1);

// Mean-variance demand (E[y'+p'] - R p) / (gamma V[y'+p']) under the linear
// price rule, where y' + p' = alpha + (1+beta0) y' + beta1 y_now.
double cohort_demand(const PosteriorBelief& belief, const AssetLoadings& loadings, double y_now,
                     double p_now, double gamma, double gross_rate);

// The four closed-form holding formulas (young/old x domestic/foreign asset)
// evaluated for `holder`. Returns {x_domestic, x_foreign}.
struct RiskyPair {
  double x_domestic = 0.0;
  double x_foreign = 0.0;
};

RiskyPair cohort_holdings_closed_form(const ModelParams& params, const PriceLoadings& loadings,
                                      const CohortId& holder, const OutputPair& y_t,
                                      const OutputPair& y_tm1);

// Coefficients of a closed-form holding on (1, y_t, y_{t-1}) of the asset's country.
struct HoldingCoefficients {
  double constant = 0.0;
  double on_current = 0.0;
  double on_lagged = 0.0;
};

HoldingCoefficients holding_coefficients(const ModelParams& params, const PriceLoadings& loadings,
                                         Country holder, Age age, Country asset);

double riskfree_demand(double wealth, double x_dom, double x_for, double p_dom,
                       double p_for) noexcept;

CohortHoldings cohort_holdings(const ModelParams& params, const PriceLoadings& loadings,
                               const CohortId& holder, const OutputPair& y_t,
                               const OutputPair& y_tm1, double wealth);

// All risky demands at t, composed from cohort_belief and cohort_demand.
CohortDemands cohort_demands(const ModelParams& params, const PriceLoadings& loadings,
                             const OutputPair& y_t, const OutputPair& y_tm1);

AggregateHoldings aggregate_demand(const CohortDemands& demands, const Demographics& demographics);

// sum over cohorts of phi * x for one asset (equals 1 in equilibrium).
double supply_absorbed(const CohortDemands& demands, const Demographics& demographics,
                       Country asset) noexcept;

}  // namespace ebl

#pragma once

#include "ebl/beliefs.hpp"
#include "ebl/types.hpp"

namespace ebl {

// Masses of market participants, phi[country][age].
struct Demographics {
  std::array<std::array<double, 2>, 2> phi{{{0.25, 0.25}, {0.25, 0.25}}};

  static Demographics baseline() { return {}; }

  double mass(Country c, Age a) const noexcept { return phi[idx(c)][idx(a)]; }
  double& mass(Country c, Age a) noexcept { return phi[idx(c)][idx(a)]; }
  double country_mass(Country c) const noexcept { return mass(c, Age::young) + mass(c, Age::old); }

  void validate() const;
};

struct ModelParams {
  double theta_home = 10.0;
  double theta_foreign = 10.0;
  double sigma_sq = 1.0;
  PriorSpec prior_home = PriorSpec::symmetric(10.0, 1.0);
  PriorSpec prior_foreign = PriorSpec::symmetric(10.0, 1.0);
  double gamma = 2.0;
  double gross_rate = 1.05;
  Demographics demographics;
  double common_prior_mean = 10.0;
  double initial_wealth = 0.0;

  // Symmetric-precision economy: tau about own output, tau* about the other.
  static ModelParams make(double theta, double sigma_sq, double tau, double tau_star,
                          double prior_mean, double gamma, double gross_rate);

  double theta(Country c) const noexcept {
    return c == Country::home ? theta_home : theta_foreign;
  }
  const PriorSpec& prior(Country holder) const noexcept {
    return holder == Country::home ? prior_home : prior_foreign;
  }
  double tau() const noexcept { return prior_home.precision_domestic; }
  double tau_star() const noexcept { return prior_home.precision_foreign; }

  // Prior of `holder` about the output of `asset`.
  PriorSide prior_about(Country holder, Country asset) const {
    return holder == asset ? prior(holder).domestic() : prior(holder).foreign();
  }

  void validate() const;
};

// Posterior weight and variance of a cohort about one asset's output mean.
BeliefWeights cohort_weights(const ModelParams& params, Country holder, Country asset, Age age);

struct AssetLoadings {
  double alpha = 0.0;
  double beta0 = 0.0;
  double beta1 = 0.0;
  double sigma_bar = 0.0;  // demographic-weighted sum of posterior precisions
  // Coefficient c in beta*_0 = c * beta*_0 for the cross-country loading; the
  // only solution is beta*_0 = 0 whenever c != 1.
  double cross_multiplier = 0.0;
};

struct PriceLoadings {
  PerCountry<AssetLoadings> asset;
  bool cross_loadings_zero = true;

  const AssetLoadings& operator[](Country c) const noexcept { return asset[c]; }
};

// Closed-form linear-equilibrium loadings under general demographics.
PriceLoadings solve_price_loadings(const ModelParams& params);

double price(const AssetLoadings& loadings, double y_t, double y_tm1) noexcept;
double price(const PriceLoadings& loadings, Country asset, double y_t, double y_tm1) noexcept;

double full_info_price(const ModelParams& params, Country asset);

// s_{t+1} = p_{t+1} + y_{t+1} - R p_t
double excess_payoff(double p_next, double y_next, double p_now, double gross_rate) noexcept;

// Scaled residuals |lhs - rhs| / max(1, |lhs|, |rhs|) of the three
// undetermined-coefficient conditions: lagged output, current output, constant.
struct MucResiduals {
  double lagged = 0.0;
  double current = 0.0;
  double constant = 0.0;

  double max() const noexcept;
};

MucResiduals muc_residuals(const ModelParams& params, const PriceLoadings& loadings, Country asset);

// |sum over cohorts of phi * x - 1| per asset, with demands built from
// posterior beliefs given outputs at t and t-1.
PerCountry<double> market_clearing_residual(const ModelParams& params,
                                            const PriceLoadings& loadings, const OutputPair& y_t,
                                            const OutputPair& y_tm1);

}  // namespace ebl

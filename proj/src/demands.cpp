#include "ebl/demands.hpp"

#include <cmath>

#include "ebl/error.hpp"

namespace ebl {

PosteriorBelief cohort_belief(const ModelParams& params, Country holder, Country asset, Age age,
                              double y_t, double y_tm1) {
  const auto prior = params.prior_about(holder, asset);
  if (age == Age::young) {
    const double obs[] = {y_t};
    return posterior_gaussian(prior, params.sigma_sq, obs);
  }
  const double obs[] = {y_tm1, y_t};
  return posterior_gaussian(prior, params.sigma_sq, obs);
}

double cohort_demand(const PosteriorBelief& belief, const AssetLoadings& L, double y_now,
                     double p_now, double gamma, double gross_rate) {
  if (!(belief.variance > 0.0)) {
    fail(ErrorCode::degenerate_belief,
         "cohort demand needs a belief with positive variance (frequentist point mass given)");
  }
  require(gamma > 0.0, "gamma must be positive");
  const double scale = 1.0 + L.beta0;
  const double expected = L.alpha + scale * belief.mean + L.beta1 * y_now;
  const double variance = scale * scale * belief.variance;
  return (expected - gross_rate * p_now) / (gamma * variance);
}

HoldingCoefficients holding_coefficients(const ModelParams& params, const PriceLoadings& loadings,
                                         Country holder, Age age, Country asset) {
  const auto& L = loadings[asset];
  const auto bw = cohort_weights(params, holder, asset, age);
  const double R = params.gross_rate;
  const double scale = 1.0 + L.beta0;
  const double denom = params.gamma * scale * scale * bw.variance;
  const double alpha_tilde = L.alpha * (1.0 - R);

  HoldingCoefficients c;
  c.constant = (alpha_tilde + scale * (1.0 - bw.w) * params.common_prior_mean) / denom;
  if (age == Age::young) {
    c.on_current = (bw.w * scale + L.beta1 - R * L.beta0) / denom;
    c.on_lagged = -R * L.beta1 / denom;
  } else {
    const double omega = bw.omega;
    c.on_current = (bw.w * scale * omega + L.beta1 - R * L.beta0) / denom;
    c.on_lagged = (bw.w * scale * (1.0 - omega) - R * L.beta1) / denom;
  }
  return c;
}

RiskyPair cohort_holdings_closed_form(const ModelParams& params, const PriceLoadings& loadings,
                                      const CohortId& holder, const OutputPair& y_t,
                                      const OutputPair& y_tm1) {
  auto eval = [&](Country asset) {
    const auto c = holding_coefficients(params, loadings, holder.country, holder.age, asset);
    return c.constant + c.on_current * y_t[asset] + c.on_lagged * y_tm1[asset];
  };
  return {eval(holder.country), eval(other(holder.country))};
}

double riskfree_demand(double wealth, double x_dom, double x_for, double p_dom,
                       double p_for) noexcept {
  return wealth - x_dom * p_dom - x_for * p_for;
}

CohortHoldings cohort_holdings(const ModelParams& params, const PriceLoadings& loadings,
                               const CohortId& holder, const OutputPair& y_t,
                               const OutputPair& y_tm1, double wealth) {
  const Country home = holder.country;
  const Country away = other(home);
  auto risky = [&](Country asset) {
    const auto belief = cohort_belief(params, home, asset, holder.age, y_t[asset], y_tm1[asset]);
    const double p = price(loadings[asset], y_t[asset], y_tm1[asset]);
    return cohort_demand(belief, loadings[asset], y_t[asset], p, params.gamma, params.gross_rate);
  };
  CohortHoldings h;
  h.wealth = wealth;
  h.x_domestic = risky(home);
  h.x_foreign = risky(away);
  h.riskfree = riskfree_demand(wealth, h.x_domestic, h.x_foreign,
                               price(loadings[home], y_t[home], y_tm1[home]),
                               price(loadings[away], y_t[away], y_tm1[away]));
  return h;
}

CohortDemands cohort_demands(const ModelParams& params, const PriceLoadings& loadings,
                             const OutputPair& y_t, const OutputPair& y_tm1) {
  CohortDemands d;
  for (Country asset : kCountries) {
    const auto& L = loadings[asset];
    const double p = price(L, y_t[asset], y_tm1[asset]);
    for (Country holder : kCountries) {
      for (Age age : kAges) {
        const auto belief = cohort_belief(params, holder, asset, age, y_t[asset], y_tm1[asset]);
        d(holder, age, asset) =
            cohort_demand(belief, L, y_t[asset], p, params.gamma, params.gross_rate);
      }
    }
  }
  return d;
}

AggregateHoldings aggregate_demand(const CohortDemands& demands, const Demographics& demo) {
  AggregateHoldings X;
  for (Country holder : kCountries) {
    const double mass = demo.country_mass(holder);
    for (Country asset : kCountries) {
      double total = 0.0;
      for (Age age : kAges) total += demo.mass(holder, age) * demands(holder, age, asset);
      X(holder, asset) = total / mass;
    }
  }
  return X;
}

double supply_absorbed(const CohortDemands& demands, const Demographics& demo,
                       Country asset) noexcept {
  double total = 0.0;
  for (Country holder : kCountries) {
    for (Age age : kAges) total += demo.mass(holder, age) * demands(holder, age, asset);
  }
  return total;
}

}  // namespace ebl

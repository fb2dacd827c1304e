#include "ebl/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ebl/demands.hpp"
#include "ebl/error.hpp"

namespace ebl {

namespace {

constexpr double kOmega = 0.5;  // omega(1): weight of each of the old cohort's two observations

// Weight of y_t in a cohort's experience average.
double current_share(Age age) { return age == Age::young ? 1.0 : kOmega; }

struct CohortTerm {
  double density = 0.0;  // phi / posterior variance
  double w = 0.0;        // weight on data about the priced asset
  double w_cross = 0.0;  // weight on data about the other asset
  Age age = Age::young;
};

// The four cohorts that trade asset `asset`, in order (domestic young, domestic
// old, foreign young, foreign old).
std::array<CohortTerm, 4> cohort_terms(const ModelParams& params, Country asset) {
  std::array<CohortTerm, 4> terms;
  std::size_t k = 0;
  for (Country holder : {asset, other(asset)}) {
    for (Age age : kAges) {
      const auto own = cohort_weights(params, holder, asset, age);
      const auto cross = cohort_weights(params, holder, other(asset), age);
      terms[k++] = {params.demographics.mass(holder, age) / own.variance, own.w, cross.w, age};
    }
  }
  return terms;
}

struct Sums {
  double S = 0.0;   // sum phi / var
  double A0 = 0.0;  // sum phi/var * w * (share of y_t)
  double A1 = 0.0;  // sum over old of phi/var * w
  double C = 0.0;   // sum phi/var * (1 - w)
};

Sums sums(const std::array<CohortTerm, 4>& terms, bool cross) {
  Sums s;
  for (const auto& t : terms) {
    const double w = cross ? t.w_cross : t.w;
    s.S += t.density;
    s.A0 += t.density * w * current_share(t.age);
    if (t.age == Age::old) s.A1 += t.density * w;
    s.C += t.density * (1.0 - w);
  }
  return s;
}

double scaled_gap(double lhs, double rhs) {
  return std::abs(lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)});
}

}  // namespace

void Demographics::validate() const {
  for (Country c : kCountries) {
    for (Age a : kAges) {
      require(std::isfinite(mass(c, a)) && mass(c, a) >= 0.0,
              "demographic mass phi^" + std::string(label(c)) + "_" +
                  std::to_string(idx(a)) + " must be nonnegative");
    }
    require(country_mass(c) > 0.0,
            "country " + std::string(label(c)) + " needs at least one participating cohort");
  }
}

ModelParams ModelParams::make(double theta, double sigma_sq, double tau, double tau_star,
                              double prior_mean, double gamma, double gross_rate) {
  ModelParams p;
  p.theta_home = p.theta_foreign = theta;
  p.sigma_sq = sigma_sq;
  p.prior_home = PriorSpec{prior_mean, prior_mean, tau, tau_star};
  p.prior_foreign = p.prior_home;
  p.gamma = gamma;
  p.gross_rate = gross_rate;
  p.common_prior_mean = prior_mean;
  p.validate();
  return p;
}

void ModelParams::validate() const {
  require(std::isfinite(theta_home) && std::isfinite(theta_foreign), "theta must be finite");
  require(std::isfinite(sigma_sq) && sigma_sq > 0.0, "sigma_sq must be positive");
  require(std::isfinite(gamma) && gamma > 0.0, "gamma must be positive");
  require(std::isfinite(gross_rate) && gross_rate > 1.0, "gross rate R must exceed 1");
  require(std::isfinite(initial_wealth), "initial_wealth must be finite");
  prior_home.validate();
  prior_foreign.validate();
  require(prior_home.precision_domestic == prior_foreign.precision_domestic &&
              prior_home.precision_foreign == prior_foreign.precision_foreign,
          "prior precisions must be symmetric across countries (tau, tau*)");
  for (const auto* p : {&prior_home, &prior_foreign}) {
    require(p->mean_domestic == common_prior_mean && p->mean_foreign == common_prior_mean,
            "heterogeneous prior means are not supported: every prior mean must equal "
            "common_prior_mean");
  }
  demographics.validate();
}

BeliefWeights cohort_weights(const ModelParams& params, Country holder, Country asset, Age age) {
  return belief_weights(static_cast<int>(idx(age)), params.prior_about(holder, asset).precision,
                        params.sigma_sq);
}

PriceLoadings solve_price_loadings(const ModelParams& params) {
  params.validate();
  const double R = params.gross_rate;
  PriceLoadings out;
  for (Country asset : kCountries) {
    const auto terms = cohort_terms(params, asset);
    const Sums s = sums(terms, false);
    const double bracket = s.A0 + (1.0 - kOmega) * s.A1 / R;
    const double denom = s.S * R - bracket;
    if (!(denom > 1e-14 * s.S * R)) {
      fail(ErrorCode::degenerate_equilibrium,
           "degenerate equilibrium: vanishing denominator for asset " + std::string(label(asset)));
    }
    AssetLoadings& L = out.asset[asset];
    L.sigma_bar = s.S;
    // Same as S R / (S R - bracket) - 1 without the cancellation.
    L.beta0 = bracket / denom;
    const double scale = 1.0 + L.beta0;
    if (!(scale > 0.0)) {
      fail(ErrorCode::invalid_equilibrium,
           "invalid equilibrium: 1 + beta0 <= 0 for asset " + std::string(label(asset)));
    }
    L.beta1 = scale * (1.0 - kOmega) * s.A1 / (s.S * R);
    L.alpha = (scale * s.C * params.common_prior_mean - params.gamma * scale * scale) /
              (s.S * (R - 1.0));

    const Sums cross = sums(terms, true);
    L.cross_multiplier = (cross.A0 + (1.0 - kOmega) * cross.A1 / R) / (s.S * R);
    if (std::abs(L.cross_multiplier - 1.0) < 1e-12) {
      fail(ErrorCode::degenerate_equilibrium,
           "degenerate equilibrium: cross-country loading is not pinned down");
    }
  }
  out.cross_loadings_zero = true;
  return out;
}

double price(const AssetLoadings& L, double y_t, double y_tm1) noexcept {
  return L.alpha + L.beta0 * y_t + L.beta1 * y_tm1;
}

double price(const PriceLoadings& loadings, Country asset, double y_t, double y_tm1) noexcept {
  return price(loadings[asset], y_t, y_tm1);
}

double full_info_price(const ModelParams& params, Country asset) {
  require(params.gross_rate > 1.0, "gross rate R must exceed 1");
  require(params.sigma_sq > 0.0 && params.gamma > 0.0, "sigma_sq and gamma must be positive");
  return (params.theta(asset) - params.gamma * params.sigma_sq) / (params.gross_rate - 1.0);
}

double excess_payoff(double p_next, double y_next, double p_now, double gross_rate) noexcept {
  return p_next + y_next - p_now * gross_rate;
}

double MucResiduals::max() const noexcept { return std::max({lagged, current, constant}); }

MucResiduals muc_residuals(const ModelParams& params, const PriceLoadings& loadings,
                           Country asset) {
  const auto& L = loadings[asset];
  const double R = params.gross_rate;
  const double m = params.common_prior_mean;
  double S = 0.0, current = 0.0, lagged = 0.0, constant = 0.0;
  for (Country holder : {asset, other(asset)}) {
    for (Age age : kAges) {
      const auto bw = cohort_weights(params, holder, asset, age);
      const double d = params.demographics.mass(holder, age) / bw.variance;
      S += d;
      current += d * bw.w * (age == Age::young ? 1.0 : bw.omega);
      if (age == Age::old) lagged += d * bw.w;
      constant += d * (1.0 - bw.w) * m;
    }
  }
  const double scale = 1.0 + L.beta0;
  MucResiduals r;
  r.lagged = scaled_gap(scale * (1.0 - kOmega) * lagged, S * R * L.beta1);
  r.current = scaled_gap(scale * current + S * L.beta1, S * R * L.beta0);
  r.constant = scaled_gap(scale * constant, params.gamma * scale * scale + S * (R - 1.0) * L.alpha);
  return r;
}

PerCountry<double> market_clearing_residual(const ModelParams& params,
                                            const PriceLoadings& loadings, const OutputPair& y_t,
                                            const OutputPair& y_tm1) {
  const auto demands = cohort_demands(params, loadings, y_t, y_tm1);
  PerCountry<double> r;
  for (Country asset : kCountries) {
    r[asset] = std::abs(supply_absorbed(demands, params.demographics, asset) - 1.0);
  }
  return r;
}

}  // namespace ebl

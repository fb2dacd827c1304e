#pragma once

#include <span>
#include <vector>

namespace ebl {

// Gaussian prior about one output mean, as seen by one holder.
struct PriorSide {
  double mean = 0.0;
  double precision = 1.0;
};

// A country's prior about its own (domestic) and the other (foreign) output mean.
struct PriorSpec {
  double mean_domestic = 0.0;
  double mean_foreign = 0.0;
  double precision_domestic = 1.0;  // tau
  double precision_foreign = 1.0;   // tau*

  static PriorSpec symmetric(double mean, double precision);
  // Throws unless precision_foreign <= precision_domestic.
  static PriorSpec asymmetric(double mean, double precision_domestic, double precision_foreign);

  PriorSide domestic() const { return {mean_domestic, precision_domestic}; }
  PriorSide foreign() const { return {mean_foreign, precision_foreign}; }

  void validate() const;
};

// Weights on lifetime observations, oldest first, plus the KL scaling rho.
class WeightProfile {
 public:
  enum class Kind { constant, geometric_decay, custom };

  static WeightProfile constant(double rho = 1.0);
  // w(k) = beta^(age-k) / sum_b beta^(age-b); sums to one over the window.
  static WeightProfile geometric(double beta, double rho = 1.0);
  // Used as given unless normalize is set.
  static WeightProfile custom(std::vector<double> weights, double rho = 1.0,
                              bool normalize = false);

  Kind kind() const noexcept { return kind_; }
  double rho() const noexcept { return rho_; }
  double beta() const noexcept { return beta_; }

  // Weights for a window of n observations, oldest first.
  std::vector<double> weights(std::size_t n) const;

 private:
  Kind kind_ = Kind::constant;
  double rho_ = 1.0;
  double beta_ = 0.0;
  bool normalize_ = false;
  std::vector<double> custom_;
};

struct PosteriorBelief {
  double mean = 0.0;
  double variance = 0.0;        // posterior variance of the output mean
  double weight_on_data = 0.0;  // w_age or w*_age
  double recency_weight = 1.0;  // omega(age) = 1/(age+1)
};

// Closed-form Gaussian posterior. The window length fixes age = n - 1.
// Uses rho * sigma_sq as the effective noise variance and (age+1) as the
// data count, which is exact for the constant profile.
PosteriorBelief posterior_gaussian(const PriorSide& prior, double sigma_sq,
                                   std::span<const double> lifetime_obs,
                                   const WeightProfile& profile = WeightProfile::constant());

// Minimizer of  sum_k 0.5 w(k) (y_k - theta)^2 / sigma_sq + rho KL(nu, prior).
// For rho > 0 this is the exponentially reweighted prior, a Gaussian with
// precision tau + sum(w) / (rho sigma_sq). For rho == 0 it is a point mass at
// the weighted least-squares estimate (variance exactly 0).
PosteriorBelief posterior_general(const WeightProfile& profile, const PriorSide& prior,
                                  double sigma_sq, std::span<const double> lifetime_obs);

struct BeliefWeights {
  double w = 0.0;
  double variance = 0.0;
  double omega = 1.0;
};

BeliefWeights belief_weights(int age, double precision, double sigma_sq);

}  // namespace ebl

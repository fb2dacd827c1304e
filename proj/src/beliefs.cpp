#include "ebl/beliefs.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "ebl/error.hpp"

namespace ebl {

namespace {

void check_sigma(double sigma_sq) {
  require(std::isfinite(sigma_sq) && sigma_sq > 0.0,
          "sigma_sq must be positive, got " + std::to_string(sigma_sq));
}

void check_prior(const PriorSide& prior) {
  require(std::isfinite(prior.mean), "prior mean must be finite");
  require(std::isfinite(prior.precision) && prior.precision > 0.0,
          "prior precision must be positive, got " + std::to_string(prior.precision));
}

void check_window(std::span<const double> obs) {
  if (obs.empty()) fail(ErrorCode::no_experience, "no experience: empty observation window");
}

}  // namespace

PriorSpec PriorSpec::symmetric(double mean, double precision) {
  PriorSpec p{mean, mean, precision, precision};
  p.validate();
  return p;
}

PriorSpec PriorSpec::asymmetric(double mean, double precision_domestic, double precision_foreign) {
  PriorSpec p{mean, mean, precision_domestic, precision_foreign};
  p.validate();
  require(precision_foreign <= precision_domestic,
          "asymmetric priors need precision_foreign <= precision_domestic");
  return p;
}

void PriorSpec::validate() const {
  check_prior(domestic());
  check_prior(foreign());
}

WeightProfile WeightProfile::constant(double rho) {
  require(rho >= 0.0, "rho must be nonnegative");
  WeightProfile p;
  p.kind_ = Kind::constant;
  p.rho_ = rho;
  return p;
}

WeightProfile WeightProfile::geometric(double beta, double rho) {
  require(beta > 0.0 && beta < 1.0, "geometric decay needs beta in (0,1)");
  require(rho >= 0.0, "rho must be nonnegative");
  WeightProfile p;
  p.kind_ = Kind::geometric_decay;
  p.beta_ = beta;
  p.rho_ = rho;
  return p;
}

WeightProfile WeightProfile::custom(std::vector<double> weights, double rho, bool normalize) {
  require(rho >= 0.0, "rho must be nonnegative");
  for (double w : weights) require(std::isfinite(w) && w >= 0.0, "custom weights must be nonnegative");
  WeightProfile p;
  p.kind_ = Kind::custom;
  p.rho_ = rho;
  p.normalize_ = normalize;
  p.custom_ = std::move(weights);
  if (normalize) {
    const double total = std::accumulate(p.custom_.begin(), p.custom_.end(), 0.0);
    require(total > 0.0, "cannot normalize all-zero custom weights");
  }
  return p;
}

std::vector<double> WeightProfile::weights(std::size_t n) const {
  std::vector<double> w;
  switch (kind_) {
    case Kind::constant:
      w.assign(n, 1.0);
      break;
    case Kind::geometric_decay: {
      w.resize(n);
      // Oldest observation (k = 0) gets beta^(n-1), the newest gets 1.
      double total = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        w[k] = std::pow(beta_, static_cast<double>(n - 1 - k));
        total += w[k];
      }
      for (double& x : w) x /= total;
      break;
    }
    case Kind::custom: {
      require(custom_.size() == n, "custom weight profile has " + std::to_string(custom_.size()) +
                                       " weights for " + std::to_string(n) + " observations");
      w = custom_;
      if (normalize_) {
        const double total = std::accumulate(w.begin(), w.end(), 0.0);
        for (double& x : w) x /= total;
      }
      break;
    }
  }
  return w;
}

PosteriorBelief posterior_gaussian(const PriorSide& prior, double sigma_sq,
                                   std::span<const double> lifetime_obs,
                                   const WeightProfile& profile) {
  check_window(lifetime_obs);
  check_sigma(sigma_sq);
  check_prior(prior);
  const double rho = profile.rho();
  if (rho == 0.0) {
    fail(ErrorCode::degenerate_belief,
         "rho = 0 gives a point-mass belief; use posterior_general for the frequentist limit");
  }
  const auto w = profile.weights(lifetime_obs.size());
  const double count = static_cast<double>(lifetime_obs.size());  // age + 1
  const double noise = rho * sigma_sq;

  double weighted_sum = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) weighted_sum += w[k] * lifetime_obs[k];

  const double denom = count + prior.precision * noise;
  PosteriorBelief b;
  b.weight_on_data = count / denom;
  b.recency_weight = 1.0 / count;
  b.mean = b.weight_on_data * (weighted_sum / count) + (1.0 - b.weight_on_data) * prior.mean;
  b.variance = noise / denom;
  return b;
}

PosteriorBelief posterior_general(const WeightProfile& profile, const PriorSide& prior,
                                  double sigma_sq, std::span<const double> lifetime_obs) {
  check_window(lifetime_obs);
  check_sigma(sigma_sq);
  check_prior(prior);
  const auto w = profile.weights(lifetime_obs.size());
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  double weighted_sum = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) weighted_sum += w[k] * lifetime_obs[k];

  PosteriorBelief b;
  b.recency_weight = 1.0 / static_cast<double>(lifetime_obs.size());
  const double rho = profile.rho();
  if (rho == 0.0) {
    if (!(total > 0.0)) fail(ErrorCode::no_experience, "no experience: all weights are zero");
    b.mean = weighted_sum / total;
    b.variance = 0.0;
    b.weight_on_data = 1.0;
    return b;
  }
  // Effective number of observations after tempering by rho.
  const double n_eff = total / rho;
  const double denom = n_eff + prior.precision * sigma_sq;
  b.weight_on_data = n_eff / denom;
  const double data_mean = total > 0.0 ? weighted_sum / total : prior.mean;
  b.mean = b.weight_on_data * data_mean + (1.0 - b.weight_on_data) * prior.mean;
  b.variance = sigma_sq / denom;
  return b;
}

BeliefWeights belief_weights(int age, double precision, double sigma_sq) {
  require(age >= 0, "age must be nonnegative");
  check_sigma(sigma_sq);
  require(std::isfinite(precision) && precision > 0.0, "precision must be positive");
  const double count = static_cast<double>(age) + 1.0;
  const double denom = count + precision * sigma_sq;
  return {count / denom, sigma_sq / denom, 1.0 / count};
}

}  // namespace ebl

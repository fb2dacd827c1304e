#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "ebl/beliefs.hpp"
#include "ebl/error.hpp"

using namespace ebl;

namespace {

// Conjugate normal update, one observation at a time.
struct Sequential {
  double mean;
  double precision;

  void observe(double y, double sigma_sq) {
    const double p = precision + 1.0 / sigma_sq;
    mean = (precision * mean + y / sigma_sq) / p;
    precision = p;
  }
};

// Objective of the variational problem over N(mu, v).
double free_energy(double mu, double v, const std::vector<double>& w, const std::vector<double>& y,
                   double sigma_sq, double rho, const PriorSide& prior) {
  double fit = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    fit += 0.5 * w[k] * ((y[k] - mu) * (y[k] - mu) + v) / sigma_sq;
  }
  const double t = prior.precision;
  const double kl = 0.5 * (t * v + t * (mu - prior.mean) * (mu - prior.mean) - 1.0 - std::log(t * v));
  return fit + rho * kl;
}

// Coordinate search with shrinking steps.
std::pair<double, double> grid_minimize(auto&& f, double mu, double v) {
  double dm = 1.0, dv = 0.5 * v;
  for (int it = 0; it < 4000 && (dm > 1e-11 || dv > 1e-13); ++it) {
    bool moved = false;
    for (int s : {-1, 1}) {
      if (f(mu + s * dm, v) < f(mu, v)) mu += s * dm, moved = true;
      if (v + s * dv > 0.0 && f(mu, v + s * dv) < f(mu, v)) v += s * dv, moved = true;
    }
    if (!moved) dm *= 0.5, dv *= 0.5;
  }
  return {mu, v};
}

}  // namespace

TEST_CASE("belief weights follow the experience count") {
  for (int age : {0, 1, 5}) {
    for (double tau : {0.1, 1.0, 7.0}) {
      const auto bw = belief_weights(age, tau, 2.0);
      CHECK(bw.w == doctest::Approx((age + 1.0) / (age + 1.0 + tau * 2.0)).epsilon(1e-15));
      CHECK(bw.variance == doctest::Approx(2.0 / (age + 1.0 + tau * 2.0)).epsilon(1e-15));
      CHECK(bw.omega == doctest::Approx(1.0 / (age + 1.0)));
    }
  }
  CHECK(belief_weights(1, 0.5, 1.0).w > belief_weights(1, 2.0, 1.0).w);
}

TEST_CASE("closed-form posterior equals sequential Bayesian updating") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.1, 5.0);
  std::normal_distribution<double> N(3.0, 2.0);
  for (int rep = 0; rep < 200; ++rep) {
    const PriorSide prior{N(rng), U(rng)};
    const double sigma_sq = U(rng);
    std::vector<double> y(1 + rep % 6);
    for (double& v : y) v = N(rng);

    Sequential s{prior.mean, prior.precision};
    for (double v : y) s.observe(v, sigma_sq);

    const auto b = posterior_gaussian(prior, sigma_sq, y);
    CHECK(b.mean == doctest::Approx(s.mean).epsilon(1e-12));
    CHECK(b.variance == doctest::Approx(1.0 / s.precision).epsilon(1e-12));
    CHECK(b.recency_weight == doctest::Approx(1.0 / y.size()));
  }
}

TEST_CASE("general posterior minimizes the weighted fit plus KL") {
  const PriorSide prior{1.5, 0.8};
  const std::vector<double> y{0.2, 2.9, -1.1, 4.0};
  const double sigma_sq = 1.7;
  for (const auto& profile : {WeightProfile::constant(1.0), WeightProfile::constant(0.4),
                              WeightProfile::geometric(0.6, 2.0),
                              WeightProfile::custom({0.1, 0.0, 2.0, 0.7}, 1.3)}) {
    const auto w = profile.weights(y.size());
    auto f = [&](double mu, double v) { return free_energy(mu, v, w, y, sigma_sq, profile.rho(), prior); };
    const auto [mu, v] = grid_minimize(f, 0.0, 1.0);
    const auto b = posterior_general(profile, prior, sigma_sq, y);
    CHECK(b.mean == doctest::Approx(mu).epsilon(1e-7));
    CHECK(b.variance == doctest::Approx(v).epsilon(1e-7));
    CHECK(f(b.mean, b.variance) <= f(mu, v) + 1e-12);
  }
}

TEST_CASE("general and Gaussian posteriors agree for the constant profile") {
  const PriorSide prior{-2.0, 3.0};
  const std::vector<double> y{1.0, -0.5, 0.25};
  for (double rho : {0.5, 1.0, 2.5}) {
    const auto a = posterior_gaussian(prior, 0.9, y, WeightProfile::constant(rho));
    const auto b = posterior_general(WeightProfile::constant(rho), prior, 0.9, y);
    CHECK(a.mean == doctest::Approx(b.mean).epsilon(1e-14));
    CHECK(a.variance == doctest::Approx(b.variance).epsilon(1e-14));
  }
}

TEST_CASE("rho = 0 collapses to weighted least squares") {
  const std::vector<double> y{1.0, 2.0, 6.0};
  const auto b = posterior_general(WeightProfile::custom({1.0, 1.0, 2.0}, 0.0), {0.0, 1.0}, 1.0, y);
  CHECK(b.mean == doctest::Approx(15.0 / 4.0));
  CHECK(b.variance == 0.0);
  CHECK_THROWS_AS(posterior_gaussian({0.0, 1.0}, 1.0, y, WeightProfile::constant(0.0)), Error);
}

TEST_CASE("geometric weights sum to one and favour recent data") {
  const auto w = WeightProfile::geometric(0.5).weights(4);
  double total = 0.0;
  for (double x : w) total += x;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
  for (std::size_t k = 1; k < w.size(); ++k) CHECK(w[k] == doctest::Approx(2.0 * w[k - 1]));
}

TEST_CASE("belief errors carry their codes") {
  const std::vector<double> none;
  const std::vector<double> one{1.0};
  auto code_of = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::io;
  };
  CHECK(code_of([&] { posterior_gaussian({0.0, 1.0}, 1.0, none); }) == ErrorCode::no_experience);
  CHECK(code_of([&] { posterior_gaussian({0.0, -1.0}, 1.0, one); }) == ErrorCode::parameter);
  CHECK(code_of([&] { posterior_gaussian({0.0, 1.0}, 0.0, one); }) == ErrorCode::parameter);
  CHECK(code_of([&] { posterior_gaussian({0.0, 1.0}, 1.0, one, WeightProfile::constant(0.0)); }) ==
        ErrorCode::degenerate_belief);
  CHECK(code_of([&] { posterior_general(WeightProfile::custom({0.0}, 0.0), {0.0, 1.0}, 1.0, one); }) ==
        ErrorCode::no_experience);
  CHECK(code_of([&] { WeightProfile::custom({1.0, 2.0}).weights(3); }) == ErrorCode::parameter);
  CHECK(code_of([&] { PriorSpec::asymmetric(0.0, 0.5, 2.0); }) == ErrorCode::parameter);
}

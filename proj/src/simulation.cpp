#include "ebl/simulation.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <ostream>
#include <random>
#include <thread>

#include "ebl/error.hpp"

namespace ebl {

namespace {

std::mt19937_64 make_rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  return std::mt19937_64(seq);
}

std::vector<OutputPair> draw_outputs(const ModelParams& params, std::int64_t T,
                                     std::uint64_t seed, const SimulationOptions& options) {
  require(options.global_factor_share >= 0.0 && options.global_factor_share <= 1.0,
          "global_factor_share must lie in [0,1]");
  auto rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sigma = std::sqrt(params.sigma_sq);
  const double common = std::sqrt(options.global_factor_share);
  const double own = std::sqrt(1.0 - options.global_factor_share);
  std::vector<OutputPair> y(static_cast<std::size_t>(T));
  for (auto& yt : y) {
    const double e_home = normal(rng);
    const double e_foreign = normal(rng);
    const double g = normal(rng);
    yt[Country::home] = params.theta_home + sigma * (common * g + own * e_home);
    yt[Country::foreign] = params.theta_foreign + sigma * (common * g + own * e_foreign);
  }
  return y;
}

void put(std::ostream& os, double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  os.write(buf, res.ptr - buf);
}

struct Precisions {
  BeliefWeights young, old, young_star, old_star;
};

Precisions precisions(const ModelParams& params, Country i) {
  const Country j = other(i);
  return {cohort_weights(params, i, i, Age::young), cohort_weights(params, i, i, Age::old),
          cohort_weights(params, j, i, Age::young), cohort_weights(params, j, i, Age::old)};
}

}  // namespace

Flows flows_between(const AggregateHoldings& prev, const AggregateHoldings& now) {
  Flows f;
  for (Country asset : kCountries) {
    f[asset].domestic = now(asset, asset) - prev(asset, asset);
    f[asset].foreign = now(other(asset), asset) - prev(other(asset), asset);
  }
  return f;
}

double EconomyPath::mean_home_bias() const {
  if (periods.empty()) return 0.0;
  double total = 0.0;
  for (const auto& p : periods) total += p.home_bias;
  return total / static_cast<double>(periods.size());
}

double EconomyPath::max_clearing_residual() const {
  double r = 0.0;
  for (const auto& p : periods) r = std::max(r, p.clearing_residual);
  return r;
}

EconomyPath evolve(const ModelParams& params, const PriceLoadings& loadings,
                   std::vector<OutputPair> outputs) {
  require(outputs.size() >= 3, "a path needs at least 3 output draws");
  EconomyPath path;
  path.outputs = std::move(outputs);
  const auto& y = path.outputs;
  const auto& demo = params.demographics;

  AggregateHoldings prev =
      aggregate_demand(cohort_demands(params, loadings, y[1], y[0]), demo);
  path.periods.reserve(y.size() - kBurnIn);
  for (std::size_t t = kBurnIn; t < y.size(); ++t) {
    PeriodState s;
    s.t = static_cast<std::int64_t>(t);
    s.y = y[t];
    for (Country c : kCountries) s.price[c] = price(loadings[c], y[t][c], y[t - 1][c]);
    s.cohorts = cohort_demands(params, loadings, y[t], y[t - 1]);
    s.aggregate = aggregate_demand(s.cohorts, demo);
    s.flows = flows_between(prev, s.aggregate);
    s.home_bias = home_bias(s.aggregate);
    for (Country c : kCountries) {
      s.clearing_residual =
          std::max(s.clearing_residual, std::abs(supply_absorbed(s.cohorts, demo, c) - 1.0));
    }
    prev = s.aggregate;
    path.periods.push_back(s);
  }
  return path;
}

EconomyPath simulate_path(const ModelParams& params, std::int64_t T, std::uint64_t seed,
                          const SimulationOptions& options) {
  require(T >= 3, "simulate_path needs T >= 3");
  const auto loadings = solve_price_loadings(params);
  auto path = evolve(params, loadings, draw_outputs(params, T, seed, options));
  path.rng_seed = seed;
  return path;
}

std::string path_csv_header() {
  return "t,y_H,y_F,p_H,p_F,"
         "x_H0_H,x_H0_F,x_H1_H,x_H1_F,x_F0_H,x_F0_F,x_F1_H,x_F1_F,"
         "X_HH,X_HF,X_FH,X_FF,HB,"
         "dX_HH,dX_FH,dX_FF,dX_HF";
}

std::vector<double> path_row(const PeriodState& s) {
  const Country H = Country::home, F = Country::foreign;
  std::vector<double> row{static_cast<double>(s.t), s.y[H], s.y[F], s.price[H], s.price[F]};
  for (Country holder : kCountries)
    for (Age age : kAges)
      for (Country asset : kCountries) row.push_back(s.cohorts(holder, age, asset));
  row.insert(row.end(), {s.aggregate(H, H), s.aggregate(H, F), s.aggregate(F, H), s.aggregate(F, F),
                         s.home_bias, s.flows[H].domestic, s.flows[H].foreign, s.flows[F].domestic,
                         s.flows[F].foreign});
  return row;
}

void write_path_csv(const EconomyPath& path, std::ostream& os) {
  os << path_csv_header() << '\n';
  for (const auto& s : path.periods) {
    const auto row = path_row(s);
    os << s.t;
    for (std::size_t k = 1; k < row.size(); ++k) {
      os << ',';
      put(os, row[k]);
    }
    os << '\n';
  }
}

void write_home_bias_svg(const EconomyPath& path, std::ostream& os) {
  constexpr double W = 640, Hgt = 320, pad = 40;
  double lo = 0.0, hi = 0.0;
  for (const auto& s : path.periods) {
    lo = std::min(lo, s.home_bias);
    hi = std::max(hi, s.home_bias);
  }
  if (hi - lo < 1e-12) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double n = std::max<double>(1.0, static_cast<double>(path.periods.size()) - 1.0);
  auto x = [&](std::size_t k) { return pad + (W - 2 * pad) * static_cast<double>(k) / n; };
  auto y = [&](double v) { return Hgt - pad - (Hgt - 2 * pad) * (v - lo) / (hi - lo); };
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << Hgt
     << "\" viewBox=\"0 0 " << W << ' ' << Hgt << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << pad << "\" y1=\"" << y(0.0) << "\" x2=\"" << W - pad << "\" y2=\"" << y(0.0)
     << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
  os << "<polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.5\" points=\"";
  for (std::size_t k = 0; k < path.periods.size(); ++k) {
    if (k) os << ' ';
    put(os, x(k));
    os << ',';
    put(os, y(path.periods[k].home_bias));
  }
  os << "\"/>\n";
  os << "<text x=\"" << pad << "\" y=\"" << pad / 2 << "\" font-family=\"sans-serif\" font-size=\"13\">"
     << "home bias HB_t</text>\n</svg>\n";
}

ShockScenario ShockScenario::recession(ShockedCountry c, double baseline, double size) {
  require(size >= 0.0, "recession size is a magnitude");
  return {baseline, c, -size};
}

ShockScenario ShockScenario::boom(ShockedCountry c, double baseline, double size) {
  require(size >= 0.0, "boom size is a magnitude");
  return {baseline, c, size};
}

ShockResponse apply_shock(const ModelParams& params, const ShockScenario& scenario) {
  require(std::isfinite(scenario.baseline) && std::isfinite(scenario.shock_size),
          "shock scenario values must be finite");
  const auto loadings = solve_price_loadings(params);
  const OutputPair calm = outputs(scenario.baseline, scenario.baseline);
  OutputPair shocked = calm;
  if (scenario.shocked != ShockedCountry::foreign) shocked[Country::home] += scenario.shock_size;
  if (scenario.shocked != ShockedCountry::home) shocked[Country::foreign] += scenario.shock_size;

  const auto before = aggregate_demand(cohort_demands(params, loadings, calm, calm),
                                       params.demographics);
  const auto after = aggregate_demand(cohort_demands(params, loadings, shocked, calm),
                                      params.demographics);
  ShockResponse r;
  r.flows = flows_between(before, after);
  r.delta_home_bias = home_bias(after) - home_bias(before);
  return r;
}

double flow_kernel(const ModelParams& params, Country i) {
  params.validate();
  const Country j = other(i);
  const auto& demo = params.demographics;
  const auto p = precisions(params, i);
  const double omega = p.old.omega;
  const double d0 = demo.mass(i, Age::young) / p.young.variance;
  const double d1 = demo.mass(i, Age::old) / p.old.variance;
  const double d0s = demo.mass(j, Age::young) / p.young_star.variance;
  const double d1s = demo.mass(j, Age::old) / p.old_star.variance;
  return d0 * d0s * (p.young.w - p.young_star.w) +
         d0 * d1s * (p.young.w - p.old_star.w * omega) +
         d0s * d1 * (p.old.w * omega - p.young_star.w) +
         d1 * d1s * (p.old.w - p.old_star.w) * omega;
}

double flow_sensitivity(const ModelParams& params, Country i) {
  const auto loadings = solve_price_loadings(params);
  const auto& L = loadings[i];
  return flow_kernel(params, i) /
         (params.gamma * (1.0 + L.beta0) * L.sigma_bar * params.demographics.country_mass(i));
}

DemographicDerivatives demographic_derivatives_only(const ModelParams& params, Country i) {
  params.validate();
  const Country j = other(i);
  const auto& demo = params.demographics;
  const auto p = precisions(params, i);
  const double omega = p.old.omega;
  const double s0 = p.young.variance, s1 = p.old.variance;
  const double s0s = p.young_star.variance, s1s = p.old_star.variance;
  const double w0 = p.young.w, w1 = p.old.w, w0s = p.young_star.w, w1s = p.old_star.w;
  const double phi0i = demo.mass(i, Age::young), phi1i = demo.mass(i, Age::old);
  const double phi0j = demo.mass(j, Age::young), phi1j = demo.mass(j, Age::old);

  DemographicDerivatives d;
  d.foreign_young = phi0i / (s0 * s0s) * (w0 - w0s) + phi1i / (s0s * s1) * (w1 * omega - w0s);
  d.foreign_old = phi0i / (s0 * s1s) * (w0 - w1s * omega) + phi1i / (s1 * s1s) * (w1 - w1s) * omega;
  d.domestic_young = phi0j / (s0 * s0s) * (w0 - w0s) + phi1j / (s0 * s1s) * (w0 - w1s * omega);
  d.domestic_old = phi0j / (s0s * s1) * (w1 * omega - w0s) + phi1j / (s1 * s1s) * (w1 - w1s) * omega;
  return d;
}

ComparativeStatics demographic_derivatives(const ModelParams& params, Country i) {
  require(params.tau() >= params.tau_star(), "demographic comparative statics assume tau >= tau*");
  ComparativeStatics cs;
  cs.dX_dy = flow_sensitivity(params, i);
  cs.d_by_phi = demographic_derivatives_only(params, i);
  try {
    cs.thresholds = find_thresholds(params, i);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::no_root) throw;
  }
  return cs;
}

Thresholds find_thresholds(const ModelParams& params, Country i) {
  params.validate();
  const double lo = params.tau_star();
  const double hi = lo + 1.0 / params.sigma_sq;

  auto at_tau = [&](double tau) {
    ModelParams p = params;
    p.prior_home.precision_domestic = tau;
    p.prior_foreign.precision_domestic = tau;
    return demographic_derivatives_only(p, i);
  };

  auto root = [&](auto&& f, const char* name) {
    constexpr int kGrid = 64;
    double prev = f(lo);
    const double scale = std::max(1.0, std::abs(prev));
    for (int k = 1; k <= kGrid; ++k) {
      const double cur = f(lo + (hi - lo) * k / kGrid);
      if (cur > prev + 1e-12 * scale) {
        fail(ErrorCode::no_root, std::string(name) + " is not decreasing in tau on the bracket");
      }
      prev = cur;
    }
    double a = lo, b = hi;
    double fa = f(a), fb = f(b);
    if (!(fa > 0.0 && fb < 0.0)) {
      fail(ErrorCode::no_root, std::string("no root in bracket for ") + name);
    }
    while (b - a > 1e-13 * std::max(1.0, b)) {
      const double mid = 0.5 * (a + b);
      const double fm = f(mid);
      if (fm == 0.0) return mid;
      if (fm > 0.0) {
        a = mid;
      } else {
        b = mid;
      }
    }
    return 0.5 * (a + b);
  };

  Thresholds t;
  t.bracket_lo = lo;
  t.bracket_hi = hi;
  t.alt_bracket_hi = 1.0 / params.sigma_sq;
  t.tau_bar_1 = root([&](double tau) { return at_tau(tau).foreign_old; }, "foreign-old derivative");
  t.tau_bar_2 =
      root([&](double tau) { return at_tau(tau).domestic_young; }, "domestic-young derivative");
  t.tau_bar_1_in_alt = t.tau_bar_1 > lo && t.tau_bar_1 < t.alt_bracket_hi;
  t.tau_bar_2_in_alt = t.tau_bar_2 > lo && t.tau_bar_2 < t.alt_bracket_hi;
  return t;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

MonteCarloResult monte_carlo_home_bias(const ModelParams& params, std::int64_t T,
                                       std::int64_t n_paths, std::uint64_t seed,
                                       unsigned threads) {
  require(T >= 3, "monte_carlo_home_bias needs T >= 3");
  require(n_paths >= 2, "monte_carlo_home_bias needs at least 2 paths");
  const auto loadings = solve_price_loadings(params);
  std::vector<double> path_means(static_cast<std::size_t>(n_paths));

  auto work = [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t k = begin; k < end; ++k) {
      const auto s = derive_seed(seed, static_cast<std::uint64_t>(k));
      const auto path = evolve(params, loadings, draw_outputs(params, T, s, {}));
      path_means[static_cast<std::size_t>(k)] = path.mean_home_bias();
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::int64_t>(threads, n_paths));
  if (threads <= 1) {
    work(0, n_paths);
  } else {
    std::vector<std::jthread> pool;
    const std::int64_t chunk = (n_paths + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
      const std::int64_t b = w * chunk;
      const std::int64_t e = std::min(n_paths, b + chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
  }

  double total = 0.0;
  for (double m : path_means) total += m;
  const double mean = total / static_cast<double>(n_paths);
  double ss = 0.0;
  for (double m : path_means) ss += (m - mean) * (m - mean);
  const double var = ss / static_cast<double>(n_paths - 1);

  MonteCarloResult r;
  r.mean = mean;
  r.std_error = std::sqrt(var / static_cast<double>(n_paths));
  r.n_paths = n_paths;
  r.periods_per_path = T - kBurnIn;
  return r;
}

double expected_home_bias_centered(const ModelParams& params) {
  params.validate();
  require(params.theta_home == params.common_prior_mean &&
              params.theta_foreign == params.common_prior_mean,
          "expected home bias formula needs prior means centered on the true output means");
  const auto& demo = params.demographics;
  // Under centered priors every cohort's expected demand is proportional to
  // its posterior precision, normalized by clearing.
  auto expected_X = [&](Country holder, Country asset) {
    double S = 0.0, own = 0.0;
    for (Country h : kCountries) {
      for (Age a : kAges) {
        const double d = demo.mass(h, a) / cohort_weights(params, h, asset, a).variance;
        S += d;
        if (h == holder) own += d;
      }
    }
    return own / (S * demo.country_mass(holder));
  };
  return expected_X(Country::home, Country::home) - expected_X(Country::home, Country::foreign);
}

}  // namespace ebl

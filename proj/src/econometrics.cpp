#include "ebl/econometrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <set>

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>

#include "ebl/error.hpp"

namespace ebl {

std::vector<double> hp_filter(std::span<const double> y, double lambda) {
  const std::size_t n = y.size();
  if (n < 4) fail(ErrorCode::data, "hp_filter needs at least 4 observations, got " + std::to_string(n));
  require(std::isfinite(lambda) && lambda >= 0.0, "hp_filter lambda must be nonnegative");

  // Bands of I + lambda D'D: d0 main diagonal, d1 first, d2 second off-diagonal.
  std::vector<double> d0(n, 1.0), d1(n, 0.0), d2(n, 0.0);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    const double c[3] = {1.0, -2.0, 1.0};
    for (int a = 0; a < 3; ++a) {
      d0[k + a] += lambda * c[a] * c[a];
      if (a < 2) d1[k + a] += lambda * c[a] * c[a + 1];
    }
    d2[k] += lambda * c[0] * c[2];
  }

  // Banded LDL': L has unit diagonal and two subdiagonals l1, l2.
  std::vector<double> D(n), l1(n, 0.0), l2(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double di = d0[i];
    if (i >= 1) di -= l1[i - 1] * l1[i - 1] * D[i - 1];
    if (i >= 2) di -= l2[i - 2] * l2[i - 2] * D[i - 2];
    D[i] = di;
    if (i + 1 < n) {
      double v = d1[i];
      if (i >= 1) v -= l1[i - 1] * l2[i - 1] * D[i - 1];
      l1[i] = v / di;
    }
    if (i + 2 < n) l2[i] = d2[i] / di;
  }

  std::vector<double> z(y.begin(), y.end());
  for (std::size_t i = 0; i < n; ++i) {
    if (i >= 1) z[i] -= l1[i - 1] * z[i - 1];
    if (i >= 2) z[i] -= l2[i - 2] * z[i - 2];
  }
  for (std::size_t i = 0; i < n; ++i) z[i] /= D[i];
  for (std::size_t i = n; i-- > 0;) {
    if (i + 1 < n) z[i] -= l1[i] * z[i + 1];
    if (i + 2 < n) z[i] -= l2[i] * z[i + 2];
  }
  return z;
}

std::vector<double> standardize(std::span<const double> v) {
  if (v.size() < 2) fail(ErrorCode::data, "standardization needs at least 2 values");
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  if (!(sd > 0.0) || !std::isfinite(sd)) {
    fail(ErrorCode::data, "cannot standardize a series with zero variance");
  }
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - mean) / sd;
  return out;
}

const EquityRow& EquitySeries::at(int year) const {
  for (const auto& r : rows) {
    if (r.year == year) return r;
  }
  fail(ErrorCode::data, "no equity data for year " + std::to_string(year));
}

double home_bias_measure(const EquityRow& r) {
  const std::string where = " in year " + std::to_string(r.year);
  if (!(r.global_market_cap > 0.0)) fail(ErrorCode::data, "global market cap must be positive" + where);
  if (!(r.us_market_cap > 0.0)) fail(ErrorCode::data, "US market cap must be positive" + where);
  const double domestic = r.us_market_cap - r.foreign_holdings_of_us_equity;
  const double invested = domestic + r.us_foreign_equity_assets;
  if (!(invested > 0.0)) fail(ErrorCode::data, "global equity investment by the US must be positive" + where);
  return domestic / invested - r.us_market_cap / r.global_market_cap;
}

double home_bias_measure(const EquitySeries& series, int year) {
  return home_bias_measure(series.at(year));
}

bool CountryIndicators::get(const std::string& name) const {
  if (name == "old_above_median") return old_above_median;
  if (name == "young_above_median") return young_above_median;
  if (name == "old_top_quartile") return old_top_quartile;
  if (name == "young_top_quartile") return young_top_quartile;
  fail(ErrorCode::unknown_column, "unknown indicator '" + name + "'");
}

bool is_indicator_name(const std::string& name) {
  return std::find(kIndicatorNames.begin(), kIndicatorNames.end(), name) != kIndicatorNames.end();
}

std::vector<std::string> PanelDataset::countries() const {
  std::vector<std::string> out;
  for (const auto& r : rows) {
    if (out.empty() || out.back() != r.country) {
      if (std::find(out.begin(), out.end(), r.country) == out.end()) out.push_back(r.country);
    }
  }
  return out;
}

namespace {

template <class Row>
std::map<std::string, std::vector<const Row*>> by_country(const std::vector<Row>& rows) {
  std::map<std::string, std::vector<const Row*>> g;
  for (const auto& r : rows) g[r.country].push_back(&r);
  for (auto& [c, v] : g) {
    std::stable_sort(v.begin(), v.end(), [](auto* a, auto* b) { return a->year < b->year; });
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (v[i]->year == v[i - 1]->year) {
        fail(ErrorCode::duplicate_key,
             "duplicate key (" + c + ", " + std::to_string(v[i]->year) + ")");
      }
    }
  }
  return g;
}

template <std::size_t N>
std::optional<double> sum_all(const std::array<std::optional<double>, N>& parts) {
  double s = 0.0;
  for (const auto& p : parts) {
    if (!p) return std::nullopt;
    s += *p;
  }
  return s;
}

void standardize_column(std::vector<PanelRow>& rows, std::size_t begin, std::size_t end,
                        std::optional<double> PanelRow::*field, const std::string& what) {
  std::vector<double> vals;
  for (std::size_t i = begin; i < end; ++i) {
    if (rows[i].*field) vals.push_back(*(rows[i].*field));
  }
  if (vals.empty()) return;
  std::vector<double> z;
  try {
    z = standardize(vals);
  } catch (const Error& e) {
    fail(e.code(), what + " for country " + rows[begin].country + ": " + e.what());
  }
  std::size_t k = 0;
  for (std::size_t i = begin; i < end; ++i) {
    if (rows[i].*field) rows[i].*field = z[k++];
  }
}

double quantile7(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

PanelDataset build_flows(const std::vector<RawFlowRow>& raw, FlowBuildReport* report,
                         double lambda) {
  if (raw.empty()) fail(ErrorCode::empty_input, "no flow rows supplied");
  FlowBuildReport rep;
  PanelDataset out;
  out.provenance = "flows";
  for (const auto& [country, rows] : by_country(raw)) {
    std::vector<double> gdp;
    for (const auto* r : rows) {
      if (!r->gdp || !(*r->gdp > 0.0)) {
        fail(ErrorCode::missing_value, "GDP missing or nonpositive for (" + country + ", " +
                                           std::to_string(r->year) + ")");
      }
      gdp.push_back(*r->gdp);
    }
    const auto trend = hp_filter(gdp, lambda);
    const std::size_t begin = out.rows.size();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      PanelRow pr;
      pr.country = country;
      pr.year = rows[i]->year;
      if (i > 0 && rows[i - 1]->year == pr.year - 1) {
        pr.gdp_growth = (gdp[i] - gdp[i - 1]) / gdp[i - 1];
      } else {
        ++rep.growth_missing;
      }
      if (auto s = sum_all(rows[i]->liabilities)) pr.cif = *s / trend[i]; else ++rep.cif_dropped;
      if (auto s = sum_all(rows[i]->assets)) pr.cod = *s / trend[i]; else ++rep.cod_dropped;
      if (pr.cif || pr.cod) out.rows.push_back(pr);
    }
    standardize_column(out.rows, begin, out.rows.size(), &PanelRow::cif, "CIF");
    standardize_column(out.rows, begin, out.rows.size(), &PanelRow::cod, "COD");
  }
  if (report) *report = rep;
  return out;
}

FlagPair rank_flags(std::span<const double> values) {
  if (values.empty()) fail(ErrorCode::empty_input, "no values to rank");
  std::vector<double> v(values.begin(), values.end());
  const double median = quantile7(v, 0.5);
  const double q75 = quantile7(v, 0.75);
  FlagPair f;
  for (double x : values) {
    f.above_median.push_back(x >= median);
    f.top_quartile.push_back(x >= q75);
  }
  return f;
}

std::map<std::string, CountryIndicators> population_indicators(
    const std::vector<PopulationRow>& rows, int year_from, int year_to) {
  if (rows.empty()) fail(ErrorCode::empty_input, "no population rows supplied");
  require(year_from <= year_to, "population window is empty");
  // country -> year -> bin -> count
  std::map<std::string, std::map<int, std::map<int, double>>> cube;
  for (const auto& r : rows) {
    if (r.year < year_from || r.year > year_to) continue;
    auto [it, fresh] = cube[r.country][r.year].emplace(r.age_bin_start, r.count);
    if (!fresh) {
      fail(ErrorCode::duplicate_key, "duplicate key (" + r.country + ", " + std::to_string(r.year) +
                                         ", " + std::to_string(r.age_bin_start) + ")");
    }
  }
  if (cube.empty()) fail(ErrorCode::empty_input, "no population rows inside the window");

  std::vector<std::string> names;
  std::vector<double> young, old;
  for (const auto& [country, years] : cube) {
    double ys = 0.0, os = 0.0;
    for (const auto& [year, bins] : years) {
      for (int b = 25; b <= 70; b += 5) {
        auto it = bins.find(b);
        if (it == bins.end()) {
          fail(ErrorCode::missing_value, "country " + country + " year " + std::to_string(year) +
                                             " is missing age bin " + std::to_string(b));
        }
        (b < 50 ? ys : os) += it->second;
      }
    }
    names.push_back(country);
    young.push_back(ys / static_cast<double>(years.size()));
    old.push_back(os / static_cast<double>(years.size()));
  }
  const auto fy = rank_flags(young);
  const auto fo = rank_flags(old);
  std::map<std::string, CountryIndicators> out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    out[names[i]] = {fo.above_median[i], fy.above_median[i], fo.top_quartile[i], fy.top_quartile[i]};
  }
  return out;
}

const char* outcome_name(Outcome o) { return o == Outcome::cif ? "cif" : "cod"; }

std::size_t RegressionResult::index(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return i;
  }
  fail(ErrorCode::unknown_column, "regression has no term '" + name + "'");
}

std::string stars(double p) {
  if (p < 0.01) return "***";
  if (p < 0.05) return "**";
  if (p < 0.10) return "*";
  return "";
}

RegressionResult panel_ols(const PanelDataset& data, Outcome outcome,
                           const std::vector<std::string>& interactions) {
  for (const auto& name : interactions) {
    if (!is_indicator_name(name)) fail(ErrorCode::unknown_column, "unknown interaction '" + name + "'");
  }
  auto field = outcome == Outcome::cif ? &PanelRow::cif : &PanelRow::cod;

  std::vector<const PanelRow*> used;
  for (const auto& r : data.rows) {
    if (r.gdp_growth && r.*field) used.push_back(&r);
  }
  if (used.empty()) fail(ErrorCode::empty_input, "no complete observations for the regression");

  std::vector<std::string> clusters;
  std::map<std::string, std::size_t> cluster_of;
  int first_year = used.front()->year;
  for (const auto* r : used) {
    if (cluster_of.emplace(r->country, clusters.size()).second) clusters.push_back(r->country);
    first_year = std::min(first_year, r->year);
  }
  const std::size_t G = clusters.size();
  if (G < 2) fail(ErrorCode::data, "clustered standard errors need at least 2 countries");

  std::vector<std::vector<bool>> dummies(interactions.size(), std::vector<bool>(G));
  for (std::size_t k = 0; k < interactions.size(); ++k) {
    for (std::size_t g = 0; g < G; ++g) {
      auto it = data.indicators.find(clusters[g]);
      if (it == data.indicators.end()) {
        fail(ErrorCode::missing_value, "no population indicators for country " + clusters[g]);
      }
      dummies[k][g] = it->second.get(interactions[k]);
    }
  }

  RegressionResult res;
  res.outcome = outcome_name(outcome);
  res.names.push_back("gdp_growth");
  for (const auto& name : interactions) res.names.push_back("gdp_growth:" + name);
  res.n_slopes = res.names.size();
  for (const auto& c : clusters) res.names.push_back("fe:" + c);
  for (const auto& c : clusters) res.names.push_back("trend:" + c);

  const auto N = static_cast<Eigen::Index>(used.size());
  const auto K = static_cast<Eigen::Index>(res.names.size());
  const auto S = static_cast<Eigen::Index>(res.n_slopes);
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(N, K);
  Eigen::VectorXd y(N);
  std::vector<std::size_t> group(used.size());
  for (Eigen::Index i = 0; i < N; ++i) {
    const auto* r = used[static_cast<std::size_t>(i)];
    const std::size_t g = cluster_of[r->country];
    group[static_cast<std::size_t>(i)] = g;
    y(i) = *(r->*field);
    X(i, 0) = *r->gdp_growth;
    for (std::size_t k = 0; k < interactions.size(); ++k) {
      X(i, 1 + static_cast<Eigen::Index>(k)) = dummies[k][g] ? *r->gdp_growth : 0.0;
    }
    X(i, S + static_cast<Eigen::Index>(g)) = 1.0;
    X(i, S + static_cast<Eigen::Index>(G + g)) = r->year - first_year;
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(1e-10);
  if (qr.rank() < K) {
    std::string cols;
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index j = qr.rank(); j < K; ++j) {
      if (!cols.empty()) cols += ", ";
      cols += res.names[static_cast<std::size_t>(perm(j))];
    }
    fail(ErrorCode::singular_design, "singular design; collinear columns: " + cols);
  }
  if (N <= K) fail(ErrorCode::data, "regression needs more observations than regressors");

  const Eigen::VectorXd b = qr.solve(y);
  const Eigen::VectorXd u = y - X * b;
  const Eigen::MatrixXd bread =
      (X.transpose() * X).ldlt().solve(Eigen::MatrixXd::Identity(K, K));
  Eigen::MatrixXd scores = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(G), K);
  for (Eigen::Index i = 0; i < N; ++i) {
    scores.row(static_cast<Eigen::Index>(group[static_cast<std::size_t>(i)])) += u(i) * X.row(i);
  }
  const Eigen::MatrixXd meat = scores.transpose() * scores;
  const double n = static_cast<double>(N), k = static_cast<double>(K), g = static_cast<double>(G);
  const double cr1 = g / (g - 1.0) * (n - 1.0) / (n - k);
  const Eigen::MatrixXd V = cr1 * bread * meat * bread;

  boost::math::students_t dist(g - 1.0);
  for (Eigen::Index j = 0; j < K; ++j) {
    const double se = std::sqrt(std::max(0.0, V(j, j)));
    const double t = b(j) / se;
    res.coefficients.push_back(b(j));
    res.clustered_se.push_back(se);
    res.t_stats.push_back(t);
    res.p_values.push_back(std::isfinite(t) ? 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)))
                                            : std::numeric_limits<double>::quiet_NaN());
  }
  const double ssr = u.squaredNorm();
  const double sst = (y.array() - y.mean()).square().sum();
  res.r_squared = sst > 0.0 ? 1.0 - ssr / sst : 0.0;
  res.n_obs = N;
  res.n_clusters = static_cast<std::int64_t>(G);
  return res;
}

namespace {

std::vector<std::string> slope_rows(std::span<const RegressionResult> results) {
  std::vector<std::string> rows;
  for (const auto& r : results) {
    for (std::size_t j = 0; j < r.n_slopes; ++j) {
      if (std::find(rows.begin(), rows.end(), r.names[j]) == rows.end()) rows.push_back(r.names[j]);
    }
  }
  return rows;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

void write_regression_table_text(std::span<const RegressionResult> results, std::ostream& os) {
  constexpr int kLabel = 36, kCol = 14;
  auto pad_left = [](const std::string& s, int w) {
    return std::string(static_cast<std::size_t>(std::max(0, w - static_cast<int>(s.size()))), ' ') + s;
  };
  auto pad_right = [](const std::string& s, int w) {
    return s + std::string(static_cast<std::size_t>(std::max(0, w - static_cast<int>(s.size()))), ' ');
  };
  os << pad_right("", kLabel);
  for (std::size_t c = 0; c < results.size(); ++c) {
    os << pad_left("(" + std::to_string(c + 1) + ")", kCol);
  }
  os << '\n' << pad_right("", kLabel);
  for (const auto& r : results) os << pad_left(r.outcome, kCol);
  os << '\n';
  for (const auto& name : slope_rows(results)) {
    os << pad_right(name, kLabel);
    for (const auto& r : results) {
      const auto it = std::find(r.names.begin(), r.names.begin() + static_cast<std::ptrdiff_t>(r.n_slopes), name);
      if (it == r.names.begin() + static_cast<std::ptrdiff_t>(r.n_slopes)) {
        os << pad_left("", kCol);
        continue;
      }
      const auto j = static_cast<std::size_t>(it - r.names.begin());
      os << pad_left(fixed(r.coefficients[j], 3) + pad_right(stars(r.p_values[j]), 3), kCol);
    }
    os << '\n' << pad_right("", kLabel);
    for (const auto& r : results) {
      const auto it = std::find(r.names.begin(), r.names.begin() + static_cast<std::ptrdiff_t>(r.n_slopes), name);
      if (it == r.names.begin() + static_cast<std::ptrdiff_t>(r.n_slopes)) {
        os << pad_left("", kCol);
        continue;
      }
      const auto j = static_cast<std::size_t>(it - r.names.begin());
      os << pad_left("(" + fixed(r.t_stats[j], 2) + ")   ", kCol);
    }
    os << '\n';
  }
  os << pad_right("Observations", kLabel);
  for (const auto& r : results) os << pad_left(std::to_string(r.n_obs) + "   ", kCol);
  os << '\n' << pad_right("R-squared", kLabel);
  for (const auto& r : results) os << pad_left(fixed(r.r_squared, 3) + "   ", kCol);
  os << '\n' << pad_right("Countries (clusters)", kLabel);
  for (const auto& r : results) os << pad_left(std::to_string(r.n_clusters) + "   ", kCol);
  os << "\nt statistics in parentheses; * p<0.10, ** p<0.05, *** p<0.01\n";
}

void write_regression_table_csv(std::span<const RegressionResult> results, std::ostream& os) {
  os << "model,outcome,term,coefficient,clustered_se,t_stat,p_value,stars,n_obs,n_clusters,r_squared\n";
  for (std::size_t c = 0; c < results.size(); ++c) {
    const auto& r = results[c];
    for (std::size_t j = 0; j < r.n_slopes; ++j) {
      os << c + 1 << ',' << r.outcome << ',' << r.names[j] << ',' << fixed(r.coefficients[j], 10) << ','
         << fixed(r.clustered_se[j], 10) << ',' << fixed(r.t_stats[j], 6) << ','
         << fixed(r.p_values[j], 6) << ',' << stars(r.p_values[j]) << ',' << r.n_obs << ','
         << r.n_clusters << ',' << fixed(r.r_squared, 6) << '\n';
    }
  }
}

PanelDataset build_synthetic_panel(const std::vector<SyntheticCountry>& countries,
                                   const SyntheticPanelOptions& options) {
  require(countries.size() >= 4, "a synthetic panel needs at least 4 countries");
  require(options.periods >= 4, "a synthetic panel needs at least 4 periods per country");
  std::set<std::string> seen;
  for (const auto& c : countries) {
    require(!c.name.empty() && seen.insert(c.name).second,
            "synthetic country names must be unique and nonempty");
  }

  PanelDataset out;
  out.provenance = "synthetic(" + std::to_string(options.seed) + ")";
  std::vector<double> young, old;
  for (std::size_t k = 0; k < countries.size(); ++k) {
    const auto& c = countries[k];
    const auto path = simulate_path(c.params, options.periods + kBurnIn,
                                    derive_seed(options.seed, k), {options.global_factor_share});
    double lowest = path.outputs.front()[Country::home];
    for (const auto& y : path.outputs) lowest = std::min(lowest, y[Country::home]);
    const double floor = 0.1 * c.params.theta_home;
    if (!(floor > 0.0)) {
      fail(ErrorCode::parameter, "country " + c.name + ": output levels cannot be shifted positive "
                                 "when the output mean is not positive");
    }
    const double shift = std::max(0.0, floor - lowest);

    const std::size_t begin = out.rows.size();
    for (const auto& s : path.periods) {
      const double prev = path.outputs[static_cast<std::size_t>(s.t - 1)][Country::home] + shift;
      PanelRow r;
      r.country = c.name;
      r.year = static_cast<int>(s.t);
      r.gdp_growth = (s.y[Country::home] + shift - prev) / prev;
      r.cif = s.flows[Country::home].foreign;
      r.cod = s.flows[Country::foreign].foreign;
      if (options.cod == CodDefinition::net_reallocation) *r.cod -= s.flows[Country::home].domestic;
      out.rows.push_back(r);
    }
    standardize_column(out.rows, begin, out.rows.size(), &PanelRow::cif, "CIF");
    standardize_column(out.rows, begin, out.rows.size(), &PanelRow::cod, "COD");
    young.push_back(c.params.demographics.mass(Country::home, Age::young));
    old.push_back(c.params.demographics.mass(Country::home, Age::old));
  }
  const auto fy = rank_flags(young);
  const auto fo = rank_flags(old);
  for (std::size_t k = 0; k < countries.size(); ++k) {
    out.indicators[countries[k].name] = {fo.above_median[k], fy.above_median[k],
                                         fo.top_quartile[k], fy.top_quartile[k]};
  }
  return out;
}

std::vector<SyntheticCountry> default_synthetic_countries(const ModelParams& base) {
  std::vector<SyntheticCountry> out;
  const double levels[2] = {0.15, 0.35};
  int n = 0;
  for (int rep = 0; rep < 2; ++rep) {
    for (double young : levels) {
      for (double old : levels) {
        SyntheticCountry c;
        c.name = "S" + std::to_string(++n);
        c.params = base;
        c.params.demographics.mass(Country::home, Age::young) = young;
        c.params.demographics.mass(Country::home, Age::old) = old;
        out.push_back(c);
      }
    }
  }
  return out;
}

}  // namespace ebl

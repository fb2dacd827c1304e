#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ebl/equilibrium.hpp"
#include "ebl/simulation.hpp"

namespace ebl {

inline constexpr double kHpLambdaAnnual = 6.25;

// Trend minimizing sum (y - tau)^2 + lambda sum (second difference of tau)^2,
// from the banded system (I + lambda D'D) tau = y.
std::vector<double> hp_filter(std::span<const double> series, double lambda = kHpLambdaAnnual);

// Mean 0, sample SD (n - 1) 1.
std::vector<double> standardize(std::span<const double> values);

// ---- home bias from equity positions ----

struct EquityRow {
  int year = 0;
  double us_market_cap = 0.0;
  double global_market_cap = 0.0;
  double foreign_holdings_of_us_equity = 0.0;
  double us_foreign_equity_assets = 0.0;
};

struct EquitySeries {
  std::vector<EquityRow> rows;  // sorted by year

  const EquityRow& at(int year) const;
};

// Domestic share of US equity investment minus the US share of world market cap.
double home_bias_measure(const EquityRow& row);
double home_bias_measure(const EquitySeries& series, int year);

// ---- flows from balance-of-payments components ----

struct RawFlowRow {
  std::string country;
  int year = 0;
  std::optional<double> gdp;
  std::array<std::optional<double>, 3> liabilities;  // direct, portfolio, other
  std::array<std::optional<double>, 4> assets;       // direct, portfolio, other, reserves
};

struct CountryIndicators {
  bool old_above_median = false;
  bool young_above_median = false;
  bool old_top_quartile = false;
  bool young_top_quartile = false;

  bool get(const std::string& name) const;
};

inline constexpr std::array<const char*, 4> kIndicatorNames{
    "old_above_median", "young_above_median", "old_top_quartile", "young_top_quartile"};

bool is_indicator_name(const std::string& name);

struct PanelRow {
  std::string country;
  int year = 0;
  std::optional<double> gdp_growth;
  std::optional<double> cif;
  std::optional<double> cod;
};

struct PanelDataset {
  std::vector<PanelRow> rows;  // grouped by country, years ascending
  std::map<std::string, CountryIndicators> indicators;
  std::string provenance;

  std::vector<std::string> countries() const;
};

struct FlowBuildReport {
  std::size_t cif_dropped = 0;
  std::size_t cod_dropped = 0;
  std::size_t growth_missing = 0;
};

// Sums components, divides by HP-trend GDP, standardizes per country. Years
// with a missing component lose only the affected outcome. GDP must be present
// and positive in every row.
PanelDataset build_flows(const std::vector<RawFlowRow>& raw, FlowBuildReport* report = nullptr,
                         double lambda = kHpLambdaAnnual);

// ---- population indicators ----

struct PopulationRow {
  std::string country;
  int year = 0;
  int age_bin_start = 0;
  double count = 0.0;
};

// Young: bins 25..45 (ages 25-49). Old: bins 50..70 (ages 50-74). Counts are
// averaged over [year_from, year_to], then flagged within the country set:
// above median means >= median, top quartile means >= the 0.75 quantile
// (linear interpolation between order statistics).
std::map<std::string, CountryIndicators> population_indicators(
    const std::vector<PopulationRow>& rows, int year_from, int year_to);

// Flags for a set of country-level values under the same rule.
struct FlagPair {
  std::vector<bool> above_median;
  std::vector<bool> top_quartile;
};
FlagPair rank_flags(std::span<const double> values);

// ---- regression ----

enum class Outcome { cif, cod };
const char* outcome_name(Outcome o);

struct RegressionResult {
  std::string outcome;
  std::vector<std::string> names;  // slopes first, then fixed effects and trends
  std::vector<double> coefficients;
  std::vector<double> clustered_se;
  std::vector<double> t_stats;
  std::vector<double> p_values;
  std::size_t n_slopes = 0;
  double r_squared = 0.0;
  std::int64_t n_obs = 0;
  std::int64_t n_clusters = 0;

  std::size_t index(const std::string& name) const;
  double coefficient(const std::string& name) const { return coefficients[index(name)]; }
  double se(const std::string& name) const { return clustered_se[index(name)]; }
  double t(const std::string& name) const { return t_stats[index(name)]; }
};

// Significance legend: *** p<0.01, ** p<0.05, * p<0.10.
std::string stars(double p_value);

// Y = a_i + g_i (year - first year) + b1 gdp_growth + sum_k b_k gdp_growth * D_k + e,
// with CR1 country-clustered standard errors and the overall R^2.
RegressionResult panel_ols(const PanelDataset& data, Outcome outcome,
                           const std::vector<std::string>& interactions = {});

// Columns: one per regression; rows: slope names. Text aligns coefficients
// with stars and t statistics in parentheses.
void write_regression_table_text(std::span<const RegressionResult> results, std::ostream& os);
void write_regression_table_csv(std::span<const RegressionResult> results, std::ostream& os);

// ---- synthetic panel ----

enum class CodDefinition {
  // Change in the country's holdings of the foreign asset.
  foreign_holdings,
  // Change in foreign-asset holdings net of the change in domestic-asset
  // holdings: the domestic agents' reallocation abroad.
  net_reallocation,
};

struct SyntheticCountry {
  std::string name;
  ModelParams params;
};

struct SyntheticPanelOptions {
  std::int64_t periods = 60;  // rows per country
  std::uint64_t seed = 0;
  double global_factor_share = 0.0;
  CodDefinition cod = CodDefinition::net_reallocation;
};

PanelDataset build_synthetic_panel(const std::vector<SyntheticCountry>& countries,
                                   const SyntheticPanelOptions& options);

// Eight countries with old and young shares crossed in a 2x2 design.
std::vector<SyntheticCountry> default_synthetic_countries(const ModelParams& base);

}  // namespace ebl

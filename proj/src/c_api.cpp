#include "ebl/ebl_c.h"

#include <fstream>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "ebl/config.hpp"
#include "ebl/csv_io.hpp"
#include "ebl/econometrics.hpp"
#include "ebl/error.hpp"
#include "ebl/simulation.hpp"
#include "ebl/verify.hpp"

struct ebl_config {
  ebl::RunConfig cfg;
  std::string json;
};

struct ebl_path {
  ebl::EconomyPath path;
  std::vector<std::vector<double>> rows;
};

struct ebl_report {
  ebl::VerificationReport report;
};

struct ebl_panel {
  ebl::PanelDataset data;
  std::size_t rejected = 0;
};

struct ebl_regression {
  ebl::RegressionResult result;
  std::vector<std::string> stars;
};

struct ebl_equity {
  ebl::EquitySeries series;
};

namespace {

thread_local std::string g_last_error;

int set_error(int code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

template <class F>
int guarded(F&& f) {
  try {
    g_last_error.clear();
    f();
    return EBL_OK;
  } catch (const ebl::Error& e) {
    return set_error(static_cast<int>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(EBL_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(EBL_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(EBL_ERR_INTERNAL, "unknown failure");
  }
}

int null_arg(const char* what) {
  return set_error(EBL_ERR_NULL_ARGUMENT, std::string("null argument: ") + what);
}

ebl::Country country_of(int c) {
  if (c != EBL_HOME && c != EBL_FOREIGN) ebl::fail(ebl::ErrorCode::parameter, "country must be 0 (home) or 1 (foreign)");
  return static_cast<ebl::Country>(c);
}

std::ofstream open_out(const char* filename) {
  std::ofstream f(filename, std::ios::binary);
  if (!f) ebl::fail(ebl::ErrorCode::io, std::string("cannot write '") + filename + "'");
  return f;
}

void finish(std::ofstream& f, const char* filename) {
  f.flush();
  if (!f) ebl::fail(ebl::ErrorCode::io, std::string("write failed for '") + filename + "'");
}

std::vector<std::string> path_columns() {
  std::vector<std::string> cols;
  const std::string header = ebl::path_csv_header();
  std::size_t b = 0;
  for (std::size_t i = 0; i <= header.size(); ++i) {
    if (i == header.size() || header[i] == ',') {
      cols.push_back(header.substr(b, i - b));
      b = i + 1;
    }
  }
  return cols;
}

const std::vector<std::string>& column_names() {
  static const std::vector<std::string> cols = path_columns();
  return cols;
}

}  // namespace

extern "C" {

const char* ebl_version(void) { return "1.0.0"; }

const char* ebl_status_name(int status) {
  switch (status) {
    case EBL_OK: return "ok";
    case EBL_ERR_NULL_ARGUMENT: return "null_argument";
    case EBL_ERR_OUT_OF_RANGE: return "out_of_range";
    case EBL_ERR_INTERNAL: return "internal";
    default: break;
  }
  if (status >= EBL_ERR_PARAMETER && status <= EBL_ERR_IO) {
    return ebl::to_string(static_cast<ebl::ErrorCode>(status));
  }
  return "unknown";
}

const char* ebl_last_error(void) { return g_last_error.c_str(); }

int ebl_config_parse(const char* json_text, ebl_config** out) {
  if (!json_text) return null_arg("json_text");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    auto c = std::make_unique<ebl_config>();
    c->cfg = ebl::parse_config(json_text);
    c->json = ebl::config_to_json(c->cfg);
    *out = c.release();
  });
}

void ebl_config_free(ebl_config* config) { delete config; }

int ebl_config_set_seed(ebl_config* config, uint64_t seed) {
  if (!config) return null_arg("config");
  return guarded([&] {
    config->cfg.set_seed(seed);
    config->json = ebl::config_to_json(config->cfg);
  });
}

uint64_t ebl_config_seed(const ebl_config* config) { return config ? config->cfg.seed : 0; }

const char* ebl_config_json(const ebl_config* config) { return config ? config->json.c_str() : ""; }

const char* ebl_config_output_dir(const ebl_config* config) {
  return config ? config->cfg.output_dir.c_str() : "";
}

int ebl_config_svg(const ebl_config* config) { return config && config->cfg.svg ? 1 : 0; }

int ebl_price_loadings(const ebl_config* config, int country, ebl_loadings* out) {
  if (!config) return null_arg("config");
  if (!out) return null_arg("out");
  return guarded([&] {
    const auto c = country_of(country);
    const auto& p = config->cfg.model;
    const auto L = ebl::solve_price_loadings(p);
    *out = {L[c].alpha, L[c].beta0, L[c].beta1, L[c].sigma_bar, ebl::muc_residuals(p, L, c).max()};
  });
}

int ebl_simulate(const ebl_config* config, ebl_path** out) {
  if (!config) return null_arg("config");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    auto p = std::make_unique<ebl_path>();
    const auto& c = config->cfg;
    p->path = ebl::simulate_path(c.model, c.periods, c.seed, {c.global_factor_share});
    for (const auto& s : p->path.periods) p->rows.push_back(ebl::path_row(s));
    *out = p.release();
  });
}

void ebl_path_free(ebl_path* path) { delete path; }

size_t ebl_path_rows(const ebl_path* path) { return path ? path->rows.size() : 0; }

size_t ebl_path_columns(void) { return column_names().size(); }

const char* ebl_path_column_name(size_t column) {
  return column < column_names().size() ? column_names()[column].c_str() : nullptr;
}

int ebl_path_value(const ebl_path* path, size_t row, size_t column, double* out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  if (row >= path->rows.size() || column >= path->rows[row].size()) {
    return set_error(EBL_ERR_OUT_OF_RANGE, "path index out of range");
  }
  *out = path->rows[row][column];
  return EBL_OK;
}

double ebl_path_max_clearing_residual(const ebl_path* path) {
  return path ? path->path.max_clearing_residual() : 0.0;
}

int ebl_path_write_csv(const ebl_path* path, const char* filename) {
  if (!path) return null_arg("path");
  if (!filename) return null_arg("filename");
  return guarded([&] {
    auto f = open_out(filename);
    ebl::write_path_csv(path->path, f);
    finish(f, filename);
  });
}

int ebl_path_write_svg(const ebl_path* path, const char* filename) {
  if (!path) return null_arg("path");
  if (!filename) return null_arg("filename");
  return guarded([&] {
    auto f = open_out(filename);
    ebl::write_home_bias_svg(path->path, f);
    finish(f, filename);
  });
}

size_t ebl_config_scenario_count(const ebl_config* config) {
  return config ? config->cfg.scenarios.size() : 0;
}

const char* ebl_config_scenario_name(const ebl_config* config, size_t index) {
  if (!config || index >= config->cfg.scenarios.size()) return nullptr;
  return config->cfg.scenarios[index].name.c_str();
}

int ebl_run_scenario(const ebl_config* config, size_t index, ebl_shock_result* out) {
  if (!config) return null_arg("config");
  if (!out) return null_arg("out");
  if (index >= config->cfg.scenarios.size()) return set_error(EBL_ERR_OUT_OF_RANGE, "scenario index out of range");
  return guarded([&] {
    const auto r = ebl::apply_shock(config->cfg.model, config->cfg.scenarios[index].scenario);
    const auto H = ebl::Country::home, F = ebl::Country::foreign;
    *out = {r.flows[H].domestic, r.flows[H].foreign, r.flows[F].domestic, r.flows[F].foreign,
            r.delta_home_bias};
  });
}

int ebl_comparative_statics(const ebl_config* config, int country, ebl_statics* out) {
  if (!config) return null_arg("config");
  if (!out) return null_arg("out");
  return guarded([&] {
    const auto cs = ebl::demographic_derivatives(config->cfg.model, country_of(country));
    ebl_statics s{};
    s.dX_dy = cs.dX_dy;
    s.d_foreign_young = cs.d_by_phi.foreign_young;
    s.d_foreign_old = cs.d_by_phi.foreign_old;
    s.d_domestic_young = cs.d_by_phi.domestic_young;
    s.d_domestic_old = cs.d_by_phi.domestic_old;
    if (cs.thresholds) {
      const auto& t = *cs.thresholds;
      s.has_thresholds = 1;
      s.tau_bar_1 = t.tau_bar_1;
      s.tau_bar_2 = t.tau_bar_2;
      s.bracket_lo = t.bracket_lo;
      s.bracket_hi = t.bracket_hi;
      s.alt_bracket_hi = t.alt_bracket_hi;
      s.tau_bar_1_in_alt = t.tau_bar_1_in_alt;
      s.tau_bar_2_in_alt = t.tau_bar_2_in_alt;
    }
    *out = s;
  });
}

int ebl_monte_carlo_home_bias(const ebl_config* config, double* mean, double* std_error) {
  if (!config) return null_arg("config");
  if (!mean || !std_error) return null_arg("mean/std_error");
  return guarded([&] {
    const auto& c = config->cfg;
    const auto r = ebl::monte_carlo_home_bias(c.model, c.verify.mc_periods, c.verify.n_paths,
                                              c.verify.seed, c.verify.threads);
    *mean = r.mean;
    *std_error = r.std_error;
  });
}

int ebl_verify(const ebl_config* config, ebl_report** out) {
  if (!config) return null_arg("config");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    auto r = std::make_unique<ebl_report>();
    r->report = ebl::run_verification(config->cfg.model, config->cfg.verify);
    *out = r.release();
  });
}

void ebl_report_free(ebl_report* report) { delete report; }

size_t ebl_report_count(const ebl_report* report) { return report ? report->report.checks.size() : 0; }

int ebl_report_check(const ebl_report* report, size_t index, ebl_check* out) {
  if (!report) return null_arg("report");
  if (!out) return null_arg("out");
  if (index >= report->report.checks.size()) return set_error(EBL_ERR_OUT_OF_RANGE, "check index out of range");
  const auto& c = report->report.checks[index];
  int status = EBL_CHECK_FAIL;
  if (c.status == ebl::CheckStatus::pass) status = EBL_CHECK_PASS;
  if (c.status == ebl::CheckStatus::out_of_regime) status = EBL_CHECK_OUT_OF_REGIME;
  *out = {c.name.c_str(), status, c.measured, c.threshold, c.detail.c_str()};
  return EBL_OK;
}

int ebl_report_passed(const ebl_report* report) { return report && report->report.passed() ? 1 : 0; }

int ebl_panel_synthetic(const ebl_config* config, ebl_panel** out) {
  if (!config) return null_arg("config");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    const auto& c = config->cfg;
    auto p = std::make_unique<ebl_panel>();
    ebl::SyntheticPanelOptions o;
    o.periods = c.panel.periods;
    o.seed = c.panel.seed;
    o.global_factor_share = c.panel.global_factor_share;
    o.cod = c.panel.cod;
    p->data = ebl::build_synthetic_panel(c.panel_countries(), o);
    *out = p.release();
  });
}

int ebl_panel_read_csv(const char* filename, ebl_panel** out) {
  if (!filename) return null_arg("filename");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    auto p = std::make_unique<ebl_panel>();
    ebl::IngestReport rep;
    p->data = ebl::read_panel_csv(std::string(filename), &rep);
    p->rejected = rep.rejections.size();
    *out = p.release();
  });
}

void ebl_panel_free(ebl_panel* panel) { delete panel; }

size_t ebl_panel_rows(const ebl_panel* panel) { return panel ? panel->data.rows.size() : 0; }

size_t ebl_panel_country_count(const ebl_panel* panel) {
  return panel ? panel->data.countries().size() : 0;
}

size_t ebl_panel_rejected_rows(const ebl_panel* panel) { return panel ? panel->rejected : 0; }

const char* ebl_panel_provenance(const ebl_panel* panel) {
  return panel ? panel->data.provenance.c_str() : "";
}

int ebl_panel_write_csv(const ebl_panel* panel, const char* filename) {
  if (!panel) return null_arg("panel");
  if (!filename) return null_arg("filename");
  return guarded([&] {
    auto f = open_out(filename);
    ebl::write_panel_csv(panel->data, f);
    finish(f, filename);
  });
}

int ebl_regress(const ebl_panel* panel, const char* outcome, const char* const* interactions,
                size_t n_interactions, ebl_regression** out) {
  if (!panel) return null_arg("panel");
  if (!outcome) return null_arg("outcome");
  if (!out) return null_arg("out");
  if (n_interactions > 0 && !interactions) return null_arg("interactions");
  *out = nullptr;
  return guarded([&] {
    const std::string o = outcome;
    if (o != "cif" && o != "cod") ebl::fail(ebl::ErrorCode::parameter, "outcome must be \"cif\" or \"cod\"");
    std::vector<std::string> names;
    for (size_t k = 0; k < n_interactions; ++k) {
      if (!interactions[k]) ebl::fail(ebl::ErrorCode::parameter, "null interaction name");
      names.emplace_back(interactions[k]);
    }
    auto r = std::make_unique<ebl_regression>();
    r->result = ebl::panel_ols(panel->data, o == "cif" ? ebl::Outcome::cif : ebl::Outcome::cod, names);
    for (double p : r->result.p_values) r->stars.push_back(ebl::stars(p));
    *out = r.release();
  });
}

void ebl_regression_free(ebl_regression* regression) { delete regression; }

size_t ebl_regression_slope_count(const ebl_regression* regression) {
  return regression ? regression->result.n_slopes : 0;
}

static void fill_term(const ebl_regression* r, size_t j, ebl_term* out) {
  const auto& res = r->result;
  *out = {res.names[j].c_str(), res.coefficients[j], res.clustered_se[j], res.t_stats[j],
          res.p_values[j], r->stars[j].c_str()};
}

int ebl_regression_slope(const ebl_regression* regression, size_t index, ebl_term* out) {
  if (!regression) return null_arg("regression");
  if (!out) return null_arg("out");
  if (index >= regression->result.n_slopes) return set_error(EBL_ERR_OUT_OF_RANGE, "slope index out of range");
  fill_term(regression, index, out);
  return EBL_OK;
}

int ebl_regression_term(const ebl_regression* regression, const char* name, ebl_term* out) {
  if (!regression) return null_arg("regression");
  if (!name) return null_arg("name");
  if (!out) return null_arg("out");
  return guarded([&] { fill_term(regression, regression->result.index(name), out); });
}

double ebl_regression_r_squared(const ebl_regression* regression) {
  return regression ? regression->result.r_squared : 0.0;
}

int64_t ebl_regression_n_obs(const ebl_regression* regression) {
  return regression ? regression->result.n_obs : 0;
}

int64_t ebl_regression_n_clusters(const ebl_regression* regression) {
  return regression ? regression->result.n_clusters : 0;
}

int ebl_regression_write_tables(const ebl_regression* const* regressions, size_t count,
                                const char* text_filename, const char* csv_filename) {
  if (!regressions && count > 0) return null_arg("regressions");
  return guarded([&] {
    std::vector<ebl::RegressionResult> results;
    for (size_t k = 0; k < count; ++k) {
      if (!regressions[k]) ebl::fail(ebl::ErrorCode::parameter, "null regression in table");
      results.push_back(regressions[k]->result);
    }
    if (text_filename) {
      auto f = open_out(text_filename);
      ebl::write_regression_table_text(results, f);
      finish(f, text_filename);
    }
    if (csv_filename) {
      auto f = open_out(csv_filename);
      ebl::write_regression_table_csv(results, f);
      finish(f, csv_filename);
    }
  });
}

int ebl_equity_read_csv(const char* filename, ebl_equity** out) {
  if (!filename) return null_arg("filename");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    auto e = std::make_unique<ebl_equity>();
    e->series = ebl::read_equity_csv(std::string(filename));
    *out = e.release();
  });
}

void ebl_equity_free(ebl_equity* equity) { delete equity; }

size_t ebl_equity_years(const ebl_equity* equity) { return equity ? equity->series.rows.size() : 0; }

int ebl_equity_home_bias(const ebl_equity* equity, size_t index, int* year, double* home_bias) {
  if (!equity) return null_arg("equity");
  if (!year || !home_bias) return null_arg("year/home_bias");
  if (index >= equity->series.rows.size()) return set_error(EBL_ERR_OUT_OF_RANGE, "year index out of range");
  return guarded([&] {
    const auto& row = equity->series.rows[index];
    *home_bias = ebl::home_bias_measure(row);
    *year = row.year;
  });
}

}  // extern "C"

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "ebl/ebl_c.h"

namespace fs = std::filesystem;

namespace {

const char* kConfig = R"({
  "model": {"theta": 10, "sigma_sq": 1, "tau": 2, "tau_star": 0.5, "prior_mean": 10,
            "gamma": 2, "gross_rate": 1.05},
  "simulation": {"periods": 40, "seed": 5, "mc_periods": 22, "n_paths": 300, "threads": 2},
  "shocks": [{"name": "recession_H", "country": "H", "size": -1.0}],
  "panel": {"periods": 40}
})";

struct Config {
  ebl_config* p = nullptr;
  explicit Config(const char* json) { REQUIRE(ebl_config_parse(json, &p) == EBL_OK); }
  ~Config() { ebl_config_free(p); }
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path scratch(const char* name) {
  const auto dir = fs::temp_directory_path() / "ebl_c_api_test";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("status names and version") {
  CHECK(std::strlen(ebl_version()) > 0);
  CHECK(std::string(ebl_status_name(EBL_OK)) == "ok");
  CHECK(std::string(ebl_status_name(EBL_ERR_BAD_NUMBER)).size() > 0);
}

TEST_CASE("configuration handles") {
  ebl_config* c = nullptr;
  CHECK(ebl_config_parse("{\"model\": {}}", &c) == EBL_ERR_PARAMETER);
  CHECK(c == nullptr);
  CHECK(std::string(ebl_last_error()).find("model.") != std::string::npos);
  CHECK(ebl_config_parse(nullptr, &c) == EBL_ERR_NULL_ARGUMENT);
  CHECK(ebl_config_parse(kConfig, nullptr) == EBL_ERR_NULL_ARGUMENT);

  Config cfg(kConfig);
  CHECK(ebl_config_seed(cfg.p) == 5);
  CHECK(ebl_config_set_seed(cfg.p, 9) == EBL_OK);
  CHECK(ebl_config_seed(cfg.p) == 9);
  CHECK(std::string(ebl_config_json(cfg.p)).find("\"seed\": 9") != std::string::npos);
  CHECK(ebl_config_svg(cfg.p) == 0);
  ebl_config_free(nullptr);
}

TEST_CASE("loadings and paths") {
  Config cfg(kConfig);
  ebl_loadings L{};
  REQUIRE(ebl_price_loadings(cfg.p, EBL_HOME, &L) == EBL_OK);
  CHECK(L.beta0 > 0.0);
  CHECK(L.muc_residual < 1e-12);
  CHECK(ebl_price_loadings(cfg.p, 7, &L) == EBL_ERR_PARAMETER);

  ebl_path* path = nullptr;
  REQUIRE(ebl_simulate(cfg.p, &path) == EBL_OK);
  CHECK(ebl_path_rows(path) == 38);
  CHECK(ebl_path_columns() == 22);
  CHECK(std::string(ebl_path_column_name(17)) == "HB");
  CHECK(ebl_path_column_name(22) == nullptr);
  double hb = 0, xhh = 0, xhf = 0;
  REQUIRE(ebl_path_value(path, 4, 17, &hb) == EBL_OK);
  REQUIRE(ebl_path_value(path, 4, 13, &xhh) == EBL_OK);
  REQUIRE(ebl_path_value(path, 4, 14, &xhf) == EBL_OK);
  CHECK(hb == doctest::Approx(xhh - xhf));
  CHECK(ebl_path_value(path, 38, 0, &hb) == EBL_ERR_OUT_OF_RANGE);
  CHECK(ebl_path_max_clearing_residual(path) < 1e-9);

  const auto a = scratch("a.csv"), b = scratch("b.csv");
  REQUIRE(ebl_path_write_csv(path, a.c_str()) == EBL_OK);
  ebl_path* again = nullptr;
  REQUIRE(ebl_simulate(cfg.p, &again) == EBL_OK);
  REQUIRE(ebl_path_write_csv(again, b.c_str()) == EBL_OK);
  CHECK(slurp(a) == slurp(b));
  CHECK(ebl_path_write_svg(path, scratch("hb.svg").c_str()) == EBL_OK);
  CHECK(ebl_path_write_csv(path, "/nonexistent/dir/x.csv") == EBL_ERR_IO);
  ebl_path_free(path);
  ebl_path_free(again);
}

TEST_CASE("scenarios and statics") {
  Config cfg(kConfig);
  REQUIRE(ebl_config_scenario_count(cfg.p) == 1);
  CHECK(std::string(ebl_config_scenario_name(cfg.p, 0)) == "recession_H");
  ebl_shock_result r{};
  REQUIRE(ebl_run_scenario(cfg.p, 0, &r) == EBL_OK);
  CHECK(r.d_home_domestic > 0.0);
  CHECK(r.d_home_foreign < 0.0);
  CHECK(ebl_run_scenario(cfg.p, 1, &r) == EBL_ERR_OUT_OF_RANGE);

  ebl_statics s{};
  REQUIRE(ebl_comparative_statics(cfg.p, EBL_HOME, &s) == EBL_OK);
  CHECK(s.dX_dy < 0.0);
  CHECK(s.d_foreign_young < 0.0);
  CHECK(s.d_domestic_old < 0.0);
  REQUIRE(s.has_thresholds == 1);
  CHECK(s.tau_bar_1 == doctest::Approx(1.0).epsilon(1e-10));

  double mean = 0, se = 0;
  REQUIRE(ebl_monte_carlo_home_bias(cfg.p, &mean, &se) == EBL_OK);
  CHECK(mean > 0.0);
  CHECK(se > 0.0);
}

TEST_CASE("verification report") {
  Config cfg(kConfig);
  ebl_report* rep = nullptr;
  REQUIRE(ebl_verify(cfg.p, &rep) == EBL_OK);
  CHECK(ebl_report_passed(rep) == 1);
  REQUIRE(ebl_report_count(rep) == 13);
  ebl_check c{};
  REQUIRE(ebl_report_check(rep, 0, &c) == EBL_OK);
  CHECK(std::string(c.name) == "muc_residuals");
  CHECK(c.status == EBL_CHECK_PASS);
  CHECK(ebl_report_check(rep, 13, &c) == EBL_ERR_OUT_OF_RANGE);
  ebl_report_free(rep);
}

TEST_CASE("panels and regressions") {
  Config cfg(kConfig);
  ebl_panel* panel = nullptr;
  REQUIRE(ebl_panel_synthetic(cfg.p, &panel) == EBL_OK);
  CHECK(ebl_panel_rows(panel) == 320);
  CHECK(ebl_panel_country_count(panel) == 8);
  const auto csv = scratch("panel.csv");
  REQUIRE(ebl_panel_write_csv(panel, csv.c_str()) == EBL_OK);

  ebl_panel* back = nullptr;
  REQUIRE(ebl_panel_read_csv(csv.c_str(), &back) == EBL_OK);
  CHECK(ebl_panel_rows(back) == 320);
  CHECK(ebl_panel_rejected_rows(back) == 0);
  CHECK(std::string(ebl_panel_provenance(back)).find("ingested") != std::string::npos);

  const char* inter[] = {"old_above_median", "young_above_median"};
  ebl_regression* a = nullptr;
  ebl_regression* b = nullptr;
  REQUIRE(ebl_regress(panel, "cif", nullptr, 0, &a) == EBL_OK);
  REQUIRE(ebl_regress(back, "cod", inter, 2, &b) == EBL_OK);
  CHECK(ebl_regression_slope_count(a) == 1);
  CHECK(ebl_regression_slope_count(b) == 3);
  ebl_term t{};
  REQUIRE(ebl_regression_term(b, "gdp_growth:old_above_median", &t) == EBL_OK);
  CHECK(std::isfinite(t.clustered_se));
  CHECK(ebl_regression_term(b, "nothing", &t) == EBL_ERR_UNKNOWN_COLUMN);
  CHECK(ebl_regression_n_clusters(a) == 8);
  CHECK(ebl_regression_n_obs(a) == 320);
  CHECK(ebl_regression_r_squared(a) > 0.0);
  ebl_regression* bad = nullptr;
  CHECK(ebl_regress(panel, "flows", nullptr, 0, &bad) == EBL_ERR_PARAMETER);
  CHECK(bad == nullptr);

  const ebl_regression* both[] = {a, b};
  const auto txt = scratch("t.txt"), tcsv = scratch("t.csv");
  REQUIRE(ebl_regression_write_tables(both, 2, txt.c_str(), tcsv.c_str()) == EBL_OK);
  CHECK(slurp(txt).find("Observations") != std::string::npos);

  ebl_panel_free(back);
  CHECK(ebl_panel_read_csv(scratch("missing.csv").c_str(), &back) == EBL_ERR_IO);
  CHECK(back == nullptr);
  ebl_regression_free(a);
  ebl_regression_free(b);
  ebl_panel_free(panel);
}

TEST_CASE("equity home bias") {
  const auto f = scratch("equity.csv");
  std::ofstream(f) << "year,us_market_cap,global_market_cap,foreign_holdings_of_us_equity,us_foreign_equity_assets\n"
                      "2010,50,125,8,8\n";
  ebl_equity* e = nullptr;
  REQUIRE(ebl_equity_read_csv(f.c_str(), &e) == EBL_OK);
  REQUIRE(ebl_equity_years(e) == 1);
  int year = 0;
  double hb = 0;
  REQUIRE(ebl_equity_home_bias(e, 0, &year, &hb) == EBL_OK);
  CHECK(year == 2010);
  CHECK(hb == doctest::Approx(0.44));
  ebl_equity_free(e);
}

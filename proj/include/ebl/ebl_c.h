#ifndef EBL_C_H
#define EBL_C_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#  ifdef EBL_BUILDING
#    define EBL_API __declspec(dllexport)
#  else
#    define EBL_API __declspec(dllimport)
#  endif
#else
#  define EBL_API __attribute__((visibility("default")))
#endif

/* Every function returning int returns one of these. Messages for the most
   recent failure on the calling thread are available from ebl_last_error. */
enum ebl_status {
  EBL_OK = 0,
  EBL_ERR_PARAMETER = 1,
  EBL_ERR_NO_EXPERIENCE = 2,
  EBL_ERR_DEGENERATE_BELIEF = 3,
  EBL_ERR_DEGENERATE_EQUILIBRIUM = 4,
  EBL_ERR_INVALID_EQUILIBRIUM = 5,
  EBL_ERR_NO_ROOT = 6,
  EBL_ERR_DATA = 7,
  EBL_ERR_UNKNOWN_COLUMN = 8,
  EBL_ERR_BAD_NUMBER = 9,
  EBL_ERR_DUPLICATE_KEY = 10,
  EBL_ERR_EMPTY_INPUT = 11,
  EBL_ERR_MISSING_VALUE = 12,
  EBL_ERR_SINGULAR_DESIGN = 13,
  EBL_ERR_IO = 14,
  EBL_ERR_NULL_ARGUMENT = 20,
  EBL_ERR_OUT_OF_RANGE = 21,
  EBL_ERR_INTERNAL = 99
};

enum ebl_country { EBL_HOME = 0, EBL_FOREIGN = 1 };

enum ebl_check_status { EBL_CHECK_PASS = 0, EBL_CHECK_FAIL = 1, EBL_CHECK_OUT_OF_REGIME = 2 };

EBL_API const char* ebl_version(void);
EBL_API const char* ebl_status_name(int status);
EBL_API const char* ebl_last_error(void);

/* ---- configuration ---- */

typedef struct ebl_config ebl_config;

EBL_API int ebl_config_parse(const char* json_text, ebl_config** out);
EBL_API void ebl_config_free(ebl_config* config);
/* Overrides the run seed and every seed derived from it. */
EBL_API int ebl_config_set_seed(ebl_config* config, uint64_t seed);
EBL_API uint64_t ebl_config_seed(const ebl_config* config);
/* Canonical JSON of the effective configuration; owned by the config. */
EBL_API const char* ebl_config_json(const ebl_config* config);
EBL_API const char* ebl_config_output_dir(const ebl_config* config);
EBL_API int ebl_config_svg(const ebl_config* config);

/* ---- equilibrium ---- */

typedef struct ebl_loadings {
  double alpha;
  double beta0;
  double beta1;
  double sigma_bar;
  double muc_residual;
} ebl_loadings;

EBL_API int ebl_price_loadings(const ebl_config* config, int country, ebl_loadings* out);

/* ---- simulation ---- */

typedef struct ebl_path ebl_path;

EBL_API int ebl_simulate(const ebl_config* config, ebl_path** out);
EBL_API void ebl_path_free(ebl_path* path);
EBL_API size_t ebl_path_rows(const ebl_path* path);
EBL_API size_t ebl_path_columns(void);
EBL_API const char* ebl_path_column_name(size_t column);
EBL_API int ebl_path_value(const ebl_path* path, size_t row, size_t column, double* out);
EBL_API double ebl_path_max_clearing_residual(const ebl_path* path);
EBL_API int ebl_path_write_csv(const ebl_path* path, const char* filename);
EBL_API int ebl_path_write_svg(const ebl_path* path, const char* filename);

/* Flow changes after a scenario. d_home_domestic is the change in home
   holdings of the home asset; d_home_foreign the change in foreign holdings
   of the home asset; likewise for the foreign asset. */
typedef struct ebl_shock_result {
  double d_home_domestic;
  double d_home_foreign;
  double d_foreign_domestic;
  double d_foreign_foreign;
  double delta_home_bias;
} ebl_shock_result;

EBL_API size_t ebl_config_scenario_count(const ebl_config* config);
EBL_API const char* ebl_config_scenario_name(const ebl_config* config, size_t index);
EBL_API int ebl_run_scenario(const ebl_config* config, size_t index, ebl_shock_result* out);

typedef struct ebl_statics {
  double dX_dy;
  double d_foreign_young;
  double d_foreign_old;
  double d_domestic_young;
  double d_domestic_old;
  int has_thresholds;
  double tau_bar_1;
  double tau_bar_2;
  double bracket_lo;
  double bracket_hi;
  double alt_bracket_hi;
  int tau_bar_1_in_alt;
  int tau_bar_2_in_alt;
} ebl_statics;

EBL_API int ebl_comparative_statics(const ebl_config* config, int country, ebl_statics* out);

EBL_API int ebl_monte_carlo_home_bias(const ebl_config* config, double* mean, double* std_error);

/* ---- verification ---- */

typedef struct ebl_report ebl_report;

typedef struct ebl_check {
  const char* name;
  int status; /* ebl_check_status */
  double measured;
  double threshold;
  const char* detail;
} ebl_check;

EBL_API int ebl_verify(const ebl_config* config, ebl_report** out);
EBL_API void ebl_report_free(ebl_report* report);
EBL_API size_t ebl_report_count(const ebl_report* report);
EBL_API int ebl_report_check(const ebl_report* report, size_t index, ebl_check* out);
EBL_API int ebl_report_passed(const ebl_report* report);

/* ---- panels and regressions ---- */

typedef struct ebl_panel ebl_panel;
typedef struct ebl_regression ebl_regression;

EBL_API int ebl_panel_synthetic(const ebl_config* config, ebl_panel** out);
EBL_API int ebl_panel_read_csv(const char* filename, ebl_panel** out);
EBL_API void ebl_panel_free(ebl_panel* panel);
EBL_API size_t ebl_panel_rows(const ebl_panel* panel);
EBL_API size_t ebl_panel_country_count(const ebl_panel* panel);
EBL_API size_t ebl_panel_rejected_rows(const ebl_panel* panel);
EBL_API const char* ebl_panel_provenance(const ebl_panel* panel);
EBL_API int ebl_panel_write_csv(const ebl_panel* panel, const char* filename);

typedef struct ebl_term {
  const char* name;
  double coefficient;
  double clustered_se;
  double t_stat;
  double p_value;
  const char* stars;
} ebl_term;

/* outcome is "cif" or "cod"; interactions name indicator columns. */
EBL_API int ebl_regress(const ebl_panel* panel, const char* outcome,
                        const char* const* interactions, size_t n_interactions,
                        ebl_regression** out);
EBL_API void ebl_regression_free(ebl_regression* regression);
EBL_API size_t ebl_regression_slope_count(const ebl_regression* regression);
EBL_API int ebl_regression_slope(const ebl_regression* regression, size_t index, ebl_term* out);
EBL_API int ebl_regression_term(const ebl_regression* regression, const char* name, ebl_term* out);
EBL_API double ebl_regression_r_squared(const ebl_regression* regression);
EBL_API int64_t ebl_regression_n_obs(const ebl_regression* regression);
EBL_API int64_t ebl_regression_n_clusters(const ebl_regression* regression);
/* Either filename may be NULL. */
EBL_API int ebl_regression_write_tables(const ebl_regression* const* regressions, size_t count,
                                        const char* text_filename, const char* csv_filename);

/* ---- equity home bias ---- */

typedef struct ebl_equity ebl_equity;

EBL_API int ebl_equity_read_csv(const char* filename, ebl_equity** out);
EBL_API void ebl_equity_free(ebl_equity* equity);
EBL_API size_t ebl_equity_years(const ebl_equity* equity);
EBL_API int ebl_equity_home_bias(const ebl_equity* equity, size_t index, int* year, double* home_bias);

#ifdef __cplusplus
}
#endif

#endif

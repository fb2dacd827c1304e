// eblflows: command-line front end over the ebl C API.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ebl/ebl_c.h"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kOther = 1, kConfig = 2, kData = 3, kVerify = 4 };

struct CliFailure {
  int exit_code;
  std::string message;
};

int exit_for(int status) {
  switch (status) {
    case EBL_ERR_PARAMETER:
      return kConfig;
    case EBL_ERR_DATA:
    case EBL_ERR_UNKNOWN_COLUMN:
    case EBL_ERR_BAD_NUMBER:
    case EBL_ERR_DUPLICATE_KEY:
    case EBL_ERR_EMPTY_INPUT:
    case EBL_ERR_MISSING_VALUE:
    case EBL_ERR_SINGULAR_DESIGN:
      return kData;
    default:
      return kOther;
  }
}

void check(int status, const std::string& context, std::optional<int> exit_override = {}) {
  if (status == EBL_OK) return;
  throw CliFailure{exit_override.value_or(exit_for(status)),
                   context + ": " + ebl_status_name(status) + ": " + ebl_last_error()};
}

template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
  T** out() { return &p; }
  T* get() const { return p; }
};

using Config = Handle<ebl_config, ebl_config_free>;
using Path = Handle<ebl_path, ebl_path_free>;
using Report = Handle<ebl_report, ebl_report_free>;
using Panel = Handle<ebl_panel, ebl_panel_free>;
using Regression = Handle<ebl_regression, ebl_regression_free>;
using Equity = Handle<ebl_equity, ebl_equity_free>;

struct Options {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::string data_path;
  bool svg = false;
};

void load_config(const Options& o, Config& cfg) {
  std::ifstream in(o.config_path, std::ios::binary);
  if (!in) throw CliFailure{kConfig, "cannot read config file '" + o.config_path + "'"};
  std::stringstream ss;
  ss << in.rdbuf();
  check(ebl_config_parse(ss.str().c_str(), cfg.out()), "config " + o.config_path, kConfig);
  if (o.seed) check(ebl_config_set_seed(cfg.p, *o.seed), "seed", kConfig);
}

fs::path output_dir(const Options& o, const Config& cfg) {
  fs::path dir = o.out_dir.empty() ? fs::path(ebl_config_output_dir(cfg.get())) : fs::path(o.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw CliFailure{kOther, "cannot create output directory '" + dir.string() + "'"};
  }
  return dir;
}

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream f(file, std::ios::binary);
  f << text;
  if (!f) throw CliFailure{kOther, "cannot write '" + file.string() + "'"};
}

ordered_json config_json(const Config& cfg) { return ordered_json::parse(ebl_config_json(cfg.get())); }

int cmd_simulate(const Options& o) {
  Config cfg;
  load_config(o, cfg);
  const auto dir = output_dir(o, cfg);

  Path path;
  check(ebl_simulate(cfg.get(), path.out()), "simulate");
  check(ebl_path_write_csv(path.get(), (dir / "path.csv").string().c_str()), "write path");
  if (o.svg || ebl_config_svg(cfg.get())) {
    check(ebl_path_write_svg(path.get(), (dir / "home_bias.svg").string().c_str()), "write svg");
  }

  ordered_json summary;
  summary["config"] = config_json(cfg);
  const std::size_t rows = ebl_path_rows(path.get());
  summary["periods_recorded"] = rows;
  ordered_json means;
  for (std::size_t c = 1; c < ebl_path_columns(); ++c) {
    double total = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      double v = 0.0;
      check(ebl_path_value(path.get(), r, c, &v), "path value");
      total += v;
    }
    means[ebl_path_column_name(c)] = rows ? total / static_cast<double>(rows) : 0.0;
  }
  summary["means"] = means;
  summary["max_clearing_residual"] = ebl_path_max_clearing_residual(path.get());

  ordered_json loadings;
  for (int c : {EBL_HOME, EBL_FOREIGN}) {
    ebl_loadings l{};
    check(ebl_price_loadings(cfg.get(), c, &l), "loadings");
    loadings[c == EBL_HOME ? "H" : "F"] = {{"alpha", l.alpha}, {"beta0", l.beta0}, {"beta1", l.beta1},
                                           {"sigma_bar", l.sigma_bar}, {"muc_residual", l.muc_residual}};
  }
  summary["price_loadings"] = loadings;

  ordered_json scenarios = ordered_json::array();
  for (std::size_t k = 0; k < ebl_config_scenario_count(cfg.get()); ++k) {
    ebl_shock_result r{};
    check(ebl_run_scenario(cfg.get(), k, &r), "scenario");
    scenarios.push_back({{"name", ebl_config_scenario_name(cfg.get(), k)},
                         {"dX_HH", r.d_home_domestic},
                         {"dX_FH", r.d_home_foreign},
                         {"dX_FF", r.d_foreign_domestic},
                         {"dX_HF", r.d_foreign_foreign},
                         {"delta_HB", r.delta_home_bias}});
  }
  summary["scenarios"] = scenarios;
  write_text(dir / "summary.json", summary.dump(2) + "\n");

  std::cout << "wrote " << rows << " periods to " << (dir / "path.csv").string() << "\n";
  std::cout << "mean HB " << means["HB"].get<double>() << ", max clearing residual "
            << ebl_path_max_clearing_residual(path.get()) << "\n";
  return kOk;
}

int cmd_verify(const Options& o) {
  Config cfg;
  load_config(o, cfg);
  const auto dir = output_dir(o, cfg);
  Report report;
  check(ebl_verify(cfg.get(), report.out()), "verify");

  std::ostringstream csv;
  csv << "check,status,measured,threshold,detail\n";
  ordered_json checks = ordered_json::array();
  for (std::size_t k = 0; k < ebl_report_count(report.get()); ++k) {
    ebl_check c{};
    check(ebl_report_check(report.get(), k, &c), "report");
    const char* status = c.status == EBL_CHECK_PASS   ? "pass"
                         : c.status == EBL_CHECK_FAIL ? "FAIL"
                                                      : "out_of_regime";
    char line[160];
    std::snprintf(line, sizeof line, "%-14s %-28s measured=%-14.6g threshold=%-10.3g ", status, c.name,
                  c.measured, c.threshold);
    std::cout << line << c.detail << "\n";
    const ordered_json measured = c.measured, threshold = c.threshold;
    std::string detail = c.detail;
    for (auto& ch : detail) {
      if (ch == '"') ch = '\'';
    }
    csv << c.name << ',' << status << ',' << measured.dump() << ',' << threshold.dump() << ",\"" << detail << "\"\n";
    checks.push_back({{"name", c.name}, {"status", status}, {"measured", c.measured},
                      {"threshold", c.threshold}, {"detail", c.detail}});
  }
  const bool ok = ebl_report_passed(report.get()) != 0;
  write_text(dir / "verify.csv", csv.str());
  write_text(dir / "verify.json",
             ordered_json{{"passed", ok}, {"checks", checks}, {"config", config_json(cfg)}}.dump(2) + "\n");
  std::cout << (ok ? "all checks passed" : "verification FAILED") << "\n";
  return ok ? kOk : kVerify;
}

int cmd_thresholds(const Options& o) {
  Config cfg;
  load_config(o, cfg);
  const auto dir = output_dir(o, cfg);
  std::ostringstream csv;
  csv << "country,dX_dy,d_foreign_young,d_foreign_old,d_domestic_young,d_domestic_old,"
         "tau_bar_1,tau_bar_2,bracket_lo,bracket_hi,alt_bracket_hi,tau_bar_1_in_alt,tau_bar_2_in_alt\n";
  for (int c : {EBL_HOME, EBL_FOREIGN}) {
    ebl_statics s{};
    check(ebl_comparative_statics(cfg.get(), c, &s), "comparative statics");
    auto n = [](double v) { return ordered_json(v).dump(); };
    const char* name = c == EBL_HOME ? "H" : "F";
    csv << name << ',' << n(s.dX_dy) << ',' << n(s.d_foreign_young) << ',' << n(s.d_foreign_old) << ','
        << n(s.d_domestic_young) << ',' << n(s.d_domestic_old) << ',';
    if (s.has_thresholds) {
      csv << n(s.tau_bar_1) << ',' << n(s.tau_bar_2) << ',' << n(s.bracket_lo) << ',' << n(s.bracket_hi)
          << ',' << n(s.alt_bracket_hi) << ',' << s.tau_bar_1_in_alt << ',' << s.tau_bar_2_in_alt << '\n';
    } else {
      csv << ",,,,,,\n";
    }
    std::cout << name << ": dX/dy=" << s.dX_dy << "  d/dphi: foreign young " << s.d_foreign_young
              << ", foreign old " << s.d_foreign_old << ", domestic young " << s.d_domestic_young
              << ", domestic old " << s.d_domestic_old << "\n";
    if (s.has_thresholds) {
      std::cout << "   tau_bar_1=" << s.tau_bar_1 << " tau_bar_2=" << s.tau_bar_2 << " in ("
                << s.bracket_lo << ", " << s.bracket_hi << "); inside (tau*, 1/sigma^2="
                << s.alt_bracket_hi << "): " << (s.tau_bar_1_in_alt ? "yes" : "no") << "/"
                << (s.tau_bar_2_in_alt ? "yes" : "no") << "\n";
    } else {
      std::cout << "   no thresholds in bracket\n";
    }
  }
  write_text(dir / "thresholds.csv", csv.str());
  return kOk;
}

int cmd_panel(const Options& o) {
  Config cfg;
  load_config(o, cfg);
  const auto dir = output_dir(o, cfg);
  Panel panel;
  check(ebl_panel_synthetic(cfg.get(), panel.out()), "synthetic panel");
  check(ebl_panel_write_csv(panel.get(), (dir / "panel.csv").string().c_str()), "write panel");
  std::cout << "wrote " << ebl_panel_rows(panel.get()) << " rows for " << ebl_panel_country_count(panel.get())
            << " countries to " << (dir / "panel.csv").string() << "\n";
  return kOk;
}

int cmd_regress(const Options& o) {
  Config cfg;
  load_config(o, cfg);
  const auto dir = output_dir(o, cfg);
  Panel panel;
  if (o.data_path.empty()) {
    check(ebl_panel_synthetic(cfg.get(), panel.out()), "synthetic panel");
  } else {
    if (!fs::exists(o.data_path)) throw CliFailure{kData, "data file '" + o.data_path + "' does not exist"};
    check(ebl_panel_read_csv(o.data_path.c_str(), panel.out()), "read " + o.data_path, std::nullopt);
    if (ebl_panel_rejected_rows(panel.get()) > 0) {
      std::cerr << "note: " << ebl_panel_rejected_rows(panel.get()) << " rows rejected during ingest\n";
    }
  }

  struct Model {
    const char* outcome;
    std::vector<const char*> interactions;
  };
  const std::vector<Model> baseline = {{"cif", {}}, {"cod", {}}};
  const std::vector<Model> demographic = {{"cif", {"old_above_median", "young_above_median"}},
                                         {"cod", {"old_above_median", "young_above_median"}},
                                         {"cif", {"old_top_quartile", "young_top_quartile"}},
                                         {"cod", {"old_top_quartile", "young_top_quartile"}}};
  auto run = [&](const std::vector<Model>& specs, const std::string& stem) {
    std::vector<Regression> regs(specs.size());
    std::vector<const ebl_regression*> ptrs;
    for (std::size_t k = 0; k < specs.size(); ++k) {
      check(ebl_regress(panel.get(), specs[k].outcome, specs[k].interactions.data(),
                        specs[k].interactions.size(), regs[k].out()),
            stem + " regression " + std::to_string(k + 1));
      ptrs.push_back(regs[k].get());
    }
    const auto txt = (dir / (stem + ".txt")).string();
    const auto csv = (dir / (stem + ".csv")).string();
    check(ebl_regression_write_tables(ptrs.data(), ptrs.size(), txt.c_str(), csv.c_str()), "write tables");
    std::ifstream in(txt);
    std::cout << stem << " (" << ebl_panel_provenance(panel.get()) << ")\n" << in.rdbuf() << "\n";
  };
  run(baseline, "regressions_baseline");
  run(demographic, "regressions_demographic");
  return kOk;
}

int cmd_homebias(const Options& o) {
  if (o.data_path.empty()) throw CliFailure{kConfig, "homebias needs --data <equity csv>"};
  if (!fs::exists(o.data_path)) throw CliFailure{kData, "data file '" + o.data_path + "' does not exist"};
  Equity eq;
  check(ebl_equity_read_csv(o.data_path.c_str(), eq.out()), "read " + o.data_path);
  std::ostringstream csv;
  csv << "year,home_bias\n";
  for (std::size_t k = 0; k < ebl_equity_years(eq.get()); ++k) {
    int year = 0;
    double hb = 0.0;
    check(ebl_equity_home_bias(eq.get(), k, &year, &hb), "home bias");
    csv << year << ',' << ordered_json(hb).dump() << '\n';
  }
  std::cout << csv.str();
  if (!o.out_dir.empty()) {
    std::error_code ec;
    fs::create_directories(o.out_dir, ec);
    write_text(fs::path(o.out_dir) / "home_bias.csv", csv.str());
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Experience-based learning, home bias and capital flows"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "JSON run configuration")->required();
    sub->add_option("--out", o.out_dir, "output directory (overrides output.dir)");
    sub->add_option("--seed", o.seed, "master seed (overrides the config)");
  };
  auto* simulate = app.add_subcommand("simulate", "simulate one path; write path.csv and summary.json");
  add_common(simulate);
  simulate->add_flag("--svg", o.svg, "also write home_bias.svg");
  auto* verify = app.add_subcommand("verify", "run the model checks");
  add_common(verify);
  auto* thresholds = app.add_subcommand("thresholds", "flow sensitivity, demographic derivatives, thresholds");
  add_common(thresholds);
  auto* panel = app.add_subcommand("panel", "write a synthetic country panel");
  add_common(panel);
  auto* regress = app.add_subcommand("regress", "panel regressions on synthetic or ingested data");
  add_common(regress);
  regress->add_option("--data", o.data_path, "panel CSV (default: synthetic panel from the config)");
  auto* homebias = app.add_subcommand("homebias", "home bias measure from an equity CSV");
  homebias->add_option("--data", o.data_path, "equity CSV")->required();
  homebias->add_option("--out", o.out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    if (*simulate) return cmd_simulate(o);
    if (*verify) return cmd_verify(o);
    if (*thresholds) return cmd_thresholds(o);
    if (*panel) return cmd_panel(o);
    if (*regress) return cmd_regress(o);
    if (*homebias) return cmd_homebias(o);
  } catch (const CliFailure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kOther;
  }
  return kOther;
}

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ebl/econometrics.hpp"

namespace ebl {

// Rows that parse but cannot be used (e.g. a blank required cell) are
// rejected with a reason; schema violations throw.
struct IngestReport {
  std::size_t rows_read = 0;
  std::size_t rows_accepted = 0;
  std::vector<std::string> rejections;
};

// country,year,gdp_growth,cif,cod[,old_above_median,young_above_median,
// old_top_quartile,young_top_quartile] in any order.
PanelDataset read_panel_csv(std::istream& in, IngestReport* report = nullptr);
PanelDataset read_panel_csv(const std::string& path, IngestReport* report = nullptr);
void write_panel_csv(const PanelDataset& data, std::ostream& os);

// year,us_market_cap,global_market_cap,foreign_holdings_of_us_equity,us_foreign_equity_assets
EquitySeries read_equity_csv(std::istream& in, IngestReport* report = nullptr);
EquitySeries read_equity_csv(const std::string& path, IngestReport* report = nullptr);

// country,year,age_bin_start,count
std::vector<PopulationRow> read_population_csv(std::istream& in, IngestReport* report = nullptr);
std::vector<PopulationRow> read_population_csv(const std::string& path,
                                               IngestReport* report = nullptr);

// Splits one CSV record; handles double-quoted fields with "" escapes.
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace ebl

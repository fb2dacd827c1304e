#include "ebl/csv_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <tuple>

#include "ebl/error.hpp"

namespace ebl {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) fail(ErrorCode::data, "unterminated quoted field");
  out.push_back(cur);
  return out;
}

namespace {

std::string trim(std::string s) {
  const auto ws = [](unsigned char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (!s.empty() && ws(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t b = 0;
  while (b < s.size() && ws(static_cast<unsigned char>(s[b]))) ++b;
  return s.substr(b);
}

// A header-indexed view of one CSV source.
class Table {
 public:
  Table(std::istream& in, const std::vector<std::string>& required,
        const std::vector<std::string>& optional) {
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
      ++line_no_;
      if (line_no_ == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
      if (trim(line).empty()) continue;
      have_header = true;
      break;
    }
    if (!have_header) fail(ErrorCode::empty_input, "input is empty (no header row)");
    auto cells = split_csv_line(line);
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const auto name = trim(cells[i]);
      const bool known = std::find(required.begin(), required.end(), name) != required.end() ||
                         std::find(optional.begin(), optional.end(), name) != optional.end();
      if (!known) fail(ErrorCode::unknown_column, "unknown column '" + name + "'");
      if (!columns_.emplace(name, i).second) {
        fail(ErrorCode::unknown_column, "column '" + name + "' appears twice");
      }
    }
    for (const auto& name : required) {
      if (!columns_.count(name)) fail(ErrorCode::missing_value, "missing required column '" + name + "'");
    }
    width_ = cells.size();
    in_ = &in;
  }

  bool next() {
    std::string line;
    while (std::getline(*in_, line)) {
      ++line_no_;
      if (trim(line).empty()) continue;
      cells_ = split_csv_line(line);
      if (cells_.size() != width_) {
        fail(ErrorCode::data, "line " + std::to_string(line_no_) + ": expected " +
                                  std::to_string(width_) + " fields, got " +
                                  std::to_string(cells_.size()));
      }
      for (auto& c : cells_) c = trim(c);
      return true;
    }
    return false;
  }

  bool has(const std::string& col) const { return columns_.count(col) > 0; }
  std::size_t line() const { return line_no_; }

  const std::string& text(const std::string& col) const { return cells_[columns_.at(col)]; }

  std::optional<double> number(const std::string& col) const {
    if (!has(col)) return std::nullopt;
    const auto& s = text(col);
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
      fail(ErrorCode::bad_number, "line " + std::to_string(line_no_) + ", column '" + col +
                                      "': cannot parse '" + s + "' as a number");
    }
    return v;
  }

  std::optional<int> integer(const std::string& col) const {
    const auto& s = text(col);
    if (s.empty()) return std::nullopt;
    int v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      fail(ErrorCode::bad_number, "line " + std::to_string(line_no_) + ", column '" + col +
                                      "': cannot parse '" + s + "' as an integer");
    }
    return v;
  }

  std::string where() const { return "line " + std::to_string(line_no_); }

 private:
  std::istream* in_ = nullptr;
  std::map<std::string, std::size_t> columns_;
  std::vector<std::string> cells_;
  std::size_t width_ = 0;
  std::size_t line_no_ = 0;
};

std::ifstream open(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorCode::io, "cannot open '" + path + "'");
  return f;
}

std::vector<std::string> indicator_columns() {
  return {kIndicatorNames.begin(), kIndicatorNames.end()};
}

}  // namespace

PanelDataset read_panel_csv(std::istream& in, IngestReport* report) {
  Table table(in, {"country", "year", "gdp_growth", "cif", "cod"}, indicator_columns());
  IngestReport rep;
  PanelDataset out;
  std::set<std::pair<std::string, int>> keys;
  std::map<std::string, std::array<std::optional<bool>, 4>> flags;
  while (table.next()) {
    ++rep.rows_read;
    PanelRow r;
    r.country = table.text("country");
    if (r.country.empty()) {
      rep.rejections.push_back(table.where() + ": blank country");
      continue;
    }
    const auto year = table.integer("year");
    if (!year) {
      rep.rejections.push_back(table.where() + ": blank year");
      continue;
    }
    r.year = *year;
    if (!keys.emplace(r.country, r.year).second) {
      fail(ErrorCode::duplicate_key, table.where() + ": duplicate key (" + r.country + ", " +
                                         std::to_string(r.year) + ")");
    }
    r.gdp_growth = table.number("gdp_growth");
    r.cif = table.number("cif");
    r.cod = table.number("cod");
    for (std::size_t k = 0; k < kIndicatorNames.size(); ++k) {
      const auto v = table.number(kIndicatorNames[k]);
      if (!v) continue;
      if (*v != 0.0 && *v != 1.0) {
        fail(ErrorCode::data, table.where() + ": indicator '" + kIndicatorNames[k] + "' must be 0 or 1");
      }
      auto& slot = flags[r.country][k];
      if (slot && *slot != (*v == 1.0)) {
        fail(ErrorCode::data, table.where() + ": indicator '" + kIndicatorNames[k] +
                                  "' varies across years for country " + r.country);
      }
      slot = *v == 1.0;
    }
    if (!r.gdp_growth) {
      rep.rejections.push_back(table.where() + ": missing gdp_growth");
      continue;
    }
    if (!r.cif && !r.cod) {
      rep.rejections.push_back(table.where() + ": both cif and cod missing");
      continue;
    }
    out.rows.push_back(r);
    ++rep.rows_accepted;
  }
  if (rep.rows_read == 0) fail(ErrorCode::empty_input, "input has a header but no data rows");
  std::stable_sort(out.rows.begin(), out.rows.end(), [](const PanelRow& a, const PanelRow& b) {
    return a.country != b.country ? a.country < b.country : a.year < b.year;
  });
  for (const auto& [country, f] : flags) {
    CountryIndicators ci;
    bool* dst[4] = {&ci.old_above_median, &ci.young_above_median, &ci.old_top_quartile,
                    &ci.young_top_quartile};
    bool any = false;
    for (std::size_t k = 0; k < 4; ++k) {
      if (f[k]) {
        *dst[k] = *f[k];
        any = true;
      }
    }
    if (any) out.indicators[country] = ci;
  }
  out.provenance = "ingested";
  if (report) *report = rep;
  return out;
}

PanelDataset read_panel_csv(const std::string& path, IngestReport* report) {
  auto f = open(path);
  auto d = read_panel_csv(f, report);
  d.provenance = "ingested(" + path + ")";
  return d;
}

void write_panel_csv(const PanelDataset& data, std::ostream& os) {
  os << "country,year,gdp_growth,cif,cod";
  for (const char* name : kIndicatorNames) os << ',' << name;
  os << '\n';
  auto num = [&](const std::optional<double>& v) {
    os << ',';
    if (!v) return;
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, *v);
    os.write(buf, res.ptr - buf);
  };
  for (const auto& r : data.rows) {
    os << r.country << ',' << r.year;
    num(r.gdp_growth);
    num(r.cif);
    num(r.cod);
    auto it = data.indicators.find(r.country);
    for (const char* name : kIndicatorNames) {
      os << ',';
      if (it != data.indicators.end()) os << (it->second.get(name) ? 1 : 0);
    }
    os << '\n';
  }
}

EquitySeries read_equity_csv(std::istream& in, IngestReport* report) {
  const std::vector<std::string> cols = {"year", "us_market_cap", "global_market_cap",
                                         "foreign_holdings_of_us_equity",
                                         "us_foreign_equity_assets"};
  Table table(in, cols, {});
  IngestReport rep;
  EquitySeries out;
  std::set<int> years;
  while (table.next()) {
    ++rep.rows_read;
    const auto year = table.integer("year");
    if (!year) {
      rep.rejections.push_back(table.where() + ": blank year");
      continue;
    }
    if (!years.insert(*year).second) {
      fail(ErrorCode::duplicate_key, table.where() + ": duplicate key (" + std::to_string(*year) + ")");
    }
    EquityRow r;
    r.year = *year;
    double* dst[4] = {&r.us_market_cap, &r.global_market_cap, &r.foreign_holdings_of_us_equity,
                      &r.us_foreign_equity_assets};
    bool complete = true;
    for (std::size_t k = 0; k < 4; ++k) {
      const auto v = table.number(cols[k + 1]);
      if (!v) {
        rep.rejections.push_back(table.where() + ": missing " + cols[k + 1]);
        complete = false;
        break;
      }
      *dst[k] = *v;
    }
    if (!complete) continue;
    if (r.global_market_cap < r.us_market_cap) {
      fail(ErrorCode::data, table.where() + ": global market cap below US market cap");
    }
    out.rows.push_back(r);
    ++rep.rows_accepted;
  }
  if (rep.rows_read == 0) fail(ErrorCode::empty_input, "input has a header but no data rows");
  std::sort(out.rows.begin(), out.rows.end(),
            [](const EquityRow& a, const EquityRow& b) { return a.year < b.year; });
  if (report) *report = rep;
  return out;
}

EquitySeries read_equity_csv(const std::string& path, IngestReport* report) {
  auto f = open(path);
  return read_equity_csv(f, report);
}

std::vector<PopulationRow> read_population_csv(std::istream& in, IngestReport* report) {
  Table table(in, {"country", "year", "age_bin_start", "count"}, {});
  IngestReport rep;
  std::vector<PopulationRow> out;
  std::set<std::tuple<std::string, int, int>> keys;
  while (table.next()) {
    ++rep.rows_read;
    PopulationRow r;
    r.country = table.text("country");
    const auto year = table.integer("year");
    const auto bin = table.integer("age_bin_start");
    const auto count = table.number("count");
    if (r.country.empty() || !year || !bin || !count) {
      rep.rejections.push_back(table.where() + ": blank field");
      continue;
    }
    r.year = *year;
    r.age_bin_start = *bin;
    r.count = *count;
    if (r.count < 0.0) fail(ErrorCode::data, table.where() + ": negative population count");
    if (!keys.emplace(r.country, r.year, r.age_bin_start).second) {
      fail(ErrorCode::duplicate_key, table.where() + ": duplicate key (" + r.country + ", " +
                                         std::to_string(r.year) + ", " +
                                         std::to_string(r.age_bin_start) + ")");
    }
    out.push_back(r);
    ++rep.rows_accepted;
  }
  if (rep.rows_read == 0) fail(ErrorCode::empty_input, "input has a header but no data rows");
  if (report) *report = rep;
  return out;
}

std::vector<PopulationRow> read_population_csv(const std::string& path, IngestReport* report) {
  auto f = open(path);
  return read_population_csv(f, report);
}

}  // namespace ebl

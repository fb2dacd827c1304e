#include <sstream>
#include <string>

#include "doctest.h"
#include "ebl/config.hpp"
#include "ebl/csv_io.hpp"
#include "ebl/error.hpp"

using namespace ebl;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::io;
}

std::string message_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

PanelDataset panel_from(const std::string& text, IngestReport* rep = nullptr) {
  std::istringstream in(text);
  return read_panel_csv(in, rep);
}

const char* kMinimal = R"({"model": {"theta": 10, "sigma_sq": 1, "tau": 2, "tau_star": 0.5,
                                     "gamma": 2, "gross_rate": 1.05}})";

}  // namespace

TEST_CASE("panel CSV round trip") {
  const std::string text =
      "year,country,cif,cod,gdp_growth,old_above_median\n"
      "2001,B,0.5,,0.02,1\n"
      "2000,A,1.5,-0.25,0.01,0\n"
      "\n"
      "2000,B,0.25,0.75,-0.03,1\n";
  IngestReport rep;
  const auto d = panel_from(text, &rep);
  CHECK(rep.rows_read == 3);
  CHECK(rep.rows_accepted == 3);
  REQUIRE(d.rows.size() == 3);
  CHECK(d.rows[0].country == "A");
  CHECK(d.rows[1].year == 2000);
  CHECK(d.rows[2].year == 2001);
  CHECK_FALSE(d.rows[2].cod.has_value());
  CHECK(d.indicators.at("B").old_above_median);
  CHECK_FALSE(d.indicators.at("A").old_above_median);

  std::ostringstream out;
  write_panel_csv(d, out);
  const auto back = panel_from(out.str());
  REQUIRE(back.rows.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back.rows[i].country == d.rows[i].country);
    CHECK(back.rows[i].cif == d.rows[i].cif);
    CHECK(back.rows[i].cod == d.rows[i].cod);
    CHECK(back.rows[i].gdp_growth == d.rows[i].gdp_growth);
  }
}

TEST_CASE("panel CSV rejects rows it cannot use") {
  IngestReport rep;
  const auto d = panel_from("country,year,gdp_growth,cif,cod\nA,2000,,1,2\nA,2001,0.1,,\nA,2002,0.1,1,\n", &rep);
  CHECK(rep.rows_read == 3);
  CHECK(rep.rows_accepted == 1);
  CHECK(rep.rejections.size() == 2);
  CHECK(rep.rejections[0].find("gdp_growth") != std::string::npos);
  CHECK(d.rows.size() == 1);
}

TEST_CASE("panel CSV schema errors") {
  CHECK(code_of([] { panel_from(""); }) == ErrorCode::empty_input);
  CHECK(code_of([] { panel_from("country,year,gdp_growth,cif,cod\n"); }) == ErrorCode::empty_input);
  CHECK(code_of([] { panel_from("country,year,gdp_growth,cif,cod,extra\nA,1,1,1,1,1\n"); }) ==
        ErrorCode::unknown_column);
  CHECK(code_of([] { panel_from("country,year,gdp_growth,cif,cif\nA,1,1,1,1\n"); }) == ErrorCode::unknown_column);
  CHECK(code_of([] { panel_from("country,year,gdp_growth,cif\nA,1,1,1\n"); }) == ErrorCode::missing_value);
  CHECK(code_of([] { panel_from("country,year,gdp_growth,cif,cod\nA,1,1,1,1\nA,1,2,2,2\n"); }) ==
        ErrorCode::duplicate_key);
  CHECK(code_of([] { panel_from("country,year,gdp_growth,cif,cod\nA,1,1,1\n"); }) == ErrorCode::data);
  CHECK(code_of([] {
          panel_from("country,year,gdp_growth,cif,cod,old_top_quartile\nA,1,1,1,1,1\nA,2,1,1,1,0\n");
        }) == ErrorCode::data);

  const auto msg = message_of([] { panel_from("country,year,gdp_growth,cif,cod\nA,1,1,1,1\nA,2,1,1e,1\n"); });
  CHECK(msg.find("line 3") != std::string::npos);
  CHECK(msg.find("cif") != std::string::npos);
  CHECK(code_of([] { panel_from("country,year,gdp_growth,cif,cod\nA,1,1,1,1,000\n"); }) == ErrorCode::data);
  CHECK(code_of([] { panel_from("country,year,gdp_growth,cif,cod\nA,x,1,1,1\n"); }) == ErrorCode::bad_number);
  CHECK(code_of([] { panel_from("country,year,gdp_growth,cif,cod\nA,1,\"1,5\",1,1\n"); }) == ErrorCode::bad_number);
  CHECK(code_of([] { read_panel_csv(std::string("/nonexistent/panel.csv")); }) == ErrorCode::io);
}

TEST_CASE("quoted CSV fields") {
  CHECK(split_csv_line("a,\"b,c\",\"say \"\"hi\"\"\",") == std::vector<std::string>{"a", "b,c", "say \"hi\"", ""});
  CHECK_THROWS_AS(split_csv_line("a,\"b"), Error);
}

TEST_CASE("equity and population CSVs") {
  std::istringstream eq(
      "year,us_market_cap,global_market_cap,foreign_holdings_of_us_equity,us_foreign_equity_assets\n"
      "2011,40,100,6,6\n2010,50,125,8,8\n");
  const auto s = read_equity_csv(eq);
  REQUIRE(s.rows.size() == 2);
  CHECK(s.rows[0].year == 2010);
  CHECK(home_bias_measure(s, 2010) == doctest::Approx(0.44));

  std::istringstream dup("year,us_market_cap,global_market_cap,foreign_holdings_of_us_equity,us_foreign_equity_assets\n"
                         "2010,1,2,0,0\n2010,1,2,0,0\n");
  CHECK(code_of([&] { read_equity_csv(dup); }) == ErrorCode::duplicate_key);

  std::istringstream pop("country,year,age_bin_start,count\nA,2000,25,10\nA,2000,30,\n");
  IngestReport rep;
  const auto rows = read_population_csv(pop, &rep);
  CHECK(rows.size() == 1);
  CHECK(rep.rejections.size() == 1);
  std::istringstream neg("country,year,age_bin_start,count\nA,2000,25,-1\n");
  CHECK(code_of([&] { read_population_csv(neg); }) == ErrorCode::data);
}

TEST_CASE("configuration parsing") {
  const auto c = parse_config(kMinimal);
  CHECK(c.model.tau() == 2.0);
  CHECK(c.model.tau_star() == 0.5);
  CHECK(c.model.common_prior_mean == 10.0);
  CHECK(c.panel_countries().size() == 8);

  const auto again = parse_config(config_to_json(c));
  CHECK(config_to_json(again) == config_to_json(c));

  auto seeded = c;
  seeded.set_seed(77);
  CHECK(seeded.seed == 77);
  CHECK(seeded.verify.seed == 77);
  CHECK(seeded.panel.seed == 77);
}

TEST_CASE("configuration errors name the field") {
  auto msg = message_of([] { parse_config(R"({"model": {"theta": 10, "sigma_sq": 1, "tau_star": 0.5, "gamma": 2, "gross_rate": 1.05}})"); });
  CHECK(msg.find("model.tau") != std::string::npos);
  msg = message_of([] { parse_config(R"({"model": {"theta": 10, "sigma_sq": "x", "tau": 2, "tau_star": 0.5, "gamma": 2, "gross_rate": 1.05}})"); });
  CHECK(msg.find("model.sigma_sq") != std::string::npos);
  msg = message_of([] { parse_config(R"({"model": {"theta": 10, "sigma_sq": 1, "tau": 2, "tau_star": 0.5, "gamma": 2, "gross_rate": 1.05, "colour": 1}})"); });
  CHECK(msg.find("model.colour") != std::string::npos);
  CHECK(code_of([] { parse_config("{not json"); }) == ErrorCode::parameter);
  CHECK(code_of([] { parse_config(R"({"model": {"theta": 10, "sigma_sq": 1, "tau": 2, "tau_star": 0.5, "gamma": 2, "gross_rate": 0.9}})"); }) ==
        ErrorCode::parameter);
}

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "doctest.h"
#include "ebl/econometrics.hpp"
#include "ebl/error.hpp"

using namespace ebl;

namespace {

Eigen::VectorXd dense_hp(const std::vector<double>& y, double lambda) {
  const auto n = static_cast<Eigen::Index>(y.size());
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n - 2, n);
  for (Eigen::Index i = 0; i + 2 < n; ++i) {
    D(i, i) = 1.0;
    D(i, i + 1) = -2.0;
    D(i, i + 2) = 1.0;
  }
  const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n) + lambda * D.transpose() * D;
  return A.partialPivLu().solve(Eigen::Map<const Eigen::VectorXd>(y.data(), n));
}

PanelDataset random_panel(std::uint64_t seed, int G, int T, bool ragged = false) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  PanelDataset d;
  for (int g = 0; g < G; ++g) {
    const std::string name = "C" + std::to_string(g);
    const double fe = N(rng), trend = 0.05 * N(rng), common = N(rng);
    const bool old = g % 2 == 0, young = g % 3 == 0;
    d.indicators[name] = {old, young, g == 0, g == 1};
    for (int t = 0; t < T; ++t) {
      PanelRow r;
      r.country = name;
      r.year = 1990 + t + (ragged ? g : 0);
      const double x = N(rng);
      r.gdp_growth = x;
      r.cif = fe + trend * t + 0.8 * x + (old ? 0.5 * x : 0.0) + 0.3 * common * N(rng) + 0.5 * N(rng);
      r.cod = fe - trend * t + 1.5 * x + 0.5 * N(rng);
      if (ragged && t == 3) r.cod.reset();
      d.rows.push_back(r);
    }
  }
  return d;
}

struct Dense {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  std::vector<int> group;
};

// Design matrix built independently of the library's column bookkeeping.
Dense design(const PanelDataset& d, bool cif, const std::vector<std::string>& inter) {
  std::vector<std::string> names;
  for (const auto& r : d.rows)
    if (std::find(names.begin(), names.end(), r.country) == names.end()) names.push_back(r.country);
  int first = 1 << 30;
  std::vector<const PanelRow*> rows;
  for (const auto& r : d.rows) {
    const auto& out = cif ? r.cif : r.cod;
    if (r.gdp_growth && out) rows.push_back(&r), first = std::min(first, r.year);
  }
  const int G = static_cast<int>(names.size()), S = 1 + static_cast<int>(inter.size());
  Dense m;
  m.X = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), S + 2 * G);
  m.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = *rows[i];
    const int g = static_cast<int>(std::find(names.begin(), names.end(), r.country) - names.begin());
    const auto ii = static_cast<Eigen::Index>(i);
    m.y(ii) = cif ? *r.cif : *r.cod;
    m.X(ii, 0) = *r.gdp_growth;
    for (std::size_t k = 0; k < inter.size(); ++k)
      m.X(ii, 1 + static_cast<Eigen::Index>(k)) = d.indicators.at(r.country).get(inter[k]) ? *r.gdp_growth : 0.0;
    m.X(ii, S + g) = 1.0;
    m.X(ii, S + G + g) = r.year - first;
    m.group.push_back(g);
  }
  return m;
}

}  // namespace

TEST_CASE("HP trend equals the dense penalized least-squares solve") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> N(0.0, 1.0);
  for (int n : {4, 5, 9, 40, 120}) {
    std::vector<double> y(static_cast<std::size_t>(n));
    double level = 100.0;
    for (double& v : y) v = (level += 1.0 + N(rng));
    for (double lambda : {0.0, 6.25, 100.0, 1600.0}) {
      const auto trend = hp_filter(y, lambda);
      const auto ref = dense_hp(y, lambda);
      for (int i = 0; i < n; ++i) CHECK(std::abs(trend[static_cast<std::size_t>(i)] - ref(i)) < 1e-10 * std::max(1.0, std::abs(ref(i))));
    }
  }
}

TEST_CASE("HP first-order conditions and invariants") {
  const std::vector<double> y{3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0};
  const double lambda = 6.25;
  const auto tr = hp_filter(y, lambda);
  const std::size_t n = y.size();
  std::vector<double> dd(n - 2);
  for (std::size_t k = 0; k + 2 < n; ++k) dd[k] = tr[k] - 2 * tr[k + 1] + tr[k + 2];
  for (std::size_t i = 0; i < n; ++i) {
    double pen = 0.0;
    for (std::size_t k = 0; k + 2 < n; ++k) {
      if (i == k || i == k + 2) pen += dd[k];
      if (i == k + 1) pen -= 2 * dd[k];
    }
    CHECK(std::abs(tr[i] - y[i] + lambda * pen) < 1e-12);
  }
  double sum_y = 0, sum_t = 0;
  for (std::size_t i = 0; i < n; ++i) sum_y += y[i], sum_t += tr[i];
  CHECK(sum_t == doctest::Approx(sum_y).epsilon(1e-13));

  std::vector<double> line(30);
  for (std::size_t i = 0; i < line.size(); ++i) line[i] = 2.0 + 0.5 * static_cast<double>(i);
  const auto lt = hp_filter(line, 1600.0);
  for (std::size_t i = 0; i < line.size(); ++i) CHECK(lt[i] == doctest::Approx(line[i]).epsilon(1e-11));

  CHECK_THROWS_AS(hp_filter(std::vector<double>{1, 2, 3}), Error);
  CHECK_THROWS_AS(hp_filter(y, -1.0), Error);
}

TEST_CASE("standardization") {
  const std::vector<double> v{2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0};
  const auto z = standardize(v);
  double m = 0, ss = 0;
  for (double x : z) m += x;
  m /= z.size();
  for (double x : z) ss += (x - m) * (x - m);
  CHECK(std::abs(m) < 1e-15);
  CHECK(ss / (z.size() - 1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(z[0] == doctest::Approx((2.0 - 5.0) / std::sqrt(32.0 / 7.0)));
  const auto zz = standardize(z);
  for (std::size_t i = 0; i < z.size(); ++i) CHECK(zz[i] == doctest::Approx(z[i]).epsilon(1e-14));
  CHECK_THROWS_AS(standardize(std::vector<double>{1.0, 1.0, 1.0}), Error);
}

TEST_CASE("panel OLS matches normal equations and a hand sandwich") {
  for (bool ragged : {false, true}) {
    const auto data = random_panel(41 + ragged, 7, 25, ragged);
    for (bool cif : {true, false}) {
      const std::vector<std::string> inter = cif ? std::vector<std::string>{"old_above_median", "young_above_median"}
                                                 : std::vector<std::string>{};
      const auto res = panel_ols(data, cif ? Outcome::cif : Outcome::cod, inter);
      const auto m = design(data, cif, inter);
      const Eigen::MatrixXd XtX = m.X.transpose() * m.X;
      const Eigen::VectorXd b = XtX.llt().solve(m.X.transpose() * m.y);
      const Eigen::VectorXd u = m.y - m.X * b;
      const Eigen::MatrixXd Ainv = XtX.inverse();
      const auto K = m.X.cols(), N = m.X.rows();
      const int G = 7;
      Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(K, K);
      for (int g = 0; g < G; ++g) {
        Eigen::VectorXd s = Eigen::VectorXd::Zero(K);
        for (Eigen::Index i = 0; i < N; ++i)
          if (m.group[static_cast<std::size_t>(i)] == g) s += m.X.row(i).transpose() * u(i);
        meat += s * s.transpose();
      }
      const double c = G / (G - 1.0) * (N - 1.0) / double(N - K);
      const Eigen::MatrixXd V = c * Ainv * meat * Ainv;

      REQUIRE(res.coefficients.size() == static_cast<std::size_t>(K));
      CHECK(res.n_obs == N);
      CHECK(res.n_clusters == G);
      for (Eigen::Index j = 0; j < K; ++j) {
        const auto jj = static_cast<std::size_t>(j);
        CHECK(std::abs(res.coefficients[jj] - b(j)) < 1e-10);
        CHECK(std::abs(res.clustered_se[jj] - std::sqrt(V(j, j))) < 1e-10);
      }
      const double sst = (m.y.array() - m.y.mean()).square().sum();
      CHECK(res.r_squared == doctest::Approx(1.0 - u.squaredNorm() / sst).epsilon(1e-12));
    }
  }
}

TEST_CASE("slope equals the partialled-out regression") {
  const auto data = random_panel(43, 6, 30);
  const auto res = panel_ols(data, Outcome::cod);
  const auto m = design(data, false, {});
  const Eigen::MatrixXd Z = m.X.rightCols(m.X.cols() - 1);
  const Eigen::VectorXd x = m.X.col(0);
  auto resid = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return v - Z * (Z.transpose() * Z).ldlt().solve(Z.transpose() * v);
  };
  const Eigen::VectorXd rx = resid(x), ry = resid(m.y);
  CHECK(res.coefficient("gdp_growth") == doctest::Approx(rx.dot(ry) / rx.dot(rx)).epsilon(1e-10));
  CHECK(res.coefficient("gdp_growth") == doctest::Approx(1.5).epsilon(0.1));
}

TEST_CASE("two clusters: sandwich by hand and Cauchy p-values") {
  PanelDataset d;
  const double xs[2][4] = {{0.5, -1.0, 2.0, 0.1}, {1.5, 0.3, -0.7, 0.9}};
  const double ys[2][4] = {{1.0, -0.2, 3.1, 0.4}, {2.0, 1.1, -0.5, 1.6}};
  for (int g = 0; g < 2; ++g)
    for (int t = 0; t < 4; ++t) d.rows.push_back({g ? "B" : "A", 2000 + t, xs[g][t], ys[g][t], ys[g][t]});
  const auto res = panel_ols(d, Outcome::cif);

  // Within each country: y = a + c t + b x. Partial out (1, t) per country.
  double sxx = 0, sxy = 0;
  double rx[2][4], ry[2][4];
  for (int g = 0; g < 2; ++g) {
    auto detrend = [&](const double* v, double* out) {
      const double tb = 1.5, vb = (v[0] + v[1] + v[2] + v[3]) / 4;
      double st = 0, stt = 0;
      for (int t = 0; t < 4; ++t) st += (t - tb) * (v[t] - vb), stt += (t - tb) * (t - tb);
      for (int t = 0; t < 4; ++t) out[t] = v[t] - vb - st / stt * (t - tb);
    };
    detrend(xs[g], rx[g]);
    detrend(ys[g], ry[g]);
    for (int t = 0; t < 4; ++t) sxx += rx[g][t] * rx[g][t], sxy += rx[g][t] * ry[g][t];
  }
  const double b = sxy / sxx;
  double meat = 0;
  for (int g = 0; g < 2; ++g) {
    double s = 0;
    for (int t = 0; t < 4; ++t) s += rx[g][t] * (ry[g][t] - b * rx[g][t]);
    meat += s * s;
  }
  const double cr1 = 2.0 / 1.0 * 7.0 / 3.0;
  const double se = std::sqrt(cr1 * meat) / sxx;
  CHECK(res.coefficient("gdp_growth") == doctest::Approx(b).epsilon(1e-12));
  CHECK(res.se("gdp_growth") == doctest::Approx(se).epsilon(1e-10));
  const double t = b / se;
  CHECK(res.t("gdp_growth") == doctest::Approx(t).epsilon(1e-10));
  const double p = 1.0 - 2.0 / std::numbers::pi * std::atan(std::abs(t));
  CHECK(res.p_values[0] == doctest::Approx(p).epsilon(1e-10));
}

TEST_CASE("regression errors") {
  auto data = random_panel(44, 4, 12);
  CHECK_THROWS_AS(panel_ols(data, Outcome::cif, {"bogus"}), Error);
  for (auto& [name, ind] : data.indicators) ind.old_top_quartile = true;
  try {
    panel_ols(data, Outcome::cif, {"old_top_quartile"});
    FAIL("collinear design accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::singular_design);
    CHECK(std::string(e.what()).find("gdp_growth") != std::string::npos);
  }
  PanelDataset one;
  for (int t = 0; t < 10; ++t) one.rows.push_back({"A", 2000 + t, 0.1 * t, 1.0 * t * t, 2.0});
  CHECK_THROWS_AS(panel_ols(one, Outcome::cif), Error);
  data.indicators.erase("C1");
  CHECK_THROWS_AS(panel_ols(data, Outcome::cif, {"old_above_median"}), Error);
}

TEST_CASE("significance stars") {
  CHECK(stars(0.009) == "***");
  CHECK(stars(0.01) == "**");
  CHECK(stars(0.049) == "**");
  CHECK(stars(0.05) == "*");
  CHECK(stars(0.0999) == "*");
  CHECK(stars(0.10) == "");
}

TEST_CASE("regression tables") {
  const auto data = random_panel(45, 5, 20);
  const std::vector<RegressionResult> rs{panel_ols(data, Outcome::cif), panel_ols(data, Outcome::cod, {"old_above_median"})};
  std::ostringstream txt, csv;
  write_regression_table_text(rs, txt);
  write_regression_table_csv(rs, csv);
  CHECK(txt.str().find("gdp_growth:old_above_median") != std::string::npos);
  CHECK(txt.str().find("Observations") != std::string::npos);
  std::istringstream in(csv.str());
  std::string line;
  int lines = 0;
  std::getline(in, line);
  CHECK(line == "model,outcome,term,coefficient,clustered_se,t_stat,p_value,stars,n_obs,n_clusters,r_squared");
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 3);
}

TEST_CASE("rank flags use type-7 quantiles with ties counted above") {
  const std::vector<double> v{1, 2, 3, 4};
  const auto f = rank_flags(v);
  CHECK(f.above_median == std::vector<bool>{false, false, true, true});
  CHECK(f.top_quartile == std::vector<bool>{false, false, false, true});
  const std::vector<double> ties{5, 5, 5, 1, 9};
  const auto t = rank_flags(ties);
  CHECK(t.above_median == std::vector<bool>{true, true, true, false, true});
  CHECK(t.top_quartile == std::vector<bool>{true, true, true, false, true});
  const std::vector<double> odd{10, 20, 30, 40, 50};
  CHECK(rank_flags(odd).top_quartile == std::vector<bool>{false, false, false, true, true});
}

TEST_CASE("population indicators") {
  std::vector<PopulationRow> rows;
  const double young_scale[4] = {1.0, 2.0, 3.0, 4.0};
  const double old_scale[4] = {4.0, 1.0, 3.0, 2.0};
  const char* names[4] = {"AA", "BB", "CC", "DD"};
  for (int c = 0; c < 4; ++c)
    for (int year : {2000, 2001, 2002})
      for (int bin = 0; bin <= 80; bin += 5) {
        double count = 1.0;
        if (bin >= 25 && bin <= 45) count = young_scale[c];
        if (bin >= 50 && bin <= 70) count = old_scale[c];
        if (year == 2002) count *= 100.0;
        rows.push_back({names[c], year, bin, count});
      }
  const auto ind = population_indicators(rows, 2000, 2001);
  CHECK(ind.at("AA").old_top_quartile);
  CHECK(ind.at("AA").old_above_median);
  CHECK_FALSE(ind.at("BB").old_above_median);
  CHECK(ind.at("DD").young_top_quartile);
  CHECK(ind.at("CC").young_above_median);
  CHECK_FALSE(ind.at("AA").young_above_median);
  CHECK(ind.at("CC").get("old_above_median"));
  CHECK_THROWS_AS(ind.at("CC").get("middle"), Error);

  rows.erase(std::remove_if(rows.begin(), rows.end(),
                            [](const PopulationRow& r) { return r.country == "BB" && r.year == 2001 && r.age_bin_start == 55; }),
             rows.end());
  try {
    population_indicators(rows, 2000, 2001);
    FAIL("missing bin accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::missing_value);
    const std::string msg = e.what();
    CHECK(msg.find("BB") != std::string::npos);
    CHECK(msg.find("2001") != std::string::npos);
    CHECK(msg.find("55") != std::string::npos);
  }
}

TEST_CASE("equity home bias") {
  const EquityRow r{2010, 50.0, 125.0, 8.0, 8.0};
  CHECK(home_bias_measure(r) == doctest::Approx(0.44).epsilon(1e-14));
  EquitySeries s{{r, {2011, 40.0, 100.0, 6.0, 6.0}}};
  CHECK(home_bias_measure(s, 2011) == doctest::Approx(34.0 / 40.0 - 0.4));
  CHECK_THROWS_AS(home_bias_measure(s, 2012), Error);
  try {
    home_bias_measure(EquityRow{1999, 10.0, 0.0, 1.0, 1.0});
    FAIL("zero market cap accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::data);
    CHECK(std::string(e.what()).find("1999") != std::string::npos);
  }
}

TEST_CASE("flow construction") {
  std::vector<RawFlowRow> raw;
  for (int t = 0; t < 8; ++t) {
    RawFlowRow r;
    r.country = "X";
    r.year = 2000 + t;
    r.gdp = 100.0 * std::pow(1.03, t);
    r.liabilities = {1.0 + t, 2.0, 0.5 * t};
    r.assets = {1.0, 1.0 * t, 0.0, t % 2 ? 1.0 : -1.0};
    raw.push_back(r);
  }
  raw[5].assets[3].reset();
  for (int t : {0, 1, 3, 4}) {
    raw.push_back(raw[static_cast<std::size_t>(t)]);
    raw.back().country = "Y";
    raw.back().gdp = 50.0 + t;
  }

  FlowBuildReport rep;
  const auto d = build_flows(raw, &rep);
  CHECK(rep.cod_dropped == 1);
  CHECK(rep.cif_dropped == 0);
  CHECK(d.countries() == std::vector<std::string>{"X", "Y"});

  std::vector<double> gdp(8);
  for (int t = 0; t < 8; ++t) gdp[static_cast<std::size_t>(t)] = 100.0 * std::pow(1.03, t);
  const auto trend = dense_hp(gdp, 6.25);
  std::vector<double> cif(8);
  for (int t = 0; t < 8; ++t) cif[static_cast<std::size_t>(t)] = (3.0 + 1.5 * t) / trend(t);
  const auto z = standardize(cif);
  int seen = 0;
  for (const auto& r : d.rows) {
    if (r.country != "X") continue;
    const int t = r.year - 2000;
    CHECK(*r.cif == doctest::Approx(z[static_cast<std::size_t>(t)]).epsilon(1e-10));
    CHECK(r.cod.has_value() == (t != 5));
    if (t == 0) CHECK_FALSE(r.gdp_growth.has_value());
    else CHECK(*r.gdp_growth == doctest::Approx(0.03).epsilon(1e-12));
    ++seen;
  }
  CHECK(seen == 8);
  for (const auto& r : d.rows)
    if (r.country == "Y" && r.year == 2003) CHECK_FALSE(r.gdp_growth.has_value());

  raw[1].gdp.reset();
  CHECK_THROWS_AS(build_flows(raw), Error);
  CHECK_THROWS_AS(build_flows({}), Error);
}

TEST_CASE("synthetic panel shape") {
  const auto base = ModelParams::make(10.0, 1.0, 2.0, 0.5, 10.0, 2.0, 1.05);
  const auto countries = default_synthetic_countries(base);
  REQUIRE(countries.size() == 8);
  SyntheticPanelOptions o;
  o.periods = 30;
  o.seed = 5;
  const auto d = build_synthetic_panel(countries, o);
  CHECK(d.rows.size() == 240);
  CHECK(d.countries().size() == 8);
  int old_flags = 0;
  for (const auto& [name, ind] : d.indicators) old_flags += ind.old_above_median;
  CHECK(old_flags == 4);
  const auto again = build_synthetic_panel(countries, o);
  for (std::size_t i = 0; i < d.rows.size(); ++i) CHECK(*d.rows[i].cod == *again.rows[i].cod);
  for (const auto& r : d.rows) CHECK(r.gdp_growth.has_value());
}

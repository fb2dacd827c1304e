#include "ebl/config.hpp"

#include <cmath>
#include <set>

#include <json.hpp>

#include "ebl/error.hpp"

namespace ebl {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& what) {
  fail(ErrorCode::parameter, "config: " + field + ": " + what);
}

class Section {
 public:
  Section(const json& j, std::string path, std::set<std::string> allowed)
      : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) bad(path_.empty() ? "(root)" : path_, "must be an object");
    for (const auto& [key, value] : j_.items()) {
      if (!allowed.count(key)) bad(field(key), "unknown field");
    }
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) const { return j_.contains(key); }
  const json& raw(const std::string& key) const { return j_.at(key); }

  double number(const std::string& key) const {
    if (!has(key)) bad(field(key), "missing required field");
    const auto& v = j_.at(key);
    if (!v.is_number()) bad(field(key), "must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) bad(field(key), "must be finite");
    return d;
  }
  double number(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
  }

  std::int64_t integer(const std::string& key, std::int64_t fallback) const {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number_integer()) bad(field(key), "must be an integer");
    return v.get<std::int64_t>();
  }

  std::uint64_t seed(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number_unsigned()) bad(field(key), "must be a nonnegative integer");
    return v.get<std::uint64_t>();
  }

  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_boolean()) bad(field(key), "must be true or false");
    return v.get<bool>();
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_string()) bad(field(key), "must be a string");
    return v.get<std::string>();
  }

 private:
  const json& j_;
  std::string path_;
};

void read_masses(const Section& s, const std::string& key, Demographics& d, Country c) {
  if (!s.has(key)) return;
  Section m(s.raw(key), s.field(key), {"young", "old"});
  d.mass(c, Age::young) = m.number("young", d.mass(c, Age::young));
  d.mass(c, Age::old) = m.number("old", d.mass(c, Age::old));
}

ModelParams read_model(const Section& s) {
  const double theta = s.number("theta");
  ModelParams p;
  p.theta_home = theta;
  p.theta_foreign = s.number("theta_foreign", theta);
  p.sigma_sq = s.number("sigma_sq");
  const double tau = s.number("tau");
  const double tau_star = s.number("tau_star");
  const double m = s.number("prior_mean", theta);
  p.prior_home = PriorSpec{m, m, tau, tau_star};
  p.prior_foreign = p.prior_home;
  p.common_prior_mean = m;
  p.gamma = s.number("gamma");
  p.gross_rate = s.number("gross_rate");
  if (s.has("demographics")) {
    Section d(s.raw("demographics"), s.field("demographics"), {"home", "foreign"});
    read_masses(d, "home", p.demographics, Country::home);
    read_masses(d, "foreign", p.demographics, Country::foreign);
  }
  try {
    p.validate();
  } catch (const Error& e) {
    bad("model", e.what());
  }
  return p;
}

ShockedCountry shocked_country(const std::string& field, const std::string& v) {
  if (v == "H") return ShockedCountry::home;
  if (v == "F") return ShockedCountry::foreign;
  if (v == "both") return ShockedCountry::both;
  bad(field, "must be \"H\", \"F\" or \"both\"");
}

const char* shocked_label(ShockedCountry c) {
  switch (c) {
    case ShockedCountry::home: return "H";
    case ShockedCountry::foreign: return "F";
    case ShockedCountry::both: return "both";
  }
  return "H";
}

CodDefinition cod_definition(const std::string& field, const std::string& v) {
  if (v == "net_reallocation") return CodDefinition::net_reallocation;
  if (v == "foreign_holdings") return CodDefinition::foreign_holdings;
  bad(field, "must be \"net_reallocation\" or \"foreign_holdings\"");
}

}  // namespace

void RunConfig::set_seed(std::uint64_t s) {
  seed = s;
  verify.seed = s;
  panel.seed = s;
}

std::vector<SyntheticCountry> RunConfig::panel_countries() const {
  return panel.countries.empty() ? default_synthetic_countries(model) : panel.countries;
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::parameter, std::string("config: not valid JSON: ") + e.what());
  }
  Section root(j, "", {"model", "simulation", "verification", "shocks", "panel", "output"});
  if (!root.has("model")) bad("model", "missing required field");

  RunConfig c;
  c.model = read_model(Section(root.raw("model"), "model",
                               {"theta", "theta_foreign", "sigma_sq", "tau", "tau_star",
                                "prior_mean", "gamma", "gross_rate", "demographics"}));

  if (root.has("simulation")) {
    Section s(root.raw("simulation"), "simulation",
              {"periods", "seed", "global_factor_share", "mc_periods", "n_paths", "threads"});
    c.periods = s.integer("periods", c.periods);
    if (c.periods < 3) bad(s.field("periods"), "must be at least 3");
    c.seed = s.seed("seed", c.seed);
    c.global_factor_share = s.number("global_factor_share", 0.0);
    if (c.global_factor_share < 0.0 || c.global_factor_share > 1.0) {
      bad(s.field("global_factor_share"), "must lie in [0, 1]");
    }
    c.verify.mc_periods = s.integer("mc_periods", c.verify.mc_periods);
    if (c.verify.mc_periods < 3) bad(s.field("mc_periods"), "must be at least 3");
    c.verify.n_paths = s.integer("n_paths", c.verify.n_paths);
    if (c.verify.n_paths < 2) bad(s.field("n_paths"), "must be at least 2");
    const auto threads = s.integer("threads", 0);
    if (threads < 0) bad(s.field("threads"), "must be nonnegative");
    c.verify.threads = static_cast<unsigned>(threads);
  }
  c.verify.seed = c.seed;
  c.verify.path_periods = c.periods;

  if (root.has("verification")) {
    Section v(root.raw("verification"), "verification",
              {"muc_tol", "clearing_tol", "exact_tol", "fd_rel_tol", "fd_abs_floor", "root_tol",
               "min_t_stat", "shock_size", "shock_baseline"});
    auto& t = c.verify.tol;
    t.muc = v.number("muc_tol", t.muc);
    t.clearing = v.number("clearing_tol", t.clearing);
    t.exact = v.number("exact_tol", t.exact);
    t.fd_relative = v.number("fd_rel_tol", t.fd_relative);
    t.fd_abs_floor = v.number("fd_abs_floor", t.fd_abs_floor);
    t.root = v.number("root_tol", t.root);
    t.min_t_stat = v.number("min_t_stat", t.min_t_stat);
    c.verify.shock_size = v.number("shock_size", c.verify.shock_size);
    if (c.verify.shock_size < 0.0) bad(v.field("shock_size"), "is a magnitude and must be nonnegative");
    c.verify.shock_baseline = v.number("shock_baseline", c.model.theta_home);
  } else {
    c.verify.shock_baseline = c.model.theta_home;
  }

  if (root.has("shocks")) {
    const auto& arr = root.raw("shocks");
    if (!arr.is_array()) bad("shocks", "must be an array");
    for (std::size_t k = 0; k < arr.size(); ++k) {
      const std::string path = "shocks[" + std::to_string(k) + "]";
      Section s(arr[k], path, {"name", "country", "size", "baseline"});
      ScenarioConfig sc;
      sc.scenario.shocked = shocked_country(s.field("country"), s.text("country", "H"));
      sc.scenario.shock_size = s.number("size");
      sc.scenario.baseline = s.number("baseline", c.model.theta_home);
      sc.name = s.text("name", std::string(shocked_label(sc.scenario.shocked)) +
                                   (sc.scenario.shock_size < 0.0 ? "_recession" : "_boom"));
      c.scenarios.push_back(sc);
    }
  }

  c.panel.seed = c.seed;
  if (root.has("panel")) {
    Section p(root.raw("panel"), "panel",
              {"periods", "seed", "global_factor_share", "cod_definition", "countries"});
    c.panel.periods = p.integer("periods", c.panel.periods);
    if (c.panel.periods < 4) bad(p.field("periods"), "must be at least 4");
    if (p.has("seed")) {
      c.panel.seed = p.seed("seed", c.seed);
      c.panel.seed_set = true;
    }
    c.panel.global_factor_share = p.number("global_factor_share", 0.0);
    if (c.panel.global_factor_share < 0.0 || c.panel.global_factor_share > 1.0) {
      bad(p.field("global_factor_share"), "must lie in [0, 1]");
    }
    c.panel.cod = cod_definition(p.field("cod_definition"),
                                 p.text("cod_definition", "net_reallocation"));
    if (p.has("countries")) {
      const auto& arr = p.raw("countries");
      if (!arr.is_array()) bad(p.field("countries"), "must be an array");
      for (std::size_t k = 0; k < arr.size(); ++k) {
        const std::string path = "panel.countries[" + std::to_string(k) + "]";
        Section s(arr[k], path, {"name", "young", "old", "foreign_young", "foreign_old", "tau", "tau_star"});
        SyntheticCountry sc;
        sc.name = s.text("name", "S" + std::to_string(k + 1));
        sc.params = c.model;
        auto& d = sc.params.demographics;
        d.mass(Country::home, Age::young) = s.number("young");
        d.mass(Country::home, Age::old) = s.number("old");
        d.mass(Country::foreign, Age::young) = s.number("foreign_young", d.mass(Country::foreign, Age::young));
        d.mass(Country::foreign, Age::old) = s.number("foreign_old", d.mass(Country::foreign, Age::old));
        const double tau = s.number("tau", c.model.tau());
        const double tau_star = s.number("tau_star", c.model.tau_star());
        sc.params.prior_home.precision_domestic = sc.params.prior_foreign.precision_domestic = tau;
        sc.params.prior_home.precision_foreign = sc.params.prior_foreign.precision_foreign = tau_star;
        try {
          sc.params.validate();
        } catch (const Error& e) {
          bad(path, e.what());
        }
        c.panel.countries.push_back(sc);
      }
      if (c.panel.countries.size() < 4) bad(p.field("countries"), "needs at least 4 countries");
    }
  }

  if (root.has("output")) {
    Section o(root.raw("output"), "output", {"dir", "svg"});
    c.output_dir = o.text("dir", c.output_dir);
    c.svg = o.boolean("svg", c.svg);
  }
  return c;
}

std::string config_to_json(const RunConfig& c) {
  const auto& m = c.model;
  ordered_json j;
  j["model"] = {
      {"theta", m.theta_home},
      {"theta_foreign", m.theta_foreign},
      {"sigma_sq", m.sigma_sq},
      {"tau", m.tau()},
      {"tau_star", m.tau_star()},
      {"prior_mean", m.common_prior_mean},
      {"gamma", m.gamma},
      {"gross_rate", m.gross_rate},
      {"demographics",
       {{"home", {{"young", m.demographics.mass(Country::home, Age::young)},
                  {"old", m.demographics.mass(Country::home, Age::old)}}},
        {"foreign", {{"young", m.demographics.mass(Country::foreign, Age::young)},
                     {"old", m.demographics.mass(Country::foreign, Age::old)}}}}},
  };
  j["simulation"] = {{"periods", c.periods},
                     {"seed", c.seed},
                     {"global_factor_share", c.global_factor_share},
                     {"mc_periods", c.verify.mc_periods},
                     {"n_paths", c.verify.n_paths},
                     {"threads", c.verify.threads}};
  const auto& t = c.verify.tol;
  j["verification"] = {{"muc_tol", t.muc},           {"clearing_tol", t.clearing},
                       {"exact_tol", t.exact},       {"fd_rel_tol", t.fd_relative},
                       {"fd_abs_floor", t.fd_abs_floor}, {"root_tol", t.root},
                       {"min_t_stat", t.min_t_stat}, {"shock_size", c.verify.shock_size},
                       {"shock_baseline", c.verify.shock_baseline}};
  j["shocks"] = ordered_json::array();
  for (const auto& s : c.scenarios) {
    j["shocks"].push_back({{"name", s.name},
                           {"country", shocked_label(s.scenario.shocked)},
                           {"size", s.scenario.shock_size},
                           {"baseline", s.scenario.baseline}});
  }
  ordered_json countries = ordered_json::array();
  for (const auto& sc : c.panel_countries()) {
    const auto& d = sc.params.demographics;
    countries.push_back({{"name", sc.name},
                         {"young", d.mass(Country::home, Age::young)},
                         {"old", d.mass(Country::home, Age::old)},
                         {"foreign_young", d.mass(Country::foreign, Age::young)},
                         {"foreign_old", d.mass(Country::foreign, Age::old)},
                         {"tau", sc.params.tau()},
                         {"tau_star", sc.params.tau_star()}});
  }
  j["panel"] = {{"periods", c.panel.periods},
                {"seed", c.panel.seed},
                {"global_factor_share", c.panel.global_factor_share},
                {"cod_definition", c.panel.cod == CodDefinition::net_reallocation ? "net_reallocation"
                                                                                  : "foreign_holdings"},
                {"countries", countries}};
  j["output"] = {{"dir", c.output_dir}, {"svg", c.svg}};
  return j.dump(2);
}

}  // namespace ebl

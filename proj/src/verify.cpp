#include "ebl/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "ebl/demands.hpp"
#include "ebl/error.hpp"
#include "ebl/simulation.hpp"

namespace ebl {

const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::out_of_regime: return "out_of_regime";
  }
  return "fail";
}

bool VerificationReport::passed() const {
  return std::none_of(checks.begin(), checks.end(),
                      [](const Check& c) { return c.status == CheckStatus::fail; });
}

const Check& VerificationReport::get(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return c;
  }
  fail(ErrorCode::parameter, "no check named '" + name + "'");
}

namespace {

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

CheckStatus judge(bool ok) { return ok ? CheckStatus::pass : CheckStatus::fail; }

// Scaled so that err <= rel_tol  <=>  |a - b| <= max(rel_tol * max(|a|, |b|), abs_floor).
double rel_err(double a, double b, const Tolerances& tol) {
  const double floor = tol.fd_relative > 0.0 ? tol.fd_abs_floor / tol.fd_relative : tol.fd_abs_floor;
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

bool same_demographics(const Demographics& d) {
  return d.mass(Country::home, Age::young) == d.mass(Country::foreign, Age::young) &&
         d.mass(Country::home, Age::old) == d.mass(Country::foreign, Age::old);
}

double home_dX(const ModelParams& p, const PriceLoadings& L, double y) {
  const double ybar = p.theta_home;
  auto y_t = outputs(y, p.theta_foreign);
  auto y_tm1 = outputs(ybar, p.theta_foreign);
  return aggregate_demand(cohort_demands(p, L, y_t, y_tm1), p.demographics)(Country::home,
                                                                              Country::home);
}

}  // namespace

double kernel_from_equilibrium(const ModelParams& params, Country i) {
  const auto loadings = solve_price_loadings(params);
  double slope = 0.0;
  for (Age a : kAges) {
    slope += params.demographics.mass(i, a) * holding_coefficients(params, loadings, i, a, i).on_current;
  }
  const auto& L = loadings[i];
  return params.gamma * (1.0 + L.beta0) * L.sigma_bar * slope;
}

VerificationReport run_verification(const ModelParams& params, const VerifyOptions& o) {
  params.validate();
  VerificationReport rep;
  const auto& tol = o.tol;
  const double tau = params.tau(), tau_star = params.tau_star();
  const bool asym = tau > tau_star;
  const bool reversed = tau < tau_star;
  const auto loadings = solve_price_loadings(params);

  {
    double worst = 0.0;
    for (Country c : kCountries) worst = std::max(worst, muc_residuals(params, loadings, c).max());
    rep.checks.push_back({"muc_residuals", judge(worst <= tol.muc), worst, tol.muc,
                          "max scaled residual of the three coefficient conditions"});
  }
  {
    const auto path = simulate_path(params, o.path_periods, o.seed);
    const double worst = path.max_clearing_residual();
    rep.checks.push_back({"market_clearing", judge(worst <= tol.clearing), worst, tol.clearing,
                          std::to_string(path.periods.size()) + " periods"});
  }
  {
    ModelParams sym = params;
    sym.prior_home.precision_foreign = sym.prior_home.precision_domestic;
    sym.prior_foreign = sym.prior_home;
    sym.demographics = Demographics::baseline();
    const auto path = simulate_path(sym, o.path_periods, o.seed);
    double worst = 0.0;
    for (const auto& s : path.periods) {
      for (Country h : kCountries)
        for (Country a : kCountries) worst = std::max(worst, std::abs(s.aggregate(h, a) - 1.0));
      worst = std::max(worst, std::abs(s.home_bias));
    }
    rep.checks.push_back({"symmetric_world_portfolio", judge(worst <= tol.exact), worst, tol.exact,
                          "max |X - 1| and |HB| with tau* = tau and equal masses"});
  }
  {
    Check c{"home_bias_positive", CheckStatus::fail, 0.0, tol.min_t_stat, ""};
    const bool centered = params.common_prior_mean == params.theta_home &&
                          params.common_prior_mean == params.theta_foreign;
    const auto mc = monte_carlo_home_bias(params, o.mc_periods, o.n_paths, o.seed, o.threads);
    const double t = mc.std_error > 0.0 ? mc.mean / mc.std_error : 0.0;
    c.detail = "mean HB " + num(mc.mean) + ", SE " + num(mc.std_error) + ", " +
               std::to_string(mc.n_paths) + " paths x " + std::to_string(mc.periods_per_path) +
               " periods";
    if (!centered) {
      c.status = CheckStatus::out_of_regime;
      c.measured = mc.mean;
      c.detail += "; priors not centered on the output means";
    } else if (reversed) {
      c.status = CheckStatus::out_of_regime;
      c.measured = mc.mean;
      c.detail += "; tau < tau*: foreign bias expected";
    } else if (!asym) {
      c.measured = std::abs(mc.mean);
      c.threshold = tol.exact;
      c.status = judge(c.measured <= tol.exact);
    } else {
      c.measured = t;
      c.status = judge(mc.mean > 0.0 && t > tol.min_t_stat);
      c.detail += ", analytic " + num(expected_home_bias_centered(params));
    }
    rep.checks.push_back(c);
  }
  {
    const double ybar = std::isnan(o.shock_baseline) ? params.theta_home : o.shock_baseline;
    const auto rec = apply_shock(params, ShockScenario::recession(ShockedCountry::home, ybar, o.shock_size));
    const auto boom = apply_shock(params, ShockScenario::boom(ShockedCountry::home, ybar, o.shock_size));
    const auto both = apply_shock(params, ShockScenario::recession(ShockedCountry::both, ybar, o.shock_size));
    const auto& H = Country::home;
    const auto& F = Country::foreign;
    struct Expected {
      const char* name;
      double measured;
      double largest;
    };
    const Expected specs[] = {
        {"recession_flows", std::min(rec.flows[H].domestic, -rec.flows[H].foreign),
         std::max(std::abs(rec.flows[H].domestic), std::abs(rec.flows[H].foreign))},
        {"boom_flows", std::min(-boom.flows[H].domestic, boom.flows[H].foreign),
         std::max(std::abs(boom.flows[H].domestic), std::abs(boom.flows[H].foreign))},
        {"global_recession_flows", std::min(both.flows[H].domestic, both.flows[F].domestic),
         std::max(std::abs(both.flows[H].domestic), std::abs(both.flows[F].domestic))},
    };
    for (const auto& s : specs) {
      Check c{s.name, CheckStatus::fail, s.measured, 0.0, "min signed flow in the predicted direction"};
      if (reversed) {
        c.status = CheckStatus::out_of_regime;
      } else if (!asym) {
        c.measured = s.largest;
        c.threshold = tol.exact;
        c.status = judge(s.largest <= tol.exact);
        c.detail = "flows vanish when tau = tau*";
      } else {
        c.status = judge(s.measured > 0.0);
      }
      rep.checks.push_back(c);
    }
  }
  {
    const double analytic = flow_sensitivity(params, Country::home);
    const double h = 1e-5;
    const double fd = (home_dX(params, loadings, params.theta_home + h) -
                       home_dX(params, loadings, params.theta_home - h)) / (2.0 * h);
    const double err = rel_err(analytic, fd, tol);
    rep.checks.push_back({"flow_sensitivity_fd", judge(err <= tol.fd_relative), err, tol.fd_relative,
                          "analytic " + num(analytic) + ", finite difference " + num(fd)});
    Check sign{"flow_sensitivity_sign", CheckStatus::fail, analytic, 0.0, "dX^H_H/dy_H"};
    if (reversed || !same_demographics(params.demographics)) {
      sign.status = CheckStatus::out_of_regime;
    } else if (!asym) {
      sign.measured = std::abs(analytic);
      sign.threshold = tol.exact;
      sign.status = judge(sign.measured <= tol.exact);
    } else {
      sign.status = judge(analytic < 0.0);
    }
    rep.checks.push_back(sign);
  }
  if (reversed) {
    for (const char* name : {"demographic_derivatives_fd", "demographic_signs", "threshold_roots",
                             "threshold_sign_flip"}) {
      rep.checks.push_back({name, CheckStatus::out_of_regime, 0.0, 0.0, "requires tau >= tau*"});
    }
    return rep;
  }
  {
    const auto d = demographic_derivatives_only(params, Country::home);
    const double h = 1e-5;
    auto fd = [&](Country c, Age a) {
      ModelParams up = params, dn = params;
      up.demographics.mass(c, a) += h;
      dn.demographics.mass(c, a) -= h;
      return (kernel_from_equilibrium(up, Country::home) - kernel_from_equilibrium(dn, Country::home)) /
             (2.0 * h);
    };
    const double errs[] = {
        rel_err(d.foreign_young, fd(Country::foreign, Age::young), tol),
        rel_err(d.foreign_old, fd(Country::foreign, Age::old), tol),
        rel_err(d.domestic_young, fd(Country::home, Age::young), tol),
        rel_err(d.domestic_old, fd(Country::home, Age::old), tol),
    };
    const double worst = *std::max_element(std::begin(errs), std::end(errs));
    rep.checks.push_back({"demographic_derivatives_fd", judge(worst <= tol.fd_relative), worst,
                          tol.fd_relative, "max relative error over the four phi derivatives"});
    const double top = std::max(d.foreign_young, d.domestic_old);
    rep.checks.push_back({"demographic_signs", judge(asym ? top < 0.0 : top <= 0.0), top, 0.0,
                          "max of the foreign-young and domestic-old derivatives"});
  }
  {
    Check roots{"threshold_roots", CheckStatus::fail, 0.0, tol.root, ""};
    Check flip{"threshold_sign_flip", CheckStatus::fail, 0.0, 0.0, "mismatches on a 100-point scan"};
    try {
      const auto th = find_thresholds(params, Country::home);
      auto at = [&](double t) {
        ModelParams p = params;
        p.prior_home.precision_domestic = t;
        p.prior_foreign.precision_domestic = t;
        return demographic_derivatives_only(p, Country::home);
      };
      const double r1 = std::abs(at(th.tau_bar_1).foreign_old);
      const double r2 = std::abs(at(th.tau_bar_2).domestic_young);
      const bool inside = th.tau_bar_1 > th.bracket_lo && th.tau_bar_1 < th.bracket_hi &&
                          th.tau_bar_2 > th.bracket_lo && th.tau_bar_2 < th.bracket_hi;
      roots.measured = std::max(r1, r2);
      roots.status = judge(inside && roots.measured <= tol.root);
      roots.detail = "tau_bar_1 " + num(th.tau_bar_1) + ", tau_bar_2 " + num(th.tau_bar_2) +
                     " in (" + num(th.bracket_lo) + ", " + num(th.bracket_hi) + "); inside (tau*, 1/sigma^2): " +
                     (th.tau_bar_1_in_alt ? "yes" : "no") + "/" + (th.tau_bar_2_in_alt ? "yes" : "no");
      int mismatches = 0;
      for (int k = 0; k < 100; ++k) {
        const double t = th.bracket_lo + (k + 0.5) / 100.0 * (th.bracket_hi - th.bracket_lo);
        const auto d = at(t);
        if ((d.foreign_old > 0.0) != (t < th.tau_bar_1)) ++mismatches;
        if ((d.domestic_young > 0.0) != (t < th.tau_bar_2)) ++mismatches;
      }
      flip.measured = mismatches;
      flip.status = judge(mismatches == 0);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::no_root) throw;
      roots.detail = e.what();
      flip.detail = e.what();
    }
    rep.checks.push_back(roots);
    rep.checks.push_back(flip);
  }
  return rep;
}

}  // namespace ebl

#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "riddled/error.hpp"
#include "riddled/statistics.hpp"

namespace riddled::cli {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

/// JSON has no NaN; write null instead.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json counts_json(std::size_t plus, std::size_t minus, std::size_t unresolved) {
  return {{"n_plus", plus}, {"n_minus", minus}, {"n_unresolved", unresolved}};
}

/// Row fractions with counts, plus the Spearman trend against y.
json row_table(const GridResult& grid, const std::string& name, OutputSet& out) {
  Csv csv({"y", "fraction_plus", "n_plus", "n_minus", "n_unresolved"});
  std::vector<double> ys, fs;
  for (std::size_t j = 0; j < grid.spec.ny; ++j) {
    std::size_t plus = 0, minus = 0, un = 0;
    for (std::size_t i = 0; i < grid.spec.nx; ++i) {
      switch (grid.at(i, j)) {
        case BasinLabel::CPlus: ++plus; break;
        case BasinLabel::CMinus: ++minus; break;
        case BasinLabel::Unresolved: ++un; break;
      }
    }
    const double f = plus + minus > 0 ? static_cast<double>(plus) / static_cast<double>(plus + minus)
                                      : std::numeric_limits<double>::quiet_NaN();
    csv.cell(grid.spec.y_at(j)).cell(f).cell(plus).cell(minus).cell(un).end_row();
    if (std::isfinite(f)) {
      ys.push_back(grid.spec.y_at(j));
      fs.push_back(f);
    }
  }
  out.add(name, csv.str());
  json trend = {{"rows_used", ys.size()}};
  try {
    const auto r = spearman(ys, fs);
    trend["spearman_rho"] = num(r.rho);
    trend["p_value"] = num(r.p_value);
  } catch (const Error&) {
    trend["spearman_rho"] = nullptr;
    trend["p_value"] = nullptr;
  }
  return trend;
}

json grid_summary(const GridResult& g) {
  std::size_t plus = 0, minus = 0;
  for (auto l : g.labels) {
    plus += s_plus(l);
    minus += s_minus(l);
  }
  return {{"cells", g.labels.size()},
          {"labels", counts_json(plus, minus, g.unresolved)},
          {"unresolved_fraction", static_cast<double>(g.unresolved) / static_cast<double>(g.labels.size())},
          {"step_underflows", g.underflows},
          {"cells_on_repelling_manifold", g.cells_on_repelling_manifold}};
}

}  // namespace

json cmd_duffing(const RunConfig& cfg, unsigned, OutputSet& out) {
  const auto pts = sample_attractor(cfg.system, cfg.duffing.sections, cfg.duffing.burn_in, cfg.seed);
  Csv csv({"x", "vx"});
  double xmin = pts.front().x, xmax = xmin, vmin = pts.front().vx, vmax = vmin;
  for (const auto& p : pts) {
    csv.cell(p.x).cell(p.vx).end_row();
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    vmin = std::min(vmin, p.vx);
    vmax = std::max(vmax, p.vx);
  }
  out.add("duffing_sections.csv", csv.str());
  return {{"sections", pts.size()}, {"x_range", {xmin, xmax}}, {"vx_range", {vmin, vmax}}};
}

json cmd_basin_grid(const RunConfig& cfg, unsigned threads, OutputSet& out) {
  GridSpec spec = cfg.basin_grid.grid;
  spec.criterion = cfg.capture;
  spec.tol_index = cfg.tol_index;
  const auto grid = grid_scan(spec, cfg.system, cfg.step, threads);
  out.add("basin_labels.csv", label_matrix_csv(grid));
  out.add("basin_grid.pgm", pgm_bytes(grid));
  json s = grid_summary(grid);
  s["row_trend"] = row_table(grid, "basin_rows.csv", out);
  return s;
}

json cmd_tol_scan(const RunConfig& cfg, unsigned threads, OutputSet& out) {
  const auto& tc = cfg.tol_scan;
  const auto scan = tol_scan(tc.x_points, tc.y0, tc.n_max, cfg.system, cfg.step, cfg.capture, threads);

  std::vector<std::string> header{"n"};
  for (double x : scan.x) header.push_back("x=" + format_double(x));
  Csv labels(header);
  for (int n = 1; n <= scan.n_max; ++n) {
    labels.cell(n);
    for (std::size_t i = 0; i < scan.x.size(); ++i) labels.cell(to_int(scan.at(n, i)));
    labels.end_row();
  }
  out.add("tol_labels.csv", labels.str());

  const auto m = tol_correlation_matrix(scan);
  const auto nm = static_cast<std::size_t>(scan.n_max);
  std::vector<std::string> mh{"n"};
  for (std::size_t b = 1; b <= nm; ++b) mh.push_back("m=" + std::to_string(b));
  Csv corr(mh);
  double max_off = -std::numeric_limits<double>::infinity();
  bool diag_exact = true;
  for (std::size_t a = 0; a < nm; ++a) {
    corr.cell(a + 1);
    for (std::size_t b = 0; b < nm; ++b) {
      const double c = m[a * nm + b];
      corr.cell(c);
      if (a == b && c != -1.0) diag_exact = false;
      if (a != b && std::isfinite(c)) max_off = std::max(max_off, c);
    }
    corr.end_row();
  }
  out.add("tol_correlation.csv", corr.str());

  std::size_t nonconstant = 0;
  for (std::size_t i = 0; i < scan.x.size(); ++i) {
    bool seen_plus = false, seen_minus = false;
    for (int n = 1; n <= scan.n_max; ++n) {
      seen_plus |= scan.at(n, i) == BasinLabel::CPlus;
      seen_minus |= scan.at(n, i) == BasinLabel::CMinus;
    }
    nonconstant += seen_plus && seen_minus ? 1 : 0;
  }
  return {{"x_points", scan.x.size()},
          {"n_max", scan.n_max},
          {"y0", scan.y0},
          {"unresolved", scan.unresolved()},
          {"diagonal_exactly_minus_one", diag_exact},
          {"max_off_diagonal", num(max_off)},
          {"columns_changing_sign", nonconstant}};
}

json cmd_fraction(const RunConfig& cfg, unsigned threads, OutputSet& out) {
  const auto& fc = cfg.fraction;
  const auto ys = log_spaced(fc.y_min, fc.y_max, fc.n_y);
  const auto ctl = cfg.control();
  FractionCurve curve;
  if (fc.sampling == "line") {
    const auto xs = sample_rho_x_line(cfg.system, fc.samples, fc.burn_in, cfg.seed);
    curve = basin_fraction_curve(ys, xs, cfg.system, ctl, cfg.capture, threads);
  } else {
    const auto pts = sample_attractor(cfg.system, fc.samples, fc.burn_in, cfg.seed);
    curve = basin_fraction_curve(ys, pts, cfg.system, ctl, cfg.capture, threads);
  }
  const auto fit = fit_eta(curve, fc.y_min, fc.y_max);

  Csv csv({"y", "fraction", "n_plus", "n_minus", "n_unresolved", "analytic_fitted_eta", "analytic_eta_0.2"});
  Csv loglog({"log_2y_over_pi", "log_one_minus_fraction"});
  for (std::size_t j = 0; j < curve.y.size(); ++j) {
    const auto& c = curve.counts[j];
    csv.cell(curve.y[j]).cell(curve.fraction[j]).cell(c.n_plus).cell(c.n_minus).cell(c.n_unresolved);
    csv.cell(analytic_L(curve.y[j], fit.eta)).cell(analytic_L(curve.y[j], 0.2)).end_row();
    const double lo = 1.0 - curve.fraction[j];
    loglog.cell(std::log(2.0 * curve.y[j] / kPi)).cell(lo > 0.0 ? std::log(lo) : -std::numeric_limits<double>::infinity());
    loglog.end_row();
  }
  out.add("fraction_curve.csv", csv.str());
  out.add("fraction_loglog.csv", loglog.str());

  json fitj = {{"eta", fit.eta},   {"intercept", fit.intercept}, {"r2", fit.r2},
               {"y_lo", fit.y_lo}, {"y_hi", fit.y_hi},           {"points", fit.points},
               {"sampling", fc.sampling}, {"samples", fc.samples}};
  if (fc.lyapunov.enabled) {
    LyapunovOptions opt;
    opt.burn_in = fc.lyapunov.burn_in;
    const auto ly = transverse_lyapunov_stats(cfg.system, fc.lyapunov.window_periods * cfg.system.period(),
                                              fc.lyapunov.n_windows, cfg.seed, opt);
    fitj["lyapunov"] = {{"window", ly.window},       {"n_windows", ly.n_windows}, {"h_perp_mean", ly.h_perp_mean},
                        {"sigma2", ly.sigma2},       {"d_coeff", ly.d_coeff},     {"eta_pred", num(ly.eta_pred)},
                        {"eta_pred_over_fit", num(ly.eta_pred / fit.eta)}};
  }
  out.add_json("eta_fit.json", fitj);

  std::size_t unresolved = 0;
  for (const auto& c : curve.counts) unresolved += c.n_unresolved;
  json s = {{"eta", fit.eta}, {"r2", fit.r2}, {"unresolved", unresolved}};
  if (fitj.contains("lyapunov")) s["eta_pred"] = fitj["lyapunov"]["eta_pred"];
  return s;
}

json cmd_spin(const RunConfig& cfg, unsigned threads, OutputSet& out) {
  const auto ctx = cfg.spin_context();
  const auto spec = cfg.spin.ensemble.spec();
  const auto ensemble = generate_ensemble(spec, cfg.system, cfg.seed);

  Csv table({"angle", "angle_radians", "analytic", "empirical", "stderr", "z", "n_plus", "n_minus", "n_unresolved"});
  double max_abs_z = 0.0;
  bool within = true;
  for (const auto& a : cfg.spin.angles) {
    const double p = pr_plus_analytic(spec, a.angle);
    const auto e = pr_plus_empirical(ensemble, a.angle, ctx, threads);
    const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(e.counts.resolved()));
    double z = 0.0;
    if (sigma > 0.0) z = (e.fraction - p) / sigma;
    else if (e.fraction != p) z = std::numeric_limits<double>::infinity();
    max_abs_z = std::max(max_abs_z, std::abs(z));
    within = within && std::abs(z) <= 3.0;
    table.cell(a.text).cell(a.angle.radians()).cell(p).cell(e.fraction).cell(e.stderr_).cell(z);
    table.cell(e.counts.n_plus).cell(e.counts.n_minus).cell(e.counts.n_unresolved).end_row();
  }
  out.add("pr_plus.csv", table.str());

  GridSpec gs = cfg.spin.grid;
  gs.criterion = cfg.capture;
  gs.tol_index = cfg.tol_index;
  const auto grid = sp_grid_scan(gs, ctx, threads);
  out.add("sp_grid.csv", label_matrix_csv(grid));
  out.add("sp_grid.pgm", pgm_bytes(grid));
  json s = {{"ensemble_size", ensemble.size()},
            {"max_abs_z", num(max_abs_z)},
            {"all_within_3_sigma", within},
            {"sp_grid", grid_summary(grid)}};
  s["sp_grid"]["row_trend"] = row_table(grid, "sp_rows.csv", out);
  return s;
}

json cmd_bell(const RunConfig& cfg, unsigned threads, OutputSet& out) {
  const auto ctx = cfg.spin_context();
  std::vector<Angle> angles;
  for (const auto& a : cfg.bell.angles) angles.push_back(a.angle);
  const auto rep = correlation_report(cfg.bell.ensemble.spec(), angles, ctx, cfg.seed, threads);

  Csv corr({"angle", "angle_radians", "c_shared", "stderr_shared", "n_shared", "c_distinct", "stderr_distinct",
            "n_distinct", "quantum"});
  for (std::size_t k = 0; k < rep.angles.size(); ++k) {
    corr.cell(cfg.bell.angles[k].text).cell(rep.angles[k]);
    corr.cell(rep.shared[k].c).cell(rep.shared[k].stderr_).cell(rep.shared[k].n_resolved);
    corr.cell(rep.distinct[k].c).cell(rep.distinct[k].stderr_).cell(rep.distinct[k].n_resolved);
    corr.cell(rep.quantum[k]).end_row();
  }
  out.add("correlation.csv", corr.str());

  constexpr double kSlack = 1e-12;
  Csv bell({"phi", "theta", "lhs_shared", "n_triples", "shared_violates", "lhs_distinct", "distinct_violates",
            "lhs_quantum", "quantum_violates"});
  json rows = json::array();
  for (const auto& r : rep.bell) {
    bell.cell(r.phi).cell(r.theta).cell(r.shared.lhs).cell(r.shared.n_triples).cell(r.shared.lhs > 1.0 + kSlack ? 1 : 0);
    bell.cell(r.lhs_distinct).cell(r.lhs_distinct > 1.0 + kSlack ? 1 : 0);
    bell.cell(r.lhs_quantum).cell(r.lhs_quantum > 1.0 + kSlack ? 1 : 0).end_row();
    rows.push_back({{"phi", r.phi},
                    {"theta", r.theta},
                    {"shared", {{"c_phi", r.shared.c_phi},
                                {"c_theta", r.shared.c_theta},
                                {"c_theta_minus_phi", r.shared.c_theta_minus_phi},
                                {"lhs", r.shared.lhs},
                                {"n_triples", r.shared.n_triples}}},
                    {"lhs_distinct", r.lhs_distinct},
                    {"lhs_quantum", r.lhs_quantum}});
  }
  out.add("bell.csv", bell.str());

  json angles_j = json::array(), shared = json::array(), distinct = json::array();
  for (std::size_t k = 0; k < rep.angles.size(); ++k) {
    angles_j.push_back(rep.angles[k]);
    shared.push_back({{"c", rep.shared[k].c}, {"stderr", rep.shared[k].stderr_}, {"n_resolved", rep.shared[k].n_resolved}});
    distinct.push_back(
        {{"c", rep.distinct[k].c}, {"stderr", rep.distinct[k].stderr_}, {"n_resolved", rep.distinct[k].n_resolved}});
  }
  json report = {{"angles", angles_j},
                 {"shared", shared},
                 {"distinct", distinct},
                 {"quantum", rep.quantum},
                 {"bell", rows},
                 {"max_shared_lhs", rep.max_shared_lhs},
                 {"shared_combinations", rep.shared_combinations},
                 {"tol_index", rep.tol_index},
                 {"n_pairs", rep.n_pairs},
                 {"distinct_mode_uses_shared_triples", rep.distinct_mode_uses_shared_triples}};
  out.add_json("correlation_report.json", report);
  return {{"n_pairs", rep.n_pairs},
          {"c_zero_shared", rep.shared.front().c},
          {"max_shared_lhs", rep.max_shared_lhs},
          {"shared_bound_holds", rep.max_shared_lhs <= 1.0 + kSlack}};
}

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"duffing", "basin-grid", "tol-scan", "fraction", "spin", "bell"};
  return names;
}

void run_subcommand(const std::string& name, const RunConfig& cfg, unsigned threads, const std::string& dir) {
  OutputSet out(dir);
  json summary;
  if (name == "duffing") summary = cmd_duffing(cfg, threads, out);
  else if (name == "basin-grid") summary = cmd_basin_grid(cfg, threads, out);
  else if (name == "tol-scan") summary = cmd_tol_scan(cfg, threads, out);
  else if (name == "fraction") summary = cmd_fraction(cfg, threads, out);
  else if (name == "spin") summary = cmd_spin(cfg, threads, out);
  else if (name == "bell") summary = cmd_bell(cfg, threads, out);
  else throw ConfigError("unknown subcommand '" + name + "'");
  out.write({{"tool", "riddled-spin"},
             {"version", kVersion},
             {"subcommand", name},
             {"config", to_json(cfg)},
             {"summary", summary}});
}

int exit_code_for(const std::exception& e) noexcept {
  if (dynamic_cast<const ConfigError*>(&e)) return 2;
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    switch (err->code()) {
      case ErrorCode::InvalidArgument: return 2;
      case ErrorCode::DomainError:
      case ErrorCode::NonFinite:
      case ErrorCode::Unbounded:
      case ErrorCode::StepUnderflow: return 3;
      case ErrorCode::DegenerateSample:
      case ErrorCode::InsufficientData: return 4;
    }
  }
  return 1;
}

}  // namespace riddled::cli

#pragma once

#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include "ucgs/config.hpp"
#include "ucgs/gug.hpp"
#include "ucgs/reference.hpp"
#include "ucgs/trace.hpp"
#include "ucgs/ucgs.hpp"

namespace ucgs::bench {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kSolverAbort = 3,
  kCertifyFailure = 4,
};

/// (nu, M) for the sliding schedule: config overrides win, otherwise the
/// objective's analytic values.
inline std::pair<double, double> resolve_sliding_params(const RunConfig& cfg,
                                                        const Objective& obj) {
  const double nu = cfg.nu.value_or(obj.holder_exponent());
  const double M = cfg.Mnu.value_or(obj.holder_constant());
  if (!(nu > 0.0 && nu < 1.0))
    throw config_error("config: field nu: sliding regime requires nu in (0,1), got " +
                       std::to_string(nu));
  if (!(M > 0.0)) throw config_error("config: field Mnu: must be positive");
  return {nu, M};
}

inline UcgsOptions ucgs_options_from(const RunConfig& cfg) {
  UcgsOptions opts;
  opts.epsilon = cfg.epsilon;
  opts.sigma = cfg.sigma;
  opts.sigma_delta = cfg.sigma_delta;
  opts.sigma_cert = cfg.sigma_cert;
  opts.L0 = cfg.L0;
  opts.timing = cfg.timing;
  opts.inject_eta_scale = cfg.inject_eta_scale;
  return opts;
}

struct RunOutcome {
  RunTrace trace;
  std::string summary;
};

/// Executes the configured method on the configured instance.
inline RunOutcome run_method(const RunConfig& cfg, const GeneratedInstance& inst) {
  RunOutcome out;
  char buf[256];
  if (cfg.method == "cg") {
    GugRunOptions opts;
    opts.N = cfg.N;
    opts.timing = cfg.timing;
    opts.inject_eta_scale = cfg.inject_eta_scale;
    out.trace = gug_run(inst.problem, GugSchedule::cg(), opts);
  } else if (cfg.method == "gug-sliding") {
    auto [nu, M] = resolve_sliding_params(cfg, inst.problem.objective);
    GugRunOptions opts;
    opts.N = cfg.N;
    opts.timing = cfg.timing;
    opts.inject_eta_scale = cfg.inject_eta_scale;
    out.trace = gug_run(inst.problem, GugSchedule::sliding(nu, M), opts);
  } else {
    UcgsResult res = ucgs_run(inst.problem, ucgs_options_from(cfg));
    out.trace = std::move(res.trace);
  }
  const TraceRow& last = out.trace.rows.back();
  std::snprintf(buf, sizeof(buf),
                "%s: k=%lld f_y=%.6g true_gap=%.6g certified_gap=%.6g lmo=%lld grad=%lld",
                cfg.method.c_str(), static_cast<long long>(last.k), last.f_y, last.true_gap,
                last.certified_gap, static_cast<long long>(last.lmo_calls_cum),
                static_cast<long long>(last.grad_evals_cum));
  out.summary = buf;
  return out;
}

/// `run` subcommand: execute, write the CSV trace, print a one-line summary.
inline int cmd_run(const RunConfig& cfg, std::ostream& os, std::string* csv_out = nullptr) {
  try {
    validate_config(cfg);
    const GeneratedInstance inst = build_instance(cfg);
    RunOutcome out = run_method(cfg, inst);
    const std::string csv = out.trace.to_csv();
    if (csv_out) *csv_out = csv;
    if (!cfg.out.empty()) {
      std::ofstream file(cfg.out, std::ios::binary);
      if (!file) {
        os << "error: cannot open output file '" << cfg.out << "'\n";
        return kConfigError;
      }
      file << csv;
    }
    os << out.summary << "\n";
    return kOk;
  } catch (const config_error& e) {
    os << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const contract_error& e) {
    os << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const solver_abort& e) {
    os << "solver abort: " << e.what() << "\n";
    return kSolverAbort;
  }
}

// ---------------------------------------------------------------------------
// compare

struct CompareCell {
  std::string method;
  double eps = 0.0;
  std::int64_t lmo = 0;   // LMO calls spent when the true gap first reached eps
  bool censored = false;  // budget exhausted before reaching eps
};

struct CompareFit {
  std::string method;
  bool fitted = false;
  double slope = 0.0;  // log(lmo) per log(1/eps)
};

struct CompareReport {
  std::vector<CompareCell> cells;
  std::vector<CompareFit> fits;
  bool have_separation = false;
  double slope_cg = 0.0;
  double slope_ucgs = 0.0;
  bool ucgs_slope_smaller = false;
  std::string text;
};

namespace detail {

/// Watches trace rows and records the LMO count at the first crossing of each
/// eps threshold (thresholds sorted descending).
struct CrossingRecorder {
  std::vector<double> eps;        // descending
  std::vector<std::int64_t> lmo;  // -1 until crossed
  std::int64_t budget;
  size_t next = 0;

  explicit CrossingRecorder(std::vector<double> thresholds, std::int64_t budget_)
      : eps(std::move(thresholds)), lmo(eps.size(), -1), budget(budget_) {
    std::sort(eps.begin(), eps.end(), std::greater<double>());
  }

  // Returns true when the run should stop.
  bool observe(const TraceRow& row) {
    while (next < eps.size() && !std::isnan(row.true_gap) && row.true_gap <= eps[next]) {
      lmo[next] = row.lmo_calls_cum;
      ++next;
    }
    return next >= eps.size() || row.lmo_calls_cum >= budget;
  }
};

}  // namespace detail

/// Runs one method across the eps grid, recording the LMO cost of the first
/// true-gap crossing per eps. Each method contributes one trajectory: CG and
/// sliding schedules do not depend on eps, and UCGS is run once with the
/// deepest grid value as its certified target, looser crossings read en route.
inline std::vector<CompareCell> compare_method(const RunConfig& cfg,
                                               const ProblemInstance& problem,
                                               const std::string& method) {
  std::vector<CompareCell> cells;
  std::vector<double> grid = cfg.compare_eps;
  std::sort(grid.begin(), grid.end(), std::greater<double>());
  detail::CrossingRecorder rec(grid, cfg.compare_budget);

  if (method == "cg" || method == "gug-sliding") {
    GugRunOptions opts;
    opts.N = cfg.compare_budget;  // >= one LMO per outer step, so never binding
    opts.keep_trace = false;
    opts.stop = [&rec](const TraceRow& row) { return rec.observe(row); };
    const GugSchedule schedule =
        method == "cg" ? GugSchedule::cg()
                       : [&] {
                           auto [nu, M] = resolve_sliding_params(cfg, problem.objective);
                           return GugSchedule::sliding(nu, M);
                         }();
    gug_run(problem, schedule, opts);
  } else {
    UcgsOptions opts = ucgs_options_from(cfg);
    opts.epsilon = grid.back();
    opts.keep_trace = false;
    opts.stop = [&rec](const TraceRow& row) { return rec.observe(row); };
    ucgs_run(problem, opts);
  }
  for (size_t i = 0; i < rec.eps.size(); ++i) {
    cells.push_back(
        {method, rec.eps[i], rec.lmo[i] < 0 ? cfg.compare_budget : rec.lmo[i], rec.lmo[i] < 0});
  }
  return cells;
}

/// `compare` subcommand: per method x eps, the LMO count to reach the target
/// true gap, plus fitted log-log slopes of LMO versus 1/eps. Instances without
/// a known optimal value (shift > 0) are first calibrated with one certified
/// UCGS run: its model lower bound stands in for f*, conservatively for every
/// method alike.
inline CompareReport compare_run(const RunConfig& cfg) {
  validate_config(cfg);
  const GeneratedInstance inst = build_instance(cfg);

  CompareReport report;
  std::string reference_note;
  ProblemInstance measured = inst.problem;
  if (!measured.fstar) {
    double min_eps = cfg.compare_eps[0];
    for (double e : cfg.compare_eps) min_eps = std::min(min_eps, e);
    UcgsOptions ref = ucgs_options_from(cfg);
    ref.epsilon = 0.05 * min_eps;
    ref.sigma = 0.0;
    ref.sigma_delta.reset();
    ref.sigma_cert.reset();
    ref.keep_trace = false;
    const UcgsResult res = ucgs_run(inst.problem, ref);
    const double fy = inst.problem.objective.value(res.y);
    measured.fstar = fy - res.certified_gap;  // certified lower bound on f*
    char line[160];
    std::snprintf(line, sizeof(line), "reference,fstar_lb=%.17g,eps_ref=%.3g,lmo=%lld\n",
                  *measured.fstar, ref.epsilon, static_cast<long long>(res.counters.lmo_calls));
    reference_note = line;
  }
  std::vector<std::vector<CompareCell>> results(cfg.compare_methods.size());
  std::vector<std::exception_ptr> errors(cfg.compare_methods.size());

  std::atomic<size_t> cursor{0};
  auto worker = [&] {
    while (true) {
      const size_t i = cursor.fetch_add(1);
      if (i >= cfg.compare_methods.size()) return;
      try {
        results[i] = compare_method(cfg, measured, cfg.compare_methods[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(cfg.compare_methods.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(jobs));
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& err : errors)
    if (err) std::rethrow_exception(err);

  std::ostringstream text;
  text << reference_note;
  text << "method,eps,lmo_calls,censored\n";
  for (size_t i = 0; i < results.size(); ++i) {
    for (const CompareCell& cell : results[i]) {
      report.cells.push_back(cell);
      char line[128];
      std::snprintf(line, sizeof(line), "%s,%.17g,%lld,%d\n", cell.method.c_str(), cell.eps,
                    static_cast<long long>(cell.lmo), cell.censored ? 1 : 0);
      text << line;
    }
  }

  for (const std::string& method : cfg.compare_methods) {
    std::vector<double> xs, ys;
    for (const CompareCell& cell : report.cells) {
      if (cell.method == method && !cell.censored) {
        xs.push_back(1.0 / cell.eps);
        ys.push_back(static_cast<double>(cell.lmo));
      }
    }
    CompareFit fit{method, false, 0.0};
    if (xs.size() >= 2) {
      fit.fitted = true;
      fit.slope = fit_rate(xs, ys, 1.0);
      char line[128];
      std::snprintf(line, sizeof(line), "fit,%s,slope=%.6g,points=%zu\n", method.c_str(),
                    fit.slope, xs.size());
      text << line;
    } else {
      text << "fit," << method << ",insufficient points (need >= 2 uncensored)\n";
    }
    report.fits.push_back(fit);
  }

  // Nominal slope targets from the exponent-scaled oracle counts, when the
  // objective is genuinely weakly smooth.
  const double nu = inst.problem.objective.holder_exponent();
  if (nu < 1.0 && cfg.compare_eps.size() >= 2) {
    const double M = inst.problem.objective.holder_constant();
    const double D = inst.problem.set.diameter();
    const auto [g1, l1] = sliding_nominal_counts(nu, M, D, cfg.compare_eps[0]);
    const auto [g2, l2] = sliding_nominal_counts(nu, M, D, cfg.compare_eps[1]);
    const double dlog = std::log(cfg.compare_eps[0] / cfg.compare_eps[1]);
    char line[160];
    std::snprintf(line, sizeof(line),
                  "targets,cg_lmo_slope=%.6g,sliding_grad_slope=%.6g,sliding_lmo_slope=%.6g\n",
                  1.0 / nu, std::log(g2 / g1) / dlog, std::log(l2 / l1) / dlog);
    text << line;
  }

  const CompareFit* cg_fit = nullptr;
  const CompareFit* ucgs_fit = nullptr;
  for (const CompareFit& f : report.fits) {
    if (f.method == "cg" && f.fitted) cg_fit = &f;
    if (f.method == "ucgs" && f.fitted) ucgs_fit = &f;
  }
  if (cg_fit && ucgs_fit) {
    report.have_separation = true;
    report.slope_cg = cg_fit->slope;
    report.slope_ucgs = ucgs_fit->slope;
    report.ucgs_slope_smaller = ucgs_fit->slope < cg_fit->slope;
    text << "separation,ucgs_slope_smaller=" << (report.ucgs_slope_smaller ? 1 : 0)
         << ",slope_cg=" << cg_fit->slope << ",slope_ucgs=" << ucgs_fit->slope << "\n";
  }
  report.text = text.str();
  return report;
}

inline int cmd_compare(const RunConfig& cfg, std::ostream& os, CompareReport* report_out = nullptr) {
  try {
    CompareReport report = compare_run(cfg);
    if (!cfg.out.empty()) {
      std::ofstream file(cfg.out, std::ios::binary);
      if (!file) {
        os << "error: cannot open output file '" << cfg.out << "'\n";
        return kConfigError;
      }
      file << report.text;
    }
    os << report.text;
    if (report_out) *report_out = std::move(report);
    return kOk;
  } catch (const config_error& e) {
    os << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const contract_error& e) {
    os << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const solver_abort& e) {
    os << "solver abort: " << e.what() << "\n";
    return kSolverAbort;
  }
}

// ---------------------------------------------------------------------------
// certify

struct CertifyCheck {
  std::string name;
  bool pass = false;
  double margin = 0.0;
  std::string detail;
};

struct CertifyReport {
  std::vector<CertifyCheck> checks;
  bool all_pass = true;
  std::string text;
};

namespace detail {

inline void add_check(CertifyReport& report, const std::string& name, bool pass, double margin,
                      const std::string& detail = "") {
  report.checks.push_back({name, pass, margin, detail});
  report.all_pass = report.all_pass && pass;
}

}  // namespace detail

/// `certify` subcommand: exercises the runnable invariants of every module on
/// the configured instance and reports per-invariant verdicts with observed
/// margins. With inject.eta_scale < 1 the run is expected to trip the inner
/// non-termination guard; the abort is reported and mapped to the solver-abort
/// exit code.
inline CertifyReport certify_run(const RunConfig& cfg) {
  validate_config(cfg);
  const GeneratedInstance inst = build_instance(cfg);
  const ProblemInstance& problem = inst.problem;
  const FeasibleSet& set = problem.set;
  const Objective& f = problem.objective;
  CertifyReport report;
  std::mt19937_64 rng(cfg.seed ^ 0x5eedULL);

  {  // LMO exactness against feasible samples
    double worst = -std::numeric_limits<double>::infinity();
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
      Vector c(set.dim());
      for (int i = 0; i < set.dim(); ++i) c[i] = gauss(rng);
      const Vector v = set.lmo(c);
      for (int j = 0; j < 20; ++j) {
        worst = std::max(worst, c.dot(v) - c.dot(set.sample(rng)));
      }
    }
    detail::add_check(report, "lmo-exactness", worst <= 1e-12, worst,
                      "max <c,lmo(c)> - <c,x> over samples");
  }

  {  // approximate LMO budget and feasibility
    double worst = -std::numeric_limits<double>::infinity();
    bool feasible = true;
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
      Vector c(set.dim());
      for (int i = 0; i < set.dim(); ++i) c[i] = gauss(rng);
      const double delta = trial % 4 == 0 ? 0.0 : 0.05 * (trial % 7);
      const Vector v = approx_lmo(set, c, delta);
      feasible = feasible && set.contains(v, 1e-9);
      const double sub = c.dot(v) - c.dot(set.lmo(c));
      worst = std::max(worst, sub - delta);
    }
    detail::add_check(report, "approx-lmo-budget", feasible && worst <= 1e-12, worst,
                      "max measured suboptimality minus budget");
  }

  {  // Wolfe gap nonnegativity
    double worst = std::numeric_limits<double>::infinity();
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
      Vector g(set.dim());
      for (int i = 0; i < set.dim(); ++i) g[i] = gauss(rng);
      worst = std::min(worst, wolfe_gap(set, g, set.sample(rng)).first);
    }
    detail::add_check(report, "wolfe-gap-nonnegative", worst >= -1e-12, worst, "min observed gap");
  }

  {  // diameter dominates sampled distances
    double worst = -std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 500; ++trial) {
      worst = std::max(worst, (set.sample(rng) - set.sample(rng)).norm() - set.diameter());
    }
    detail::add_check(report, "diameter-dominates", worst <= 1e-12, worst,
                      "max sampled distance minus diameter");
  }

  {  // convexity midpoint inequality
    double worst = -std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 2000; ++trial) {
      const Vector a = set.sample(rng);
      const Vector b = set.sample(rng);
      worst = std::max(worst, f.value(0.5 * (a + b)) - 0.5 * (f.value(a) + f.value(b)));
    }
    detail::add_check(report, "objective-convexity", worst <= 1e-10, worst,
                      "max midpoint violation");
  }

  {  // Holder condition with the stored analytic constants
    double worst = std::numeric_limits<double>::infinity();
    const double nu = f.holder_exponent(), M = f.holder_constant();
    for (int trial = 0; trial < 2000; ++trial) {
      const Vector a = set.sample(rng);
      const Vector b = set.sample(rng);
      const double dist = (a - b).norm();
      if (dist == 0.0) continue;
      worst = std::min(worst, M * std::pow(dist, nu) - (f.grad(a) - f.grad(b)).norm());
    }
    detail::add_check(report, "objective-holder", worst >= -1e-9, worst,
                      "min slack of M||x-y||^nu over ||grad diff||");
  }

  {  // analytic gradient vs central finite differences
    const double h = 1e-6;
    const double tol = f.kind() == Objective::Kind::quadratic ? 1e-6 : 1e-4;
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      const Vector x = set.sample(rng);
      if (f.kind() == Objective::Kind::pnorm_residual &&
          (f.A() * x - f.b()).cwiseAbs().minCoeff() < 1e-3)
        continue;  // finite differences degrade near a kinkless-but-steep residual zero
      const Vector g = f.grad(x);
      Vector fd(set.dim());
      for (int i = 0; i < set.dim(); ++i) {
        Vector e = Vector::Zero(set.dim());
        e[i] = h;
        fd[i] = (f.value(x + e) - f.value(x - e)) / (2.0 * h);
      }
      worst = std::max(worst, (g - fd).norm() / std::max(1e-12, g.norm()));
    }
    detail::add_check(report, "gradient-finite-diff", worst <= tol, worst,
                      "max relative error vs central differences");
  }

  {  // telescoping bound equals direct recursion on equality-case fixtures
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
      const int K = 2 + static_cast<int>(unif(rng) * 8);
      std::vector<double> gammas(K), bs(K);
      gammas[0] = 1.0;
      for (int i = 1; i < K; ++i) gammas[i] = unif(rng);
      for (int i = 0; i < K; ++i) bs[i] = 2.0 * unif(rng) - 1.0;
      double a = 0.0;
      for (int i = 0; i < K; ++i) a = (1.0 - gammas[i]) * a + gammas[i] * bs[i];
      const double bound = telescoping_bound(0.0, bs, gammas);
      worst = std::max(worst, std::abs(a - bound) / std::max(1.0, std::abs(a)));
    }
    detail::add_check(report, "telescoping-identity", worst <= 1e-12, worst,
                      "max relative mismatch vs direct recursion");
  }

  // Method run checks; a corrupted eta injection is expected to abort inside.
  if (cfg.method == "ucgs") {
    UcgsOptions opts = ucgs_options_from(cfg);
    opts.max_outer = std::min<std::int64_t>(opts.max_outer, 20000);
    const double nu = f.holder_exponent(), M = f.holder_constant();
    const double d2 = set.diameter() * set.diameter();

    // Fixed sample set; f values precomputed once, model values re-checked per step.
    const int n_samples = 200;
    std::vector<Vector> samples;
    std::vector<double> fvals;
    for (int i = 0; i < n_samples; ++i) {
      samples.push_back(set.sample(rng));
      fvals.push_back(f.value(samples.back()));
    }

    double gamma_worst = 0.0, model_worst = -std::numeric_limits<double>::infinity();
    double ceiling_worst = -std::numeric_limits<double>::infinity();
    double product_worst = -std::numeric_limits<double>::infinity();
    double feas_worst = 0.0;
    bool inner_cap_ok = true;
    double Gamma_prev = 0.0;
    UcgsStepObserver step_obs = [&](const UcgsStepView& view) {
      const double rel = std::abs(view.Gamma - view.L * view.gamma * view.gamma / view.k) /
                         std::max(1e-300, view.Gamma);
      gamma_worst = std::max(gamma_worst, rel);
      if (view.k >= 2) {
        const double rel2 =
            std::abs(view.Gamma - (1.0 - view.gamma) * Gamma_prev) / std::max(1e-300, view.Gamma);
        gamma_worst = std::max(gamma_worst, rel2);
      }
      Gamma_prev = view.Gamma;
      for (int i = 0; i < n_samples; ++i)
        model_worst = std::max(model_worst, view.model.value(samples[i]) - fvals[i]);
      ceiling_worst = std::max(
          ceiling_worst, view.L - linesearch_L_ceiling(nu, M, cfg.epsilon, view.gamma));
      product_worst =
          std::max(product_worst,
                   view.L * view.gamma * view.gamma - step_product_bound(nu, M, cfg.epsilon, view.k));
      feas_worst = std::max({feas_worst, set.contains(view.z, 1e-10) ? 0.0 : 1.0,
                             set.contains(view.x, 1e-10) ? 0.0 : 1.0,
                             set.contains(view.y, 1e-10) ? 0.0 : 1.0});
      (void)d2;
    };
    UcgsTrialObserver trial_obs = [&](const UcgsTrialView& view) {
      const std::int64_t cap =
          1 + static_cast<std::int64_t>(std::ceil((7.0 * opts.delta_sigma() + 6.0) *
                                                  static_cast<double>(view.k)));
      inner_cap_ok = inner_cap_ok && view.inner.iterations <= cap;
    };

    UcgsResult res = ucgs_run(problem, opts, step_obs, trial_obs);

    detail::add_check(report, "gamma-bookkeeping", gamma_worst <= 1e-12, gamma_worst,
                      "max relative error of the two Gamma identities");
    detail::add_check(report, "lower-model-sound", model_worst <= 1e-9, model_worst,
                      "max l(x) - f(x) over fixed samples, all steps");
    detail::add_check(report, "linesearch-L-ceiling", ceiling_worst <= 1e-9 * std::max(1.0, M),
                      ceiling_worst, "max accepted L minus analytic ceiling");
    detail::add_check(report, "step-product-bound", product_worst <= 1e-9, product_worst,
                      "max L*gamma^2 minus analytic bound");
    detail::add_check(report, "iterates-feasible", feas_worst == 0.0, feas_worst,
                      "membership of z, x, y at 1e-10");
    detail::add_check(report, "inner-iteration-cap", inner_cap_ok, inner_cap_ok ? 0.0 : 1.0,
                      "iterations <= 1+ceil((7*sigma+6)k) on every invocation");

    double cert_worst = std::numeric_limits<double>::infinity();
    bool monotone = true;
    for (size_t i = 0; i < res.trace.rows.size(); ++i) {
      const TraceRow& row = res.trace.rows[i];
      cert_worst = std::min(cert_worst, row.certified_gap - row.true_gap);
      if (i > 0) {
        const TraceRow& prev = res.trace.rows[i - 1];
        monotone = monotone && row.lmo_calls_cum >= prev.lmo_calls_cum &&
                   row.grad_evals_cum >= prev.grad_evals_cum &&
                   row.grad_evals_with_retries_cum >= prev.grad_evals_with_retries_cum;
      }
    }
    detail::add_check(report, "certified-dominates-true", cert_worst >= -1e-9, cert_worst,
                      "min certified_gap - true_gap over all rows");
    detail::add_check(report, "counters-nondecreasing", monotone, monotone ? 0.0 : 1.0);
    detail::add_check(report, "certified-termination",
                      res.certified_gap <= cfg.epsilon, res.certified_gap - cfg.epsilon,
                      "final certified gap minus epsilon");
  } else {
    GugRunOptions opts;
    opts.N = std::min<std::int64_t>(cfg.N, 500);
    opts.inject_eta_scale = cfg.inject_eta_scale;
    const GugSchedule schedule =
        cfg.method == "cg" ? GugSchedule::cg() : [&] {
          auto [nu, M] = resolve_sliding_params(cfg, f);
          return GugSchedule::sliding(nu, M);
        }();

    double ident_worst = 0.0, feas_worst = 0.0;
    bool inner_cap_ok = true;
    GugObserver obs = [&](const GugStepView& view) {
      // y_k - z_k = gamma_k (x_k - x_{k-1})
      ident_worst = std::max(
          ident_worst,
          ((view.y - view.z) - view.gamma * (view.x - view.x_prev)).lpNorm<Eigen::Infinity>());
      feas_worst = std::max({feas_worst, set.contains(view.z, 1e-10) ? 0.0 : 1.0,
                             set.contains(view.x, 1e-10) ? 0.0 : 1.0,
                             set.contains(view.y, 1e-10) ? 0.0 : 1.0});
      if (view.inner) inner_cap_ok = inner_cap_ok && view.inner->iterations <= view.k + 1;
    };
    RunTrace trace = gug_run(problem, schedule, opts, obs);

    detail::add_check(report, "iterate-identity", ident_worst <= 1e-12, ident_worst,
                      "max |(y-z) - gamma (x - x_prev)|_inf");
    detail::add_check(report, "iterates-feasible", feas_worst == 0.0, feas_worst,
                      "membership of z, x, y at 1e-10");
    bool monotone = true;
    for (size_t i = 1; i < trace.rows.size(); ++i) {
      monotone = monotone && trace.rows[i].lmo_calls_cum >= trace.rows[i - 1].lmo_calls_cum &&
                 trace.rows[i].grad_evals_cum >= trace.rows[i - 1].grad_evals_cum;
    }
    detail::add_check(report, "counters-nondecreasing", monotone, monotone ? 0.0 : 1.0);
    if (cfg.method == "cg") {
      const TraceRow& last = trace.rows.back();
      const bool exact = last.lmo_calls_cum == opts.N && last.grad_evals_cum == opts.N;
      detail::add_check(report, "cg-counter-identity", exact,
                        static_cast<double>(last.lmo_calls_cum - opts.N),
                        "lmo == grad == N exactly");
    } else {
      detail::add_check(report, "sliding-inner-cap", inner_cap_ok, inner_cap_ok ? 0.0 : 1.0,
                        "inner iterations <= k+1 at every outer step");
      std::int64_t lmo_budget = 0;
      for (const TraceRow& row : trace.rows) lmo_budget += row.k + 1;
      detail::add_check(report, "sliding-lmo-total",
                        trace.rows.back().lmo_calls_cum <= lmo_budget,
                        static_cast<double>(trace.rows.back().lmo_calls_cum - lmo_budget),
                        "total LMO calls minus sum_k (k+1)");
    }
  }

  std::ostringstream text;
  for (const CertifyCheck& check : report.checks) {
    char line[256];
    std::snprintf(line, sizeof(line), "%-26s %s  margin=%+.3e  %s\n", check.name.c_str(),
                  check.pass ? "PASS" : "FAIL", check.margin, check.detail.c_str());
    text << line;
  }
  text << (report.all_pass ? "certify: all checks passed\n" : "certify: FAILURES present\n");
  report.text = text.str();
  return report;
}

inline int cmd_certify(const RunConfig& cfg, std::ostream& os, CertifyReport* report_out = nullptr) {
  try {
    CertifyReport report = certify_run(cfg);
    os << report.text;
    if (!cfg.out.empty()) {
      std::ofstream file(cfg.out, std::ios::binary);
      if (file) file << report.text;
    }
    const int code = report.all_pass ? kOk : kCertifyFailure;
    if (report_out) *report_out = std::move(report);
    return code;
  } catch (const config_error& e) {
    os << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const contract_error& e) {
    os << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const solver_abort& e) {
    os << "solver abort detected: " << e.what() << "\n";
    return kSolverAbort;
  }
}

}  // namespace ucgs::bench

// mg1li: solver and diagnostics for M/G/1-type Markov chains under
// level-increment truncation. See README.md for the model file schema
// and output formats.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mg1li/asymptotics.hpp"
#include "mg1li/gmatrix.hpp"
#include "mg1li/log.hpp"
#include "mg1li/model.hpp"
#include "mg1li/oracle.hpp"
#include "mg1li/ramaswami.hpp"

using json = nlohmann::ordered_json;
using namespace mg1li;

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

json jvec(const RowVector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json jvec(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

const char* status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    default: return "unknown";
  }
}

struct Output {
  std::string path;  // empty = stdout
  void write(const std::string& text) const {
    if (path.empty()) {
      std::fputs(text.c_str(), stdout);
      if (!text.empty() && text.back() != '\n') std::fputc('\n', stdout);
      return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open output file: " + path);
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
  }
  void write_json(const json& j) const { write(j.dump(2)); }
};

json check_to_json(const AssumptionCheck& c) {
  return json{{"status", status_name(c.status)}, {"note", c.note}};
}

json assumptions_to_json(const AssumptionReport& rep) {
  json j;
  j["stability"] = check_to_json(rep.stability);
  j["aperiodicity"] = check_to_json(rep.aperiodicity);
  j["light_tail"] = check_to_json(rep.light_tail);
  j["tail_regularity"] = check_to_json(rep.tail_regularity);
  j["sigma"] = rep.sigma;
  j["r"] = std::isinf(rep.r) ? json("inf") : json(rep.r);
  j["f_power"] = rep.f_power;
  j["a_irreducible"] = rep.a_irreducible;
  return j;
}

json profile_to_json(const AsymptoticProfile& p) {
  json j;
  auto radius = [](double r) {
    return std::isinf(r) ? json("inf") : json(r);
  };
  j["r_a"] = radius(p.r_a);
  j["r_b"] = radius(p.r_b);
  j["r"] = radius(p.r);
  j["f_power"] = p.f_power;
  j["f_heuristic"] = p.f_heuristic;
  j["fitted"] = p.fitted;
  j["c_a"] = jvec(p.c_a);
  j["c_b"] = jvec(p.c_b);
  j["c_star"] = p.c_star;
  j["sigma"] = p.sigma;
  j["varpi"] = jvec(p.varpi);
  j["m_bar_a"] = jvec(p.m_bar_a);
  j["m_bar_a_plus"] = jvec(p.m_bar_a_plus);
  j["m_bar_b"] = jvec(p.m_bar_b);
  if (p.pi0.size()) {
    j["pi0"] = jvec(p.pi0);
    j["pi_bar0"] = jvec(p.pi_bar0);
    j["theta"] = p.theta;
    j["theta_di"] = p.theta_di;
  }
  return j;
}

json distribution_to_json(const LevelDistribution& dist) {
  json j;
  j["n"] = dist.n_trunc;
  j["is_reference"] = dist.is_reference;
  j["k_max"] = dist.k_max;
  j["pi0"] = jvec(dist.pi0);
  json levels = json::array();
  for (const RowVector& v : dist.pis) levels.push_back(jvec(v));
  j["levels"] = levels;
  j["tail_mass"] = dist.tail_mass;
  j["total_mass"] = dist.total_mass();
  if (dist.est_residual_bound)
    j["est_residual_bound"] = *dist.est_residual_bound;
  return j;
}

std::string distribution_to_csv(const LevelDistribution& dist) {
  std::string out = "k,phase,pi\n";
  for (Eigen::Index p = 0; p < dist.pi0.size(); ++p)
    out += "0," + std::to_string(p) + "," + fmt17(dist.pi0(p)) + "\n";
  for (int k = 1; k <= dist.k_max; ++k) {
    const RowVector& v = dist.level(k);
    for (Eigen::Index p = 0; p < v.size(); ++p)
      out += std::to_string(k) + "," + std::to_string(p) + "," +
             fmt17(v(p)) + "\n";
  }
  return out;
}

json sweep_to_json(const SweepDiagnostics& diag, const LevelDistribution& ref,
                   bool conjecture_tv) {
  json j;
  j["theta"] = diag.theta;
  j["theta_di"] = diag.theta_di;
  json recs = json::array();
  for (const SweepRecord& rec : diag.records) {
    json r;
    r["n"] = rec.n;
    r["rate"] = rec.rate;
    r["dbar_i_n"] = rec.dbar_i_n;
    r["tv_total"] = rec.tv_total;
    if (conjecture_tv) r["tv_ratio_conjectural"] = rec.tv_total / rec.rate;
    json levels = json::array();
    for (size_t k = 0; k < rec.diff_by_level.size(); ++k) {
      const RowVector& diff = rec.diff_by_level[k];
      const RowVector& pik =
          (k == 0) ? ref.pi0 : ref.level(static_cast<int>(k));
      json lv;
      lv["k"] = static_cast<int>(k);
      lv["diff"] = jvec(diff);
      lv["diff_ratio"] = jvec(RowVector(diff / rec.rate));
      lv["rel_ratio"] = rec.rel_by_level[k] / rec.rate;
      lv["di_ratio"] = jvec(RowVector(diff / rec.dbar_i_n));
      // each ratio travels with its predicted limit
      lv["expected_theta_pik"] = jvec(RowVector(diag.theta * pik));
      lv["expected_theta"] = diag.theta;
      lv["expected_thetadi_pik"] = jvec(RowVector(diag.theta_di * pik));
      levels.push_back(lv);
    }
    r["levels"] = levels;
    recs.push_back(r);
  }
  j["records"] = recs;
  json pos = json::array();
  for (int v : diag.positivity_threshold) pos.push_back(v);
  j["positivity_threshold_by_level"] = pos;
  return j;
}

std::string sweep_to_csv(const SweepDiagnostics& diag,
                         const LevelDistribution& ref, bool conjecture_tv) {
  std::string out = "N,k,phase,diff,diff_ratio,rel_ratio,di_ratio,";
  if (conjecture_tv) out += "tv_ratio_conjectural,";
  out += "expected_theta_pik,expected_theta,expected_thetadi_pik\n";
  for (const SweepRecord& rec : diag.records) {
    for (size_t k = 0; k < rec.diff_by_level.size(); ++k) {
      const RowVector& diff = rec.diff_by_level[k];
      const RowVector& pik =
          (k == 0) ? ref.pi0 : ref.level(static_cast<int>(k));
      for (Eigen::Index p = 0; p < diff.size(); ++p) {
        out += std::to_string(rec.n) + "," + std::to_string(k) + "," +
               std::to_string(p) + ",";
        out += fmt17(diff(p)) + ",";
        out += fmt17(diff(p) / rec.rate) + ",";
        out += fmt17(rec.rel_by_level[k] / rec.rate) + ",";
        out += fmt17(diff(p) / rec.dbar_i_n) + ",";
        if (conjecture_tv) out += fmt17(rec.tv_total / rec.rate) + ",";
        out += fmt17(diag.theta * pik(p)) + ",";
        out += fmt17(diag.theta) + ",";
        out += fmt17(diag.theta_di * pik(p)) + "\n";
      }
    }
  }
  return out;
}

json snl_to_json(const SNLDistribution& s) {
  json j;
  j["k_max"] = s.k_max;
  j["mean"] = s.mean_d;
  j["coverage_gap"] = s.coverage_gap;
  j["d"] = s.d;
  if (!s.d_bar_i.empty()) j["d_bar_i"] = s.d_bar_i;
  return j;
}

std::string snl_to_csv(const SNLDistribution& s) {
  std::string out = "k,d,d_i,d_bar_i\n";
  for (int k = 0; k <= s.k_max; ++k) {
    const double dbi = s.d_bar_i.empty() ? 0.0 : s.d_bar_i[static_cast<size_t>(k)];
    out += std::to_string(k) + "," + fmt17(s.d[static_cast<size_t>(k)]) + "," +
           fmt17(1.0 - dbi) + "," + fmt17(dbi) + "\n";
  }
  return out;
}

struct CommonOpts {
  std::string model_path;
  std::string format = "json";
  std::string output_path;
  double tol_g = 1e-12;
  long max_iter = 1000000;
  double mass_tol = 1e-12;
  int k_cap = -1;
  bool slem = false;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_solver = true,
                bool with_slem = false) {
  cmd->add_option("model", o.model_path, "model file (JSON)")->required();
  cmd->add_option("--format", o.format, "output format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--output,-o", o.output_path, "write results to a file");
  if (with_solver) {
    cmd->add_option("--tol-g", o.tol_g, "G fixed-point tolerance");
    cmd->add_option("--max-iter", o.max_iter, "G iteration cap");
    cmd->add_option("--mass-tol", o.mass_tol, "level recursion mass target");
    cmd->add_option("--k-cap", o.k_cap, "level recursion hard cap");
  }
  if (with_slem)
    cmd->add_flag("--slem", o.slem,
                  "report the second-largest eigenvalue modulus of G");
}

SolveOptions solver_options(const CommonOpts& o) {
  SolveOptions opts;
  opts.tol_g = o.tol_g;
  opts.max_iter = o.max_iter;
  opts.mass_tol = o.mass_tol;
  opts.k_cap = o.k_cap;
  return opts;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "mg1li: stationary analysis of M/G/1-type Markov chains via "
      "level-increment truncation"};
  app.require_subcommand(1);

  // validate
  CommonOpts vo;
  int vo_n = 50;
  CLI::App* validate_cmd =
      app.add_subcommand("validate", "check model invariants and assumptions");
  add_common(validate_cmd, vo, /*with_solver=*/true, /*with_slem=*/true);
  validate_cmd->add_option(
      "--n", vo_n, "truncation level used for the aperiodicity check (--slem)");

  // solve
  CommonOpts so;
  int so_n = 0;
  CLI::App* solve_cmd =
      app.add_subcommand("solve", "approximate distribution at one level");
  add_common(solve_cmd, so, /*with_solver=*/true, /*with_slem=*/true);
  solve_cmd->add_option("--n", so_n, "truncation level")->required();

  // reference
  CommonOpts ro;
  int ro_nref = 0;
  CLI::App* ref_cmd =
      app.add_subcommand("reference", "high-truncation reference distribution");
  add_common(ref_cmd, ro);
  ref_cmd->add_option("--n-ref", ro_nref, "reference truncation level")
      ->required();

  // sweep
  CommonOpts wo;
  int wo_from = 0, wo_to = 0, wo_step = 5, wo_nref = 0, wo_kreport = 10,
      wo_jobs = 1, wo_snl_kmax = -1;
  bool wo_tv = false;
  CLI::App* sweep_cmd = app.add_subcommand(
      "sweep", "error diagnostics over a range of truncation levels");
  add_common(sweep_cmd, wo);
  sweep_cmd->add_option("--n-from", wo_from, "first truncation level")
      ->required();
  sweep_cmd->add_option("--n-to", wo_to, "last truncation level")->required();
  sweep_cmd->add_option("--n-step,--step", wo_step, "level stride");
  sweep_cmd->add_option("--n-ref", wo_nref, "reference truncation level")
      ->required();
  sweep_cmd->add_option("--k-report", wo_kreport, "levels reported per record");
  sweep_cmd->add_option("--jobs", wo_jobs, "worker threads for the sweep");
  sweep_cmd->add_option("--snl-kmax", wo_snl_kmax,
                        "range of the level-increment distribution");
  sweep_cmd->add_flag("--conjecture-tv", wo_tv,
                      "emit the conjectural total-variation ratio column");

  // asymptotics
  CommonOpts ao;
  int ao_nref = 0, ao_kmax = 100;
  CLI::App* asym_cmd = app.add_subcommand(
      "asymptotics", "decay profile and level-increment distribution");
  add_common(asym_cmd, ao);
  asym_cmd->add_option("--n-ref", ao_nref, "reference truncation level")
      ->required();
  asym_cmd->add_option("--k-max", ao_kmax,
                       "range of the level-increment distribution");

  // select-n
  CommonOpts no;
  double no_eps = 0.0;
  CLI::App* select_cmd = app.add_subcommand(
      "select-n", "smallest truncation level meeting an error tolerance");
  add_common(select_cmd, no, /*with_solver=*/false);
  select_cmd->add_option("--epsilon", no_eps, "relative error tolerance")
      ->required();

  // oracle
  CommonOpts oo;
  int oo_n = 0, oo_levels = 0;
  std::string oo_method = "lump_last";
  CLI::App* oracle_cmd = app.add_subcommand(
      "oracle", "cross-check the recursion against a direct linear solve");
  add_common(oracle_cmd, oo);
  oracle_cmd->add_option("--n", oo_n, "truncation level")->required();
  oracle_cmd->add_option("--levels", oo_levels,
                         "level cap of the assembled chain (default: by rule)");
  oracle_cmd->add_option("--method", oo_method, "lump_last or renormalize")
      ->check(CLI::IsMember({"lump_last", "renormalize"}));

  // diagnose
  CommonOpts go;
  int go_from = 0, go_to = 0, go_step = 5, go_nref = 0, go_kreport = 10,
      go_jobs = 1, go_snl_kmax = -1;
  double go_eps = 0.0;
  bool go_tv = false;
  CLI::App* diag_cmd = app.add_subcommand(
      "diagnose", "joined assumptions + profile + sweep ratio report");
  add_common(diag_cmd, go, /*with_solver=*/true, /*with_slem=*/true);
  diag_cmd->add_option("--n-from", go_from, "first truncation level")
      ->required();
  diag_cmd->add_option("--n-to", go_to, "last truncation level")->required();
  diag_cmd->add_option("--n-step,--step", go_step, "level stride");
  diag_cmd->add_option("--n-ref", go_nref, "reference truncation level")
      ->required();
  diag_cmd->add_option("--k-report", go_kreport, "levels reported per record");
  diag_cmd->add_option("--jobs", go_jobs, "worker threads for the sweep");
  diag_cmd->add_option("--snl-kmax", go_snl_kmax,
                       "range of the level-increment distribution");
  diag_cmd->add_option("--epsilon", go_eps,
                       "also report the selected truncation level");
  diag_cmd->add_flag("--conjecture-tv", go_tv,
                     "emit the conjectural total-variation ratio column");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate_cmd) {
      const MG1Model model = load_model(vo.model_path);
      AssumptionReport rep = validate_assumptions(model);
      json j;
      j["model"] = vo.model_path;
      j["command"] = "validate";
      if (vo.slem) {
        // resolve the deferred aperiodicity check by actually solving G
        const GSolution gsol = solve_g(truncate(model, vo_n), vo.tol_g, vo.max_iter);
        const double slem = spectral_gap(gsol);
        rep.aperiodicity.status =
            slem < 1.0 ? CheckStatus::pass : CheckStatus::fail;
        rep.aperiodicity.note =
            "slem of G at N = " + std::to_string(vo_n) + " is " +
            std::to_string(slem);
        j["slem"] = slem;
        j["slem_n"] = vo_n;
        if (slem > 0.0) j["ergodicity_margin"] = 1.0 / slem - 1.0;
      }
      j["assumptions"] = assumptions_to_json(rep);
      Output{vo.output_path}.write_json(j);
      const bool hard_fail = rep.stability.status == CheckStatus::fail ||
                             rep.light_tail.status == CheckStatus::fail ||
                             rep.aperiodicity.status == CheckStatus::fail;
      return hard_fail ? 1 : 0;
    }

    if (*solve_cmd) {
      const MG1Model model = load_model(so.model_path);
      const TruncatedModel tm = truncate(model, so_n);
      const GSolution gsol = solve_g(tm, so.tol_g, so.max_iter);
      const RamaswamiKernels kern = kernels(tm, gsol);
      const LevelDistribution dist =
          level_distribution(tm, gsol, kern, so.mass_tol, so.k_cap);
      if (so.format == "csv") {
        Output{so.output_path}.write(distribution_to_csv(dist));
      } else {
        json j;
        j["model"] = so.model_path;
        j["command"] = "solve";
        j["g_iterations"] = gsol.iterations;
        j["g_residual"] = gsol.residual;
        if (so.slem) j["slem"] = spectral_gap(gsol);
        j["distribution"] = distribution_to_json(dist);
        Output{so.output_path}.write_json(j);
      }
      return 0;
    }

    if (*ref_cmd) {
      const MG1Model model = load_model(ro.model_path);
      const LevelDistribution dist =
          reference_solution(model, ro_nref, ro.mass_tol, solver_options(ro));
      if (ro.format == "csv") {
        Output{ro.output_path}.write(distribution_to_csv(dist));
      } else {
        json j;
        j["model"] = ro.model_path;
        j["command"] = "reference";
        j["distribution"] = distribution_to_json(dist);
        Output{ro.output_path}.write_json(j);
      }
      return 0;
    }

    if (*sweep_cmd || *diag_cmd) {
      const bool is_diag = static_cast<bool>(*diag_cmd);
      const CommonOpts& co = is_diag ? go : wo;
      const int n_from = is_diag ? go_from : wo_from;
      const int n_to = is_diag ? go_to : wo_to;
      const int n_step = is_diag ? go_step : wo_step;
      const int n_ref = is_diag ? go_nref : wo_nref;
      const int k_report = is_diag ? go_kreport : wo_kreport;
      const int jobs = is_diag ? go_jobs : wo_jobs;
      const bool tv = is_diag ? go_tv : wo_tv;
      int snl_kmax = is_diag ? go_snl_kmax : wo_snl_kmax;

      if (n_from < 1 || n_to < n_from || n_step < 1)
        throw ValidationError("sweep: need 1 <= n-from <= n-to and step >= 1");
      if (4 * n_to > n_ref)
        throw ValidationError(
            "sweep: n-ref must be at least 4x the largest swept level");
      std::vector<int> ns;
      for (int n = n_from; n <= n_to; n += n_step) ns.push_back(n);
      if (snl_kmax < 0) snl_kmax = std::max(100, n_to + 10);

      const MG1Model model = load_model(co.model_path);
      const SolveOptions opts = solver_options(co);
      const LevelDistribution ref =
          reference_solution(model, n_ref, co.mass_tol, opts);
      const AsymptoticProfile prof = decay_profile(model, ref);
      const SNLDistribution sd = integrated_tail(snl(model, ref, snl_kmax));
      const double crosscheck = integrated_tail_crosscheck(model, ref, sd);
      const SweepDiagnostics diag =
          sweep_diagnostics(model, ns, ref, prof, sd, k_report, jobs, opts);

      if (co.format == "csv") {
        Output{co.output_path}.write(sweep_to_csv(diag, ref, tv));
      } else {
        json j;
        j["model"] = co.model_path;
        j["command"] = is_diag ? "diagnose" : "sweep";
        j["n_ref"] = n_ref;
        j["k_report"] = k_report;
        if (is_diag) {
          j["assumptions"] = assumptions_to_json(validate_assumptions(model));
          if (co.slem) {
            const GSolution gsol =
                solve_g(truncate(model, n_to), co.tol_g, co.max_iter);
            j["slem"] = spectral_gap(gsol);
            j["slem_n"] = n_to;
          }
          j["profile"] = profile_to_json(prof);
          j["integrated_tail_crosscheck"] = crosscheck;
          if (go_eps > 0.0) {
            const SelectTrace trace = select_n_trace(prof, go_eps);
            j["epsilon"] = go_eps;
            j["n_star"] = trace.n_star;
            j["bound_at_n_star"] = trace.bounds.back();
          }
        }
        j["sweep"] = sweep_to_json(diag, ref, tv);
        Output{co.output_path}.write_json(j);
      }
      return 0;
    }

    if (*asym_cmd) {
      const MG1Model model = load_model(ao.model_path);
      const LevelDistribution ref =
          reference_solution(model, ao_nref, ao.mass_tol, solver_options(ao));
      const AsymptoticProfile prof = decay_profile(model, ref);
      SNLDistribution sd = integrated_tail(snl(model, ref, ao_kmax));
      const double crosscheck = integrated_tail_crosscheck(model, ref, sd);
      if (ao.format == "csv") {
        Output{ao.output_path}.write(snl_to_csv(sd));
      } else {
        json j;
        j["model"] = ao.model_path;
        j["command"] = "asymptotics";
        j["n_ref"] = ao_nref;
        j["profile"] = profile_to_json(prof);
        j["integrated_tail_crosscheck"] = crosscheck;
        j["snl"] = snl_to_json(sd);
        Output{ao.output_path}.write_json(j);
      }
      return 0;
    }

    if (*select_cmd) {
      const MG1Model model = load_model(no.model_path);
      const AsymptoticProfile prof = decay_profile(model);
      const SelectTrace trace = select_n_trace(prof, no_eps);
      json j;
      j["model"] = no.model_path;
      j["command"] = "select-n";
      j["epsilon"] = no_eps;
      j["n_star"] = trace.n_star;
      j["bound_at_n_star"] = trace.bounds.back();
      j["r"] = prof.r;
      j["c_star"] = prof.c_star;
      j["sigma"] = prof.sigma;
      j["bound_trace"] = trace.bounds;
      Output{no.output_path}.write_json(j);
      log_message(LogLevel::info, "N* = %d (bound %.6g < epsilon %.6g)",
                  trace.n_star, trace.bounds.back(), no_eps);
      return 0;
    }

    if (*oracle_cmd) {
      const MG1Model model = load_model(oo.model_path);
      const TruncatedModel tm = truncate(model, oo_n);
      const GSolution gsol = solve_g(tm, oo.tol_g, oo.max_iter);
      const RamaswamiKernels kern = kernels(tm, gsol);
      const LevelDistribution dist =
          level_distribution(tm, gsol, kern, oo.mass_tol, oo.k_cap);
      const int levels =
          oo_levels > 0 ? oo_levels : default_oracle_levels(dist);
      const OracleMethod method = oo_method == "renormalize"
                                      ? OracleMethod::renormalize
                                      : OracleMethod::lump_last;
      const OracleSolution oracle = brute_force_stationary(tm, levels, method);
      const int k_hi = std::min(50, levels);
      const double tv = l1_distance(oracle.pi_hat, dist, 0, k_hi);

      if (oo.format == "csv") {
        std::string out = "k,phase,pi_ramaswami,pi_oracle,abs_diff\n";
        for (int k = 0; k <= k_hi; ++k) {
          const RowVector a = (k == 0) ? dist.pi0
                              : (k <= dist.k_max)
                                  ? dist.level(k)
                                  : RowVector(RowVector::Zero(model.m1));
          const RowVector b =
              (k == 0) ? oracle.pi_hat.pi0 : oracle.pi_hat.level(k);
          for (Eigen::Index p = 0; p < a.size(); ++p)
            out += std::to_string(k) + "," + std::to_string(p) + "," +
                   fmt17(a(p)) + "," + fmt17(b(p)) + "," +
                   fmt17(std::abs(a(p) - b(p))) + "\n";
        }
        Output{oo.output_path}.write(out);
      } else {
        json j;
        j["model"] = oo.model_path;
        j["command"] = "oracle";
        j["n"] = oo_n;
        j["levels"] = levels;
        j["method"] = oo_method;
        j["compared_levels"] = k_hi;
        j["tv_distance"] = tv;
        j["oracle_total_mass"] = oracle.pi_hat.total_mass();
        j["ramaswami_tail_mass"] = dist.tail_mass;
        Output{oo.output_path}.write_json(j);
      }
      return 0;
    }
  } catch (const ValidationError& e) {
    json err{{"error", {{"type", "validation"}, {"message", e.what()}}}};
    std::fprintf(stderr, "%s\n", err.dump().c_str());
    return 1;
  } catch (const NumericalError& e) {
    json err{{"error", {{"type", "numerical"}, {"message", e.what()}}}};
    std::fprintf(stderr, "%s\n", err.dump().c_str());
    return 2;
  } catch (const std::exception& e) {
    json err{{"error", {{"type", "internal"}, {"message", e.what()}}}};
    std::fprintf(stderr, "%s\n", err.dump().c_str());
    return 2;
  }
  return 0;
}

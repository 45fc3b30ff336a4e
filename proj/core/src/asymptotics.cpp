#include "mg1li/asymptotics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

#include "mg1li/log.hpp"

namespace mg1li {

SNLDistribution snl(const MG1Model& model, const LevelDistribution& ref,
                    int k_max) {
  if (k_max < 0) throw ValidationError("snl: k_max must be >= 0");
  if (!(ref.tail_mass < 1e-10))
    throw ValidationError(
        "snl: reference tail mass " + std::to_string(ref.tail_mass) +
        " too large (need < 1e-10); raise the reference coverage");

  const RowVector& pi0 = ref.pi0;
  const RowVector pi_bar0 = ref.upper_sum();
  const Vector ones0 = Vector::Ones(model.m0);
  const Vector ones1 = Vector::Ones(model.m1);

  SNLDistribution out;
  out.k_max = k_max;
  out.d.resize(static_cast<size_t>(k_max) + 1);
  out.tail_probs.resize(static_cast<size_t>(k_max) + 1);
  for (int k = 0; k <= k_max; ++k) {
    // 1 - D(k) = pi0 bar_B(k) e + pi_bar0 bar_A(k) e; the closure route
    // stays accurate when the tail probability is far below one.
    const double t =
        pi0.dot(model.bar_b(k) * ones1) +
        (pi_bar0.size() ? pi_bar0.dot(model.bar_a(k) * ones1) : 0.0);
    out.tail_probs[static_cast<size_t>(k)] = t;
    out.d[static_cast<size_t>(k)] = 1.0 - t;
  }
  out.coverage_gap = out.tail_probs.back();
  if (out.coverage_gap > 1e-10)
    log_message(LogLevel::info,
                "snl: D(%d) = %.12f leaves coverage gap %.3e (> 1e-10); "
                "raise k_max",
                k_max, out.d.back(), out.coverage_gap);
  return out;
}

SNLDistribution integrated_tail(SNLDistribution snl_dist) {
  const size_t n = snl_dist.d.size();
  if (n == 0) throw ValidationError("integrated_tail: empty distribution");
  std::vector<double> t = snl_dist.tail_probs;
  if (t.empty()) {
    t.resize(n);
    for (size_t k = 0; k < n; ++k) t[k] = 1.0 - snl_dist.d[k];
  }
  double mean = 0.0;
  for (double v : t) mean += v;
  if (!(mean > 0.0))
    throw NumericalError(
        "integrated_tail: zero mean (no positive level increments)");
  snl_dist.mean_d = mean;
  // Suffix accumulation keeps the deep tail relatively accurate.
  snl_dist.d_bar_i.assign(n, 0.0);
  double suffix = 0.0;
  for (size_t k = n; k-- > 1;) {
    suffix += t[k];
    snl_dist.d_bar_i[k - 1] = suffix / mean;
  }
  return snl_dist;
}

double integrated_tail_crosscheck(const MG1Model& model,
                                  const LevelDistribution& ref,
                                  const SNLDistribution& snl_dist) {
  if (snl_dist.d_bar_i.empty())
    throw ValidationError("integrated_tail_crosscheck: run integrated_tail first");
  const DriftReport dr = drift(model);
  const RowVector& pi0 = ref.pi0;
  const RowVector pi_bar0 = ref.upper_sum();
  const double denom =
      pi0.dot(dr.m_bar_b) +
      (pi_bar0.size() ? pi_bar0.dot(dr.m_bar_a_plus) : 0.0);
  if (!(denom > 0.0))
    throw NumericalError("integrated_tail_crosscheck: zero increment mean");
  double max_dev = 0.0;
  for (int k = 0; k <= snl_dist.k_max; ++k) {
    const double closed =
        (pi0.dot(model.dbar_b_rowsum(k)) +
         (pi_bar0.size() ? pi_bar0.dot(model.dbar_a_rowsum(k)) : 0.0)) /
        denom;
    max_dev = std::max(
        max_dev, std::abs(closed - snl_dist.d_bar_i[static_cast<size_t>(k)]));
  }
  return max_dev;
}

double AsymptoticProfile::f(int n) const {
  return std::pow(static_cast<double>(n), f_power);
}

double AsymptoticProfile::rate(int n) const {
  return std::pow(r, -static_cast<double>(n)) * f(n);
}

namespace {

struct FitResult {
  double rate = std::numeric_limits<double>::infinity();  // fitted r
  Vector c;   // per-phase coefficients (exp intercept)
  bool usable = false;
};

// Ordinary least squares of log(dbar rowsum) on N over the last 2/3 of
// the usable points, per phase; rates are averaged across phases and
// must agree within 5%. The final three positive points are discarded:
// at the top of a finite list the doubly-cumulated tail runs out of
// support terms and sags below the tail law, which would otherwise bias
// the extrapolated coefficient.
FitResult fit_tail(const std::vector<Vector>& dbar, Eigen::Index phases,
                   const char* family) {
  FitResult fit;
  fit.c = Vector::Zero(phases);
  int positive = 0;
  for (const Vector& v : dbar)
    if (v.minCoeff() > 0.0) ++positive;
  if (positive == 0) return fit;  // vacuous tail; treated as infinitely fast
  const int usable = positive - 3;
  if (usable < 12)
    throw ValidationError(std::string("decay_profile: only ") +
                          std::to_string(std::max(usable, 0)) + " usable " +
                          family +
                          " tail points (need >= 12 for a numeric fit)");
  const int window = (usable * 2 + 2) / 3;
  const int start = usable - window;

  double rate_min = std::numeric_limits<double>::infinity();
  double rate_max = 0.0;
  double rate_sum = 0.0;
  for (Eigen::Index i = 0; i < phases; ++i) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (int n = start; n < usable; ++n) {
      const double x = static_cast<double>(n);
      const double y = std::log(dbar[static_cast<size_t>(n)](i));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++m;
    }
    const double det = m * sxx - sx * sx;
    const double slope = (m * sxy - sx * sy) / det;
    const double intercept = (sy - slope * sx) / m;
    const double r_phase = std::exp(-slope);
    rate_min = std::min(rate_min, r_phase);
    rate_max = std::max(rate_max, r_phase);
    rate_sum += r_phase;
    fit.c(i) = std::exp(intercept);
  }
  if (rate_max > 1.05 * rate_min)
    throw NumericalError(std::string("decay_profile: fitted ") + family +
                         " decay rates disagree across phases by more than "
                         "5% (" +
                         std::to_string(rate_min) + " .. " +
                         std::to_string(rate_max) + ")");
  fit.rate = rate_sum / static_cast<double>(phases);
  fit.usable = true;
  return fit;
}

}  // namespace

AsymptoticProfile decay_profile(const MG1Model& model) {
  const DriftReport dr = drift(model);
  if (!dr.stable)
    throw NumericalError("decay_profile: sigma = " + std::to_string(dr.sigma) +
                         " >= 0; no stationary regime");

  AsymptoticProfile prof;
  prof.sigma = dr.sigma;
  prof.varpi = dr.varpi;
  prof.m_bar_a = dr.m_bar_a;
  prof.m_bar_a_plus = dr.m_bar_a_plus;
  prof.m_bar_b = dr.m_bar_b;
  prof.theta = std::numeric_limits<double>::quiet_NaN();
  prof.theta_di = std::numeric_limits<double>::quiet_NaN();

  const TailDecay td = tail_decay(model);
  if (td.available) {
    prof.r_a = td.r_a;
    prof.r_b = td.r_b;
    prof.r = td.r;
    prof.f_power = td.f_power;
    prof.f_heuristic = td.f_heuristic;
    prof.c_a = td.c_a;
    prof.c_b = td.c_b;
    prof.c_star = td.c_star;
  } else {
    // Numeric fit on the explicit blocks. Collect dbar rowsums until the
    // entries die out (finite support) to get the usable window.
    const int top = std::max(model.ka(), model.kb());
    std::vector<Vector> dbar_a, dbar_b;
    for (int k = 0; k <= top; ++k) dbar_a.push_back(model.dbar_a_rowsum(k));
    for (int k = 0; k <= top; ++k) dbar_b.push_back(model.dbar_b_rowsum(k));
    const FitResult fa = fit_tail(dbar_a, model.m1, "A");
    const FitResult fb = fit_tail(dbar_b, model.m0, "B");
    if (!fa.usable && !fb.usable)
      throw ValidationError(
          "decay_profile: no tail data (declare a tail or supply longer "
          "block lists)");
    prof.fitted = true;
    prof.f_power = 0.0;
    prof.r_a = fa.rate;
    prof.r_b = fb.rate;
    prof.r = std::min(prof.r_a, prof.r_b);
    prof.c_a = fa.usable ? fa.c : Vector::Zero(model.m1);
    prof.c_b = fb.usable ? fb.c : Vector::Zero(model.m0);
    // Fitted radii carry noise; treat them as equal within 5% and zero
    // the faster side otherwise.
    if (fa.usable && fb.usable) {
      if (prof.r_a > 1.05 * prof.r_b)
        prof.c_a = Vector::Zero(model.m1);
      else if (prof.r_b > 1.05 * prof.r_a)
        prof.c_b = Vector::Zero(model.m0);
    }
    prof.c_star = std::max(prof.c_a.size() ? prof.c_a.maxCoeff() : 0.0,
                           prof.c_b.size() ? prof.c_b.maxCoeff() : 0.0);
  }

  if (!(prof.r > 1.0))
    throw NumericalError("decay_profile: decay radius r = " +
                         std::to_string(prof.r) +
                         " <= 1; increments are not light-tailed");
  return prof;
}

AsymptoticProfile decay_profile(const MG1Model& model,
                                const LevelDistribution& ref) {
  AsymptoticProfile prof = decay_profile(model);
  prof.pi0 = ref.pi0;
  prof.pi_bar0 = ref.upper_sum();
  if (prof.pi_bar0.size() == 0) prof.pi_bar0 = RowVector::Zero(model.m1);
  const double up = prof.pi0.dot(prof.c_b) + prof.pi_bar0.dot(prof.c_a);
  prof.theta = prof.r * up / (-prof.sigma);
  const double up_di =
      prof.pi0.dot(prof.m_bar_b) + prof.pi_bar0.dot(prof.m_bar_a_plus);
  prof.theta_di = prof.r * up_di / (-prof.sigma);
  return prof;
}

SelectTrace select_n_trace(const AsymptoticProfile& profile, double epsilon) {
  if (!(epsilon > 0.0))
    throw ValidationError("select_n: epsilon must be positive");
  if (!(profile.r > 1.0))
    throw ValidationError("select_n: profile has r <= 1");
  SelectTrace trace;
  const double scale = profile.c_star / (-profile.sigma);
  for (int n = 1;; ++n) {
    const double bound =
        scale * std::pow(profile.r, -static_cast<double>(n - 1)) * profile.f(n);
    trace.bounds.push_back(bound);
    if (bound < epsilon) {
      trace.n_star = n;
      return trace;
    }
    if (n > 10000000)
      throw NumericalError("select_n: bound did not drop below epsilon");
  }
}

int select_n(const AsymptoticProfile& profile, double epsilon) {
  return select_n_trace(profile, epsilon).n_star;
}

SweepRecord build_sweep_record(int n, const LevelDistribution& approx,
                               const LevelDistribution& ref,
                               const AsymptoticProfile& profile,
                               const SNLDistribution& snl_dist, int k_report) {
  if (k_report < 0) throw ValidationError("sweep: k_report must be >= 0");
  if (approx.k_max < k_report || ref.k_max < k_report)
    throw ValidationError(
        "sweep: distributions cover fewer levels than k_report");
  if (snl_dist.d_bar_i.empty() || snl_dist.k_max < n)
    throw ValidationError(
        "sweep: integrated tail not available at the requested level");

  SweepRecord rec;
  rec.n = n;
  rec.rate = profile.rate(n);
  rec.dbar_i_n = snl_dist.d_bar_i[static_cast<size_t>(n)];
  rec.diff_by_level.reserve(static_cast<size_t>(k_report) + 1);
  for (int k = 0; k <= k_report; ++k) {
    const RowVector diff = (k == 0) ? RowVector(approx.pi0 - ref.pi0)
                                    : RowVector(approx.level(k) - ref.level(k));
    const double l1 = l1_norm(diff);
    const double pk_mass = (k == 0) ? ref.pi0.sum() : ref.level(k).sum();
    rec.diff_by_level.push_back(diff);
    rec.l1_by_level.push_back(l1);
    rec.rel_by_level.push_back(l1 / pk_mass);
  }
  rec.tv_total =
      l1_distance(approx, ref, 0, std::max(approx.k_max, ref.k_max));
  return rec;
}

SweepDiagnostics sweep_diagnostics(const MG1Model& model,
                                   const std::vector<int>& ns,
                                   const LevelDistribution& ref,
                                   const AsymptoticProfile& profile,
                                   const SNLDistribution& snl_dist,
                                   int k_report, int jobs,
                                   const SolveOptions& opts) {
  if (ns.empty()) throw ValidationError("sweep: empty truncation list");
  for (int n : ns) {
    if (n < 1) throw ValidationError("sweep: truncation levels must be >= 1");
    if (4 * n > ref.n_trunc)
      throw ValidationError(
          "sweep: truncation level " + std::to_string(n) +
          " violates n <= n_ref/4 (reference at " +
          std::to_string(ref.n_trunc) + " is too coarse to act as ground truth)");
  }

  std::vector<int> order(ns);
  std::sort(order.begin(), order.end());

  SweepDiagnostics diag;
  diag.theta = profile.theta;
  diag.theta_di = profile.theta_di;
  diag.records.resize(order.size());

  std::atomic<size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  auto worker = [&] {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= order.size()) return;
      try {
        const LevelDistribution approx =
            solve_level_distribution(model, order[i], opts);
        diag.records[i] = build_sweep_record(order[i], approx, ref, profile,
                                             snl_dist, k_report);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  const int nworkers =
      std::max(1, std::min<int>(jobs, static_cast<int>(order.size())));
  if (nworkers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(nworkers));
    for (int w = 0; w < nworkers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  // Positivity onset per level: smallest tested N from which the
  // difference stays elementwise positive through the end of the sweep.
  diag.positivity_threshold.assign(static_cast<size_t>(k_report) + 1, -1);
  for (int k = 0; k <= k_report; ++k) {
    int onset = -1;
    for (auto it = diag.records.rbegin(); it != diag.records.rend(); ++it) {
      const RowVector& diff = it->diff_by_level[static_cast<size_t>(k)];
      if (diff.minCoeff() > 0.0)
        onset = it->n;
      else
        break;
    }
    diag.positivity_threshold[static_cast<size_t>(k)] = onset;
  }
  return diag;
}

}  // namespace mg1li

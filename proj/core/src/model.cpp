#include "mg1li/model.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "mg1li/numerics.hpp"

namespace mg1li {

namespace {

constexpr double kRowSumTol = 1e-9;
constexpr double kSeriesCutoff = 1e-16;

bool is_zero(const Matrix& m) { return m.size() == 0 || max_abs(m) == 0.0; }

std::string shape_of(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols,
                   const std::string& what) {
  if (m.rows() != rows || m.cols() != cols)
    throw ValidationError(what + ": expected " + std::to_string(rows) + "x" +
                          std::to_string(cols) + ", got " + shape_of(m));
}

void require_entries(const Matrix& m, const std::string& what) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double e = m(i, j);
      if (!std::isfinite(e) || e < 0.0 || e > 1.0 + 1e-12)
        throw ValidationError(what + ": entry (" + std::to_string(i) + "," +
                              std::to_string(j) + ") = " + std::to_string(e) +
                              " outside [0, 1]");
    }
}

// Strong connectivity of the nonzero pattern: every state reaches state 0
// and is reachable from it.
bool strongly_connected(const Matrix& a) {
  const Eigen::Index n = a.rows();
  auto reach = [&](bool transpose) {
    std::vector<char> seen(static_cast<size_t>(n), 0);
    std::vector<Eigen::Index> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      const Eigen::Index u = stack.back();
      stack.pop_back();
      for (Eigen::Index v = 0; v < n; ++v) {
        const double w = transpose ? a(v, u) : a(u, v);
        if (w > 0.0 && !seen[static_cast<size_t>(v)]) {
          seen[static_cast<size_t>(v)] = 1;
          stack.push_back(v);
        }
      }
    }
    for (char s : seen)
      if (!s) return false;
    return true;
  };
  return reach(false) && reach(true);
}

Matrix parse_matrix(const nlohmann::json& j, const std::string& what) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw ValidationError(what + ": expected an array of rows");
  const size_t rows = j.size();
  const size_t cols = j[0].size();
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols)
      throw ValidationError(what + ": ragged rows");
    for (size_t k = 0; k < cols; ++k) {
      if (!j[i][k].is_number())
        throw ValidationError(what + ": non-numeric entry");
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          j[i][k].get<double>();
    }
  }
  return m;
}

struct TailActivity {
  bool a_active = false;  // a geometric A-tail with a nonzero coefficient
  bool b_active = false;
};

TailActivity tail_activity(const MG1Model& model) {
  TailActivity act;
  if (model.tail.kind == TailKind::geometric_power) {
    act.a_active = !is_zero(model.tail.c_mat_a);
    act.b_active = !is_zero(model.tail.c_mat_b);
  }
  return act;
}

}  // namespace

double tail_mass_series(double gamma, double alpha, long from) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw ValidationError("tail series: gamma must lie in (0, 1)");
  if (from < 1) throw ValidationError("tail series: from must be >= 1");
  if (alpha == 1.0) return std::pow(gamma, static_cast<double>(from)) / (1.0 - gamma);
  double acc = 0.0;
  double gl = std::pow(gamma, static_cast<double>(from));
  for (long l = from;; ++l) {
    const double term = std::pow(static_cast<double>(l), alpha - 1.0) * gl;
    acc += term;
    if (term == 0.0) break;
    if (l > from + 8 && term <= kSeriesCutoff * acc) break;
    if (l - from > 100000000L)
      throw NumericalError("tail series did not converge (gamma too close to 1)");
    gl *= gamma;
  }
  return acc;
}

double tail_weighted_series(double gamma, double alpha, long from, double offset) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw ValidationError("tail series: gamma must lie in (0, 1)");
  if (!(static_cast<double>(from) > offset))
    throw ValidationError("tail series: from must exceed offset");
  if (alpha == 1.0) {
    const double g = gamma, m = static_cast<double>(from);
    return std::pow(g, m) * ((m - offset) * (1.0 - g) + g) / ((1.0 - g) * (1.0 - g));
  }
  double acc = 0.0;
  double gl = std::pow(gamma, static_cast<double>(from));
  for (long l = from;; ++l) {
    const double term = (static_cast<double>(l) - offset) *
                        std::pow(static_cast<double>(l), alpha - 1.0) * gl;
    acc += term;
    if (term == 0.0) break;
    if (l > from + 8 && term <= kSeriesCutoff * acc) break;
    if (l - from > 100000000L)
      throw NumericalError("tail series did not converge (gamma too close to 1)");
    gl *= gamma;
  }
  return acc;
}

Matrix MG1Model::a(int k) const {
  if (k < -1) throw ValidationError("A block index below -1");
  if (k <= ka()) return a_blocks[static_cast<size_t>(k) + 1];
  if (tail.kind == TailKind::geometric_power && !is_zero(tail.c_mat_a))
    return tail.c_mat_a *
           (std::pow(static_cast<double>(k), tail.alpha - 1.0) *
            std::pow(tail.gamma_a, static_cast<double>(k)));
  return Matrix::Zero(m1, m1);
}

Matrix MG1Model::b(int k) const {
  if (k < 0) throw ValidationError("B block index below 0");
  if (k <= kb()) return b_blocks[static_cast<size_t>(k)];
  if (tail.kind == TailKind::geometric_power && !is_zero(tail.c_mat_b))
    return tail.c_mat_b *
           (std::pow(static_cast<double>(k), tail.beta - 1.0) *
            std::pow(tail.gamma_b, static_cast<double>(k)));
  return Matrix::Zero(m0, m1);
}

Matrix MG1Model::bar_a(int j) const {
  if (j < 0) throw ValidationError("bar_a: index must be >= 0");
  Matrix s = Matrix::Zero(m1, m1);
  for (int l = j + 1; l <= ka(); ++l) s += a(l);
  if (tail.kind == TailKind::geometric_power && !is_zero(tail.c_mat_a)) {
    const long from = std::max(j, ka()) + 1;
    s += tail.c_mat_a * tail_mass_series(tail.gamma_a, tail.alpha, from);
  }
  return s;
}

Matrix MG1Model::bar_b(int j) const {
  if (j < 0) throw ValidationError("bar_b: index must be >= 0");
  Matrix s = Matrix::Zero(m0, m1);
  for (int l = j + 1; l <= kb(); ++l) s += b(l);
  if (tail.kind == TailKind::geometric_power && !is_zero(tail.c_mat_b)) {
    const long from = std::max(j, kb()) + 1;
    s += tail.c_mat_b * tail_mass_series(tail.gamma_b, tail.beta, from);
  }
  return s;
}

Vector MG1Model::dbar_a_rowsum(int k) const {
  if (k < 0) throw ValidationError("dbar_a_rowsum: index must be >= 0");
  Vector s = Vector::Zero(m1);
  for (int l = k + 2; l <= ka(); ++l)
    s += a(l) * Vector::Ones(m1) * static_cast<double>(l - k - 1);
  if (tail.kind == TailKind::geometric_power && !is_zero(tail.c_mat_a)) {
    const long from = std::max(k + 2, ka() + 1);
    s += tail.c_mat_a * Vector::Ones(m1) *
         tail_weighted_series(tail.gamma_a, tail.alpha, from,
                              static_cast<double>(k + 1));
  }
  return s;
}

Vector MG1Model::dbar_b_rowsum(int k) const {
  if (k < 0) throw ValidationError("dbar_b_rowsum: index must be >= 0");
  Vector s = Vector::Zero(m0);
  for (int l = k + 2; l <= kb(); ++l)
    s += b(l) * Vector::Ones(m1) * static_cast<double>(l - k - 1);
  if (tail.kind == TailKind::geometric_power && !is_zero(tail.c_mat_b)) {
    const long from = std::max(k + 2, kb() + 1);
    s += tail.c_mat_b * Vector::Ones(m1) *
         tail_weighted_series(tail.gamma_b, tail.beta, from,
                              static_cast<double>(k + 1));
  }
  return s;
}

void validate(const MG1Model& model) {
  if (model.m0 < 1 || model.m1 < 1)
    throw ValidationError("model: m0 and m1 must be positive");
  if (model.a_blocks.size() < 2)
    throw ValidationError("model: a_blocks must contain at least A_{-1} and A_0");
  if (model.b_blocks.empty())
    throw ValidationError("model: b_blocks must contain at least B_0");

  const Eigen::Index m0 = model.m0, m1 = model.m1;
  for (size_t i = 0; i < model.a_blocks.size(); ++i) {
    const std::string what = "A_" + std::to_string(static_cast<int>(i) - 1);
    require_shape(model.a_blocks[i], m1, m1, what);
    require_entries(model.a_blocks[i], what);
  }
  require_shape(model.b_minus1, m1, m0, "B_{-1}");
  require_entries(model.b_minus1, "B_{-1}");
  require_shape(model.b_blocks[0], m0, m0, "B_0");
  require_entries(model.b_blocks[0], "B_0");
  for (size_t k = 1; k < model.b_blocks.size(); ++k) {
    const std::string what = "B_" + std::to_string(k);
    require_shape(model.b_blocks[k], m0, m1, what);
    require_entries(model.b_blocks[k], what);
  }

  const TailSpec& t = model.tail;
  if (t.kind == TailKind::geometric_power) {
    if (!(t.gamma_a > 0.0 && t.gamma_a < 1.0) ||
        !(t.gamma_b > 0.0 && t.gamma_b < 1.0))
      throw ValidationError("tail: gamma_a and gamma_b must lie in (0, 1)");
    if (!(t.alpha > 0.0) || !(t.beta > 0.0))
      throw ValidationError("tail: alpha and beta must be positive");
    require_shape(t.c_mat_a, m1, m1, "tail.c_mat_a");
    require_shape(t.c_mat_b, m0, m1, "tail.c_mat_b");
    if (t.c_mat_a.minCoeff() < 0.0 || t.c_mat_b.minCoeff() < 0.0)
      throw ValidationError("tail: coefficient matrices must be nonnegative");
    if (is_zero(t.c_mat_a) && is_zero(t.c_mat_b))
      throw ValidationError(
          "tail: geometric_power with zero coefficients; declare kind finite");
    if (t.k_explicit < 0)
      throw ValidationError("tail: k_explicit must be >= 0");
    if (model.ka() < t.k_explicit || model.kb() < t.k_explicit)
      throw ValidationError(
          "tail: explicit block lists must reach k_explicit (no gap before "
          "the tail formula)");
  }

  // Row families must be stochastic within 1e-9 once the tail mass is
  // folded in. Defects are errors, never silently renormalized.
  const Vector ones1 = Vector::Ones(m1);
  Vector a_sum = Vector::Zero(m1);
  for (const Matrix& blk : model.a_blocks) a_sum += blk * ones1;
  if (model.tail.kind == TailKind::geometric_power && !is_zero(t.c_mat_a))
    a_sum += t.c_mat_a * ones1 *
             tail_mass_series(t.gamma_a, t.alpha, model.ka() + 1);
  for (Eigen::Index i = 0; i < m1; ++i)
    if (std::abs(a_sum(i) - 1.0) > kRowSumTol)
      throw ValidationError("model: repeating row " + std::to_string(i) +
                            " sums to " + std::to_string(a_sum(i)) +
                            " (row-sum defect beyond 1e-9)");

  Vector level1 = model.b_minus1 * Vector::Ones(m0);
  level1 += a_sum - model.a_blocks[0] * ones1;  // all A_k with k >= 0
  for (Eigen::Index i = 0; i < m1; ++i)
    if (std::abs(level1(i) - 1.0) > kRowSumTol)
      throw ValidationError("model: level-1 row " + std::to_string(i) +
                            " sums to " + std::to_string(level1(i)));

  Vector b_sum = model.b_blocks[0] * Vector::Ones(m0);
  for (size_t k = 1; k < model.b_blocks.size(); ++k)
    b_sum += model.b_blocks[k] * ones1;
  if (model.tail.kind == TailKind::geometric_power && !is_zero(t.c_mat_b))
    b_sum += t.c_mat_b * ones1 *
             tail_mass_series(t.gamma_b, t.beta, model.kb() + 1);
  for (Eigen::Index i = 0; i < m0; ++i)
    if (std::abs(b_sum(i) - 1.0) > kRowSumTol)
      throw ValidationError("model: boundary row " + std::to_string(i) +
                            " sums to " + std::to_string(b_sum(i)));
}

MG1Model parse_model(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("model parse error: ") + e.what());
  }
  MG1Model model;
  try {
    model.m0 = j.at("m0").get<int>();
    model.m1 = j.at("m1").get<int>();
    const auto& ja = j.at("a_blocks");
    if (!ja.is_array()) throw ValidationError("a_blocks: expected array");
    for (size_t i = 0; i < ja.size(); ++i)
      model.a_blocks.push_back(
          parse_matrix(ja[i], "a_blocks[" + std::to_string(i) + "]"));
    model.b_minus1 = parse_matrix(j.at("b_minus1"), "b_minus1");
    const auto& jb = j.at("b_blocks");
    if (!jb.is_array()) throw ValidationError("b_blocks: expected array");
    for (size_t k = 0; k < jb.size(); ++k)
      model.b_blocks.push_back(
          parse_matrix(jb[k], "b_blocks[" + std::to_string(k) + "]"));

    if (!j.contains("tail") || !j["tail"].contains("kind")) {
      model.tail.kind = TailKind::undeclared;
    } else {
      const auto& jt = j["tail"];
      const std::string kind = jt.at("kind").get<std::string>();
      if (kind == "finite") {
        model.tail.kind = TailKind::finite;
      } else if (kind == "geometric_power") {
        model.tail.kind = TailKind::geometric_power;
        model.tail.gamma_a = jt.at("gamma_a").get<double>();
        model.tail.gamma_b = jt.at("gamma_b").get<double>();
        model.tail.alpha = jt.at("alpha").get<double>();
        model.tail.beta = jt.at("beta").get<double>();
        model.tail.c_mat_a = parse_matrix(jt.at("c_mat_a"), "tail.c_mat_a");
        model.tail.c_mat_b = parse_matrix(jt.at("c_mat_b"), "tail.c_mat_b");
        model.tail.k_explicit = jt.at("k_explicit").get<int>();
      } else {
        throw ValidationError("tail.kind: unknown value '" + kind + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("model parse error: ") + e.what());
  }
  validate(model);
  return model;
}

MG1Model load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open model file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

MaterializedBlocks materialize_blocks(const MG1Model& model, int k_max) {
  if (k_max < std::max(model.ka(), model.kb()))
    throw ValidationError(
        "materialize_blocks: k_max is below the explicit block range");
  MaterializedBlocks out;
  out.k_max = k_max;
  out.a.reserve(static_cast<size_t>(k_max) + 2);
  out.b.reserve(static_cast<size_t>(k_max) + 2);
  for (int k = -1; k <= k_max; ++k) out.a.push_back(model.a(k));
  out.b.push_back(model.b_minus1);
  for (int k = 0; k <= k_max; ++k) out.b.push_back(model.b(k));
  return out;
}

TruncatedModel truncate(const MG1Model& model, int n) {
  if (n < 1) throw ValidationError("truncate: n must be >= 1");
  TruncatedModel tm;
  tm.n = n;
  tm.m0 = model.m0;
  tm.m1 = model.m1;
  tm.b_minus1 = model.b_minus1;
  for (int k = -1; k < n; ++k) tm.a_trunc.push_back(model.a(k));
  tm.a_trunc.push_back(model.bar_a(n - 1));
  for (int k = 0; k < n; ++k) tm.b_trunc.push_back(model.b(k));
  tm.b_trunc.push_back(model.bar_b(n - 1));
  return tm;
}

DriftReport drift(const MG1Model& model) {
  const Vector ones1 = Vector::Ones(model.m1);

  Matrix a_total = Matrix::Zero(model.m1, model.m1);
  for (const Matrix& blk : model.a_blocks) a_total += blk;
  if (model.tail.kind == TailKind::geometric_power &&
      !is_zero(model.tail.c_mat_a))
    a_total += model.tail.c_mat_a * tail_mass_series(model.tail.gamma_a,
                                                     model.tail.alpha,
                                                     model.ka() + 1);
  if (!strongly_connected(a_total))
    throw ValidationError("drift: A = sum A_k is reducible");

  DriftReport rep;
  rep.varpi = stationary_vector(a_total).row();

  Vector up = Vector::Zero(model.m1);
  for (int k = 1; k <= model.ka(); ++k)
    up += model.a(k) * ones1 * static_cast<double>(k);
  if (model.tail.kind == TailKind::geometric_power &&
      !is_zero(model.tail.c_mat_a))
    up += model.tail.c_mat_a * ones1 *
          tail_weighted_series(model.tail.gamma_a, model.tail.alpha,
                               model.ka() + 1, 0.0);
  rep.m_bar_a_plus = up;
  rep.m_bar_a = up - model.a(-1) * ones1;

  Vector upb = Vector::Zero(model.m0);
  for (int k = 1; k <= model.kb(); ++k)
    upb += model.b(k) * ones1 * static_cast<double>(k);
  if (model.tail.kind == TailKind::geometric_power &&
      !is_zero(model.tail.c_mat_b))
    upb += model.tail.c_mat_b * ones1 *
           tail_weighted_series(model.tail.gamma_b, model.tail.beta,
                                model.kb() + 1, 0.0);
  rep.m_bar_b = upb;

  rep.sigma = rep.varpi * rep.m_bar_a;
  rep.stable = rep.sigma < 0.0;
  return rep;
}

TailDecay tail_decay(const MG1Model& model) {
  TailDecay td;
  td.c_a = Vector::Zero(model.m1);
  td.c_b = Vector::Zero(model.m0);
  if (model.tail.kind != TailKind::geometric_power) return td;
  td.available = true;

  const TailSpec& t = model.tail;
  const TailActivity act = tail_activity(model);
  const double inf = std::numeric_limits<double>::infinity();
  td.r_a = act.a_active ? 1.0 / t.gamma_a : inf;
  td.r_b = act.b_active ? 1.0 / t.gamma_b : inf;
  td.r = std::min(td.r_a, td.r_b);

  // The limit of dbar(N) e / (gamma^N N^(alpha-1)) is free of the power
  // factor: substituting l = N+1+j turns the cumulated tail into
  // gamma^(N+1) sum_j j gamma^j ((N+1+j)/N)^(alpha-1), and the last
  // factor tends to one. Hence the coefficient is C e gamma^2/(1-gamma)^2.
  const Vector ones1 = Vector::Ones(model.m1);
  auto coeff = [&](const Matrix& c_mat, double gamma) -> Vector {
    return c_mat * ones1 * (gamma * tail_weighted_series(gamma, 1.0, 1, 0.0));
  };

  // Radii tolerance: declared radii are compared exactly up to rounding.
  const bool equal_radii =
      std::abs(td.r_a - td.r_b) <= 1e-12 * std::max(td.r_a, td.r_b) ||
      (std::isinf(td.r_a) && std::isinf(td.r_b));
  bool keep_a = false, keep_b = false;
  if (equal_radii) {
    if (act.a_active && act.b_active && t.alpha != t.beta) {
      // Mixed power exponents at a common radius: the larger exponent
      // dominates and the other coefficient vanishes in the limit.
      td.f_power = std::max(t.alpha, t.beta) - 1.0;
      td.f_heuristic = true;
      keep_a = t.alpha > t.beta;
      keep_b = t.beta > t.alpha;
    } else {
      td.f_power = (act.a_active ? t.alpha : t.beta) - 1.0;
      keep_a = act.a_active;
      keep_b = act.b_active;
    }
  } else if (td.r_a < td.r_b) {
    td.f_power = t.alpha - 1.0;
    keep_a = true;
  } else {
    td.f_power = t.beta - 1.0;
    keep_b = true;
  }
  if (keep_a) td.c_a = coeff(t.c_mat_a, t.gamma_a);
  if (keep_b) td.c_b = coeff(t.c_mat_b, t.gamma_b);
  td.c_star = std::max(td.c_a.size() ? td.c_a.maxCoeff() : 0.0,
                       td.c_b.size() ? td.c_b.maxCoeff() : 0.0);
  return td;
}

AssumptionReport validate_assumptions(const MG1Model& model) {
  AssumptionReport rep;
  const TailActivity act = tail_activity(model);

  // Stability: stochasticity holds by construction (validate() gates all
  // loaded models); remaining surrogates are irreducibility of A and a
  // negative drift. P-irreducibility itself is not decided here.
  Matrix a_total = Matrix::Zero(model.m1, model.m1);
  for (const Matrix& blk : model.a_blocks) a_total += blk;
  if (act.a_active)
    a_total += model.tail.c_mat_a * tail_mass_series(model.tail.gamma_a,
                                                     model.tail.alpha,
                                                     model.ka() + 1);
  rep.a_irreducible = strongly_connected(a_total);
  if (!rep.a_irreducible) {
    rep.stability = {CheckStatus::fail,
                     "A = sum A_k is reducible (surrogate check for "
                     "irreducibility of the whole chain)"};
    rep.sigma = std::numeric_limits<double>::quiet_NaN();
  } else {
    const DriftReport d = drift(model);
    rep.sigma = d.sigma;
    if (d.stable) {
      rep.stability = {CheckStatus::pass,
                       "A irreducible and stochastic, sigma < 0, boundary "
                       "moments finite (surrogate check: P-irreducibility "
                       "itself is not decided)"};
    } else {
      rep.stability = {CheckStatus::fail,
                       "sigma = " + std::to_string(d.sigma) + " >= 0"};
    }
  }

  rep.aperiodicity = {CheckStatus::unknown,
                      "deferred: compute the spectral gap of the solved G "
                      "matrix (slem < 1 passes)"};

  switch (model.tail.kind) {
    case TailKind::geometric_power: {
      const TailDecay td = tail_decay(model);
      rep.r = td.r;
      rep.f_power = td.f_power;
      rep.light_tail = {CheckStatus::pass,
                        "declared geometric tail, r = " + std::to_string(rep.r)};
      rep.tail_regularity = {CheckStatus::pass,
                             "f(N) = N^" + std::to_string(rep.f_power) +
                                 (td.f_heuristic ? " (heuristic f: mixed "
                                                   "power exponents)"
                                                 : "")};
      break;
    }
    case TailKind::finite:
      rep.r = std::numeric_limits<double>::infinity();
      rep.f_power = 0.0;
      rep.light_tail = {CheckStatus::pass,
                        "finite support, light-tailed trivially"};
      rep.tail_regularity = {CheckStatus::unknown,
                             "finite support: tail coefficients degenerate to "
                             "zero, no asymptotic profile"};
      break;
    case TailKind::undeclared:
      rep.r = 0.0;
      rep.f_power = 0.0;
      rep.light_tail = {CheckStatus::unknown,
                        "no geometric envelope declared; fit the tail "
                        "numerically to decide"};
      rep.tail_regularity = {CheckStatus::unknown, "no tail declaration"};
      break;
  }
  return rep;
}

}  // namespace mg1li

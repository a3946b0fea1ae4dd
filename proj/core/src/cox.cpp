#include "survscore/cox.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

#include "survscore/csv.hpp"
#include "survscore/errors.hpp"

namespace survscore {

std::size_t CoxEncoding::n_dummies() const {
  std::size_t k = 0;
  for (const auto& v : vars) k += v.categories.size() - 1;
  return k;
}

std::ptrdiff_t CoxEncoding::dummy_index(std::size_t var, std::size_t category) const {
  std::size_t base = 0;
  for (std::size_t v = 0; v < var; ++v) base += vars[v].categories.size() - 1;
  const std::size_t ref = vars[var].reference;
  if (category == ref) return -1;
  return static_cast<std::ptrdiff_t>(base + category - (category > ref ? 1 : 0));
}

void CoxDesign::validate() const {
  if (n() == 0) throw ValidationError("cox: empty design");
  if (status.size() != n()) throw ValidationError("cox: times/status length mismatch");
  if (categories.size() != encoding.vars.size())
    throw ValidationError("cox: design/encoding variable count mismatch");
  if (std::count(status.begin(), status.end(), std::uint8_t{1}) == 0)
    throw NumericError("cox: zero events in design");
  for (std::size_t v = 0; v < encoding.vars.size(); ++v) {
    const auto& var = encoding.vars[v];
    if (var.categories.size() < 2)
      throw ValidationError("cox: variable '" + var.name + "' has fewer than two categories");
    if (var.reference >= var.categories.size())
      throw ValidationError("cox: variable '" + var.name + "' has an out-of-range reference");
    if (categories[v].size() != n())
      throw ValidationError("cox: variable '" + var.name + "' has wrong row count");
    std::vector<std::size_t> counts(var.categories.size(), 0);
    for (std::int32_t c : categories[v]) {
      if (c < 0 || static_cast<std::size_t>(c) >= var.categories.size())
        throw ValidationError("cox: variable '" + var.name + "' has an out-of-range category");
      ++counts[static_cast<std::size_t>(c)];
    }
    for (std::size_t c = 0; c < counts.size(); ++c)
      if (counts[c] == 0)
        throw ValidationError("cox: variable '" + var.name + "' category '" +
                              var.categories[c] + "' has no rows");
  }
}

namespace {

struct SortedDesign {
  // Row ids ordered by time descending; block boundaries at distinct times.
  std::vector<std::size_t> order;
  std::vector<std::size_t> block_start; // into order, one per distinct time, +sentinel
};

SortedDesign sort_design(const CoxDesign& d) {
  SortedDesign s;
  s.order.resize(d.n());
  std::iota(s.order.begin(), s.order.end(), std::size_t{0});
  std::stable_sort(s.order.begin(), s.order.end(),
                   [&](std::size_t a, std::size_t b) { return d.times[a] > d.times[b]; });
  s.block_start.push_back(0);
  for (std::size_t i = 1; i < s.order.size(); ++i)
    if (d.times[s.order[i]] != d.times[s.order[i - 1]]) s.block_start.push_back(i);
  s.block_start.push_back(s.order.size());
  return s;
}

// Dummy indices active for a row (at most one per variable).
inline void active_dummies(const CoxDesign& d, std::size_t row,
                           std::vector<std::ptrdiff_t>& out) {
  out.clear();
  for (std::size_t v = 0; v < d.encoding.vars.size(); ++v) {
    std::ptrdiff_t j = d.encoding.dummy_index(v, static_cast<std::size_t>(d.categories[v][row]));
    if (j >= 0) out.push_back(j);
  }
}

struct Accumulated {
  double loglik = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd information; // negated Hessian
};

// One pass over the risk sets, walking times descending. `want` selects how
// much derivative information to accumulate (0 = loglik, 1 = +gradient,
// 2 = +information).
Accumulated accumulate(const CoxDesign& d, const SortedDesign& s, std::span<const double> beta,
                       int want) {
  const auto k = static_cast<Eigen::Index>(d.encoding.n_dummies());
  Accumulated acc;
  acc.gradient = Eigen::VectorXd::Zero(k);
  acc.information = Eigen::MatrixXd::Zero(want >= 2 ? k : 0, want >= 2 ? k : 0);

  double sum_w = 0.0;
  Eigen::VectorXd sum_wx = Eigen::VectorXd::Zero(k);
  Eigen::MatrixXd sum_wxx = Eigen::MatrixXd::Zero(want >= 2 ? k : 0, want >= 2 ? k : 0);

  // Precomputed per-variable dummy index tables avoid re-deriving layout.
  std::vector<std::ptrdiff_t> dummies;
  dummies.reserve(d.encoding.vars.size());

  for (std::size_t b = 0; b + 1 < s.block_start.size(); ++b) {
    // All rows tied at this time enter the risk set before its events count.
    for (std::size_t i = s.block_start[b]; i < s.block_start[b + 1]; ++i) {
      const std::size_t row = s.order[i];
      active_dummies(d, row, dummies);
      double lp = 0.0;
      for (auto j : dummies) lp += beta[static_cast<std::size_t>(j)];
      const double w = std::exp(lp);
      sum_w += w;
      for (auto j : dummies) sum_wx[static_cast<Eigen::Index>(j)] += w;
      if (want >= 2)
        for (auto j1 : dummies)
          for (auto j2 : dummies)
            sum_wxx(static_cast<Eigen::Index>(j1), static_cast<Eigen::Index>(j2)) += w;
    }
    // Events at this time (Breslow: all share the same denominator).
    std::size_t deaths = 0;
    for (std::size_t i = s.block_start[b]; i < s.block_start[b + 1]; ++i) {
      const std::size_t row = s.order[i];
      if (!d.status[row]) continue;
      ++deaths;
      active_dummies(d, row, dummies);
      for (auto j : dummies) {
        acc.loglik += beta[static_cast<std::size_t>(j)];
        if (want >= 1) acc.gradient[static_cast<Eigen::Index>(j)] += 1.0;
      }
    }
    if (deaths > 0) {
      const double dd = static_cast<double>(deaths);
      acc.loglik -= dd * std::log(sum_w);
      if (want >= 1) acc.gradient -= (dd / sum_w) * sum_wx;
      if (want >= 2) {
        Eigen::VectorXd mean = sum_wx / sum_w;
        acc.information += dd * (sum_wxx / sum_w - mean * mean.transpose());
      }
    }
  }
  return acc;
}

std::pair<std::size_t, std::size_t> locate_dummy(const CoxEncoding& enc, std::size_t flat) {
  for (std::size_t v = 0; v < enc.vars.size(); ++v)
    for (std::size_t c = 0; c < enc.vars[v].categories.size(); ++c)
      if (enc.dummy_index(v, c) == static_cast<std::ptrdiff_t>(flat)) return {v, c};
  return {0, 0};
}

} // namespace

double cox_partial_loglik(const CoxDesign& design, std::span<const double> beta) {
  if (beta.size() != design.encoding.n_dummies())
    throw ValidationError("cox: beta has wrong length");
  SortedDesign s = sort_design(design);
  return accumulate(design, s, beta, 0).loglik;
}

std::vector<double> cox_gradient(const CoxDesign& design, std::span<const double> beta) {
  if (beta.size() != design.encoding.n_dummies())
    throw ValidationError("cox: beta has wrong length");
  SortedDesign s = sort_design(design);
  Eigen::VectorXd g = accumulate(design, s, beta, 1).gradient;
  return std::vector<double>(g.data(), g.data() + g.size());
}

CoxModel fit_cox(const CoxDesign& design, const CoxFitOptions& options) {
  design.validate();
  const std::size_t k = design.encoding.n_dummies();
  SortedDesign s = sort_design(design);

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
  if (!options.initial_beta.empty()) {
    if (options.initial_beta.size() != k) throw ValidationError("cox: initial_beta has wrong length");
    for (std::size_t j = 0; j < k; ++j) beta[static_cast<Eigen::Index>(j)] = options.initial_beta[j];
  }

  CoxModel model;
  model.encoding = design.encoding;

  auto check_bound = [&](const Eigen::VectorXd& b) {
    for (Eigen::Index j = 0; j < b.size(); ++j) {
      if (std::abs(b[j]) > options.beta_bound) {
        auto [v, c] = locate_dummy(design.encoding, static_cast<std::size_t>(j));
        throw NumericError("cox: monotone likelihood, coefficient diverging for variable '" +
                           design.encoding.vars[v].name + "' category '" +
                           design.encoding.vars[v].categories[c] + "'");
      }
    }
  };

  Accumulated acc = accumulate(design, s, std::span<const double>(beta.data(), k), 2);
  double loglik = acc.loglik;
  bool converged = false;
  int iter = 0;

  if (k == 0 || acc.gradient.cwiseAbs().maxCoeff() <= options.gradient_tol) {
    converged = true; // null model or an already-stationary start
  }

  while (!converged && iter < options.max_iterations) {
    ++iter;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(acc.information);
    const double max_pivot = acc.information.diagonal().maxCoeff();
    if (ldlt.info() != Eigen::Success ||
        (ldlt.vectorD().array().abs() < 1e-10 * std::max(max_pivot, 1.0)).any())
      throw NumericError("cox: singular information matrix (collinear design)");
    Eigen::VectorXd direction = ldlt.solve(acc.gradient);

    double step = 1.0;
    Eigen::VectorXd candidate;
    double candidate_loglik = -std::numeric_limits<double>::infinity();
    for (int halving = 0; halving < 30; ++halving) {
      candidate = beta + step * direction;
      candidate_loglik =
          accumulate(design, s, std::span<const double>(candidate.data(), k), 0).loglik;
      if (candidate_loglik >= loglik || !std::isfinite(loglik)) break;
      step *= 0.5;
    }
    check_bound(candidate);
    const double change = std::abs(candidate_loglik - loglik);
    const double rel_change = change / std::max(1.0, std::abs(candidate_loglik));
    beta = candidate;
    loglik = candidate_loglik;
    acc = accumulate(design, s, std::span<const double>(beta.data(), k), 2);
    if (acc.gradient.size() == 0 || acc.gradient.cwiseAbs().maxCoeff() <= options.gradient_tol ||
        rel_change <= options.loglik_rel_tol)
      converged = true;
  }
  if (!converged && k > 0)
    throw NumericError("cox: no convergence after " + std::to_string(options.max_iterations) +
                       " iterations");

  model.loglik = loglik;
  model.iterations = iter;
  model.converged = converged;

  // Standard errors from the inverse observed information.
  Eigen::VectorXd se = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
  if (k > 0) {
    Eigen::MatrixXd cov = acc.information.ldlt().solve(
        Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)));
    se = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
  }

  model.coef_by_var.resize(design.encoding.vars.size());
  model.se_by_var.resize(design.encoding.vars.size());
  for (std::size_t v = 0; v < design.encoding.vars.size(); ++v) {
    const auto& var = design.encoding.vars[v];
    model.coef_by_var[v].assign(var.categories.size(), 0.0);
    model.se_by_var[v].assign(var.categories.size(), 0.0);
    for (std::size_t c = 0; c < var.categories.size(); ++c) {
      std::ptrdiff_t j = design.encoding.dummy_index(v, c);
      if (j >= 0) {
        model.coef_by_var[v][c] = beta[static_cast<Eigen::Index>(j)];
        model.se_by_var[v][c] = se[static_cast<Eigen::Index>(j)];
      }
    }
  }

  // Breslow baseline cumulative hazard at the solution, times ascending.
  {
    std::vector<double> weights(design.n());
    for (std::size_t i = 0; i < design.n(); ++i) {
      double lp = 0.0;
      for (std::size_t v = 0; v < design.encoding.vars.size(); ++v)
        lp += model.coef_by_var[v][static_cast<std::size_t>(design.categories[v][i])];
      weights[i] = std::exp(lp);
    }
    double denom = 0.0;
    // The risk set grows as time decreases, so walk the descending blocks
    // forward and reverse the increments afterwards.
    std::vector<std::pair<double, double>> increments; // (time, d/W)
    for (std::size_t b = 0; b + 1 < s.block_start.size(); ++b) {
      for (std::size_t i = s.block_start[b]; i < s.block_start[b + 1]; ++i)
        denom += weights[s.order[i]];
      std::size_t deaths = 0;
      for (std::size_t i = s.block_start[b]; i < s.block_start[b + 1]; ++i)
        if (design.status[s.order[i]]) ++deaths;
      if (deaths > 0)
        increments.emplace_back(design.times[s.order[s.block_start[b]]],
                                static_cast<double>(deaths) / denom);
    }
    std::reverse(increments.begin(), increments.end());
    double cum = 0.0;
    model.baseline_cumhaz.initial_value = 0.0;
    for (auto& [t, inc] : increments) {
      cum += inc;
      model.baseline_cumhaz.knots.push_back(t);
      model.baseline_cumhaz.values.push_back(cum);
    }
  }
  return model;
}

double CoxModel::linear_predictor(std::span<const std::int32_t> category_per_var) const {
  if (category_per_var.size() != encoding.vars.size())
    throw ValidationError("cox: wrong number of categories for prediction");
  double lp = 0.0;
  for (std::size_t v = 0; v < encoding.vars.size(); ++v) {
    auto c = category_per_var[v];
    if (c < 0 || static_cast<std::size_t>(c) >= encoding.vars[v].categories.size())
      throw ValidationError("cox: unseen category for variable '" + encoding.vars[v].name + "'");
    lp += coef_by_var[v][static_cast<std::size_t>(c)];
  }
  return lp;
}

std::vector<double> CoxModel::flat_coefficients() const {
  std::vector<double> flat(encoding.n_dummies(), 0.0);
  for (std::size_t v = 0; v < encoding.vars.size(); ++v)
    for (std::size_t c = 0; c < encoding.vars[v].categories.size(); ++c) {
      std::ptrdiff_t j = encoding.dummy_index(v, c);
      if (j >= 0) flat[static_cast<std::size_t>(j)] = coef_by_var[v][c];
    }
  return flat;
}

StepFunction baseline_survival(const CoxModel& model) {
  StepFunction s = model.baseline_cumhaz;
  s.initial_value = 1.0;
  for (auto& v : s.values) v = std::exp(-v);
  return s;
}

double predict_survival(const CoxModel& model, std::span<const std::int32_t> category_per_var,
                        double t) {
  const double lp = model.linear_predictor(category_per_var);
  const double h0 = model.baseline_cumhaz(t);
  return std::exp(-h0 * std::exp(lp));
}

std::string CoxModel::to_json() const {
  std::ostringstream out;
  out << "{\"converged\":" << (converged ? "true" : "false")
      << ",\"iterations\":" << iterations << ",\"loglik\":" << format_double(loglik)
      << ",\"variables\":[";
  for (std::size_t v = 0; v < encoding.vars.size(); ++v) {
    if (v) out << ",";
    out << "{\"name\":\"" << encoding.vars[v].name << "\",\"reference\":"
        << encoding.vars[v].reference << ",\"categories\":[";
    for (std::size_t c = 0; c < encoding.vars[v].categories.size(); ++c) {
      if (c) out << ",";
      out << "{\"label\":\"" << encoding.vars[v].categories[c]
          << "\",\"coef\":" << format_double(coef_by_var[v][c])
          << ",\"se\":" << format_double(se_by_var[v][c]) << "}";
    }
    out << "]}";
  }
  out << "],\"baseline_cumhaz\":{\"knots\":[";
  for (std::size_t i = 0; i < baseline_cumhaz.knots.size(); ++i) {
    if (i) out << ",";
    out << format_double(baseline_cumhaz.knots[i]);
  }
  out << "],\"values\":[";
  for (std::size_t i = 0; i < baseline_cumhaz.values.size(); ++i) {
    if (i) out << ",";
    out << format_double(baseline_cumhaz.values[i]);
  }
  out << "]}}";
  return out.str();
}

} // namespace survscore

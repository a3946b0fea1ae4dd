#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "survscore/step_function.hpp"

namespace survscore {

/// Dummy encoding of a categorized design. Each variable contributes one
/// coefficient per non-reference category; the reference is pinned at 0.
struct CoxEncoding {
  struct Var {
    std::string name;
    std::vector<std::string> categories;
    std::size_t reference = 0;
  };
  std::vector<Var> vars;

  std::size_t n_dummies() const;
  /// Flat dummy index of (var, category), or -1 for the reference.
  std::ptrdiff_t dummy_index(std::size_t var, std::size_t category) const;
};

/// Rows of a categorized survival design: per variable, per row, the
/// category index into encoding.vars[v].categories.
struct CoxDesign {
  std::vector<double> times;
  std::vector<std::uint8_t> status;
  std::vector<std::vector<std::int32_t>> categories; // [var][row]
  CoxEncoding encoding;

  std::size_t n() const { return times.size(); }
  void validate() const;
};

struct CoxFitOptions {
  int max_iterations = 100;
  double gradient_tol = 1e-8;
  double loglik_rel_tol = 1e-10;
  double beta_bound = 20.0; // |beta| beyond this flags monotone likelihood
  std::vector<double> initial_beta; // empty = zeros
};

struct CoxModel {
  CoxEncoding encoding;
  std::vector<std::vector<double>> coef_by_var; // [var][category], reference = 0
  std::vector<std::vector<double>> se_by_var;   // observed-information SEs, 0 at reference
  StepFunction baseline_cumhaz;                 // Breslow estimator at the solution
  double loglik = 0.0;
  int iterations = 0;
  bool converged = false;

  double linear_predictor(std::span<const std::int32_t> category_per_var) const;
  std::vector<double> flat_coefficients() const; // dummy layout
  std::string to_json() const;
};

/// Maximizes the Breslow-tie partial likelihood by damped Newton iteration
/// with analytic gradient and Hessian. Throws NumericError on monotone
/// likelihood (a diverging coefficient, named), collinear designs, or zero
/// events; ValidationError if a category has no rows.
CoxModel fit_cox(const CoxDesign& design, const CoxFitOptions& options = {});

/// Exact Breslow log partial likelihood at the given dummy coefficients.
double cox_partial_loglik(const CoxDesign& design, std::span<const double> beta);

/// Analytic gradient of the Breslow log partial likelihood.
std::vector<double> cox_gradient(const CoxDesign& design, std::span<const double> beta);

/// S0(t) = exp(-H0(t)) from the model's Breslow cumulative baseline hazard.
StepFunction baseline_survival(const CoxModel& model);

/// S(t|x) = S0(t)^exp(lp(x)).
double predict_survival(const CoxModel& model, std::span<const std::int32_t> category_per_var,
                        double t);

} // namespace survscore

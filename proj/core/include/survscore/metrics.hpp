#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace survscore {

/// Scores are risk-oriented (scorecards) or survival-oriented (e.g. predicted
/// survival probabilities); this flag reconciles them for the rank metrics.
enum class RiskOrientation { higher_is_riskier, higher_is_safer };

/// Prediction ties in the C-index count 0 (`paper`) or 0.5 (`harrell`).
enum class TiePolicy { paper, harrell };

/// Harrell-style concordance over eligible pairs: pairs with distinct
/// observed times whose earlier time is an event. Throws NumericError when
/// no pair is eligible.
double c_index(std::span<const double> scores, std::span<const double> times,
               std::span<const std::uint8_t> status, RiskOrientation orientation,
               TiePolicy ties = TiePolicy::paper);

/// Cumulative/dynamic AUC at each grid time, using the Kaplan-Meier-based
/// estimator: Sn(c,t) = P(score>c)(1-S(t|score>c))/(1-S(t)) and
/// Sp(c,t) = P(score<=c) S(t|score<=c)/S(t) with subgroup KM curves;
/// sensitivity/specificity clipped to [0,1], ROC points sorted by false
/// positive rate, trapezoidal area. Times where the marginal KM survival is
/// 0 or 1 (no controls / no cases) yield nullopt.
std::vector<std::optional<double>> cd_auc_curve(std::span<const double> scores,
                                                std::span<const double> times,
                                                std::span<const std::uint8_t> status,
                                                std::span<const double> grid,
                                                RiskOrientation orientation);

/// Single-time C/D AUC; throws NumericError when undefined at t.
double auc_at(std::span<const double> scores, std::span<const double> times,
              std::span<const std::uint8_t> status, double t, RiskOrientation orientation);

/// Weighted average of AUC(t) over the distinct event times in (0, horizon],
/// with consecutive Kaplan-Meier increments S(t_{k-1}) - S(t_k) as weights,
/// renormalized to sum to 1 over the times where AUC is defined.
double iauc(std::span<const double> scores, std::span<const double> times,
            std::span<const std::uint8_t> status, double horizon, RiskOrientation orientation);

struct BootstrapCi {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t n_failed = 0;
  std::size_t n_total = 0;
  bool high_failure_rate() const { return n_failed * 10 > n_total; }
};

/// Percentile bootstrap over with-replacement row resamples. The metric is
/// called with the resampled row ids; resamples where it throws a survscore
/// error are skipped and counted. Fails if more than half the resamples do.
/// Replicate seeds derive from (seed, replicate), so results are identical
/// for any worker count.
BootstrapCi bootstrap_ci(const std::function<double(std::span<const std::uint32_t>)>& metric,
                         std::size_t n, std::size_t n_resamples, double level,
                         std::uint64_t seed, int threads = 1);

struct MetricWithCi {
  double estimate = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

/// Final evaluation summary: C-index, iAUC and AUC(t) at the configured
/// times, each with a bootstrap confidence interval.
struct MetricsReport {
  std::size_t m = 0; // number of variables in the evaluated score
  std::size_t n = 0;
  std::size_t n_events = 0;
  double horizon = 0.0;
  MetricWithCi concordance;
  MetricWithCi integrated_auc;
  std::vector<std::pair<double, MetricWithCi>> auc; // (time, AUC(t))
  std::string to_json() const;
};

} // namespace survscore

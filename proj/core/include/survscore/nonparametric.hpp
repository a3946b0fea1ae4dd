#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "survscore/step_function.hpp"

namespace survscore {

/// Kaplan-Meier product-limit estimate. Knots are the distinct event times;
/// `at_risk` and `events` are the risk-set size and event count at each knot.
struct KMCurve {
  StepFunction survival; // initial_value = 1
  std::vector<std::size_t> at_risk;
  std::vector<std::size_t> events;
};

struct LogRankResult {
  double statistic = 0.0; // chi-squared, df = groups - 1
  double p_value = 1.0;
};

struct SurvSample {
  std::vector<double> times;
  std::vector<std::uint8_t> status;
};

/// Product-limit estimator. Censored observations tied with events at the
/// same time are counted as at risk at that time.
KMCurve km_fit(std::span<const double> times, std::span<const std::uint8_t> status);

/// Nelson-Aalen cumulative hazard: sum of d/R over distinct event times.
StepFunction nelson_aalen(std::span<const double> times, std::span<const std::uint8_t> status);

/// Smallest knot t with S(t) <= 1-q, or nullopt if the curve never gets
/// there (report as "beyond follow-up"). q must lie in (0, 1].
std::optional<double> km_percentile(const KMCurve& curve, double q);

double km_survival_at(const KMCurve& curve, double t);

/// k-sample log-rank test with hypergeometric variance pooled over distinct
/// event times; p-value from the chi-squared upper tail with df = k-1.
LogRankResult logrank_test(const std::vector<SurvSample>& groups);

/// Writes (time, survival, at_risk, events) rows for plotting.
void save_km_curve(const KMCurve& curve, const std::string& path,
                   const std::string& provenance_comment = "");

} // namespace survscore

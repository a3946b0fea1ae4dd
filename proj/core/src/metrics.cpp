#include "survscore/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "survscore/csv.hpp"
#include "survscore/errors.hpp"
#include "survscore/nonparametric.hpp"
#include "survscore/parallel.hpp"
#include "survscore/rng.hpp"
#include "survscore/stats.hpp"

namespace survscore {

namespace {

void check_lengths(std::span<const double> scores, std::span<const double> times,
                   std::span<const std::uint8_t> status) {
  if (scores.size() != times.size() || times.size() != status.size())
    throw ValidationError("metrics: scores/times/status length mismatch");
  if (scores.empty()) throw ValidationError("metrics: empty input");
}

} // namespace

double c_index(std::span<const double> scores, std::span<const double> times,
               std::span<const std::uint8_t> status, RiskOrientation orientation,
               TiePolicy ties) {
  check_lengths(scores, times, status);
  const double sign = orientation == RiskOrientation::higher_is_riskier ? 1.0 : -1.0;
  const std::size_t n = scores.size();
  double weight = 0.0;
  std::size_t eligible = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      std::size_t early = i, late = j;
      if (times[j] < times[i]) { early = j; late = i; }
      else if (times[i] == times[j]) continue; // ties in time excluded
      if (!status[early]) continue;            // earlier time must be an event
      ++eligible;
      const double r_early = sign * scores[early];
      const double r_late = sign * scores[late];
      if (r_early > r_late) weight += 1.0;
      else if (r_early == r_late && ties == TiePolicy::harrell) weight += 0.5;
    }
  }
  if (eligible == 0) throw NumericError("c_index: no eligible pairs");
  return weight / static_cast<double>(eligible);
}

namespace {

// Survival values of the subgroup KM curve at the grid times, computed in one
// pass over time-sorted rows restricted to `member`.
void subgroup_km_at(const std::vector<std::size_t>& time_order, std::span<const double> times,
                    std::span<const std::uint8_t> status, const std::vector<std::uint8_t>& member,
                    bool want_members, std::span<const double> grid, std::vector<double>& out) {
  out.assign(grid.size(), 1.0);
  std::size_t at_risk = 0;
  for (std::size_t idx : time_order) {
    bool in = member[idx] != 0;
    if (in == want_members) ++at_risk;
  }
  double s = 1.0;
  std::size_t g = 0;
  std::size_t i = 0;
  const std::size_t n = time_order.size();
  while (i < n) {
    // Rows tied at this time: events first (all tied rows stay at risk).
    const double t = times[time_order[i]];
    std::size_t deaths = 0, removed = 0;
    for (; i < n && times[time_order[i]] == t; ++i) {
      const std::size_t row = time_order[i];
      if ((member[row] != 0) != want_members) continue;
      ++removed;
      if (status[row]) ++deaths;
    }
    while (g < grid.size() && grid[g] < t) out[g++] = s;
    if (deaths > 0 && at_risk > 0)
      s *= 1.0 - static_cast<double>(deaths) / static_cast<double>(at_risk);
    at_risk -= removed;
  }
  while (g < grid.size()) out[g++] = s;
}

} // namespace

std::vector<std::optional<double>> cd_auc_curve(std::span<const double> scores,
                                                std::span<const double> times,
                                                std::span<const std::uint8_t> status,
                                                std::span<const double> grid,
                                                RiskOrientation orientation) {
  check_lengths(scores, times, status);
  const std::size_t n = scores.size();
  const double sign = orientation == RiskOrientation::higher_is_riskier ? 1.0 : -1.0;

  std::vector<double> risk(n);
  for (std::size_t i = 0; i < n; ++i) risk[i] = sign * scores[i];

  std::vector<std::size_t> by_risk(n);
  std::iota(by_risk.begin(), by_risk.end(), std::size_t{0});
  std::stable_sort(by_risk.begin(), by_risk.end(),
                   [&](std::size_t a, std::size_t b) { return risk[a] > risk[b]; });
  std::vector<std::size_t> by_time(n);
  std::iota(by_time.begin(), by_time.end(), std::size_t{0});
  std::stable_sort(by_time.begin(), by_time.end(),
                   [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });

  // Marginal KM at the grid times.
  KMCurve marginal = km_fit(times, status);
  std::vector<double> s_marg(grid.size());
  std::vector<bool> defined(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    s_marg[g] = marginal.survival(grid[g]);
    defined[g] = s_marg[g] > 0.0 && s_marg[g] < 1.0;
  }

  // ROC points per grid time, one per threshold between distinct risks.
  std::vector<std::vector<std::pair<double, double>>> roc(grid.size());
  std::vector<std::uint8_t> member(n, 0);
  std::vector<double> s_high, s_low;
  std::size_t j = 0;
  while (j < n) {
    // Extend the high-risk prefix across tied risk values.
    const double current = risk[by_risk[j]];
    while (j < n && risk[by_risk[j]] == current) {
      member[by_risk[j]] = 1;
      ++j;
    }
    if (j == n) break; // threshold below every score: the fixed (1,1) point
    subgroup_km_at(by_time, times, status, member, true, grid, s_high);
    subgroup_km_at(by_time, times, status, member, false, grid, s_low);
    const double p_high = static_cast<double>(j) / static_cast<double>(n);
    const double p_low = 1.0 - p_high;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      if (!defined[g]) continue;
      double sn = p_high * (1.0 - s_high[g]) / (1.0 - s_marg[g]);
      double sp = p_low * s_low[g] / s_marg[g];
      sn = std::clamp(sn, 0.0, 1.0);
      sp = std::clamp(sp, 0.0, 1.0);
      roc[g].emplace_back(1.0 - sp, sn);
    }
  }

  std::vector<std::optional<double>> result(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (!defined[g]) continue;
    auto& points = roc[g];
    points.emplace_back(0.0, 0.0);
    points.emplace_back(1.0, 1.0);
    std::sort(points.begin(), points.end());
    double area = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i)
      area += (points[i].first - points[i - 1].first) *
              0.5 * (points[i].second + points[i - 1].second);
    result[g] = area;
  }
  return result;
}

double auc_at(std::span<const double> scores, std::span<const double> times,
              std::span<const std::uint8_t> status, double t, RiskOrientation orientation) {
  const double grid[1] = {t};
  auto curve = cd_auc_curve(scores, times, status, grid, orientation);
  if (!curve[0])
    throw NumericError("auc_at: undefined at t=" + format_double(t) +
                       " (marginal KM survival is 0 or 1: no cases or no controls)");
  return *curve[0];
}

double iauc(std::span<const double> scores, std::span<const double> times,
            std::span<const std::uint8_t> status, double horizon, RiskOrientation orientation) {
  check_lengths(scores, times, status);
  std::vector<double> event_times;
  for (std::size_t i = 0; i < times.size(); ++i)
    if (status[i] && times[i] > 0.0 && times[i] <= horizon) event_times.push_back(times[i]);
  std::sort(event_times.begin(), event_times.end());
  event_times.erase(std::unique(event_times.begin(), event_times.end()), event_times.end());
  if (event_times.empty())
    throw NumericError("iauc: no event times in (0, horizon]");

  auto curve = cd_auc_curve(scores, times, status, event_times, orientation);
  KMCurve marginal = km_fit(times, status);

  double numerator = 0.0, denominator = 0.0;
  double s_prev = 1.0;
  for (std::size_t k = 0; k < event_times.size(); ++k) {
    const double s_here = marginal.survival(event_times[k]);
    const double w = s_prev - s_here;
    s_prev = s_here;
    if (!curve[k]) continue; // undefined AUC drops with its weight
    numerator += w * (*curve[k]);
    denominator += w;
  }
  if (denominator <= 0.0)
    throw NumericError("iauc: AUC(t) undefined at every event time in (0, horizon]");
  return numerator / denominator;
}

BootstrapCi bootstrap_ci(const std::function<double(std::span<const std::uint32_t>)>& metric,
                         std::size_t n, std::size_t n_resamples, double level,
                         std::uint64_t seed, int threads) {
  if (n_resamples < 2) throw ValidationError("bootstrap_ci: need at least 2 resamples");
  if (!(level > 0.0 && level < 1.0)) throw ValidationError("bootstrap_ci: level must lie in (0,1)");
  if (n == 0) throw ValidationError("bootstrap_ci: empty data");

  std::vector<std::optional<double>> replicate(n_resamples);
  parallel_for(n_resamples, threads, [&](std::size_t rep) {
    Rng rng(derive_seed(seed, {rng_stream::bootstrap, rep}));
    std::vector<std::uint32_t> rows(n);
    for (std::size_t i = 0; i < n; ++i) rows[i] = static_cast<std::uint32_t>(rng.next_below(n));
    try {
      replicate[rep] = metric(rows);
    } catch (const Error&) {
      replicate[rep] = std::nullopt;
    }
  });

  std::vector<double> values;
  values.reserve(n_resamples);
  for (const auto& r : replicate)
    if (r) values.push_back(*r);

  BootstrapCi ci;
  ci.n_total = n_resamples;
  ci.n_failed = n_resamples - values.size();
  if (ci.n_failed * 2 > n_resamples)
    throw NumericError("bootstrap_ci: more than half of the resamples failed (" +
                       std::to_string(ci.n_failed) + "/" + std::to_string(n_resamples) + ")");
  std::sort(values.begin(), values.end());
  const double alpha = (1.0 - level) / 2.0;
  ci.lower = quantile_type7(values, alpha);
  ci.upper = quantile_type7(values, 1.0 - alpha);
  return ci;
}

std::string MetricsReport::to_json() const {
  std::ostringstream out;
  auto emit = [&](const MetricWithCi& v) {
    out << "{\"estimate\":" << format_double(v.estimate) << ",\"ci_lower\":"
        << format_double(v.lower) << ",\"ci_upper\":" << format_double(v.upper) << "}";
  };
  out << "{\"m\":" << m << ",\"n\":" << n << ",\"n_events\":" << n_events
      << ",\"horizon\":" << format_double(horizon) << ",\"c_index\":";
  emit(concordance);
  out << ",\"iauc\":";
  emit(integrated_auc);
  out << ",\"auc_at\":{";
  for (std::size_t i = 0; i < auc.size(); ++i) {
    if (i) out << ",";
    out << "\"" << format_double(auc[i].first) << "\":";
    emit(auc[i].second);
  }
  out << "}}";
  return out.str();
}

} // namespace survscore

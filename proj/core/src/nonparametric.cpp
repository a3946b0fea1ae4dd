#include "survscore/nonparametric.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <Eigen/Dense>
#include <boost/math/special_functions/gamma.hpp>

#include "survscore/csv.hpp"
#include "survscore/errors.hpp"

namespace survscore {

namespace {

// Distinct observed times ascending with per-time event and removal counts.
struct TimeTable {
  std::vector<double> times;
  std::vector<std::size_t> deaths;
  std::vector<std::size_t> removed; // events + censorings at this time
};

TimeTable tabulate(std::span<const double> times, std::span<const std::uint8_t> status) {
  if (times.empty()) throw ValidationError("empty survival sample");
  if (times.size() != status.size()) throw ValidationError("times/status length mismatch");
  std::vector<std::size_t> order(times.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });
  TimeTable t;
  std::size_t i = 0;
  while (i < order.size()) {
    double current = times[order[i]];
    std::size_t d = 0, r = 0;
    while (i < order.size() && times[order[i]] == current) {
      d += status[order[i]] ? 1 : 0;
      ++r;
      ++i;
    }
    t.times.push_back(current);
    t.deaths.push_back(d);
    t.removed.push_back(r);
  }
  return t;
}

} // namespace

KMCurve km_fit(std::span<const double> times, std::span<const std::uint8_t> status) {
  TimeTable t = tabulate(times, status);
  KMCurve curve;
  curve.survival.initial_value = 1.0;
  double s = 1.0;
  std::size_t at_risk = times.size();
  for (std::size_t k = 0; k < t.times.size(); ++k) {
    if (t.deaths[k] > 0) {
      s *= 1.0 - static_cast<double>(t.deaths[k]) / static_cast<double>(at_risk);
      curve.survival.knots.push_back(t.times[k]);
      curve.survival.values.push_back(s);
      curve.at_risk.push_back(at_risk);
      curve.events.push_back(t.deaths[k]);
    }
    at_risk -= t.removed[k];
  }
  return curve;
}

StepFunction nelson_aalen(std::span<const double> times, std::span<const std::uint8_t> status) {
  TimeTable t = tabulate(times, status);
  StepFunction h;
  h.initial_value = 0.0;
  double cum = 0.0;
  std::size_t at_risk = times.size();
  for (std::size_t k = 0; k < t.times.size(); ++k) {
    if (t.deaths[k] > 0) {
      cum += static_cast<double>(t.deaths[k]) / static_cast<double>(at_risk);
      h.knots.push_back(t.times[k]);
      h.values.push_back(cum);
    }
    at_risk -= t.removed[k];
  }
  return h;
}

std::optional<double> km_percentile(const KMCurve& curve, double q) {
  if (!(q > 0.0 && q <= 1.0)) throw ValidationError("km_percentile: q must lie in (0,1]");
  const double target = 1.0 - q;
  for (std::size_t k = 0; k < curve.survival.size(); ++k)
    if (curve.survival.values[k] <= target) return curve.survival.knots[k];
  return std::nullopt;
}

double km_survival_at(const KMCurve& curve, double t) { return curve.survival(t); }

LogRankResult logrank_test(const std::vector<SurvSample>& groups) {
  const std::size_t k = groups.size();
  if (k < 2) throw ValidationError("logrank_test: need at least two groups");

  // Pool all rows with group ids.
  std::vector<double> times;
  std::vector<std::uint8_t> status;
  std::vector<std::size_t> group;
  for (std::size_t g = 0; g < k; ++g) {
    if (groups[g].times.empty())
      throw ValidationError("logrank_test: group " + std::to_string(g) + " is empty");
    if (groups[g].times.size() != groups[g].status.size())
      throw ValidationError("logrank_test: times/status length mismatch");
    for (std::size_t i = 0; i < groups[g].times.size(); ++i) {
      times.push_back(groups[g].times[i]);
      status.push_back(groups[g].status[i]);
      group.push_back(g);
    }
  }
  if (std::count(status.begin(), status.end(), std::uint8_t{1}) == 0)
    throw ValidationError("logrank_test: no events in any group");

  std::vector<std::size_t> order(times.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });

  std::vector<double> at_risk(k, 0.0);
  for (std::size_t g : group) at_risk[g] += 1.0;
  double total_risk = static_cast<double>(times.size());

  Eigen::VectorXd observed_minus_expected = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k - 1));
  Eigen::MatrixXd covariance = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k - 1),
                                                     static_cast<Eigen::Index>(k - 1));

  std::size_t i = 0;
  std::vector<double> deaths(k);
  std::vector<double> removed(k);
  while (i < order.size()) {
    const double current = times[order[i]];
    std::fill(deaths.begin(), deaths.end(), 0.0);
    std::fill(removed.begin(), removed.end(), 0.0);
    double d_total = 0.0;
    while (i < order.size() && times[order[i]] == current) {
      std::size_t g = group[order[i]];
      if (status[order[i]]) {
        deaths[g] += 1.0;
        d_total += 1.0;
      }
      removed[g] += 1.0;
      ++i;
    }
    if (d_total > 0.0) {
      for (std::size_t g = 0; g + 1 < k; ++g)
        observed_minus_expected[static_cast<Eigen::Index>(g)] +=
            deaths[g] - d_total * at_risk[g] / total_risk;
      if (total_risk > 1.0) {
        const double vscale = d_total * (total_risk - d_total) / (total_risk - 1.0);
        for (std::size_t g = 0; g + 1 < k; ++g) {
          for (std::size_t h = 0; h + 1 < k; ++h) {
            double delta = (g == h) ? 1.0 : 0.0;
            covariance(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(h)) +=
                vscale * (at_risk[g] / total_risk) * (delta - at_risk[h] / total_risk);
          }
        }
      }
    }
    for (std::size_t g = 0; g < k; ++g) at_risk[g] -= removed[g];
    total_risk -= std::accumulate(removed.begin(), removed.end(), 0.0);
  }

  LogRankResult result;
  // Rank-revealing pseudo-inverse handles degenerate covariance (e.g. one
  // group never at risk at any event time).
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(covariance);
  Eigen::VectorXd solved = cod.pseudoInverse() * observed_minus_expected;
  result.statistic = observed_minus_expected.dot(solved);
  if (result.statistic < 0.0) result.statistic = 0.0;
  const double df = static_cast<double>(k - 1);
  result.p_value = boost::math::gamma_q(df / 2.0, result.statistic / 2.0);
  return result;
}

void save_km_curve(const KMCurve& curve, const std::string& path,
                   const std::string& provenance_comment) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write file: " + path);
  if (!provenance_comment.empty()) out << "# " << provenance_comment << "\n";
  out << "time,survival,at_risk,events\n";
  for (std::size_t i = 0; i < curve.survival.size(); ++i) {
    out << format_double(curve.survival.knots[i]) << "," << format_double(curve.survival.values[i])
        << "," << curve.at_risk[i] << "," << curve.events[i] << "\n";
  }
  if (!out) throw IoError("write failed: " + path);
}

} // namespace survscore

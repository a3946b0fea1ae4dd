#pragma once

// Independent reference implementations for checking the library. Everything
// here is written in the most literal hand-rule form (quadratic scans, no
// shared code with the library paths under test).

#include <cstdint>
#include <vector>

#include "survscore/rng.hpp"

namespace oracle {

struct Curve {
  std::vector<double> times;  // distinct event times, ascending
  std::vector<double> values; // estimate at each time
};

// Product-limit rule: at each distinct event time, S *= (1 - d/R).
Curve km(const std::vector<double>& times, const std::vector<std::uint8_t>& status);

// Cumulative hazard rule: at each distinct event time, H += d/R.
Curve nelson_aalen(const std::vector<double>& times, const std::vector<std::uint8_t>& status);

// Two-sample log-rank chi-squared from the O-E/V accumulation.
double logrank_two_group(const std::vector<double>& times1, const std::vector<std::uint8_t>& status1,
                         const std::vector<double>& times2, const std::vector<std::uint8_t>& status2);

// Breslow log partial likelihood for a single covariate, O(n^2) scan.
double breslow_loglik(const std::vector<double>& times, const std::vector<std::uint8_t>& status,
                      const std::vector<double>& x, double beta);

// Argmax of breslow_loglik over the grid [lo, hi] with the given step.
double cox_grid_search(const std::vector<double>& times, const std::vector<std::uint8_t>& status,
                       const std::vector<double>& x, double lo, double hi, double step);

struct ConcordanceTally {
  long long concordant = 0;
  long long discordant = 0;
  long long tied = 0;
  long long eligible = 0;
};

// Exhaustive pairwise concordance, higher score = riskier.
ConcordanceTally concordance(const std::vector<double>& scores, const std::vector<double>& times,
                             const std::vector<std::uint8_t>& status);

// Case/control rank AUC, prediction ties counted 1/2.
double pairwise_auc(const std::vector<double>& scores, const std::vector<std::uint8_t>& is_case);

// Kendall rank correlation (tau-a over non-tied pairs of either ranking).
double kendall_tau(const std::vector<double>& a, const std::vector<double>& b);

struct Sample {
  std::vector<double> times;
  std::vector<std::uint8_t> status;
};

// Random right-censored sample; integer times force ties when ties=true.
Sample random_sample(survscore::Rng& rng, std::size_t n_max, bool ties, double event_prob = 0.6);

} // namespace oracle

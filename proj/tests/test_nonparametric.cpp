#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "survscore/errors.hpp"
#include "survscore/nonparametric.hpp"
#include "survscore/rng.hpp"

using namespace survscore;

TEST_CASE("km_fit hand examples") {
  {
    std::vector<double> t = {1, 2, 3};
    std::vector<std::uint8_t> s = {1, 1, 1};
    auto km = km_fit(t, s);
    REQUIRE(km.survival.size() == 3);
    CHECK(km.survival(1) == doctest::Approx(2.0 / 3).epsilon(1e-15));
    CHECK(km.survival(2) == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(km.survival(3) == 0.0);
    CHECK(km.at_risk == std::vector<std::size_t>{3, 2, 1});
    CHECK(km.events == std::vector<std::size_t>{1, 1, 1});
  }
  {
    std::vector<double> t = {1, 2};
    std::vector<std::uint8_t> s = {0, 0};
    auto km = km_fit(t, s);
    CHECK(km.survival.size() == 0);
    CHECK(km.survival(5) == 1.0);
  }
  {
    std::vector<double> t = {1, 2};
    std::vector<std::uint8_t> s = {1, 0};
    auto km = km_fit(t, s);
    CHECK(km.survival(1) == 0.5);
    CHECK(km.survival(2) == 0.5); // censoring does not drop S
  }
  CHECK_THROWS_AS(km_fit({}, {}), ValidationError);
}

TEST_CASE("nelson_aalen hand examples") {
  {
    std::vector<double> t = {1, 2};
    std::vector<std::uint8_t> s = {1, 1};
    auto na = nelson_aalen(t, s);
    CHECK(na(1) == 0.5);
    CHECK(na(2) == 1.5);
    CHECK(std::exp(-na(2)) == doctest::Approx(std::exp(-1.5)).epsilon(1e-15));
  }
  {
    std::vector<double> t = {1, 2, 3};
    std::vector<std::uint8_t> s = {0, 0, 0};
    auto na = nelson_aalen(t, s);
    CHECK(na.size() == 0);
    CHECK(na(10) == 0.0);
  }
}

TEST_CASE("km_fit and nelson_aalen match the hand-rule oracle exactly") {
  Rng rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    auto sample = oracle::random_sample(rng, 30, trial % 2 == 0);
    auto km = km_fit(sample.times, sample.status);
    auto ref_km = oracle::km(sample.times, sample.status);
    REQUIRE(km.survival.knots == ref_km.times);
    CHECK(km.survival.values == ref_km.values); // bitwise

    auto na = nelson_aalen(sample.times, sample.status);
    auto ref_na = oracle::nelson_aalen(sample.times, sample.status);
    REQUIRE(na.knots == ref_na.times);
    CHECK(na.values == ref_na.values);
  }
}

TEST_CASE("km survival is non-increasing in [0,1]; NA is non-decreasing") {
  Rng rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    auto sample = oracle::random_sample(rng, 40, trial % 2 == 0);
    auto km = km_fit(sample.times, sample.status);
    double prev = 1.0;
    for (double v : km.survival.values) {
      CHECK(v <= prev);
      CHECK(v >= 0.0);
      prev = v;
    }
    auto na = nelson_aalen(sample.times, sample.status);
    prev = 0.0;
    for (double v : na.values) {
      CHECK(v >= prev);
      prev = v;
    }
  }
}

TEST_CASE("with zero censoring km equals the empirical survival fraction") {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    auto sample = oracle::random_sample(rng, 30, true, 1.0);
    std::fill(sample.status.begin(), sample.status.end(), std::uint8_t{1});
    auto km = km_fit(sample.times, sample.status);
    for (double t : {1.0, 2.5, 4.0, 9.0}) {
      double surviving = 0;
      for (double ti : sample.times)
        if (ti > t) surviving += 1;
      CHECK(km.survival(t) == doctest::Approx(surviving / sample.times.size()).epsilon(1e-12));
    }
  }
}

TEST_CASE("km_percentile") {
  KMCurve curve;
  curve.survival.initial_value = 1.0;
  curve.survival.knots = {2, 5};
  curve.survival.values = {0.9, 0.4};
  curve.at_risk = {10, 9};
  curve.events = {1, 5};
  CHECK(km_percentile(curve, 0.5) == 5.0);
  CHECK(km_percentile(curve, 0.1) == 2.0);

  KMCurve shallow;
  shallow.survival.initial_value = 1.0;
  shallow.survival.knots = {3};
  shallow.survival.values = {0.95};
  shallow.at_risk = {20};
  shallow.events = {1};
  CHECK_FALSE(km_percentile(shallow, 0.25).has_value()); // beyond follow-up

  std::vector<double> t = {1, 2, 3};
  std::vector<std::uint8_t> s = {1, 1, 1};
  auto km = km_fit(t, s);
  CHECK(km_percentile(km, 1.0) == 3.0); // S reaches 0 at the last event

  CHECK_THROWS_AS(km_percentile(curve, 0.0), ValidationError);
  CHECK_THROWS_AS(km_percentile(curve, 1.5), ValidationError);
}

TEST_CASE("km_survival_at right-continuity") {
  std::vector<double> t = {2, 4};
  std::vector<std::uint8_t> s = {1, 1};
  auto km = km_fit(t, s);
  CHECK(km_survival_at(km, 0) == 1.0);
  CHECK(km_survival_at(km, 3) == 0.5);   // between knots: value at the previous knot
  CHECK(km_survival_at(km, 100) == 0.0); // beyond the last knot: last value
}

TEST_CASE("logrank_test contract cases") {
  SurvSample a{{1, 2, 3, 4}, {1, 0, 1, 0}};
  SUBCASE("identical groups give statistic 0, p 1") {
    auto r = logrank_test({a, a});
    CHECK(r.statistic == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.p_value == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("single group or no events error") {
    CHECK_THROWS_AS(logrank_test({a}), ValidationError);
    SurvSample censored{{1, 2}, {0, 0}};
    CHECK_THROWS_AS(logrank_test({censored, censored}), ValidationError);
  }
  SUBCASE("one group all censored still yields a finite statistic") {
    SurvSample censored{{2, 3, 5}, {0, 0, 0}};
    auto r = logrank_test({a, censored});
    CHECK(std::isfinite(r.statistic));
    CHECK(r.statistic >= 0.0);
    CHECK(r.statistic ==
          doctest::Approx(oracle::logrank_two_group(a.times, a.status, censored.times,
                                                    censored.status))
              .epsilon(1e-12));
  }
}

TEST_CASE("two-sample logrank matches the O-E/V oracle") {
  {
    SurvSample a{{1, 2}, {1, 1}};
    SurvSample b{{3, 4}, {1, 1}};
    auto r = logrank_test({a, b});
    CHECK(r.statistic ==
          doctest::Approx(oracle::logrank_two_group(a.times, a.status, b.times, b.status))
              .epsilon(1e-12));
    CHECK(r.statistic > 0.0);
  }
  Rng rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    auto g1 = oracle::random_sample(rng, 20, trial % 2 == 0);
    auto g2 = oracle::random_sample(rng, 20, trial % 3 == 0);
    SurvSample a{g1.times, g1.status};
    SurvSample b{g2.times, g2.status};
    auto r = logrank_test({a, b});
    const double ref = oracle::logrank_two_group(g1.times, g1.status, g2.times, g2.status);
    CHECK(r.statistic == doctest::Approx(ref).epsilon(1e-10));
  }
}

TEST_CASE("logrank is invariant under group relabeling and time transforms") {
  Rng rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    auto g1 = oracle::random_sample(rng, 15, true);
    auto g2 = oracle::random_sample(rng, 15, true);
    auto g3 = oracle::random_sample(rng, 15, true);
    auto r123 = logrank_test({{g1.times, g1.status}, {g2.times, g2.status}, {g3.times, g3.status}});
    auto r312 = logrank_test({{g3.times, g3.status}, {g1.times, g1.status}, {g2.times, g2.status}});
    CHECK(r123.statistic == doctest::Approx(r312.statistic).epsilon(1e-9));

    auto warp = [](std::vector<double> t) {
      for (double& x : t) x = std::exp(x / 4.0); // strictly increasing
      return t;
    };
    auto rw = logrank_test({{warp(g1.times), g1.status},
                            {warp(g2.times), g2.status},
                            {warp(g3.times), g3.status}});
    CHECK(rw.statistic == doctest::Approx(r123.statistic).epsilon(1e-9));
  }
}

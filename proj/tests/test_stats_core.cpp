#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <vector>

#include "muxphoton/errors.hpp"
#include "muxphoton/stats_core.hpp"

using namespace muxphoton;

namespace {

const PairStatistics kFamilies[] = {PairStatistics::Thermal, PairStatistics::Multimode, PairStatistics::Poisson};

PairSource make(PairStatistics f, double p, std::int64_t s = 20) { return {p, f, s}; }

}  // namespace

TEST_CASE("pair_pmf closed forms") {
  CHECK(pair_pmf(make(PairStatistics::Thermal, 0.0), 0) == 1.0);
  CHECK(pair_pmf(make(PairStatistics::Thermal, 0.0), 3) == 0.0);
  CHECK(pair_pmf(make(PairStatistics::Poisson, 0.07), 0) == doctest::Approx(std::exp(-0.07)).epsilon(1e-15));
  CHECK(pair_pmf(make(PairStatistics::Thermal, 1.0), 1) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("multimode pmf matches exact rational evaluation") {
  // q = 7/400; q^2 / (1 + q)^22 * C(21, 2), evaluated with exact fractions
  // and a 40-digit float conversion.
  const double expected = 0.04390744827344022294;
  CHECK(pair_pmf(make(PairStatistics::Multimode, 0.35, 20), 2) == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("invalid sources are rejected") {
  CHECK_THROWS_AS(pair_pmf(make(PairStatistics::Poisson, -0.1), 0), ParameterError);
  CHECK_THROWS_AS(pair_pmf(make(PairStatistics::Multimode, 0.1, 0), 0), ParameterError);
  CHECK_THROWS_AS(pair_pmf(make(PairStatistics::Poisson, 0.1), -1), ParameterError);
  CHECK_THROWS_AS(truncated_pmf(make(PairStatistics::Poisson, 0.1), 0.0), ParameterError);
  CHECK_THROWS_AS(truncated_pmf(make(PairStatistics::Poisson, 0.1), 1.0), ParameterError);
}

TEST_CASE("truncation picks the minimal support") {
  const auto thermal = truncated_pmf(make(PairStatistics::Thermal, 1.0), 1e-6);
  CHECK(thermal.max_index() == 19);
  CHECK(thermal.tail_bound <= 1e-6);
  CHECK(thermal.tail_bound == doctest::Approx(std::pow(0.5, 20)).epsilon(1e-12));

  const auto poisson = truncated_pmf(make(PairStatistics::Poisson, 0.35), 1e-12);
  CHECK(poisson.total() >= 1.0 - 1e-12);

  const auto mm = truncated_pmf(make(PairStatistics::Multimode, 0.35, 20), 1e-12);
  CHECK(mm.total() >= 1.0 - 1e-12);
  CHECK(mm.total() <= 1.0 + 1e-12);
}

TEST_CASE("normalization and mean for every family") {
  for (const auto f : kFamilies) {
    for (const double p : {0.01, 0.07, 0.35, 1.0}) {
      CAPTURE(p);
      const auto dist = truncated_pmf(make(f, p), 1e-12);
      CHECK(std::abs(dist.total() - 1.0) <= 1e-9);
      CHECK(dist.total() <= 1.0 + 1e-12);
      CHECK(dist.tail_bound <= 1e-12);
      CHECK(std::abs(dist.mean() - p) <= 1e-9);
      for (double x : dist.probs) CHECK((x >= 0.0 && x <= 1.0));
    }
  }
}

TEST_CASE("multimode approaches Poisson for many modes") {
  double worst = 0.0;
  for (std::int64_t k = 0; k <= 30; ++k) {
    worst = std::max(worst, std::abs(pair_pmf(make(PairStatistics::Multimode, 0.35, 1'000'000), k) -
                                     pair_pmf(make(PairStatistics::Poisson, 0.35), k)));
  }
  CHECK(worst <= 1e-5);
}

TEST_CASE("single-mode multimode equals thermal") {
  for (const double p : {0.07, 0.35, 1.0, 3.0}) {
    for (std::int64_t k = 0; k <= 40; ++k) {
      const double a = pair_pmf(make(PairStatistics::Multimode, p, 1), k);
      const double b = pair_pmf(make(PairStatistics::Thermal, p), k);
      CHECK(std::abs(a - b) <= 1e-15 * b);
    }
  }
}

TEST_CASE("modes_from_purity") {
  CHECK(modes_from_purity(1.0) == 1);
  CHECK(modes_from_purity(0.05) == 20);
  CHECK(modes_from_purity(0.5) == 2);
  CHECK(modes_from_purity(0.9) == 1);
  CHECK_THROWS_AS(modes_from_purity(0.0), ParameterError);
  CHECK_THROWS_AS(modes_from_purity(1.5), ParameterError);
}

TEST_CASE("sampling: zero mean and seeded reproducibility") {
  for (const auto f : kFamilies) {
    RandomStream rng(7);
    for (int i = 0; i < 1000; ++i) CHECK(sample_pair_count(make(f, 0.0), rng) == 0);

    RandomStream a(42);
    RandomStream b(42);
    const PairSampler cached(make(f, 0.35));
    for (int i = 0; i < 1000; ++i) {
      CHECK(sample_pair_count(make(f, 0.35), a) == sample_pair_count(make(f, 0.35), b));
    }
    RandomStream c(43);
    RandomStream d(43);
    for (int i = 0; i < 1000; ++i) CHECK(cached(c) == cached(d));
  }
}

TEST_CASE("Poisson sample mean within 5 sigma") {
  const auto src = make(PairStatistics::Poisson, 0.35);
  RandomStream rng(2024);
  const int n = 1'000'000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += static_cast<double>(sample_pair_count(src, rng));
  const double sigma = std::sqrt(0.35 / n);
  CHECK(std::abs(sum / n - 0.35) <= 5.0 * sigma);
}

namespace {

// Pearson statistic with bins merged until every expected count is >= 5.
bool chi_square_passes(const std::vector<std::int64_t>& counts, const PairSource& src, int n, double alpha) {
  double stat = 0.0;
  int bins = 0;
  double obs_acc = 0.0;
  double exp_acc = 0.0;
  double exp_remaining = n;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    obs_acc += static_cast<double>(counts[k]);
    const double e = n * pair_pmf(src, static_cast<std::int64_t>(k));
    exp_acc += e;
    exp_remaining -= e;
    if (exp_acc >= 5.0 && exp_remaining >= 5.0) {
      stat += (obs_acc - exp_acc) * (obs_acc - exp_acc) / exp_acc;
      ++bins;
      obs_acc = exp_acc = 0.0;
    }
  }
  // Final bin: everything left, including mass beyond the table.
  exp_acc += exp_remaining;
  stat += (obs_acc - exp_acc) * (obs_acc - exp_acc) / exp_acc;
  ++bins;
  const boost::math::chi_squared dist(bins - 1);
  return stat <= boost::math::quantile(boost::math::complement(dist, alpha));
}

}  // namespace

TEST_CASE("thermal sampler passes chi-square goodness of fit") {
  const auto src = make(PairStatistics::Thermal, 0.5);
  const int n = 1'000'000;
  std::vector<std::int64_t> counts(60, 0);

  RandomStream rng(99);
  for (int i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(sample_pair_count(src, rng));
    if (k < counts.size()) ++counts[k];
  }
  CHECK(chi_square_passes(counts, src, n, 0.001));

  std::fill(counts.begin(), counts.end(), 0);
  const PairSampler cached(src);
  RandomStream rng2(100);
  for (int i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(cached(rng2));
    if (k < counts.size()) ++counts[k];
  }
  CHECK(chi_square_passes(counts, src, n, 0.001));
}

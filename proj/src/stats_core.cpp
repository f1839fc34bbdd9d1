#include "muxphoton/stats_core.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "muxphoton/errors.hpp"

namespace muxphoton {

namespace {

// Safety cap on truncation support; far beyond anything a sane tol needs.
constexpr std::int64_t kMaxSupport = 1'000'000;

// log C(k + s - 1, k) as a sum of log((s - 1 + i) / i). Exact zero when s == 1.
double log_multiset_coefficient(std::int64_t k, std::int64_t s) {
  if (k < 4096) {
    double acc = 0.0;
    for (std::int64_t i = 1; i <= k; ++i) {
      acc += std::log1p(static_cast<double>(s - 1) / static_cast<double>(i));
    }
    return acc;
  }
  const auto kd = static_cast<double>(k);
  const auto sd = static_cast<double>(s);
  return std::lgamma(kd + sd) - std::lgamma(kd + 1.0) - std::lgamma(sd);
}

}  // namespace

std::string_view to_string(PairStatistics s) {
  switch (s) {
    case PairStatistics::Thermal: return "thermal";
    case PairStatistics::Multimode: return "multimode";
    case PairStatistics::Poisson: return "poisson";
  }
  return "unknown";
}

PairStatistics pair_statistics_from_string(std::string_view name) {
  if (name == "thermal") return PairStatistics::Thermal;
  if (name == "multimode") return PairStatistics::Multimode;
  if (name == "poisson") return PairStatistics::Poisson;
  throw ParameterError("unknown pair statistics '" + std::string(name) + "'");
}

void PairSource::validate() const {
  if (!(mean_pairs >= 0.0) || !std::isfinite(mean_pairs)) {
    throw ParameterError("mean_pairs must be a finite value >= 0, got " + std::to_string(mean_pairs));
  }
  if (schmidt_modes < 1) {
    throw ParameterError("schmidt_modes must be >= 1, got " + std::to_string(schmidt_modes));
  }
}

double PhotonNumberDistribution::total() const {
  return std::accumulate(probs.begin(), probs.end(), 0.0);
}

double PhotonNumberDistribution::mean() const {
  double acc = 0.0;
  for (std::size_t m = 1; m < probs.size(); ++m) acc += static_cast<double>(m) * probs[m];
  return acc;
}

double pair_pmf(const PairSource& source, std::int64_t k) {
  source.validate();
  if (k < 0) throw ParameterError("pair count must be >= 0");
  const double p = source.mean_pairs;
  if (p == 0.0) return k == 0 ? 1.0 : 0.0;
  const auto kd = static_cast<double>(k);
  switch (source.statistics) {
    case PairStatistics::Thermal:
      return std::exp(kd * std::log(p) - (kd + 1.0) * std::log1p(p));
    case PairStatistics::Multimode: {
      const auto s = static_cast<double>(source.schmidt_modes);
      const double q = p / s;
      return std::exp(kd * std::log(q) - (kd + s) * std::log1p(q) +
                      log_multiset_coefficient(k, source.schmidt_modes));
    }
    case PairStatistics::Poisson:
      return std::exp(-p + kd * std::log(p) - std::lgamma(kd + 1.0));
  }
  return 0.0;
}

double pair_pmf_ratio(const PairSource& source, std::int64_t k) {
  const double p = source.mean_pairs;
  const auto kd = static_cast<double>(k);
  switch (source.statistics) {
    case PairStatistics::Thermal:
      return p / (1.0 + p);
    case PairStatistics::Multimode: {
      const auto s = static_cast<double>(source.schmidt_modes);
      const double q = p / s;
      return (kd + s) / (kd + 1.0) * q / (1.0 + q);
    }
    case PairStatistics::Poisson:
      return p / (kd + 1.0);
  }
  return 0.0;
}

PhotonNumberDistribution truncated_pmf(const PairSource& source, double tol) {
  source.validate();
  if (!(tol > 0.0 && tol < 1.0)) throw ParameterError("truncation tol must lie in (0, 1)");

  PhotonNumberDistribution dist;
  if (source.mean_pairs == 0.0) {
    dist.probs = {1.0};
    return dist;
  }

  // Tail beyond k is at most pmf(k+1) / (1 - ratio(k+1)) once the ratio drops
  // below one; the ratio is nonincreasing so the geometric series dominates.
  for (std::int64_t k = 0; k < kMaxSupport; ++k) {
    dist.probs.push_back(pair_pmf(source, k));
    const double next = pair_pmf(source, k + 1);
    const double rho = pair_pmf_ratio(source, k + 1);
    if (rho < 1.0) {
      const double bound = next / (1.0 - rho);
      if (bound <= tol) {
        dist.tail_bound = bound;
        return dist;
      }
    }
  }
  throw ParameterError("truncation did not converge; mean_pairs too large for tol");
}

std::int64_t sample_pair_count(const PairSource& source, RandomStream& rng) {
  source.validate();
  if (source.mean_pairs == 0.0) return 0;
  double u = rng.uniform();
  double pk = pair_pmf(source, 0);
  std::int64_t k = 0;
  while (u >= pk && pk > 0.0) {
    u -= pk;
    pk *= pair_pmf_ratio(source, k);
    ++k;
  }
  return k;
}

std::int64_t modes_from_purity(double purity) {
  if (!(purity > 0.0 && purity <= 1.0)) {
    throw ParameterError("purity must lie in (0, 1], got " + std::to_string(purity));
  }
  const auto s = static_cast<std::int64_t>(std::llround(1.0 / purity));
  return s < 1 ? 1 : s;
}

PairSampler::PairSampler(const PairSource& source, double tol) : source_(source) {
  const auto dist = truncated_pmf(source, tol);
  cdf_.resize(dist.probs.size());
  std::partial_sum(dist.probs.begin(), dist.probs.end(), cdf_.begin());
}

std::int64_t PairSampler::operator()(RandomStream& rng) const {
  const double u = rng.uniform();
  // Slot occupancy is small; a linear scan beats bisection here.
  for (std::size_t k = 0; k < cdf_.size(); ++k) {
    if (u < cdf_[k]) return static_cast<std::int64_t>(k);
  }
  // Mass beyond the table (<= tol): continue the exact recursion.
  double acc = cdf_.back();
  auto k = static_cast<std::int64_t>(cdf_.size()) - 1;
  double pk = pair_pmf(source_, k);
  while (true) {
    pk *= pair_pmf_ratio(source_, k);
    ++k;
    acc += pk;
    if (u < acc || pk == 0.0) return k;
  }
}

}  // namespace muxphoton

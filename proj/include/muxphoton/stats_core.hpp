#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "muxphoton/rng.hpp"

namespace muxphoton {

inline constexpr double kDefaultTruncationTol = 1e-12;

/// Photon-number statistics of the pair source in one time slot.
enum class PairStatistics { Thermal, Multimode, Poisson };

std::string_view to_string(PairStatistics s);
PairStatistics pair_statistics_from_string(std::string_view name);

/// Pair-generation model for a single pump pulse.
///
/// `mean_pairs` is the mean number of pairs per slot. `schmidt_modes` is only
/// consulted for Multimode statistics, where each mode is thermal with mean
/// mean_pairs / schmidt_modes.
struct PairSource {
  double mean_pairs = 0.0;
  PairStatistics statistics = PairStatistics::Poisson;
  std::int64_t schmidt_modes = 1;

  void validate() const;
  bool operator==(const PairSource&) const = default;
};

/// Truncated distribution over photon (or pair) number.
///
/// `tail_bound` bounds the mass dropped beyond probs.size() - 1.
struct PhotonNumberDistribution {
  std::vector<double> probs;
  double tail_bound = 0.0;

  std::size_t max_index() const { return probs.empty() ? 0 : probs.size() - 1; }
  double operator[](std::size_t m) const { return m < probs.size() ? probs[m] : 0.0; }
  double total() const;
  double mean() const;
};

/// Probability of exactly k pairs in one slot.
double pair_pmf(const PairSource& source, std::int64_t k);

/// Ratio pair_pmf(k + 1) / pair_pmf(k). Nonincreasing in k for every family.
double pair_pmf_ratio(const PairSource& source, std::int64_t k);

/// Smallest-support truncation whose analytic tail bound does not exceed tol.
PhotonNumberDistribution truncated_pmf(const PairSource& source, double tol = kDefaultTruncationTol);

/// Draws a pair count by sequential inversion of the pmf.
std::int64_t sample_pair_count(const PairSource& source, RandomStream& rng);

/// Effective Schmidt-mode count for a heralded-state purity Tr(rho^2).
std::int64_t modes_from_purity(double purity);

/// Inversion sampler with a cached cumulative table; for hot loops.
class PairSampler {
 public:
  explicit PairSampler(const PairSource& source, double tol = kDefaultTruncationTol);

  std::int64_t operator()(RandomStream& rng) const;

  const PairSource& source() const { return source_; }

 private:
  PairSource source_;
  std::vector<double> cdf_;
};

}  // namespace muxphoton

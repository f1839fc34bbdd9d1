#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "muxphoton/rng.hpp"
#include "muxphoton/stats_core.hpp"

namespace muxphoton {

/// Which cascade outcomes count as a herald.
///
/// ExactlyOne: one cascade detector fires (multi-click slots are rejected).
/// AnyClick: at least one detector fires.
enum class HeraldRule { ExactlyOne, AnyClick };

std::string_view to_string(HeraldRule r);
HeraldRule herald_rule_from_string(std::string_view name);

/// Signal-arm trigger: a cascade of D bucket detectors, or a photon-number
/// resolving detector when `cascade_size` is empty.
struct HeraldDetector {
  double efficiency = 1.0;
  std::optional<std::int64_t> cascade_size;  ///< nullopt means PNR
  HeraldRule rule = HeraldRule::ExactlyOne;

  bool is_pnr() const { return !cascade_size.has_value(); }
  void validate() const;
  bool operator==(const HeraldDetector&) const = default;
};

/// P_d(1|k): probability that a slot holding k pairs is heralded.
///
/// For a finite cascade this is the binomial sum over the l surviving photons
/// weighted by (1/D)^(l-1), the chance they all land on one detector. The PNR
/// form is eta (1 - eta)^(k - 1).
double p_herald_given_k(const HeraldDetector& det, std::int64_t k);

/// Per-slot herald probability alpha = sum_k P_c(k) P_d(1|k), truncation error <= tol.
double herald_alpha(const PairSource& source, const HeraldDetector& det,
                    double tol = kDefaultTruncationTol);

/// Number of cascade detectors that fire when k signal photons arrive. Each
/// photon survives with probability `efficiency` and picks one of D detectors
/// uniformly. For PNR the count of detected photons is returned.
std::int64_t sample_clicks(const HeraldDetector& det, std::int64_t k, RandomStream& rng);

/// Whether a fired-detector count heralds under the detector's rule.
inline bool is_herald(const HeraldDetector& det, std::int64_t fired) {
  return det.rule == HeraldRule::AnyClick ? fired >= 1 : fired == 1;
}

}  // namespace muxphoton

#include "muxphoton/herald_detect.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>
#include <vector>

#include "muxphoton/errors.hpp"

namespace muxphoton {

std::string_view to_string(HeraldRule r) {
  return r == HeraldRule::AnyClick ? "any-click" : "exactly-one";
}

HeraldRule herald_rule_from_string(std::string_view name) {
  if (name == "exactly-one") return HeraldRule::ExactlyOne;
  if (name == "any-click") return HeraldRule::AnyClick;
  throw ParameterError("unknown herald rule '" + std::string(name) + "'");
}

void HeraldDetector::validate() const {
  if (!(efficiency >= 0.0 && efficiency <= 1.0)) {
    throw ParameterError("herald efficiency must lie in [0, 1], got " + std::to_string(efficiency));
  }
  if (cascade_size && *cascade_size < 1) {
    throw ParameterError("cascade size must be >= 1, got " + std::to_string(*cascade_size));
  }
}

double p_herald_given_k(const HeraldDetector& det, std::int64_t k) {
  det.validate();
  if (k < 0) throw ParameterError("photon count must be >= 0");
  if (k == 0) return 0.0;
  const double eta = det.efficiency;
  const double miss = 1.0 - eta;
  const auto kd = static_cast<double>(k);

  if (det.rule == HeraldRule::AnyClick || det.cascade_size == 1) return 1.0 - std::pow(miss, kd);
  if (det.is_pnr()) return eta * std::pow(miss, kd - 1.0);

  // Terms are accumulated in log space: C(k, l) and (1/D)^(l-1) overflow and
  // underflow independently for large k or D.
  const auto d = static_cast<double>(*det.cascade_size);
  if (eta == 0.0) return 0.0;
  if (eta == 1.0) return std::pow(1.0 / d, kd - 1.0);
  const double log_eta = std::log(eta);
  const double log_miss = std::log(miss);
  const double log_inv_d = -std::log(d);
  double acc = 0.0;
  for (std::int64_t l = 1; l <= k; ++l) {
    const auto ld = static_cast<double>(l);
    const double log_binom = std::lgamma(kd + 1.0) - std::lgamma(ld + 1.0) - std::lgamma(kd - ld + 1.0);
    acc += std::exp(ld * log_eta + (kd - ld) * log_miss + log_binom + (ld - 1.0) * log_inv_d);
  }
  return std::min(acc, 1.0);
}

double herald_alpha(const PairSource& source, const HeraldDetector& det, double tol) {
  det.validate();
  const auto pairs = truncated_pmf(source, tol);
  double alpha = 0.0;
  for (std::size_t k = 1; k < pairs.probs.size(); ++k) {
    alpha += pairs.probs[k] * p_herald_given_k(det, static_cast<std::int64_t>(k));
  }
  return alpha;
}

std::int64_t sample_clicks(const HeraldDetector& det, std::int64_t k, RandomStream& rng) {
  if (k <= 0) return 0;
  if (det.is_pnr()) {
    std::int64_t detected = 0;
    for (std::int64_t i = 0; i < k; ++i) detected += rng.uniform() < det.efficiency ? 1 : 0;
    return detected;
  }
  const std::int64_t d = *det.cascade_size;
  if (d <= 64) {
    std::uint64_t fired = 0;
    for (std::int64_t i = 0; i < k; ++i) {
      if (rng.uniform() < det.efficiency) {
        const auto idx = static_cast<std::int64_t>(rng.uniform() * static_cast<double>(d));
        fired |= std::uint64_t{1} << idx;
      }
    }
    return std::popcount(fired);
  }
  std::vector<std::int64_t> hit;
  for (std::int64_t i = 0; i < k; ++i) {
    if (rng.uniform() < det.efficiency) {
      const auto idx = static_cast<std::int64_t>(rng.uniform() * static_cast<double>(d));
      if (std::find(hit.begin(), hit.end(), idx) == hit.end()) hit.push_back(idx);
    }
  }
  return static_cast<std::int64_t>(hit.size());
}

}  // namespace muxphoton

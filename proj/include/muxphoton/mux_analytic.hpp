#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "muxphoton/herald_detect.hpp"
#include "muxphoton/stats_core.hpp"

namespace muxphoton {

/// Which heralded slot the controller stores.
///
/// Window keeps scanning past a heralded slot while another herald is visible
/// within the next `window_slots` slots; it interpolates between EarliestBorn
/// (window 0) and LastBorn (window >= N - 1).
enum class StorageStrategy { LastBorn, EarliestBorn, Window };

/// Exponent of the no-herald factor in the last-born sum.
///
/// NoHeraldAfter uses (1 - alpha)^(N - j): no herald strictly after slot j.
/// AsWritten uses (1 - alpha)^(N - j + 1), which also excludes a herald in
/// slot j itself and so under-counts by a factor (1 - alpha).
enum class ExponentConvention { NoHeraldAfter, AsWritten };

std::string_view to_string(StorageStrategy s);
StorageStrategy storage_strategy_from_string(std::string_view name);
std::string_view to_string(ExponentConvention c);
ExponentConvention exponent_convention_from_string(std::string_view name);

/// Idler arm from crystal to output window.
struct IdlerPath {
  std::map<std::string, double> pre_cavity_factors;  ///< product is T_i
  double cavity_pass = 1.0;                          ///< T_c per round trip
  std::int64_t extra_output_passes = 0;

  double pre_cavity_transmission() const;
  void validate() const;
  bool operator==(const IdlerPath&) const = default;
};

struct MuxParams {
  PairSource source;
  HeraldDetector det;
  IdlerPath path;
  std::int64_t slots = 1;
  StorageStrategy strategy = StorageStrategy::LastBorn;
  std::int64_t window_slots = 0;  ///< only used by StorageStrategy::Window
  ExponentConvention convention = ExponentConvention::NoHeraldAfter;
  double truncation_tol = kDefaultTruncationTol;

  void validate() const;
};

inline constexpr std::int64_t kDefaultMaxPhotons = 6;

/// T_i * T_c^(N - j + extra_output_passes) for an idler stored from slot j.
double slot_transmission(const IdlerPath& path, std::int64_t j, std::int64_t slots);

/// Binomial thinning: m of k idlers survive the slot-j path.
double p_emit(std::int64_t m, std::int64_t j, std::int64_t k, const IdlerPath& path, std::int64_t slots);

/// Probability that slot j is the one stored, for every j in 1..N (index 0 unused).
std::vector<double> slot_selection_weights(const MuxParams& params, double alpha);

/// Multiplexed output photon-number distribution P_M(m), m = 0..max_photons.
///
/// By default the m = 0 entry holds only heralded cycles whose photon was
/// lost, so the entries sum to the herald probability. With
/// `include_no_herald` the unheralded cycles are added to m = 0.
PhotonNumberDistribution output_distribution(const MuxParams& params,
                                             std::int64_t max_photons = kDefaultMaxPhotons,
                                             bool include_no_herald = false);

/// 1 - (1 - alpha)^N.
double herald_probability(const MuxParams& params);

/// H = R (1 - (1 - alpha)^N), in Hz.
double heralding_rate(const MuxParams& params, double rep_rate_hz);

/// Heralded g2(0) of a (possibly unnormalized) distribution:
/// sum m(m-1)P * sum P / (sum m P)^2. Throws UndefinedValueError for zero mean.
double g2_from_distribution(const PhotonNumberDistribution& dist);

struct NMaxResult {
  double closed_form = 0.0;     ///< stationary point of the continuous-N expression
  std::int64_t exact_argmax = 0;
  double p1_at_argmax = 0.0;
};

/// Optimal slot count for the earliest-born strategy.
NMaxResult n_max(const MuxParams& params, std::int64_t n_cap = 200);

/// Stationary point of P_M(1) in N for given alpha and T_c.
double n_max_closed_form(double alpha, double cavity_pass);

enum class IdealFamily { PoissonMixed, ThermalPure };

struct IdealOptimum {
  double p_opt = 0.0;
  double p1 = 0.0;
};

/// Best single-photon probability of a lossless, perfectly heralded
/// non-multiplexed source, found by golden-section search over p.
IdealOptimum ideal_nonmux_optimum(IdealFamily family);

}  // namespace muxphoton

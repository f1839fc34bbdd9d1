#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "muxphoton/herald_detect.hpp"
#include "muxphoton/mux_analytic.hpp"
#include "muxphoton/rng.hpp"
#include "muxphoton/stats_core.hpp"

namespace muxphoton {

/// Pump and controller timing, all times in ns.
struct MuxTiming {
  double period_ns = 8.33;
  std::int64_t slots = 1;
  double delay_ns = 400.0;
  double latency_ns = 120.0;

  void validate() const;
  /// Number of future slots whose herald outcome is known before the
  /// controller must commit to the current one.
  std::int64_t look_ahead() const;
  bool operator==(const MuxTiming&) const = default;
};

/// Beam-splitter tap onto the two output detectors SPD1 / SPD2.
struct OutputTap {
  double splitter_transmission = 1.0;
  double arm_split = 0.5;  ///< fraction routed to SPD1
  double coupling = 1.0;
  double detector_efficiency = 1.0;

  double system_efficiency() const { return splitter_transmission * coupling * detector_efficiency; }
  void validate() const;
  bool operator==(const OutputTap&) const = default;
};

/// Everything the per-cycle Monte Carlo needs.
struct SimConfig {
  PairSource source;
  HeraldDetector det;
  IdlerPath path;
  MuxTiming timing;
  OutputTap tap;
  StorageStrategy strategy = StorageStrategy::Window;
  double rep_rate_hz = 50e3;
  double truncation_tol = kDefaultTruncationTol;

  void validate() const;
  /// Look-ahead used by select_slot: N - 1 for LastBorn, 0 for EarliestBorn,
  /// the timing-derived window otherwise.
  std::int64_t effective_window() const;
  bool operator==(const SimConfig&) const = default;
};

struct CycleOutcome {
  std::optional<std::int64_t> heralded_slot;  ///< 1-based
  std::vector<std::int64_t> pairs_per_slot;
  std::int64_t emitted_photons = 0;
  bool spd1_click = false;
  bool spd2_click = false;
};

inline constexpr std::size_t kEmittedBins = 8;

/// Accumulated counts over many cycles. `emitted_counts[m]` counts heralded
/// cycles that released m photons (last bin collects m >= kEmittedBins - 1).
struct SimStats {
  std::int64_t cycles = 0;
  std::int64_t heralds = 0;
  std::int64_t s1 = 0;
  std::int64_t s2 = 0;
  std::int64_t c12 = 0;
  double rep_rate_hz = 50e3;
  std::array<std::int64_t, kEmittedBins> emitted_counts{};

  void record(const CycleOutcome& outcome);
  SimStats& operator+=(const SimStats& other);
  bool operator==(const SimStats&) const = default;
};

/// Greedy look-ahead rule over 1-based slots. Commits to a heralded slot j
/// unless another herald lies in (j, min(j + window, N)].
std::optional<std::int64_t> select_slot(std::span<const bool> herald_flags, std::int64_t window);

/// Per-cycle simulator with precomputed samplers; reusable across cycles.
class CycleSimulator {
 public:
  explicit CycleSimulator(const SimConfig& config);

  void run(RandomStream& rng, CycleOutcome& out);

  const SimConfig& config() const { return config_; }

 private:
  SimConfig config_;
  PairSampler sampler_;
  std::int64_t window_;
  std::vector<double> slot_transmission_;  // 1-based
  std::unique_ptr<bool[]> flags_;
};

/// Simulates a single multiplexing cycle.
CycleOutcome run_cycle(const SimConfig& config, RandomStream& rng);

/// Worker count: `requested` if positive, else the OpenMP default capped by
/// the MUXPHOTON_THREADS environment variable.
int resolve_workers(int requested = 0);

/// OpenMP kernel. Cycle i draws from RandomStream::for_cycle(master_seed, i),
/// so results are identical for every worker count.
SimStats run_trials(const SimConfig& config, std::int64_t n_cycles, std::uint64_t master_seed,
                    int workers = 0);

/// Single-threaded reference for run_trials.
SimStats run_trials_serial(const SimConfig& config, std::int64_t n_cycles, std::uint64_t master_seed);

/// Measured-style estimators built from click counts.
struct Observables {
  double p_m1 = 0.0;        ///< (S1 + S2) / (R eta_Di)
  double p_m1_sigma = 0.0;
  std::optional<double> g2;  ///< C12 H / (S1 S2); empty when S1 S2 == 0
  double g2_sigma = 0.0;
  double herald_rate_hz = 0.0;
  std::string diagnostic;
};

Observables estimate_observables(const SimStats& stats, double system_efficiency);

/// C12 H / (S1 S2). Throws UndefinedValueError when S1 S2 == 0.
double measured_g2(const SimStats& stats);

/// Fraction of all cycles that were heralded and emitted m photons.
double emitted_frequency(const SimStats& stats, std::size_t m);

}  // namespace muxphoton

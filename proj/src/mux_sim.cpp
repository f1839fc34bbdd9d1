#include "muxphoton/mux_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include <omp.h>

#include "muxphoton/errors.hpp"

namespace muxphoton {

namespace {

bool in_unit_interval(double x) { return x >= 0.0 && x <= 1.0; }

const SimConfig& checked(const SimConfig& config) {
  config.validate();
  return config;
}

}  // namespace

void MuxTiming::validate() const {
  if (!(period_ns > 0.0)) throw ParameterError("pulse period must be > 0");
  if (slots < 1) throw ParameterError("slot count N must be >= 1");
  if (!(latency_ns >= 0.0)) throw ParameterError("electronics latency must be >= 0");
  if (!(delay_ns >= latency_ns)) {
    throw ParameterError("delay line (" + std::to_string(delay_ns) + " ns) shorter than electronics latency (" +
                         std::to_string(latency_ns) + " ns)");
  }
}

std::int64_t MuxTiming::look_ahead() const {
  validate();
  return static_cast<std::int64_t>(std::floor((delay_ns - latency_ns) / period_ns));
}

void OutputTap::validate() const {
  if (!in_unit_interval(splitter_transmission) || !in_unit_interval(arm_split) || !in_unit_interval(coupling) ||
      !in_unit_interval(detector_efficiency)) {
    throw ParameterError("output tap factors must lie in [0, 1]");
  }
}

void SimConfig::validate() const {
  source.validate();
  det.validate();
  path.validate();
  timing.validate();
  tap.validate();
  if (!(rep_rate_hz > 0.0)) throw ParameterError("repetition rate must be > 0");
}

std::int64_t SimConfig::effective_window() const {
  switch (strategy) {
    case StorageStrategy::LastBorn: return std::max<std::int64_t>(timing.slots - 1, 0);
    case StorageStrategy::EarliestBorn: return 0;
    case StorageStrategy::Window: return timing.look_ahead();
  }
  return 0;
}

void SimStats::record(const CycleOutcome& outcome) {
  ++cycles;
  if (!outcome.heralded_slot) return;
  ++heralds;
  const auto bin = std::min<std::size_t>(static_cast<std::size_t>(outcome.emitted_photons), kEmittedBins - 1);
  ++emitted_counts[bin];
  s1 += outcome.spd1_click ? 1 : 0;
  s2 += outcome.spd2_click ? 1 : 0;
  c12 += (outcome.spd1_click && outcome.spd2_click) ? 1 : 0;
}

SimStats& SimStats::operator+=(const SimStats& other) {
  cycles += other.cycles;
  heralds += other.heralds;
  s1 += other.s1;
  s2 += other.s2;
  c12 += other.c12;
  for (std::size_t m = 0; m < kEmittedBins; ++m) emitted_counts[m] += other.emitted_counts[m];
  return *this;
}

std::optional<std::int64_t> select_slot(std::span<const bool> herald_flags, std::int64_t window) {
  if (window < 0) throw ParameterError("look-ahead window must be >= 0");
  const auto n = static_cast<std::int64_t>(herald_flags.size());
  for (std::int64_t j = 1; j <= n; ++j) {
    if (!herald_flags[static_cast<std::size_t>(j - 1)]) continue;
    const std::int64_t horizon = std::min(j + window, n);
    bool later = false;
    for (std::int64_t i = j + 1; i <= horizon && !later; ++i) later = herald_flags[static_cast<std::size_t>(i - 1)];
    if (!later) return j;
  }
  return std::nullopt;
}

CycleSimulator::CycleSimulator(const SimConfig& config)
    : config_(checked(config)),
      sampler_(config_.source, config_.truncation_tol),
      window_(config.effective_window()),
      slot_transmission_(static_cast<std::size_t>(config.timing.slots) + 1, 0.0),
      flags_(std::make_unique<bool[]>(static_cast<std::size_t>(config.timing.slots))) {
  for (std::int64_t j = 1; j <= config.timing.slots; ++j) {
    slot_transmission_[static_cast<std::size_t>(j)] = slot_transmission(config.path, j, config.timing.slots);
  }
}

void CycleSimulator::run(RandomStream& rng, CycleOutcome& out) {
  const std::int64_t n = config_.timing.slots;
  const auto nu = static_cast<std::size_t>(n);
  out.pairs_per_slot.resize(nu);
  out.emitted_photons = 0;
  out.spd1_click = false;
  out.spd2_click = false;

  for (std::size_t j = 0; j < nu; ++j) {
    const std::int64_t k = sampler_(rng);
    out.pairs_per_slot[j] = k;
    flags_[j] = k > 0 && is_herald(config_.det, sample_clicks(config_.det, k, rng));
  }

  out.heralded_slot = select_slot(std::span<const bool>(flags_.get(), nu), window_);
  // Output shutter stays closed without a herald.
  if (!out.heralded_slot) return;

  const auto slot = static_cast<std::size_t>(*out.heralded_slot);
  const double survive = slot_transmission_[slot];
  const std::int64_t k = out.pairs_per_slot[slot - 1];
  for (std::int64_t i = 0; i < k; ++i) out.emitted_photons += rng.uniform() < survive ? 1 : 0;

  const double reach = config_.tap.splitter_transmission * config_.tap.coupling;
  for (std::int64_t i = 0; i < out.emitted_photons; ++i) {
    if (rng.uniform() >= reach) continue;
    const bool to_first = rng.uniform() < config_.tap.arm_split;
    const bool detected = rng.uniform() < config_.tap.detector_efficiency;
    if (!detected) continue;
    (to_first ? out.spd1_click : out.spd2_click) = true;
  }
}

CycleOutcome run_cycle(const SimConfig& config, RandomStream& rng) {
  CycleSimulator sim(config);
  CycleOutcome out;
  sim.run(rng, out);
  return out;
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  int workers = omp_get_max_threads();
  if (const char* env = std::getenv("MUXPHOTON_THREADS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (*end != '\0' || cap < 1) {
      throw ParameterError("MUXPHOTON_THREADS must be a positive integer, got '" + std::string(env) + "'");
    }
    workers = std::min<long>(workers, cap);
  }
  return std::max(workers, 1);
}

SimStats run_trials(const SimConfig& config, std::int64_t n_cycles, std::uint64_t master_seed, int workers) {
  if (n_cycles < 1) throw ParameterError("n_cycles must be >= 1");
  config.validate();
  const int threads = resolve_workers(workers);

  SimStats total;
  total.rep_rate_hz = config.rep_rate_hz;

#pragma omp parallel num_threads(threads)
  {
    CycleSimulator sim(config);
    CycleOutcome outcome;
    SimStats local;
    local.rep_rate_hz = config.rep_rate_hz;

#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < n_cycles; ++i) {
      auto rng = RandomStream::for_cycle(master_seed, static_cast<std::uint64_t>(i));
      sim.run(rng, outcome);
      local.record(outcome);
    }

    // Integer sums: merge order cannot change the result.
#pragma omp critical(muxphoton_merge)
    total += local;
  }
  return total;
}

SimStats run_trials_serial(const SimConfig& config, std::int64_t n_cycles, std::uint64_t master_seed) {
  if (n_cycles < 1) throw ParameterError("n_cycles must be >= 1");
  CycleSimulator sim(config);
  CycleOutcome outcome;
  SimStats stats;
  stats.rep_rate_hz = config.rep_rate_hz;
  for (std::int64_t i = 0; i < n_cycles; ++i) {
    auto rng = RandomStream::for_cycle(master_seed, static_cast<std::uint64_t>(i));
    sim.run(rng, outcome);
    stats.record(outcome);
  }
  return stats;
}

double measured_g2(const SimStats& stats) {
  if (stats.s1 == 0 || stats.s2 == 0) {
    throw UndefinedValueError("g2 undefined: S1 = " + std::to_string(stats.s1) + ", S2 = " + std::to_string(stats.s2));
  }
  // Rates share the factor R / cycles, which cancels: C12 H / (S1 S2).
  return static_cast<double>(stats.c12) * static_cast<double>(stats.heralds) /
         (static_cast<double>(stats.s1) * static_cast<double>(stats.s2));
}

Observables estimate_observables(const SimStats& stats, double system_efficiency) {
  if (stats.cycles <= 0) throw UndefinedValueError("no cycles recorded");
  if (!(system_efficiency > 0.0)) throw UndefinedValueError("system detection efficiency must be > 0");

  const auto n = static_cast<double>(stats.cycles);
  const double r = stats.rep_rate_hz;
  Observables obs;
  obs.herald_rate_hz = static_cast<double>(stats.heralds) * r / n;

  const double rate_1 = static_cast<double>(stats.s1) * r / n;
  const double rate_2 = static_cast<double>(stats.s2) * r / n;
  obs.p_m1 = (rate_1 + rate_2) / (r * system_efficiency);

  // Per-cycle click total X in {0, 1, 2}: E[X^2] = (s1 + s2 + 2 c12) / n.
  const double mean_x = static_cast<double>(stats.s1 + stats.s2) / n;
  const double mean_x2 = static_cast<double>(stats.s1 + stats.s2 + 2 * stats.c12) / n;
  obs.p_m1_sigma = std::sqrt(std::max(mean_x2 - mean_x * mean_x, 0.0) / n) / system_efficiency;

  if (stats.s1 == 0 || stats.s2 == 0) {
    obs.diagnostic = "g2 undefined: S1 * S2 == 0";
    return obs;
  }
  obs.g2 = measured_g2(stats);
  // Poisson counting errors on C12, H, S1, S2.
  if (stats.c12 > 0) {
    obs.g2_sigma = *obs.g2 * std::sqrt(1.0 / static_cast<double>(stats.c12) + 1.0 / static_cast<double>(stats.heralds) +
                                       1.0 / static_cast<double>(stats.s1) + 1.0 / static_cast<double>(stats.s2));
  } else {
    // No coincidences: one-count upper scale.
    obs.g2_sigma = static_cast<double>(stats.heralds) / (static_cast<double>(stats.s1) * static_cast<double>(stats.s2));
  }
  return obs;
}

double emitted_frequency(const SimStats& stats, std::size_t m) {
  if (stats.cycles <= 0) throw UndefinedValueError("no cycles recorded");
  if (m >= kEmittedBins) return 0.0;
  return static_cast<double>(stats.emitted_counts[m]) / static_cast<double>(stats.cycles);
}

}  // namespace muxphoton

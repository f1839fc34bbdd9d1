#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "muxphoton/mux_analytic.hpp"
#include "muxphoton/mux_sim.hpp"
#include "muxphoton/report_io.hpp"

namespace muxphoton {

inline constexpr int kConfigSchemaVersion = 1;
inline constexpr std::uint64_t kDefaultSeed = 0xC0FFEE;

/// Complete run description: model, controller, Monte Carlo budget.
struct Config {
  SimConfig sim;
  ExponentConvention convention = ExponentConvention::NoHeraldAfter;
  std::int64_t max_photons = kDefaultMaxPhotons;
  std::int64_t n_cycles = 1'000'000;
  std::uint64_t master_seed = kDefaultSeed;

  void validate() const;
  /// Analytic counterpart of the simulated controller.
  MuxParams mux_params() const;
  bool operator==(const Config&) const = default;
};

const std::vector<std::string>& preset_names();

/// Named parameter sets. Throws ParameterError for an unknown name.
Config preset(std::string_view name);

nlohmann::ordered_json config_to_json(const Config& config);
/// Throws ParameterError on schema mismatch, missing fields or invalid values.
Config config_from_json(const nlohmann::json& doc);
Config load_config(const std::string& path);

struct SweepOptions {
  bool monte_carlo = true;
  int workers = 0;
};

struct SweepRow {
  std::int64_t slots = 0;
  double alpha = 0.0;
  double herald_rate_hz = 0.0;
  double p_m1_analytic = 0.0;
  double p_m1_mc = 0.0;       ///< click-based estimator
  double p_m1_mc_true = 0.0;  ///< simulated single-photon window frequency
  double g2_analytic = 0.0;
  double g2_mc = 0.0;
  double sigma_p_m1_mc = 0.0;
  double sigma_g2_mc = 0.0;
  std::string error;
};

/// One row per slot count. Monte Carlo rows reuse the config seed. Module
/// errors are caught per row and reported in `error`; unavailable values are NaN.
std::vector<SweepRow> sweep_n(const Config& config, const std::vector<std::int64_t>& slot_counts,
                              const SweepOptions& options = {});

Table sweep_table(const std::vector<SweepRow>& rows);

struct Table1Column {
  std::string name;
  double p_m1 = 0.0;
  double g2_analytic = 0.0;
  double g2_mc = 0.0;  ///< NaN when not simulated
  double sigma_g2_mc = 0.0;
  double reference_p_m1 = 0.0;
  double reference_g2 = 0.0;
};

struct Table1Report {
  std::vector<Table1Column> columns;
  Table as_table() const;
};

/// Ideal mixed / ideal pure / measured-preset / efficient-components comparison at N = 30.
Table1Report report_table1(std::int64_t mc_cycles = 1'000'000, std::uint64_t seed = kDefaultSeed, int workers = 0);

/// P1^n R: rate of n-fold coincidences from n independent sources.
double multi_photon_rate(std::int64_t n, double p1, double rep_rate_hz);

/// Output distribution plus derived scalars for one configuration.
Table analytic_table(const Config& config);

/// Monte Carlo counts, estimators and true emission frequencies.
Table simulation_table(const Config& config, const SimStats& stats);

Table n_max_table(const Config& config, std::int64_t n_cap = 200);

}  // namespace muxphoton

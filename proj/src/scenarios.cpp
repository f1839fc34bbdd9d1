#include "muxphoton/scenarios.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "muxphoton/errors.hpp"

namespace muxphoton {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Constants of the reference experiment.
constexpr double kPeriodNs = 8.33;
constexpr double kLatencyNs = 120.0;
constexpr double kRepRateHz = 50e3;
constexpr double kSignalEfficiency = 0.418;
constexpr std::int64_t kCascade = 4;
constexpr double kCavityPass = 0.970;
constexpr double kOtherOptics = 0.924;
constexpr double kIdlerCoupling = 0.70;
constexpr double kDelayLine400 = 0.846;
constexpr double kDelayLine200 = 0.893;
constexpr std::int64_t kSchmidtModes = 20;

Config reference_preset(double mean_pairs, double delay_ns, double delay_line_transmission) {
  Config c;
  c.sim.source = {mean_pairs, PairStatistics::Multimode, kSchmidtModes};
  c.sim.det = {kSignalEfficiency, kCascade, HeraldRule::ExactlyOne};
  c.sim.path.pre_cavity_factors = {
      {"fiber_coupling", kIdlerCoupling}, {"delay_line", delay_line_transmission}, {"other_optics", kOtherOptics}};
  c.sim.path.cavity_pass = kCavityPass;
  c.sim.timing = {kPeriodNs, 30, delay_ns, kLatencyNs};
  // eta_Di = NPBS 0.899 * fiber 0.902 * SPD 0.70
  c.sim.tap = {0.899, 0.5, 0.902, 0.70};
  c.sim.strategy = StorageStrategy::Window;
  c.sim.rep_rate_hz = kRepRateHz;
  return c;
}

Config ideal_preset(PairStatistics statistics) {
  Config c;
  c.sim.source = {1.0, statistics, 1};
  c.sim.det = {1.0, std::nullopt, HeraldRule::ExactlyOne};
  c.sim.path.cavity_pass = 1.0;
  c.sim.timing = {kPeriodNs, 1, 400.0, kLatencyNs};
  c.sim.tap = {1.0, 0.5, 1.0, 1.0};
  c.sim.strategy = StorageStrategy::Window;
  c.sim.rep_rate_hz = kRepRateHz;
  return c;
}

template <typename T>
T field(const nlohmann::json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) throw ParameterError(std::string("config: missing field '") + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("config: field '") + key + "': " + e.what());
  }
}

double nan_if_throws(auto&& fn, std::string& error) {
  try {
    return fn();
  } catch (const std::exception& e) {
    if (!error.empty()) error += "; ";
    error += e.what();
    return kNaN;
  }
}

}  // namespace

void Config::validate() const {
  sim.validate();
  if (max_photons < 1) throw ParameterError("max_photons must be >= 1");
  if (n_cycles < 0) throw ParameterError("n_cycles must be >= 0");
}

MuxParams Config::mux_params() const {
  MuxParams p;
  p.source = sim.source;
  p.det = sim.det;
  p.path = sim.path;
  p.slots = sim.timing.slots;
  p.strategy = sim.strategy;
  p.window_slots = sim.strategy == StorageStrategy::Window ? sim.timing.look_ahead() : 0;
  p.convention = convention;
  p.truncation_tol = sim.truncation_tol;
  return p;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"paper-p35-400ns", "paper-p35-200ns", "paper-p07-400ns",
                                                 "paper-p07-200ns", "table1-efficient", "ideal-poisson",
                                                 "ideal-thermal"};
  return names;
}

Config preset(std::string_view name) {
  if (name == "paper-p35-400ns") return reference_preset(0.35, 400.0, kDelayLine400);
  if (name == "paper-p35-200ns") return reference_preset(0.35, 200.0, kDelayLine200);
  if (name == "paper-p07-400ns") return reference_preset(0.07, 400.0, kDelayLine400);
  if (name == "paper-p07-200ns") return reference_preset(0.07, 200.0, kDelayLine200);
  if (name == "table1-efficient") {
    Config c = reference_preset(0.1, 400.0, 1.0);
    c.sim.det = {0.90, std::nullopt, HeraldRule::ExactlyOne};
    c.sim.path.pre_cavity_factors = {{"idler_optics", 0.95}};
    c.sim.path.cavity_pass = 0.99;
    return c;
  }
  if (name == "ideal-poisson") return ideal_preset(PairStatistics::Poisson);
  if (name == "ideal-thermal") return ideal_preset(PairStatistics::Thermal);
  throw ParameterError("unknown preset '" + std::string(name) + "'");
}

nlohmann::ordered_json config_to_json(const Config& c) {
  nlohmann::ordered_json j;
  j["schema_version"] = kConfigSchemaVersion;
  j["source"] = {{"mean_pairs", c.sim.source.mean_pairs},
                 {"statistics", std::string(to_string(c.sim.source.statistics))},
                 {"schmidt_modes", c.sim.source.schmidt_modes}};
  nlohmann::ordered_json det;
  det["efficiency"] = c.sim.det.efficiency;
  if (c.sim.det.cascade_size) {
    det["cascade_size"] = *c.sim.det.cascade_size;
  } else {
    det["cascade_size"] = "pnr";
  }
  det["herald_rule"] = std::string(to_string(c.sim.det.rule));
  j["detector"] = det;
  nlohmann::ordered_json factors = nlohmann::ordered_json::object();
  for (const auto& [name, value] : c.sim.path.pre_cavity_factors) factors[name] = value;
  j["idler_path"] = {{"pre_cavity_factors", factors},
                     {"cavity_pass", c.sim.path.cavity_pass},
                     {"extra_output_passes", c.sim.path.extra_output_passes}};
  j["timing"] = {{"period_ns", c.sim.timing.period_ns},
                 {"slots", c.sim.timing.slots},
                 {"delay_ns", c.sim.timing.delay_ns},
                 {"latency_ns", c.sim.timing.latency_ns}};
  j["output_tap"] = {{"splitter_transmission", c.sim.tap.splitter_transmission},
                     {"arm_split", c.sim.tap.arm_split},
                     {"coupling", c.sim.tap.coupling},
                     {"detector_efficiency", c.sim.tap.detector_efficiency}};
  j["strategy"] = std::string(to_string(c.sim.strategy));
  j["convention"] = std::string(to_string(c.convention));
  j["rep_rate_hz"] = c.sim.rep_rate_hz;
  j["truncation_tol"] = c.sim.truncation_tol;
  j["max_photons"] = c.max_photons;
  j["n_cycles"] = c.n_cycles;
  j["master_seed"] = c.master_seed;
  return j;
}

Config config_from_json(const nlohmann::json& doc) {
  const auto version = field<int>(doc, "schema_version");
  if (version != kConfigSchemaVersion) {
    throw ParameterError("config: unsupported schema_version " + std::to_string(version));
  }
  Config c;
  const auto src = field<nlohmann::json>(doc, "source");
  c.sim.source.mean_pairs = field<double>(src, "mean_pairs");
  c.sim.source.statistics = pair_statistics_from_string(field<std::string>(src, "statistics"));
  c.sim.source.schmidt_modes = field<std::int64_t>(src, "schmidt_modes");

  const auto det = field<nlohmann::json>(doc, "detector");
  c.sim.det.efficiency = field<double>(det, "efficiency");
  const auto cascade = field<nlohmann::json>(det, "cascade_size");
  if (cascade.is_string()) {
    if (cascade.get<std::string>() != "pnr") throw ParameterError("config: cascade_size must be an integer or \"pnr\"");
    c.sim.det.cascade_size.reset();
  } else {
    c.sim.det.cascade_size = field<std::int64_t>(det, "cascade_size");
  }
  c.sim.det.rule = herald_rule_from_string(field<std::string>(det, "herald_rule"));

  const auto path = field<nlohmann::json>(doc, "idler_path");
  c.sim.path.pre_cavity_factors = field<std::map<std::string, double>>(path, "pre_cavity_factors");
  c.sim.path.cavity_pass = field<double>(path, "cavity_pass");
  c.sim.path.extra_output_passes = field<std::int64_t>(path, "extra_output_passes");

  const auto timing = field<nlohmann::json>(doc, "timing");
  c.sim.timing.period_ns = field<double>(timing, "period_ns");
  c.sim.timing.slots = field<std::int64_t>(timing, "slots");
  c.sim.timing.delay_ns = field<double>(timing, "delay_ns");
  c.sim.timing.latency_ns = field<double>(timing, "latency_ns");

  const auto tap = field<nlohmann::json>(doc, "output_tap");
  c.sim.tap.splitter_transmission = field<double>(tap, "splitter_transmission");
  c.sim.tap.arm_split = field<double>(tap, "arm_split");
  c.sim.tap.coupling = field<double>(tap, "coupling");
  c.sim.tap.detector_efficiency = field<double>(tap, "detector_efficiency");

  c.sim.strategy = storage_strategy_from_string(field<std::string>(doc, "strategy"));
  c.convention = exponent_convention_from_string(field<std::string>(doc, "convention"));
  c.sim.rep_rate_hz = field<double>(doc, "rep_rate_hz");
  c.sim.truncation_tol = field<double>(doc, "truncation_tol");
  c.max_photons = field<std::int64_t>(doc, "max_photons");
  c.n_cycles = field<std::int64_t>(doc, "n_cycles");
  c.master_seed = field<std::uint64_t>(doc, "master_seed");
  c.validate();
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open config file '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(doc);
}

std::vector<SweepRow> sweep_n(const Config& config, const std::vector<std::int64_t>& slot_counts,
                              const SweepOptions& options) {
  if (slot_counts.empty()) throw ParameterError("sweep needs at least one slot count");
  std::vector<SweepRow> rows;
  rows.reserve(slot_counts.size());
  for (const std::int64_t n : slot_counts) {
    SweepRow row;
    row.slots = n;
    Config c = config;
    c.sim.timing.slots = n;

    try {
      const MuxParams params = c.mux_params();
      row.alpha = herald_alpha(params.source, params.det, params.truncation_tol);
      row.herald_rate_hz = heralding_rate(params, c.sim.rep_rate_hz);
      const auto dist = output_distribution(params, c.max_photons);
      row.p_m1_analytic = dist[1];
      row.g2_analytic = nan_if_throws([&] { return g2_from_distribution(dist); }, row.error);
    } catch (const std::exception& e) {
      row.error = e.what();
      row.alpha = row.herald_rate_hz = row.p_m1_analytic = row.g2_analytic = kNaN;
    }

    row.p_m1_mc = row.p_m1_mc_true = row.g2_mc = row.sigma_p_m1_mc = row.sigma_g2_mc = kNaN;
    if (options.monte_carlo && c.n_cycles > 0) {
      try {
        const auto stats = run_trials(c.sim, c.n_cycles, c.master_seed, options.workers);
        const auto obs = estimate_observables(stats, c.sim.tap.system_efficiency());
        row.p_m1_mc = obs.p_m1;
        row.sigma_p_m1_mc = obs.p_m1_sigma;
        row.p_m1_mc_true = emitted_frequency(stats, 1);
        if (obs.g2) {
          row.g2_mc = *obs.g2;
          row.sigma_g2_mc = obs.g2_sigma;
        } else {
          row.error += (row.error.empty() ? "" : "; ") + obs.diagnostic;
        }
      } catch (const std::exception& e) {
        row.error += (row.error.empty() ? "" : "; ") + std::string(e.what());
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Table sweep_table(const std::vector<SweepRow>& rows) {
  Table t;
  t.columns = {"N",           "alpha",         "H_hz",          "P_M1_analytic", "P_M1_mc",     "P_M1_mc_true",
               "g2_analytic", "g2_mc",         "sigma_P_M1_mc", "sigma_g2_mc",   "error"};
  for (const auto& r : rows) {
    t.add_row({r.slots, r.alpha, r.herald_rate_hz, r.p_m1_analytic, r.p_m1_mc, r.p_m1_mc_true, r.g2_analytic,
               r.g2_mc, r.sigma_p_m1_mc, r.sigma_g2_mc, r.error});
  }
  return t;
}

Table Table1Report::as_table() const {
  Table t;
  t.columns = {"column", "P_M1", "g2_analytic", "g2_mc", "sigma_g2_mc", "reference_P_M1", "reference_g2"};
  for (const auto& c : columns) {
    t.add_row({c.name, c.p_m1, c.g2_analytic, c.g2_mc, c.sigma_g2_mc, c.reference_p_m1, c.reference_g2});
  }
  return t;
}

Table1Report report_table1(std::int64_t mc_cycles, std::uint64_t seed, int workers) {
  Table1Report report;

  auto ideal_column = [](const char* name, IdealFamily family, const char* preset_name, double ref) {
    const auto opt = ideal_nonmux_optimum(family);
    Config c = preset(preset_name);
    c.sim.source.mean_pairs = opt.p_opt;
    const auto dist = output_distribution(c.mux_params(), c.max_photons);
    return Table1Column{name, opt.p1, g2_from_distribution(dist), kNaN, kNaN, ref, 0.0};
  };
  report.columns.push_back(ideal_column("ideal-mixed", IdealFamily::PoissonMixed, "ideal-poisson", 0.368));
  report.columns.push_back(ideal_column("ideal-pure", IdealFamily::ThermalPure, "ideal-thermal", 0.250));

  auto mux_column = [&](const char* name, const char* preset_name, double ref_p1, double ref_g2) {
    Config c = preset(preset_name);
    c.sim.timing.slots = 30;
    const auto dist = output_distribution(c.mux_params(), c.max_photons);
    Table1Column col{name, dist[1], g2_from_distribution(dist), kNaN, kNaN, ref_p1, ref_g2};
    if (mc_cycles > 0) {
      const auto stats = run_trials(c.sim, mc_cycles, seed, workers);
      const auto obs = estimate_observables(stats, c.sim.tap.system_efficiency());
      if (obs.g2) {
        col.g2_mc = *obs.g2;
        col.sigma_g2_mc = obs.g2_sigma;
      }
    }
    return col;
  };
  report.columns.push_back(mux_column("this-work", "paper-p35-400ns", 0.386, 0.479));
  report.columns.push_back(mux_column("efficient-components", "table1-efficient", 0.80, 0.05));
  return report;
}

double multi_photon_rate(std::int64_t n, double p1, double rep_rate_hz) {
  if (n < 1) throw ParameterError("photon number n must be >= 1");
  if (!(p1 >= 0.0 && p1 <= 1.0)) throw ParameterError("single-photon probability must lie in [0, 1]");
  return std::pow(p1, static_cast<double>(n)) * rep_rate_hz;
}

Table analytic_table(const Config& config) {
  config.validate();
  const MuxParams params = config.mux_params();
  const auto dist = output_distribution(params, config.max_photons);
  const double alpha = herald_alpha(params.source, params.det, params.truncation_tol);

  Table t;
  t.columns = {"N", "strategy", "window", "convention", "alpha", "herald_probability", "H_hz"};
  for (std::int64_t m = 0; m <= config.max_photons; ++m) t.columns.push_back("P_M" + std::to_string(m));
  t.columns.insert(t.columns.end(), {"tail_bound", "g2"});

  std::vector<Cell> row = {params.slots,
                           std::string(to_string(params.strategy)),
                           params.window_slots,
                           std::string(to_string(params.convention)),
                           alpha,
                           herald_probability(params),
                           heralding_rate(params, config.sim.rep_rate_hz)};
  for (const double p : dist.probs) row.emplace_back(p);
  row.emplace_back(dist.tail_bound);
  std::string ignored;
  row.emplace_back(nan_if_throws([&] { return g2_from_distribution(dist); }, ignored));
  t.add_row(std::move(row));
  return t;
}

Table simulation_table(const Config& config, const SimStats& stats) {
  const double eta_di = config.sim.tap.system_efficiency();
  const auto obs = estimate_observables(stats, eta_di);
  Table t;
  t.columns = {"N",      "window", "cycles",     "seed",       "heralds",    "s1",         "s2",
               "c12",    "rep_rate_hz", "H_hz",  "eta_Di",     "P_M1_est",   "sigma_P_M1", "g2",
               "sigma_g2", "P_M0_true", "P_M1_true", "P_M2_true", "P_M3_true", "diagnostic"};
  t.add_row({config.sim.timing.slots, config.sim.effective_window(), stats.cycles, config.master_seed, stats.heralds,
             stats.s1, stats.s2, stats.c12, stats.rep_rate_hz, obs.herald_rate_hz, eta_di, obs.p_m1, obs.p_m1_sigma,
             obs.g2.value_or(kNaN), obs.g2 ? obs.g2_sigma : kNaN, emitted_frequency(stats, 0),
             emitted_frequency(stats, 1), emitted_frequency(stats, 2), emitted_frequency(stats, 3), obs.diagnostic});
  return t;
}

Table n_max_table(const Config& config, std::int64_t n_cap) {
  MuxParams params = config.mux_params();
  params.strategy = StorageStrategy::EarliestBorn;
  const auto res = n_max(params, n_cap);
  Table t;
  t.columns = {"p", "alpha", "T_c", "N_max_closed_form", "N_max_scan", "P_M1_at_max"};
  t.add_row({params.source.mean_pairs, herald_alpha(params.source, params.det, params.truncation_tol),
             params.path.cavity_pass, res.closed_form, res.exact_argmax, res.p1_at_argmax});
  return t;
}

}  // namespace muxphoton

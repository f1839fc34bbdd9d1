#include "muxphoton/mux_analytic.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "muxphoton/errors.hpp"

namespace muxphoton {

std::string_view to_string(StorageStrategy s) {
  switch (s) {
    case StorageStrategy::LastBorn: return "last";
    case StorageStrategy::EarliestBorn: return "earliest";
    case StorageStrategy::Window: return "window";
  }
  return "unknown";
}

StorageStrategy storage_strategy_from_string(std::string_view name) {
  if (name == "last") return StorageStrategy::LastBorn;
  if (name == "earliest") return StorageStrategy::EarliestBorn;
  if (name == "window") return StorageStrategy::Window;
  throw ParameterError("unknown strategy '" + std::string(name) + "'");
}

std::string_view to_string(ExponentConvention c) {
  return c == ExponentConvention::AsWritten ? "as-written" : "no-herald-after";
}

ExponentConvention exponent_convention_from_string(std::string_view name) {
  if (name == "no-herald-after") return ExponentConvention::NoHeraldAfter;
  if (name == "as-written") return ExponentConvention::AsWritten;
  throw ParameterError("unknown convention '" + std::string(name) + "'");
}

double IdlerPath::pre_cavity_transmission() const {
  double t = 1.0;
  for (const auto& [name, factor] : pre_cavity_factors) t *= factor;
  return t;
}

void IdlerPath::validate() const {
  for (const auto& [name, factor] : pre_cavity_factors) {
    if (!(factor >= 0.0 && factor <= 1.0)) {
      throw ParameterError("idler factor '" + name + "' must lie in [0, 1]");
    }
  }
  if (!(cavity_pass >= 0.0 && cavity_pass <= 1.0)) {
    throw ParameterError("cavity_pass must lie in [0, 1]");
  }
  if (extra_output_passes < 0) throw ParameterError("extra_output_passes must be >= 0");
}

void MuxParams::validate() const {
  source.validate();
  det.validate();
  path.validate();
  if (slots < 1) throw ParameterError("slot count N must be >= 1");
  if (window_slots < 0) throw ParameterError("look-ahead window must be >= 0");
  if (!(truncation_tol > 0.0 && truncation_tol < 1.0)) {
    throw ParameterError("truncation tol must lie in (0, 1)");
  }
}

double slot_transmission(const IdlerPath& path, std::int64_t j, std::int64_t slots) {
  if (j < 1 || j > slots) {
    throw ParameterError("slot index " + std::to_string(j) + " outside 1.." + std::to_string(slots));
  }
  const auto passes = static_cast<double>(slots - j + path.extra_output_passes);
  return path.pre_cavity_transmission() * std::pow(path.cavity_pass, passes);
}

namespace {

// C(k, m) T^m (1 - T)^(k - m), with 0^0 = 1.
double binomial_thinning(std::int64_t m, std::int64_t k, double t) {
  const auto kd = static_cast<double>(k);
  const auto md = static_cast<double>(m);
  const double log_binom = std::lgamma(kd + 1.0) - std::lgamma(md + 1.0) - std::lgamma(kd - md + 1.0);
  return std::exp(log_binom) * std::pow(t, md) * std::pow(1.0 - t, kd - md);
}

// f[n]: probability that, with a herald forced at slot n + 1, every herald in
// slots 1..n is followed by another within `window` slots (so the controller
// skipped all of them).
std::vector<double> skipped_prefix_probability(double alpha, std::int64_t slots, std::int64_t window) {
  std::vector<double> f(static_cast<std::size_t>(slots) + 1, 0.0);
  f[0] = 1.0;
  const double miss = 1.0 - alpha;
  for (std::int64_t n = 1; n <= slots; ++n) {
    double v = std::pow(miss, static_cast<double>(n));
    for (std::int64_t i = std::max<std::int64_t>(1, n + 1 - window); i <= n; ++i) {
      v += alpha * std::pow(miss, static_cast<double>(n - i)) * f[static_cast<std::size_t>(i - 1)];
    }
    f[static_cast<std::size_t>(n)] = v;
  }
  return f;
}

}  // namespace

double p_emit(std::int64_t m, std::int64_t j, std::int64_t k, const IdlerPath& path, std::int64_t slots) {
  if (m < 0 || k < 0 || m > k) {
    throw ParameterError("p_emit requires 0 <= m <= k (m=" + std::to_string(m) + ", k=" + std::to_string(k) + ")");
  }
  return binomial_thinning(m, k, slot_transmission(path, j, slots));
}

std::vector<double> slot_selection_weights(const MuxParams& params, double alpha) {
  const std::int64_t n = params.slots;
  const double miss = 1.0 - alpha;
  std::vector<double> w(static_cast<std::size_t>(n) + 1, 0.0);

  std::vector<double> prefix;
  if (params.strategy == StorageStrategy::Window) {
    prefix = skipped_prefix_probability(alpha, n, params.window_slots);
  }
  for (std::int64_t j = 1; j <= n; ++j) {
    double exponent = 0.0;
    double lead = 1.0;
    switch (params.strategy) {
      case StorageStrategy::LastBorn:
        exponent = static_cast<double>(n - j);
        if (params.convention == ExponentConvention::AsWritten) exponent += 1.0;
        break;
      case StorageStrategy::EarliestBorn:
        exponent = static_cast<double>(j - 1);
        break;
      case StorageStrategy::Window:
        exponent = static_cast<double>(std::min(j + params.window_slots, n) - j);
        lead = prefix[static_cast<std::size_t>(j - 1)];
        break;
    }
    w[static_cast<std::size_t>(j)] = lead * std::pow(miss, exponent);
  }
  return w;
}

PhotonNumberDistribution output_distribution(const MuxParams& params, std::int64_t max_photons,
                                             bool include_no_herald) {
  params.validate();
  if (max_photons < 1) throw ParameterError("max photon number must be >= 1");

  const auto pairs = truncated_pmf(params.source, params.truncation_tol);
  const auto k_max = static_cast<std::int64_t>(pairs.max_index());

  std::vector<double> herald_weight(pairs.probs.size(), 0.0);
  double alpha = 0.0;
  for (std::int64_t k = 1; k <= k_max; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    herald_weight[ku] = pairs.probs[ku] * p_herald_given_k(params.det, k);
    alpha += herald_weight[ku];
  }

  const auto slot_weight = slot_selection_weights(params, alpha);
  const std::int64_t m_top = std::max(k_max, max_photons);
  std::vector<double> full(static_cast<std::size_t>(m_top) + 1, 0.0);
  for (std::int64_t j = 1; j <= params.slots; ++j) {
    const double wj = slot_weight[static_cast<std::size_t>(j)];
    if (wj == 0.0) continue;
    const double t = slot_transmission(params.path, j, params.slots);
    for (std::int64_t k = 1; k <= k_max; ++k) {
      const double hk = herald_weight[static_cast<std::size_t>(k)];
      if (hk == 0.0) continue;
      for (std::int64_t m = 0; m <= k; ++m) {
        full[static_cast<std::size_t>(m)] += wj * hk * binomial_thinning(m, k, t);
      }
    }
  }

  PhotonNumberDistribution out;
  out.probs.assign(full.begin(), full.begin() + max_photons + 1);
  double beyond = 0.0;
  for (auto m = static_cast<std::size_t>(max_photons) + 1; m < full.size(); ++m) beyond += full[m];
  out.tail_bound = beyond + pairs.tail_bound;
  if (include_no_herald) {
    out.probs[0] += std::pow(1.0 - alpha, static_cast<double>(params.slots));
  }
  return out;
}

double herald_probability(const MuxParams& params) {
  params.validate();
  const double alpha = herald_alpha(params.source, params.det, params.truncation_tol);
  return 1.0 - std::pow(1.0 - alpha, static_cast<double>(params.slots));
}

double heralding_rate(const MuxParams& params, double rep_rate_hz) {
  if (!(rep_rate_hz > 0.0)) throw ParameterError("repetition rate must be > 0");
  return rep_rate_hz * herald_probability(params);
}

double g2_from_distribution(const PhotonNumberDistribution& dist) {
  double mass = 0.0;
  double first = 0.0;
  double second = 0.0;
  for (std::size_t m = 0; m < dist.probs.size(); ++m) {
    const auto md = static_cast<double>(m);
    mass += dist.probs[m];
    first += md * dist.probs[m];
    second += md * (md - 1.0) * dist.probs[m];
  }
  if (!(first > 0.0)) throw UndefinedValueError("g2 undefined: distribution has zero mean photon number");
  return second * mass / (first * first);
}

double n_max_closed_form(double alpha, double cavity_pass) {
  if (!(alpha > 0.0 && alpha < 1.0) || !(cavity_pass > 0.0 && cavity_pass < 1.0)) {
    throw UndefinedValueError("closed-form N_max needs 0 < alpha < 1 and 0 < T_c < 1");
  }
  const double log_miss = std::log1p(-alpha);
  const double log_tc = std::log(cavity_pass);
  const double denom = log_tc - log_miss;
  // Degenerate point 1 - alpha == T_c: the expression tends to -1 / log T_c.
  if (std::abs(denom) < 1e-12 * std::abs(log_tc)) return -1.0 / log_tc;
  return (std::log(-log_miss) - std::log(-log_tc)) / denom;
}

NMaxResult n_max(const MuxParams& params, std::int64_t n_cap) {
  if (params.strategy != StorageStrategy::EarliestBorn) {
    throw ParameterError("n_max is defined for the earliest-born strategy only");
  }
  if (n_cap < 1) throw ParameterError("n_cap must be >= 1");
  params.validate();

  NMaxResult result;
  const double alpha = herald_alpha(params.source, params.det, params.truncation_tol);
  result.closed_form = n_max_closed_form(alpha, params.path.cavity_pass);

  MuxParams scan = params;
  for (std::int64_t n = 1; n <= n_cap; ++n) {
    scan.slots = n;
    const double p1 = output_distribution(scan, 1)[1];
    if (p1 > result.p1_at_argmax) {
      result.p1_at_argmax = p1;
      result.exact_argmax = n;
    }
  }
  return result;
}

IdealOptimum ideal_nonmux_optimum(IdealFamily family) {
  PairSource src;
  src.statistics = family == IdealFamily::PoissonMixed ? PairStatistics::Poisson : PairStatistics::Thermal;
  auto objective = [&](double p) {
    src.mean_pairs = p;
    return pair_pmf(src, 1);
  };

  // Golden-section maximization; P(1) is unimodal in p for both families.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0.0;
  double b = 10.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = objective(c);
  double fd = objective(d);
  while (b - a > 1e-10) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = objective(d);
    }
  }
  IdealOptimum opt;
  opt.p_opt = 0.5 * (a + b);
  opt.p1 = objective(opt.p_opt);
  return opt;
}

}  // namespace muxphoton

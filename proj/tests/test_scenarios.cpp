#include <doctest.h>

#include <cmath>
#include <sstream>

#include "muxphoton/errors.hpp"
#include "muxphoton/scenarios.hpp"

using namespace muxphoton;

TEST_CASE("preset constants") {
  const auto c = preset("paper-p35-400ns");
  CHECK(c.sim.det.efficiency == 0.418);
  CHECK(c.sim.det.cascade_size == 4);
  CHECK(c.sim.path.cavity_pass == 0.970);
  CHECK(c.sim.source.mean_pairs == 0.35);
  CHECK(c.sim.source.schmidt_modes == 20);
  CHECK(c.sim.timing.look_ahead() == 33);
  CHECK(c.sim.rep_rate_hz == 50e3);
  CHECK(c.sim.path.pre_cavity_transmission() == doctest::Approx(0.70 * 0.846 * 0.924).epsilon(1e-15));

  CHECK(preset("paper-p35-200ns").sim.timing.look_ahead() == 9);
  CHECK(preset("paper-p07-200ns").sim.path.pre_cavity_factors.at("delay_line") == 0.893);
  CHECK(preset("paper-p07-400ns").sim.source.mean_pairs == 0.07);

  const auto eff = preset("table1-efficient");
  CHECK(eff.sim.source.mean_pairs == 0.1);
  CHECK(eff.sim.path.cavity_pass == 0.99);
  CHECK(eff.sim.path.pre_cavity_transmission() == 0.95);
  CHECK(eff.sim.det.efficiency == 0.90);
  CHECK(eff.sim.det.is_pnr());

  CHECK_THROWS_WITH_AS(preset("nope"), "unknown preset 'nope'", ParameterError);
  CHECK(preset_names().size() == 7);
}

TEST_CASE("output tap efficiency decomposition") {
  for (const auto& name : preset_names()) {
    const auto c = preset(name);
    const auto& t = c.sim.tap;
    CHECK(std::abs(t.system_efficiency() - t.splitter_transmission * t.coupling * t.detector_efficiency) <= 1e-12);
  }
  CHECK(std::abs(preset("paper-p35-400ns").sim.tap.system_efficiency() - 0.568) < 5e-4);
}

TEST_CASE("config JSON round trip on every preset") {
  for (const auto& name : preset_names()) {
    CAPTURE(name);
    const auto c = preset(name);
    const auto text = config_to_json(c).dump();
    const auto back = config_from_json(nlohmann::json::parse(text));
    CHECK(back == c);
    CHECK(config_to_json(back).dump() == text);
  }
}

TEST_CASE("config JSON rejects malformed documents") {
  auto doc = nlohmann::json::parse(config_to_json(preset("paper-p35-400ns")).dump());
  auto bad_version = doc;
  bad_version["schema_version"] = 2;
  CHECK_THROWS_AS(config_from_json(bad_version), ParameterError);
  auto missing = doc;
  missing.erase("timing");
  CHECK_THROWS_AS(config_from_json(missing), ParameterError);
  auto wrong_type = doc;
  wrong_type["source"]["mean_pairs"] = "lots";
  CHECK_THROWS_AS(config_from_json(wrong_type), ParameterError);
  auto out_of_range = doc;
  out_of_range["detector"]["efficiency"] = 1.5;
  CHECK_THROWS_AS(config_from_json(out_of_range), ParameterError);
  auto bad_cascade = doc;
  bad_cascade["detector"]["cascade_size"] = "many";
  CHECK_THROWS_AS(config_from_json(bad_cascade), ParameterError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ParameterError);
}

TEST_CASE("sweep_n rows") {
  auto c = preset("paper-p35-400ns");
  c.n_cycles = 20'000;
  const auto rows = sweep_n(c, {1, 2, 30});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].slots == 1);
  CHECK(rows[0].error.empty());
  // N = 1 is the plain heralded source: H = R alpha.
  CHECK(rows[0].herald_rate_hz == doctest::Approx(50e3 * rows[0].alpha).epsilon(1e-12));
  CHECK(std::isfinite(rows[2].p_m1_mc));
  CHECK(rows[2].p_m1_analytic > rows[0].p_m1_analytic);

  const auto analytic_only = sweep_n(c, {5}, {.monte_carlo = false});
  CHECK(std::isnan(analytic_only[0].p_m1_mc));
  CHECK_THROWS_AS(sweep_n(c, {}), ParameterError);

  auto dark = c;
  dark.sim.source.mean_pairs = 0.0;
  const auto dark_rows = sweep_n(dark, {3});
  CHECK_FALSE(dark_rows[0].error.empty());
  CHECK(std::isnan(dark_rows[0].g2_analytic));
}

TEST_CASE("short delay line peaks in the mid teens") {
  auto c = preset("paper-p35-200ns");
  std::vector<std::int64_t> counts(40);
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] = static_cast<std::int64_t>(i) + 1;
  const auto rows = sweep_n(c, counts, {.monte_carlo = false});
  std::int64_t best = 0;
  double best_p = -1.0;
  for (const auto& r : rows) {
    if (r.p_m1_analytic > best_p) {
      best_p = r.p_m1_analytic;
      best = r.slots;
    }
  }
  CHECK(best >= 12);
  CHECK(best <= 18);
}

TEST_CASE("sweep CSV header is fixed") {
  std::ostringstream os;
  write_csv(os, sweep_table(sweep_n(preset("paper-p07-400ns"), {1}, {.monte_carlo = false})));
  const auto text = os.str();
  CHECK(text.substr(0, text.find('\n')) ==
        "N,alpha,H_hz,P_M1_analytic,P_M1_mc,P_M1_mc_true,g2_analytic,g2_mc,sigma_P_M1_mc,sigma_g2_mc,error");
}

TEST_CASE("table1 report") {
  const auto report = report_table1(0);
  REQUIRE(report.columns.size() == 4);
  CHECK(report.columns[0].p_m1 == doctest::Approx(std::exp(-1.0)).epsilon(1e-6));
  CHECK(report.columns[0].g2_analytic == 0.0);
  CHECK(report.columns[1].p_m1 == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(report.columns[3].p_m1 >= 0.80);
  CHECK(report.columns[3].g2_analytic <= 0.05);
  CHECK(std::isnan(report.columns[2].g2_mc));

  const auto with_mc = report_table1(100'000);
  CHECK(std::isfinite(with_mc.columns[2].g2_mc));
  CHECK(with_mc.columns[2].sigma_g2_mc > 0.0);
}

TEST_CASE("multi_photon_rate") {
  CHECK(multi_photon_rate(8, 0.8, 50e3) == doctest::Approx(std::pow(0.8, 8) * 50e3));
  CHECK(std::abs(multi_photon_rate(8, 0.8, 50e3) - 8389) < 1.0);
  CHECK(multi_photon_rate(1, 0.3, 50e3) == doctest::Approx(0.3 * 50e3));
  CHECK(multi_photon_rate(2, 0.5, 100) == doctest::Approx(25.0));
  CHECK_THROWS_AS(multi_photon_rate(0, 0.5, 100), ParameterError);
}

TEST_CASE("report formatting") {
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(std::nan("")) == "nan");
  Table t;
  t.columns = {"a", "b"};
  t.add_row({std::int64_t{1}, std::string("x,y")});
  std::ostringstream os;
  write_csv(os, t);
  CHECK(os.str() == "a,b\n1,\"x,y\"\n");
  CHECK_THROWS(t.add_row({std::int64_t{1}}));
  const auto j = to_json(t);
  CHECK(j[0]["b"] == "x,y");
}

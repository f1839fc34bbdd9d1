#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include <json.hpp>

#include "muxphoton/cli.hpp"

using muxphoton::cli::CliInvocation;
using muxphoton::cli::Format;
using muxphoton::cli::parse_args;
using muxphoton::cli::UsageError;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run_in_process(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  Result r;
  r.code = muxphoton::cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

// Runs the installed binary; stdout only.
Result run_binary(const std::string& args) {
  const std::string cmd = std::string(MUXPHOTON_CLI_PATH) + " " + args + " 2>/dev/null";
  Result r;
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
  REQUIRE(pipe);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe.get())) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe.release());
  r.code = WEXITSTATUS(status);
  return r;
}

std::string header_of(const std::string& csv) { return csv.substr(0, csv.find('\n')); }

}  // namespace

TEST_CASE("parse_args accepts the documented flags") {
  std::ostringstream help;
  const auto inv = parse_args({"simulate", "--preset", "paper-p07-400ns", "--n", "30", "--cycles", "1000", "--seed",
                               "42", "--strategy", "window", "--convention", "as-written", "--format", "json", "--out",
                               "x.json"},
                              help);
  CHECK(inv.subcommand == "simulate");
  CHECK(inv.preset == "paper-p07-400ns");
  CHECK(inv.slots == 30);
  CHECK(inv.cycles == 1000);
  CHECK(inv.seed == 42u);
  CHECK(inv.strategy == "window");
  CHECK(inv.convention == "as-written");
  CHECK(inv.format == Format::Json);
  CHECK(inv.out_path == "x.json");
}

TEST_CASE("usage errors") {
  std::ostringstream help;
  CHECK_THROWS_AS(parse_args({}, help), UsageError);
  CHECK_THROWS_AS(parse_args({"analytic", "--bogus", "1"}, help), UsageError);
  CHECK_THROWS_AS(parse_args({"analytic", "--format", "xml"}, help), UsageError);
  CHECK_THROWS_AS(parse_args({"analytic", "simulate"}, help), UsageError);
  CHECK_THROWS_AS(parse_args({"frobnicate"}, help), UsageError);
  CHECK(run_in_process({"analytic", "--bogus"}).code == 2);
  CHECK(run_in_process({}).code == 2);
  CHECK(run_in_process({"--help"}).code == 0);
}

TEST_CASE("presets subcommand lists the seven names") {
  const auto r = run_in_process({"presets"});
  CHECK(r.code == 0);
  CHECK(r.out ==
        "name\npaper-p35-400ns\npaper-p35-200ns\npaper-p07-400ns\npaper-p07-200ns\ntable1-efficient\n"
        "ideal-poisson\nideal-thermal\n");
}

TEST_CASE("analytic subcommand") {
  const auto r = run_in_process({"analytic", "--preset", "paper-p35-400ns", "--n", "30"});
  CHECK(r.code == 0);
  CHECK(header_of(r.out) ==
        "N,strategy,window,convention,alpha,herald_probability,H_hz,P_M0,P_M1,P_M2,P_M3,P_M4,P_M5,P_M6,tail_bound,g2");
  const auto j = run_in_process({"analytic", "--preset", "paper-p35-400ns", "--format", "json"});
  CHECK(j.code == 0);
  const auto doc = nlohmann::json::parse(j.out);
  CHECK(doc.is_array());
  CHECK(doc[0]["N"] == 30);
  CHECK(doc[0]["P_M1"].get<double>() > 0.3);
}

TEST_CASE("model errors exit 1 with a message") {
  const auto r = run_in_process({"analytic", "--preset", "no-such-preset"});
  CHECK(r.code == 1);
  CHECK(r.err.find("no-such-preset") != std::string::npos);
  CHECK(run_in_process({"analytic"}).code == 1);
  CHECK(run_in_process({"simulate", "--preset", "paper-p35-400ns", "--cycles", "0"}).code == 1);
}

TEST_CASE("simulate is reproducible through the binary") {
  const std::string args = "simulate --preset paper-p07-400ns --n 30 --cycles 1000000 --seed 42";
  const auto a = run_binary(args);
  const auto b = run_binary(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(header_of(a.out) ==
        "N,window,cycles,seed,heralds,s1,s2,c12,rep_rate_hz,H_hz,eta_Di,P_M1_est,sigma_P_M1,g2,sigma_g2,P_M0_true,"
        "P_M1_true,P_M2_true,P_M3_true,diagnostic");
  CHECK(run_binary("presets --bogus").code == 2);
  CHECK(run_binary("analytic --preset nope").code == 1);

  // Thread cap must not change results.
  const auto capped = run_binary(args + " | cat; MUXPHOTON_THREADS=1 " + std::string(MUXPHOTON_CLI_PATH) + " " + args);
  CHECK(capped.out == a.out + a.out);
}

TEST_CASE("--out writes the report and failures leave no file") {
  const auto dir = std::filesystem::temp_directory_path() / "muxphoton_cli_test";
  std::filesystem::create_directories(dir);
  const auto good = (dir / "sweep.csv").string();
  std::filesystem::remove(good);
  const auto r = run_in_process({"sweep", "--preset", "paper-p35-200ns", "--n", "5", "--cycles", "2000", "--out", good});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(good);
  std::string first;
  std::getline(in, first);
  CHECK(first == "N,alpha,H_hz,P_M1_analytic,P_M1_mc,P_M1_mc_true,g2_analytic,g2_mc,sigma_P_M1_mc,sigma_g2_mc,error");
  int lines = 1;
  for (std::string line; std::getline(in, line);) ++lines;
  CHECK(lines == 6);

  const auto bad = (dir / "bad.csv").string();
  std::filesystem::remove(bad);
  CHECK(run_in_process({"analytic", "--preset", "nope", "--out", bad}).code == 1);
  CHECK_FALSE(std::filesystem::exists(bad));
  CHECK_FALSE(std::filesystem::exists(bad + ".tmp"));
  CHECK(run_in_process({"presets", "--out", (dir / "missing" / "x.csv").string()}).code == 1);
}

TEST_CASE("config file input and other subcommands") {
  const auto dir = std::filesystem::temp_directory_path() / "muxphoton_cli_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "cfg.json").string();
  {
    std::ofstream f(path);
    f << R"({"schema_version":1,"source":{"mean_pairs":0.07,"statistics":"multimode","schmidt_modes":20},)"
         R"("detector":{"efficiency":0.418,"cascade_size":4,"herald_rule":"exactly-one"},)"
         R"("idler_path":{"pre_cavity_factors":{"x":0.5},"cavity_pass":0.97,"extra_output_passes":0},)"
         R"("timing":{"period_ns":8.33,"slots":10,"delay_ns":400,"latency_ns":120},)"
         R"("output_tap":{"splitter_transmission":0.9,"arm_split":0.5,"coupling":0.9,"detector_efficiency":0.7},)"
         R"("strategy":"last","convention":"no-herald-after","rep_rate_hz":50000,"truncation_tol":1e-12,)"
         R"("max_photons":3,"n_cycles":1000,"master_seed":7})";
  }
  const auto r = run_in_process({"analytic", "--config", path});
  CHECK(r.code == 0);
  CHECK(header_of(r.out) == "N,strategy,window,convention,alpha,herald_probability,H_hz,P_M0,P_M1,P_M2,P_M3,tail_bound,g2");

  const auto nm = run_in_process({"nmax", "--preset", "paper-p35-400ns"});
  CHECK(nm.code == 0);
  CHECK(header_of(nm.out) == "p,alpha,T_c,N_max_closed_form,N_max_scan,P_M1_at_max");

  const auto t1 = run_in_process({"table1", "--cycles", "0", "--format", "json"});
  CHECK(t1.code == 0);
  CHECK(nlohmann::json::parse(t1.out).size() == 4);
}

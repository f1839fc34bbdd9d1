#include "muxphoton/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include <CLI11.hpp>

#include "muxphoton/errors.hpp"
#include "muxphoton/scenarios.hpp"

namespace muxphoton::cli {

namespace {

const std::vector<std::string> kSubcommands = {"analytic", "simulate", "sweep", "table1", "nmax", "presets"};

struct Parser {
  CLI::App app{"Time-multiplexed heralded single-photon source model", "muxphoton"};
  CliInvocation inv;
  std::string format = "csv";

  Parser() {
    app.require_subcommand(1, 1);
    app.fallthrough();
    app.add_option("--preset", inv.preset, "Named parameter set (see `presets`)");
    app.add_option("--config", inv.config_path, "JSON config file")->check(CLI::ExistingFile);
    app.add_option("--n", inv.slots, "Number of multiplexed slots N (sweep: upper end of 1..N)")
        ->check(CLI::PositiveNumber);
    app.add_option("--cycles", inv.cycles, "Monte Carlo cycles (sweep: 0 disables Monte Carlo)")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--seed", inv.seed, "Master seed (default 0xC0FFEE)");
    app.add_option("--strategy", inv.strategy, "Storage strategy")->check(CLI::IsMember({"last", "earliest", "window"}));
    app.add_option("--convention", inv.convention, "Exponent convention of the last-born sum")
        ->check(CLI::IsMember({"no-herald-after", "as-written"}));
    app.add_option("--out", inv.out_path, "Write the report here instead of stdout");
    app.add_option("--format", format, "Report format")->check(CLI::IsMember({"csv", "json"}));

    app.add_subcommand("analytic", "Closed-form output distribution and derived scalars");
    app.add_subcommand("simulate", "Monte Carlo run with measured-style estimators");
    app.add_subcommand("sweep", "Analytic and Monte Carlo columns for N = 1..N");
    app.add_subcommand("table1", "Non-multiplexed vs multiplexed comparison");
    app.add_subcommand("nmax", "Optimal slot count for earliest-born storage");
    app.add_subcommand("presets", "List preset names");
  }
};

Config resolve_config(const CliInvocation& inv) {
  Config c;
  if (inv.config_path) {
    c = load_config(*inv.config_path);
  } else if (inv.preset) {
    c = preset(*inv.preset);
  } else {
    throw ParameterError("subcommand '" + inv.subcommand + "' needs --preset or --config");
  }
  if (inv.slots) c.sim.timing.slots = *inv.slots;
  if (inv.cycles) c.n_cycles = *inv.cycles;
  if (inv.seed) c.master_seed = *inv.seed;
  if (inv.strategy) c.sim.strategy = storage_strategy_from_string(*inv.strategy);
  if (inv.convention) c.convention = exponent_convention_from_string(*inv.convention);
  c.validate();
  return c;
}

Table build_report(const CliInvocation& inv) {
  const std::string& cmd = inv.subcommand;
  if (cmd == "presets") {
    Table t;
    t.columns = {"name"};
    for (const auto& name : preset_names()) t.add_row({name});
    return t;
  }
  if (cmd == "table1") {
    const std::int64_t cycles = inv.cycles.value_or(1'000'000);
    return report_table1(cycles, inv.seed.value_or(kDefaultSeed)).as_table();
  }

  const Config config = resolve_config(inv);
  if (cmd == "analytic") return analytic_table(config);
  if (cmd == "nmax") return n_max_table(config);
  if (cmd == "simulate") {
    if (config.n_cycles < 1) throw ParameterError("simulate needs --cycles >= 1");
    const auto stats = run_trials(config.sim, config.n_cycles, config.master_seed);
    return simulation_table(config, stats);
  }
  if (cmd == "sweep") {
    std::vector<std::int64_t> counts(static_cast<std::size_t>(config.sim.timing.slots));
    std::iota(counts.begin(), counts.end(), std::int64_t{1});
    SweepOptions options;
    options.monte_carlo = config.n_cycles > 0;
    return sweep_table(sweep_n(config, counts, options));
  }
  throw ParameterError("unknown subcommand '" + cmd + "'");
}

std::string render(const Table& table, Format format) {
  std::ostringstream os;
  if (format == Format::Json) {
    os << to_json(table).dump(2) << '\n';
  } else {
    write_csv(os, table);
  }
  return os.str();
}

// Writes via a sibling temporary and rename, so a failed run never leaves a
// truncated report at the destination.
void write_atomically(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open '" + tmp + "' for writing");
    f << content;
    f.flush();
    if (!f) {
      std::remove(tmp.c_str());
      throw std::runtime_error("write to '" + tmp + "' failed");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::remove(tmp.c_str());
    throw std::runtime_error("cannot move report to '" + path + "': " + ec.message());
  }
}

}  // namespace

CliInvocation parse_args(const std::vector<std::string>& args, std::ostream& help_out) {
  Parser p;
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    p.app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    help_out << p.app.help();
    p.inv.help_shown = true;
    return p.inv;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what(), p.app.help());
  }
  for (const auto* sub : p.app.get_subcommands()) p.inv.subcommand = sub->get_name();
  p.inv.format = p.format == "json" ? Format::Json : Format::Csv;
  return p.inv;
}

int main_run(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  if (inv.help_shown) return 0;
  try {
    const std::string content = render(build_report(inv), inv.format);
    if (inv.out_path) {
      write_atomically(*inv.out_path, content);
    } else {
      out << content;
      out.flush();
    }
    return 0;
  } catch (const std::exception& e) {
    err << "muxphoton " << inv.subcommand << ": " << e.what() << '\n';
    return 1;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CliInvocation inv;
  try {
    inv = parse_args(args, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << e.usage();
    return 2;
  }
  return main_run(inv, out, err);
}

}  // namespace muxphoton::cli

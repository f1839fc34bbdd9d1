#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace muxphoton::cli {

enum class Format { Csv, Json };

/// Bad command line; carries the usage text. Maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  UsageError(const std::string& what, std::string usage) : std::runtime_error(what), usage_(std::move(usage)) {}
  const std::string& usage() const { return usage_; }

 private:
  std::string usage_;
};

struct CliInvocation {
  std::string subcommand;
  std::optional<std::string> preset;
  std::optional<std::string> config_path;
  std::optional<std::int64_t> slots;
  std::optional<std::int64_t> cycles;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> strategy;
  std::optional<std::string> convention;
  std::optional<std::string> out_path;
  Format format = Format::Csv;
  bool help_shown = false;  ///< --help was handled; nothing to run
};

/// Parses argv. Throws UsageError for unknown flags, a missing or repeated
/// subcommand, or malformed values.
CliInvocation parse_args(const std::vector<std::string>& args, std::ostream& help_out);

/// Runs a parsed invocation, writing the report to `out` or to --out.
/// Returns 0 on success, 1 on a model or I/O error (message on `err`).
int main_run(const CliInvocation& invocation, std::ostream& out, std::ostream& err);

/// parse_args + main_run with exit-code mapping (2 for usage errors).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace muxphoton::cli

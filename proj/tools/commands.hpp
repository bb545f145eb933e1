#pragma once

#include "rvb/lattice.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace rvb::cli {

enum class OutputFormat { Json, Csv };

OutputFormat parse_format(const std::string& text);

/// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitResourceGuard = 3;

struct ExactArgs {
  int L = 4;
  std::string bc = "periodic";
  OutputFormat format = OutputFormat::Json;
  std::optional<std::string> output;
  unsigned threads = 0;
};

struct McArgs {
  int L = 0;
  std::string bc = "periodic";
  std::optional<std::uint64_t> seed;
  std::int64_t sweeps = 100000;
  int bins = 100;
  std::optional<std::int64_t> therm;
  double winding_fraction = 0.1;
  double worm_fraction = 0.01;
  bool allow_sector_freezing = false;
  int chains = 1;
  OutputFormat format = OutputFormat::Json;
  std::optional<std::string> output;
  std::optional<std::string> bins_csv;
  bool timestamp = true;
};

struct GasArgs {
  int N = 0;
  OutputFormat format = OutputFormat::Json;
  bool enumerate = true;
};

struct BoundArgs {
  double corr = 0.0;
  double err = 0.0;
  int z = 4;
  OutputFormat format = OutputFormat::Json;
};

struct FitArgs {
  std::string input;
  bool scan_l_min = true;
  OutputFormat format = OutputFormat::Json;
  std::optional<std::string> output;
};

// Each command writes data to `out` and diagnostics to `err`, and returns an
// exit code. Library exceptions are mapped by run_guarded.
int cmd_exact(const ExactArgs& args, std::ostream& out, std::ostream& err);
int cmd_mc(const McArgs& args, std::ostream& out, std::ostream& err);
int cmd_gas(const GasArgs& args, std::ostream& out, std::ostream& err);
int cmd_bound(const BoundArgs& args, std::ostream& out, std::ostream& err);
int cmd_fit(const FitArgs& args, std::ostream& out, std::ostream& err);

/// Full command line entry point (argv[0] is the program name).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rvb::cli

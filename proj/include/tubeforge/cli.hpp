#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "tubeforge/errors.hpp"

namespace tubeforge::cli {

enum class Spacing { Linear, Log };

struct GridSpec {
  double start = 0.0;
  double stop = 0.0;
  int count = 1;
  Spacing spacing = Spacing::Log;
};

/// "START:STOP:COUNT[:linear|log]". Throws Error(Validation) on malformed
/// input, non-positive endpoints or count < 1.
GridSpec parse_grid(const std::string& text);
std::vector<double> make_grid(const GridSpec& spec);

enum class OutputFormat { Csv, Json };

struct RunConfig {
  std::string config_path;
  std::string subcommand;
  std::optional<double> window;      // --T
  int pairs = 500;                   // --pairs
  std::optional<double> abscissa;    // --c
  std::optional<double> re_floor;    // --re-floor
  double eps = 0.0;                  // --eps
  std::string method = "both";       // --method
  std::string grid_text;             // --grid
  std::string output_path;           // --output, empty = stdout
  std::optional<OutputFormat> format;
  bool skip_validation = false;
  bool skip_monotonicity = false;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // selftest reported a failing criterion
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitResource = 4;

int exit_code(ErrorKind kind) noexcept;

/// Runs one invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace tubeforge::cli

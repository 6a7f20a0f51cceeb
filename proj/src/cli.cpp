#include "tubeforge/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "format.hpp"
#include "tubeforge/acceptance.hpp"
#include "tubeforge/config.hpp"
#include "tubeforge/direct.hpp"
#include "tubeforge/moran.hpp"
#include "tubeforge/tube_formula.hpp"

namespace tubeforge::cli {

using detail::fmt17;

namespace {

constexpr const char* kCsvHeader = "# tubeforge-csv v1";

[[noreturn]] void bad_usage(const std::string& what) { throw Error(ErrorKind::Validation, what); }

double parse_number(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double x = std::stod(text, &used);
    if (used != text.size() || !std::isfinite(x)) bad_usage("invalid " + what + ": " + text);
    return x;
  } catch (const std::logic_error&) {
    bad_usage("invalid " + what + ": " + text);
  }
}

SprayModel load_model(const RunConfig& cfg) {
  if (cfg.config_path.empty()) bad_usage("--config is required for '" + cfg.subcommand + "'");
  const SprayConfig config = load_spray_config(cfg.config_path);
  if (cfg.skip_validation) {
    return SprayModel{RatioList(config.ratios),
                      MonophaseGenerator(config.dimension, config.kappa, config.inradius,
                                         config.volume)};
  }
  return make_spray(config, ValidationOptions{!cfg.skip_monotonicity});
}

std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

// Tables are written either as versioned CSV or as a JSON array of objects
// with the same keys.
class Table {
 public:
  Table(OutputFormat format, std::vector<std::string> columns)
      : format_(format), columns_(std::move(columns)) {}

  void row(const std::vector<std::string>& cells) { rows_.push_back({cells, {}}); }
  void note(const std::string& key, double value, const std::string& message) {
    rows_.push_back({{fmt17(value)}, key + "=" + fmt17(value) + " error: " + message});
  }

  void write(std::ostream& out) const {
    if (format_ == OutputFormat::Csv) {
      out << kCsvHeader << '\n';
      for (std::size_t c = 0; c < columns_.size(); ++c) out << (c ? "," : "") << columns_[c];
      out << '\n';
      for (const auto& r : rows_) {
        if (!r.error.empty()) {
          out << "# " << r.error << '\n';
          continue;
        }
        for (std::size_t c = 0; c < r.cells.size(); ++c) out << (c ? "," : "") << r.cells[c];
        out << '\n';
      }
      return;
    }
    out << "[";
    for (std::size_t k = 0; k < rows_.size(); ++k) {
      const auto& r = rows_[k];
      out << (k ? ",\n " : "\n ") << "{";
      if (!r.error.empty()) {
        out << json_string(columns_[0]) << ": " << r.cells[0] << ", \"error\": "
            << json_string(r.error.substr(r.error.find("error: ") + 7)) << "}";
        continue;
      }
      for (std::size_t c = 0; c < r.cells.size(); ++c) {
        out << (c ? ", " : "") << json_string(columns_[c]) << ": " << r.cells[c];
      }
      out << "}";
    }
    out << (rows_.empty() ? "]\n" : "\n]\n");
  }

 private:
  struct Row {
    std::vector<std::string> cells;
    std::string error;
  };
  OutputFormat format_;
  std::vector<std::string> columns_;
  std::vector<Row> rows_;
};

std::string int_cell(long v) { return std::to_string(v); }

int cmd_validate(const RunConfig& cfg, std::ostream& out) {
  if (cfg.config_path.empty()) bad_usage("--config is required for 'validate'");
  const SprayConfig config = load_spray_config(cfg.config_path);
  const ValidationReport report = validate_spray(config, ValidationOptions{!cfg.skip_monotonicity});
  if (cfg.format.value_or(OutputFormat::Csv) == OutputFormat::Json) {
    out << "{\"passed\": " << (report.passed() ? "true" : "false") << ", \"issues\": [";
    for (std::size_t k = 0; k < report.issues.size(); ++k) {
      out << (k ? ", " : "") << "{\"code\": " << json_string(report.issues[k].code)
          << ", \"message\": " << json_string(report.issues[k].message) << "}";
    }
    out << "]}\n";
  } else if (report.passed()) {
    out << "PASS\n";
  } else {
    for (const auto& issue : report.issues) out << "FAIL " << issue.code << ": " << issue.message << '\n';
  }
  return report.passed() ? kExitOk : kExitConfig;
}

int cmd_dim(const RunConfig& cfg, std::ostream& out) {
  const SprayModel model = load_model(cfg);
  const SimilarityDimension d = similarity_dimension(model.ratios);
  Table table(cfg.format.value_or(OutputFormat::Csv), {"dimension", "residual", "iterations"});
  table.row({fmt17(d.value), fmt17(d.residual), int_cell(d.iterations)});
  table.write(out);
  return kExitOk;
}

int cmd_czeros(const RunConfig& cfg, std::ostream& out) {
  if (!cfg.window) bad_usage("czeros requires --T");
  const SprayModel model = load_model(cfg);
  const ZeroSearch search = find_complex_dimensions(model, *cfg.window, cfg.re_floor);
  Table table(cfg.format.value_or(OutputFormat::Json), {"re", "im", "multiplicity", "residual"});
  for (const auto& z : search.zeros) {
    table.row({fmt17(z.omega.real()), fmt17(z.omega.imag()), int_cell(z.multiplicity),
               fmt17(z.residual)});
  }
  table.write(out);
  return kExitOk;
}

void compare_cells(Table& table, const CompareRow& row) {
  if (!row.evaluation) {
    table.note("epsilon", row.epsilon, row.error);
    return;
  }
  const TubeEvaluation& ev = *row.evaluation;
  table.row({fmt17(ev.epsilon), fmt17(ev.direct), fmt17(ev.residues()), fmt17(ev.abs_error()),
             fmt17(ev.rel_error()), int_cell(ev.pairs_used), fmt17(ev.leakage.back())});
}

const std::vector<std::string> kCompareColumns = {"epsilon", "direct",    "residues",  "abs_err",
                                                  "rel_err", "pairs_used", "im_leakage"};

int cmd_tube(const RunConfig& cfg, std::ostream& out) {
  const SprayModel model = load_model(cfg);
  const OutputFormat format = cfg.format.value_or(OutputFormat::Csv);
  const double eps = cfg.eps;

  if (cfg.method == "direct") {
    Table table(format, {"epsilon", "direct"});
    table.row({fmt17(eps), fmt17(direct_tube_volume(model, eps))});
    table.write(out);
  } else if (cfg.method == "residues") {
    const TubeEvaluation ev = tube_volume_residues(model, eps, cfg.pairs, cfg.window);
    Table table(format, {"epsilon", "residues", "pairs_used", "im_leakage", "window"});
    table.row({fmt17(eps), fmt17(ev.residues()), int_cell(ev.pairs_used),
               fmt17(ev.leakage.back()), fmt17(ev.window)});
    table.write(out);
  } else if (cfg.method == "both") {
    const TubeEvaluation ev = tube_volume_residues(model, eps, cfg.pairs, cfg.window);
    Table table(format, kCompareColumns);
    compare_cells(table, CompareRow{eps, ev, {}});
    table.write(out);
  } else if (cfg.method == "invmellin") {
    const double c = cfg.abscissa.value_or(default_inversion_abscissa(model));
    const double half = cfg.window.value_or(200.0);
    Table table(format, {"epsilon", "invmellin", "c", "T"});
    table.row({fmt17(eps), fmt17(inverse_mellin_numeric(model, eps, c, half)), fmt17(c),
               fmt17(half)});
    table.write(out);
  } else {
    bad_usage("unknown method '" + cfg.method + "'");
  }
  return kExitOk;
}

int cmd_scan(const RunConfig& cfg, std::ostream& out) {
  if (cfg.grid_text.empty()) bad_usage("scan requires --grid START:STOP:COUNT[:linear|log]");
  const std::vector<double> grid = make_grid(parse_grid(cfg.grid_text));
  const SprayModel model = load_model(cfg);
  Table table(cfg.format.value_or(OutputFormat::Csv), kCompareColumns);
  for (const CompareRow& row : compare(model, grid, cfg.pairs, cfg.window)) compare_cells(table, row);
  table.write(out);
  return kExitOk;
}

int cmd_selftest(std::ostream& out) {
  const auto results = acceptance::run_all();
  acceptance::write_report(out, results);
  const bool ok = acceptance::all_passed(results);
  out << (ok ? "selftest passed\n" : "selftest FAILED\n");
  return ok ? kExitOk : kExitFailure;
}

int dispatch(const RunConfig& cfg, std::ostream& out) {
  if (cfg.subcommand == "validate") return cmd_validate(cfg, out);
  if (cfg.subcommand == "dim") return cmd_dim(cfg, out);
  if (cfg.subcommand == "czeros") return cmd_czeros(cfg, out);
  if (cfg.subcommand == "tube") return cmd_tube(cfg, out);
  if (cfg.subcommand == "scan") return cmd_scan(cfg, out);
  if (cfg.subcommand == "selftest") return cmd_selftest(out);
  bad_usage("unknown subcommand '" + cfg.subcommand + "'");
}

}  // namespace

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Convergence:
    case ErrorKind::BoundaryProximity:
      return kExitNumerical;
    case ErrorKind::Resource:
      return kExitResource;
    default:
      return kExitConfig;
  }
}

GridSpec parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream in(text);
  for (std::string piece; std::getline(in, piece, ':');) parts.push_back(piece);
  if (parts.size() != 3 && parts.size() != 4) bad_usage("grid must be START:STOP:COUNT[:linear|log]");

  GridSpec spec;
  spec.start = parse_number(parts[0], "grid start");
  spec.stop = parse_number(parts[1], "grid stop");
  const double count = parse_number(parts[2], "grid count");
  if (count < 1 || count != std::floor(count) || count > 1e7) bad_usage("grid count must be a positive integer");
  spec.count = static_cast<int>(count);
  if (parts.size() == 4) {
    if (parts[3] == "linear") {
      spec.spacing = Spacing::Linear;
    } else if (parts[3] == "log") {
      spec.spacing = Spacing::Log;
    } else {
      bad_usage("grid spacing must be 'linear' or 'log'");
    }
  }
  if (!(spec.start > 0.0 && spec.stop > 0.0)) bad_usage("grid endpoints must be positive");
  return spec;
}

std::vector<double> make_grid(const GridSpec& spec) {
  std::vector<double> grid;
  if (spec.count == 1) return {spec.start};
  for (int k = 0; k < spec.count; ++k) {
    const double t = static_cast<double>(k) / (spec.count - 1);
    grid.push_back(spec.spacing == Spacing::Linear
                       ? spec.start + t * (spec.stop - spec.start)
                       : std::exp(std::log(spec.start) + t * (std::log(spec.stop) - std::log(spec.start))));
  }
  grid.front() = spec.start;
  grid.back() = spec.stop;
  return grid;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Tube volumes of self-similar sprays: direct evaluation and residue tube formula"};
  app.require_subcommand(1);
  std::string format_text;
  app.add_option("--config", cfg.config_path, "Spray configuration (JSON)");
  app.add_option("--output", cfg.output_path, "Write results to this file instead of stdout");
  app.add_option("--format", format_text, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_flag("--skip-validation", cfg.skip_validation, "Do not validate the configuration");
  app.add_flag("--skip-monotonicity", cfg.skip_monotonicity,
               "Do not require V_G to be nondecreasing on (0, g]");

  app.add_subcommand("validate", "Check the spray configuration");
  app.add_subcommand("dim", "Similarity dimension D");
  auto* czeros = app.add_subcommand("czeros", "Complex dimensions with |Im| <= T (JSON)");
  czeros->add_option("--T", cfg.window, "Imaginary half-height of the window")->required();
  czeros->add_option("--re-floor", cfg.re_floor, "Left edge of the search window");

  auto* tube = app.add_subcommand("tube", "Tube volume at one eps");
  tube->add_option("--eps", cfg.eps, "Tube radius")->required();
  tube->add_option("--method", cfg.method, "direct|residues|both|invmellin")
      ->check(CLI::IsMember({"direct", "residues", "both", "invmellin"}));
  tube->add_option("--pairs", cfg.pairs, "Conjugate pairs in the residue sum")
      ->check(CLI::NonNegativeNumber);
  tube->add_option("--T", cfg.window,
                   "Zero window (residues) or integration half-length (invmellin, default 200)");
  tube->add_option("--c", cfg.abscissa, "Inversion abscissa, default (D+n)/2");

  auto* scan = app.add_subcommand("scan", "Direct vs residue comparison over an eps grid (CSV)");
  scan->add_option("--grid", cfg.grid_text, "START:STOP:COUNT[:linear|log]")->required();
  scan->add_option("--pairs", cfg.pairs, "Conjugate pairs in the residue sum")
      ->check(CLI::NonNegativeNumber);
  scan->add_option("--T", cfg.window, "Zero window");

  app.add_subcommand("selftest", "Run the built-in acceptance suite");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }
  cfg.subcommand = app.get_subcommands().front()->get_name();
  if (!format_text.empty()) cfg.format = format_text == "json" ? OutputFormat::Json : OutputFormat::Csv;

  try {
    std::ostringstream buffer;
    const int code = dispatch(cfg, buffer);
    if (cfg.output_path.empty()) {
      out << buffer.str();
    } else {
      std::ofstream file(cfg.output_path, std::ios::binary);
      if (!file) bad_usage("cannot write " + cfg.output_path);
      file << buffer.str();
    }
    return code;
  } catch (const Error& e) {
    err << "tubeforge: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return exit_code(e.kind());
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace tubeforge::cli

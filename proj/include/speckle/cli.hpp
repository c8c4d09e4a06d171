#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "speckle/ensemble.hpp"
#include "speckle/errors.hpp"

namespace speckle::cli {

class UsageError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

enum class Format { Csv, Json };

struct RunConfig {
  std::string command;
  std::string help;  ///< non-empty when --help was requested

  std::size_t channels = 50;
  std::size_t fed_modes = 0;  ///< 0 means N = M
  std::vector<double> s{2.0};
  std::vector<double> g{1.5};
  double alpha2 = 10000.0;
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  Formula formula = Formula::Exact;

  SweepAxis axis = SweepAxis::SqueezeG;
  std::vector<double> values;
  double loss = 0.0;
  std::vector<double> loss_grid;

  double c = 1.0;
  double epsilon = 0.01;
  std::size_t modes = 0;  ///< 0 picks every resolvable prolate mode
  std::size_t quad_order = 256;
  std::size_t q = 7;
  double step = 0.005;
  double extent = 2.0;
  std::vector<double> budgets;

  std::size_t cases = 500;

  double wavelength = 694e-9;
  double power = 1e-3;
  double duration = 1e-3;
  double focus_fraction = 0.01;

  std::string out;  ///< "-" writes to stdout
  Format format = Format::Csv;
};

/// Expands "a:b:step", "a:b:logN" and comma-separated mixtures of those and
/// plain numbers. Throws UsageError.
std::vector<double> parse_values(const std::string& text);

/// Throws UsageError naming the offending flag. SPECKLE_SEED, when set,
/// replaces --seed.
RunConfig parse_args(int argc, const char* const* argv);

/// Runs the command, writes its table and prints a one-line summary.
/// Returns 0, or 3 when oracle-check finds a case above tolerance. Module
/// errors propagate.
int execute(const RunConfig& config);

/// parse_args + execute with errors mapped to exit status 2 (usage) and 3
/// (numerical).
int run(int argc, const char* const* argv);

using Cell = std::variant<double, long long, unsigned long long, std::string>;

struct Table {
  std::string comment;  ///< written as a leading "# " line in CSV
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// The table a command would write, without touching the filesystem.
Table build_table(const RunConfig& config, std::string* summary = nullptr,
                  bool* ok = nullptr);

std::string to_csv(const Table& table);
std::string to_json(const Table& table);

}  // namespace speckle::cli

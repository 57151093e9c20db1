#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "ccm/control_path.hpp"
#include "ccm/cycle_decomp.hpp"
#include "ccm/potential.hpp"

namespace ccm::cli {

/// Malformed configuration or input file; maps to exit status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Format { Csv, Json };

struct RunConfig {
  PotentialField field = PotentialField::quadratic();
  std::string potential_kind = "quadratic";
  double delta0 = 1.0;
  std::uint64_t seed = 0;
  std::int64_t eval_budget = 1'000'000;
  Format format = Format::Csv;
  /// Empty means standard output.
  std::string output;
};

/// Parses a `cc1` configuration. Relative grid paths resolve against `base_dir`.
RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);

/// A JSON list of [x, y] pairs, or {"vertices": [...], "base": i}.
PolyLoop load_loop(const std::filesystem::path& path);

/// A JSON list of [s, alpha, beta] rows, or {"rows": [...], "mean_zero": b}.
ControlPair load_control(const std::filesystem::path& path);

}  // namespace ccm::cli

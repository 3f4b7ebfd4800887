#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "bhq/lattice.hpp"
#include "bhq/state.hpp"

namespace bhq::io {

enum class RunMode { Simulate, Analytic, Ed, Compare, Front };
enum class FrontDirection { Axis, Diagonal };

struct EdOptions {
  std::int64_t cutoff = 0;  // per-site occupation cap; 0 means no cap
  int krylov_m = 30;
  std::int64_t dense_budget = 6000;
};

struct FrontOptions {
  double theta = 1e-3;
  FrontDirection direction = FrontDirection::Axis;
};

struct RevivalOptions {
  double window = 10.0;  // rolling window, units of 1/U
  double factor = 2.0;   // amplitude-over-plateau trigger
};

struct SnapshotOptions {
  std::string save;  // path to write the final state; empty = off
  std::string load;  // path to start from; empty = Mott initial state
};

// Fully resolved run configuration. Times (dt, t_final, revival.window) are
// physical; CSV output reports t*U and E/U so plots are U-independent.
struct RunConfig {
  RunMode mode = RunMode::Simulate;
  LatticeSpec lattice;
  double J_over_U = 0.1;
  double U = 1.0;
  int n_max = 3;
  int filling = 1;
  double dt = 0.01;
  double t_final = 0.0;
  int sample_stride = 10;
  PairLayout layout = PairLayout::TranslationInvariant;
  EdOptions ed;
  FrontOptions front;
  RevivalOptions revival;
  std::string compare_reference = "ed";  // or "analytic"
  SnapshotOptions snapshot;
  std::string output_dir = "out";
  std::uint64_t seed = 0;  // reserved; current pipelines are deterministic

  std::vector<std::string> warnings;  // filled by parse_config, not serialized

  double hopping() const { return J_over_U * U; }
};

// Carries every violation found, not just the first.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

// Parses and validates a JSON config document. Unknown keys are errors;
// every violation is collected into the thrown ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// Canonical serialization with all defaults resolved; parse(serialize(c))
// reproduces c exactly.
std::string serialize_config(const RunConfig& config);

// Applies one "dotted.path=value" assignment onto the raw JSON text of a
// config (before validation). Values are parsed as JSON when possible, with
// a bare comma list (e.g. "30,30") accepted for arrays; anything else is
// taken as a string.
std::string apply_override(const std::string& config_text, const std::string& assignment);

const char* mode_name(RunMode mode);

}  // namespace bhq::io

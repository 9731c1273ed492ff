#pragma once

// Subcommands of the rejectkit tool. Each returns a process exit code:
// 0 success, 2 usage error, 3 data error.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rejectkit/randomness.hpp"
#include "rejectkit/score_model.hpp"
#include "rejectkit/synthetic.hpp"

namespace rejectkit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;

// Environment variable naming a directory of <preset>.json spec files.
inline constexpr const char* kPresetDirEnv = "REJECTKIT_PRESET_DIR";

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SynthOptions {
  std::optional<std::string> preset;
  std::optional<std::filesystem::path> spec_path;
  std::optional<std::uint64_t> seed;
  std::optional<PartitionCounts> counts;
  std::filesystem::path out_dir;
};

struct LearnOptions {
  std::filesystem::path val;
  double delta = 0.05;
  ViabilityMethod method = ViabilityMethod::kBinomialCdf;
  bool calibrate = true;
  std::filesystem::path out;
};

struct EvalOptions {
  std::filesystem::path test;
  std::filesystem::path thresholds;
  std::optional<std::filesystem::path> mask;
  std::filesystem::path report;
  std::optional<std::filesystem::path> svg;
  std::optional<std::filesystem::path> class_csv;
  bool timestamp = true;
};

struct SweepOptions {
  std::filesystem::path val;
  std::filesystem::path test;
  std::vector<double> deltas;
  std::vector<ViabilityMethod> methods;
  std::optional<std::filesystem::path> val_mask;
  std::optional<std::filesystem::path> test_mask;
  std::filesystem::path out_dir;
  bool timestamp = true;
};

int cmd_synth(const SynthOptions& opts, std::ostream& out, std::ostream& err);
int cmd_learn(const LearnOptions& opts, std::ostream& out, std::ostream& err);
int cmd_eval(const EvalOptions& opts, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepOptions& opts, std::ostream& out, std::ostream& err);

// Parses argv and dispatches to a subcommand.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Scatter plot: selected points coloured by label, rejected points black.
std::string render_svg(const ScoreSet& set, const std::vector<bool>& rejected);

}  // namespace rejectkit::cli

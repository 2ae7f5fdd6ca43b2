#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "fbmdrift/config.h"

namespace fbmdrift::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kConfigError = 2, kNumericalError = 3 };

/// One resolved command. `options` holds the subcommand's inputs by key;
/// output locations are kept apart so a manifest replays into any place.
struct Invocation {
  std::string subcommand;  // fbm | sde | estimate | experiment | verify-frac-deriv
  KeyValues options;
  std::filesystem::path out;  // file (or directory for experiment); empty: stdout
  bool markdown = false;      // experiment only
  unsigned threads = 0;       // experiment only; 0: FBMDRIFT_THREADS or hardware
};

/// Applies defaults and rejects unknown or missing keys for `subcommand`.
KeyValues canonicalize(const std::string& subcommand, const KeyValues& options);

/// Runs the command. Data goes to `out` when no output path is given;
/// diagnostics go to `err`. Every written output gets a manifest next to it.
int run(const Invocation& invocation, std::ostream& out, std::ostream& err);

/// Re-runs the command recorded in a manifest, writing to `out_path`.
int replay(const std::filesystem::path& manifest, const std::filesystem::path& out_path, std::ostream& out,
           std::ostream& err);

}  // namespace fbmdrift::cli

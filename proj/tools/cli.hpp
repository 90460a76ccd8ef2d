#pragma once

#include <iosfwd>

namespace wls::cli {

/// Process exit codes of the wls tool.
enum ExitCode : int {
  kOk = 0,
  kInternal = 1,            // unexpected failure
  kUsage = 2,               // bad or missing flags
  kIo = 3,                  // unreadable/unwritable or malformed file
  kDimension = 4,           // operand shapes do not conform
  kRankDeficient = 5,       // A or A + UV^T failed the QR rank test
  kSingularCapacitance = 6, // A + UV^T lost rank (capacitance check)
  kNoConvergence = 7,       // CG backend missed its tolerance
  kSingular = 8,            // singular triangular factor
};

/// Entry point behind the wls executable. Normal output goes to out,
/// diagnostics (usage, one-line errors) to err.
int cli_main(int argc, const char* const* argv, std::ostream& out,
             std::ostream& err);

}  // namespace wls::cli

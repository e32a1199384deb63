#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace psfm::cli {

enum ExitCode : int { kPassed = 0, kCheckFailed = 1, kInputError = 2 };

struct RunConfig {
  double tol_rank = 1e-10;
  double tol_psd = 1e-10;
  double tol_verify = 1e-10;
  std::string alpha_spec = "dyadic";  // dyadic | geom:BASE | comma list
  std::string output;                 // empty: stdout
  std::uint64_t seed = 1;
  bool validate = true;
};

/// Full command line without the program name, e.g. {"dilate", "two_atom.json"}.
/// The report goes to `out` (or --output), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace psfm::cli

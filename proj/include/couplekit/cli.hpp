#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "couplekit/couple.hpp"

namespace couplekit {

// Exit codes of the command-line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitPropertyFailure = 1,
  kExitInputError = 2,
  kExitComputeError = 3,
  kExitUnsupported = 4,
};

// {"n": 3, "w0": [...], "w1": [...], "p0": 1, "p1": "inf",
//  "elements": {"a": [...], ...}}
struct CoupleFile {
  Couple couple;
  std::vector<std::pair<std::string, Vector>> elements;  // file order

  const Vector& element(const std::string& name) const;
};

// Throws InvalidArgument on malformed documents, unknown keys, or element
// lengths other than n.
CoupleFile parse_couple_file(const std::string& text);
CoupleFile load_couple_file(const std::string& path);
// Round-trips bit-exactly through parse_couple_file.
std::string emit_couple_file(const CoupleFile& file);
// FNV-1a of the emitted couple (elements excluded).
std::uint64_t couple_hash(const Couple& c);

// Entry point of the `couplekit` tool. Subcommands: k-curve, orbit, report.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace couplekit

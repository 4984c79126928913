#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace setzer {

enum class Err {
  BadResidue,         // u is not 1 mod 4 where a curve is required
  WrongSign,          // L(1) requested for odd sign, or L'(1) for even sign
  Precision,          // rounding gap too large after all retries
  NoConvergence,      // AGM failed to contract
  CorruptCheckpoint,  // scan file trailer is malformed
  EmptyInput,         // statistics reducer got no qualifying rows
  Io,                 // file could not be read or written
  Usage,              // bad argument to a library entry point
};

class SetzerError : public std::runtime_error {
 public:
  SetzerError(Err code, const std::string& what, std::int64_t u = 0)
      : std::runtime_error(what), code_(code), u_(u) {}

  Err code() const { return code_; }
  std::int64_t u() const { return u_; }  // offending u when applicable

 private:
  Err code_;
  std::int64_t u_;
};

}  // namespace setzer

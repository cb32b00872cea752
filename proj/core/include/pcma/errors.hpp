#ifndef PCMA_ERRORS_HPP
#define PCMA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pcma {

// Every failure mode the library reports deliberately.  CLI maps these to
// exit codes: config/usage problems -> 1, solver failures -> 2, verification
// failures -> 3.
enum class ErrorCode {
  ConfigError,       // bad config values, unknown keys, bad CLI usage
  ParseError,        // expression syntax errors (column-annotated)
  DomainError,       // evaluating log/^ outside the real domain
  EvenResolution,    // grids need an odd node count so the origin is a node
  GridTooSmall,
  GridMismatch,      // two fields on different grids
  NotPSH,            // iterate/data left the psh cone beyond the clamp budget
  NewtonDiverged,
  StepTooLarge,      // dt above the trust bound for the implicit step
  MollifierTooWide,  // smoothing radius reaches the boundary
  RadiiOutOfRange,   // Lelong radius window incompatible with grid/domain
  WrongRegime,       // a check stated for A=0 applied to A>0 (or similar)
  TimeOutOfRange,
  AIsZero,           // rescaling needs A > 0
  QuadratureNotConverged,
  GramNotPD,
  BadMagic,          // field file format errors
  VersionMismatch,
  TruncatedFile,
  IoError,
  VerificationFailed,
  InvalidArgument,   // generic precondition violation
};

const char* to_string(ErrorCode c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

inline void require(bool ok, ErrorCode code, const std::string& msg) {
  if (!ok) fail(code, msg);
}

}  // namespace pcma

#endif

#pragma once

#include <stdexcept>
#include <string>

namespace gtf {

// Error taxonomy shared across modules. Everything user-facing derives from
// Error so the CLI can map any library failure to exit code 1.
enum class ErrorCode {
  IndexOutOfRange,
  SelfLoop,
  DuplicateEdge,
  DimensionMismatch,
  InvalidParameter,
  UnsupportedOrder,
  WeightedGraph,
  NotAChain,
  TooLarge,
  Disconnected,
  NotUnitNorm,
  FileNotFound,
  ParseError,
  IllConditioned,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace gtf

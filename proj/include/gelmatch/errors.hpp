#pragma once

#include <stdexcept>
#include <string>

namespace gelmatch {

// Error families map 1:1 onto the CLI exit codes documented in the README.
enum class ErrorKind {
  parse = 2,       // malformed input files
  degenerate = 3,  // singular / insufficient / collinear geometry, invalid region
  infeasible = 4,  // no feasible matching, too few matched pairs
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }
  int exit_code() const { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

struct ParseError : Error {
  explicit ParseError(const std::string& msg) : Error(ErrorKind::parse, msg) {}
};

struct DegenerateError : Error {
  explicit DegenerateError(const std::string& msg) : Error(ErrorKind::degenerate, msg) {}
};

struct InfeasibleError : Error {
  explicit InfeasibleError(const std::string& msg) : Error(ErrorKind::infeasible, msg) {}
};

}  // namespace gelmatch

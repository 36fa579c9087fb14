#pragma once

#include <stdexcept>
#include <string>

namespace pathprob {

enum class ErrorKind { usage = 1, numeric = 2, invariant = 3 };

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

// bad arguments, malformed input files, violated preconditions
struct UsageError : Error {
  explicit UsageError(const std::string& what) : Error(ErrorKind::usage, what) {}
};

// guards, non-convergence, degenerate estimators
struct NumericError : Error {
  explicit NumericError(const std::string& what) : Error(ErrorKind::numeric, what) {}
};

struct InvariantError : Error {
  explicit InvariantError(const std::string& what) : Error(ErrorKind::invariant, what) {}
};

} // namespace pathprob

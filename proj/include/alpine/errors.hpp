#pragma once

#include <stdexcept>
#include <string>

namespace alpine {

// Exit-code mapping used by the CLI: usage 2, data 3, numeric 4.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Violated API precondition (caller bug or stale snapshot).
struct ContractViolation : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace alpine

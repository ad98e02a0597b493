#pragma once

#include <stdexcept>
#include <string>

namespace hsdiff {

// Error taxonomy used across the library. The CLI maps all of these to
// exit code 2 except DivergenceError, which exits 3.
struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Caller broke an explicit API contract (e.g. nonzero z at t = 1).
struct ContractError : std::logic_error {
  using std::logic_error::logic_error;
};

// File does not match the expected container layout (bad magic, bad header).
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Header and payload disagree (truncated or padded file).
struct CorruptError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Data violates a value invariant (NaN/Inf payload, invalid range).
struct ValueError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Training loss became non-finite.
struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Result is mathematically undefined for the given input.
struct UndefinedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace hsdiff

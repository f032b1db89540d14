#pragma once

#include <stdexcept>
#include <string>

namespace sacrc {

/// Failure categories shared by every module.
enum class Errc {
  kInvalidArgument,
  kDimensionMismatch,
  kInvalidPartition,
  kNotNormalized,
  kSingularGram,
  kInvalidSparsity,
  kDegenerateSum,
  kZeroVector,
  kZeroSample,
  kParseError,
  kEmptyDataset,
  kIo,
  kEmptyGrid,
  kTooFewClasses,
  kInfeasibleGeometry,
};

const char* to_string(Errc code) noexcept;

/// Process exit code for an error escaping the CLI: 1 usage, 2 data, 3 numerical.
int exit_code(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace sacrc

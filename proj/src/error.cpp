#include "sacrc/error.hpp"

namespace sacrc {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::kInvalidArgument: return "InvalidArgument";
    case Errc::kDimensionMismatch: return "DimensionMismatch";
    case Errc::kInvalidPartition: return "InvalidPartition";
    case Errc::kNotNormalized: return "NotNormalized";
    case Errc::kSingularGram: return "SingularGram";
    case Errc::kInvalidSparsity: return "InvalidSparsity";
    case Errc::kDegenerateSum: return "DegenerateSum";
    case Errc::kZeroVector: return "ZeroVector";
    case Errc::kZeroSample: return "ZeroSample";
    case Errc::kParseError: return "ParseError";
    case Errc::kEmptyDataset: return "EmptyDataset";
    case Errc::kIo: return "IoError";
    case Errc::kEmptyGrid: return "EmptyGrid";
    case Errc::kTooFewClasses: return "TooFewClasses";
    case Errc::kInfeasibleGeometry: return "InfeasibleGeometry";
  }
  return "Unknown";
}

int exit_code(Errc code) noexcept {
  switch (code) {
    case Errc::kInvalidArgument:
    case Errc::kInvalidSparsity:
    case Errc::kEmptyGrid:
      return 1;
    case Errc::kSingularGram:
    case Errc::kDegenerateSum:
    case Errc::kZeroVector:
    case Errc::kInfeasibleGeometry:
      return 3;
    default:
      return 2;
  }
}

}  // namespace sacrc

#include "su11/errors.hpp"

namespace su11 {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DarkFringe: return "DarkFringe";
    case ErrorCode::StationaryPoint: return "StationaryPoint";
    case ErrorCode::Leakage: return "Leakage";
    case ErrorCode::ZeroProbability: return "ZeroProbability";
    case ErrorCode::Normalization: return "Normalization";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::Inconsistent: return "Inconsistent";
  }
  return "Unknown";
}

}  // namespace su11

#include "photonpol/error.hpp"

namespace photonpol {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NotDensityMatrix: return "NotDensityMatrix";
    case ErrorCode::InvalidDirection: return "InvalidDirection";
    case ErrorCode::InvalidVelocity: return "InvalidVelocity";
    case ErrorCode::GridUnderflow: return "GridUnderflow";
    case ErrorCode::DegenerateDirection: return "DegenerateDirection";
    case ErrorCode::SameAxis: return "SameAxis";
    case ErrorCode::UnsupportedPolarization: return "UnsupportedPolarization";
    case ErrorCode::NoAmplitudeProfile: return "NoAmplitudeProfile";
    case ErrorCode::ProfileNotNormalized: return "ProfileNotNormalized";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace photonpol
